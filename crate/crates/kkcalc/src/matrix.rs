//! Dense integer matrices with exact arithmetic: Smith normal form,
//! kernels, and integer linear system solving.
//!
//! Entries are arbitrary-precision integers throughout; intermediate
//! values in a Smith reduction can outgrow any fixed-width type even
//! when the inputs are single digits. All routines are deterministic:
//! the pivot rule is fixed (smallest magnitude, ties by lowest row then
//! lowest column), so identical inputs produce bit-identical outputs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  [")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(r, c))?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        IntMatrix { rows, cols, data }
    }

    /// Convenience constructor from machine integers (tests, small inputs).
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| BigInt::from(rows[i][j]))
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(ambient: usize, cols: &[Vec<BigInt>]) -> Self {
        assert!(cols.iter().all(|v| v.len() == ambient), "bad column length");
        Self::from_fn(ambient, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> Vec<BigInt> {
        (0..self.cols).map(|c| self.at(r, c).clone()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a * other.at(k, j);
                    *out.at_mut(i, j) += t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|i| {
                let mut acc = BigInt::zero();
                for j in 0..self.cols {
                    acc += self.at(i, j) * &v[j];
                }
                acc
            })
            .collect()
    }

    /// Stacks `self` on top of `other` (same column count).
    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols, "dimension mismatch in vstack");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Places `self` and `other` side by side (same row count).
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows, "dimension mismatch in hstack");
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.at(i, j).clone()
            } else {
                other.at(i, j - self.cols).clone()
            }
        })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] -= q * row[src]
    fn row_sub_mul(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let t = q * self.at(src, c);
            *self.at_mut(dst, c) -= t;
        }
    }

    /// col[dst] -= q * col[src]
    fn col_sub_mul(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let t = q * self.at(r, src);
            *self.at_mut(r, dst) -= t;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self.at(r, c).clone();
            *self.at_mut(r, c) = v;
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.at(k, k).is_zero() {
                let pivot = (k + 1..n).find(|&r| !a.at(r, k).is_zero());
                match pivot {
                    Some(r) => {
                        a.swap_rows(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j);
                    let (q, r) = num.div_rem(&prev);
                    debug_assert!(r.is_zero(), "Bareiss division must be exact");
                    *a.at_mut(i, j) = q;
                }
                *a.at_mut(i, k) = BigInt::zero();
            }
            prev = a.at(k, k).clone();
        }
        sign * a.at(n - 1, n - 1).clone()
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.determinant().abs().is_one()
    }

    /// Inverse of a square integer matrix, when it exists over the
    /// integers (i.e. the matrix is unimodular).
    pub fn inverse(&self) -> Option<IntMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let snf = self.smith_normal_form();
        let mut cols = Vec::with_capacity(self.cols);
        for i in 0..self.cols {
            let mut e = vec![BigInt::zero(); self.rows];
            e[i] = BigInt::one();
            let sol = solve_with_snf(self, &snf, &e)?;
            cols.push(sol);
        }
        Some(IntMatrix::from_columns(self.cols, &cols))
    }

    pub fn smith_normal_form(&self) -> SmithNormalForm {
        smith_normal_form(self)
    }

    /// A basis of the integer kernel `{x : Mx = 0}` (columns of V at
    /// the zero diagonal slots of the Smith form).
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        let snf = self.smith_normal_form();
        kernel_from_snf(self, &snf)
    }

    pub fn solve(&self, rhs: &[BigInt]) -> Option<IntSolution> {
        solve_integer(self, rhs)
    }
}

/// Decomposition `U * M * V = D` with `U`, `V` unimodular and `D`
/// diagonal, diagonal entries nonnegative and divisibility-sorted
/// (`d1 | d2 | ...`, zeros trailing).
#[derive(Clone, Debug)]
pub struct SmithNormalForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithNormalForm {
    pub fn rank(&self) -> usize {
        let n = self.d.rows().min(self.d.cols());
        (0..n).filter(|&i| !self.d.at(i, i).is_zero()).count()
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d.at(i, i).clone()).collect()
    }
}

/// Position of the smallest-magnitude nonzero entry of `m[k.., k..]`,
/// ties broken by lowest row then lowest column.
fn select_pivot(m: &IntMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut best_abs = BigInt::zero();
    for i in k..m.rows() {
        for j in k..m.cols() {
            let v = m.at(i, j);
            if v.is_zero() {
                continue;
            }
            let a = v.abs();
            if best.is_none() || a < best_abs {
                best = Some((i, j));
                best_abs = a;
            }
        }
    }
    best
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithNormalForm {
    let rows = m.rows();
    let cols = m.cols();
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let bound = rows.min(cols);

    let mut k = 0;
    while k < bound {
        let Some((pi, pj)) = select_pivot(&d, k) else {
            break;
        };
        d.swap_rows(k, pi);
        u.swap_rows(k, pi);
        d.swap_cols(k, pj);
        v.swap_cols(k, pj);

        'reduce: loop {
            // Clear the pivot column. A nonzero remainder becomes the
            // new, strictly smaller pivot.
            for i in k + 1..rows {
                if d.at(i, k).is_zero() {
                    continue;
                }
                let q = d.at(i, k).div_rem(d.at(k, k)).0;
                d.row_sub_mul(i, k, &q);
                u.row_sub_mul(i, k, &q);
                if !d.at(i, k).is_zero() {
                    d.swap_rows(i, k);
                    u.swap_rows(i, k);
                    continue 'reduce;
                }
            }
            // Clear the pivot row.
            for j in k + 1..cols {
                if d.at(k, j).is_zero() {
                    continue;
                }
                let q = d.at(k, j).div_rem(d.at(k, k)).0;
                d.col_sub_mul(j, k, &q);
                v.col_sub_mul(j, k, &q);
                if !d.at(k, j).is_zero() {
                    d.swap_cols(j, k);
                    v.swap_cols(j, k);
                    continue 'reduce;
                }
            }
            // Column clearing may have dirtied the row and vice versa.
            let col_clear = (k + 1..rows).all(|i| d.at(i, k).is_zero());
            let row_clear = (k + 1..cols).all(|j| d.at(k, j).is_zero());
            if !col_clear || !row_clear {
                continue 'reduce;
            }
            // The pivot must divide every remaining entry; if not, pull
            // the offending row in and reduce again.
            for i in k + 1..rows {
                for j in k + 1..cols {
                    if !d.at(i, j).mod_floor(d.at(k, k)).is_zero() {
                        let one = BigInt::one();
                        d.row_sub_mul(k, i, &-&one);
                        u.row_sub_mul(k, i, &-&one);
                        continue 'reduce;
                    }
                }
            }
            break;
        }
        if d.at(k, k).is_negative() {
            d.negate_row(k);
            u.negate_row(k);
        }
        k += 1;
    }
    SmithNormalForm { u, d, v }
}

#[derive(Clone, Debug)]
pub struct IntSolution {
    pub particular: Vec<BigInt>,
    pub kernel_basis: Vec<Vec<BigInt>>,
}

fn kernel_from_snf(m: &IntMatrix, snf: &SmithNormalForm) -> Vec<Vec<BigInt>> {
    let bound = m.rows().min(m.cols());
    let mut basis = Vec::new();
    for j in 0..m.cols() {
        if j >= bound || snf.d.at(j, j).is_zero() {
            basis.push(snf.v.column(j));
        }
    }
    basis
}

fn solve_with_snf(m: &IntMatrix, snf: &SmithNormalForm, rhs: &[BigInt]) -> Option<Vec<BigInt>> {
    let ub = snf.u.mul_vec(rhs);
    let bound = m.rows().min(m.cols());
    let mut y = vec![BigInt::zero(); m.cols()];
    for i in 0..m.rows() {
        if i < bound && !snf.d.at(i, i).is_zero() {
            let (q, r) = ub[i].div_rem(snf.d.at(i, i));
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ub[i].is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&y))
}

/// Solves `M x = rhs` over the integers. Returns one particular
/// solution together with a basis of `ker M`, or `None` when the
/// system has no integer solution.
pub fn solve_integer(m: &IntMatrix, rhs: &[BigInt]) -> Option<IntSolution> {
    assert_eq!(m.rows(), rhs.len(), "rhs length must equal row count");
    let snf = m.smith_normal_form();
    let particular = solve_with_snf(m, &snf, rhs)?;
    Some(IntSolution {
        particular,
        kernel_basis: kernel_from_snf(m, &snf),
    })
}

pub fn vec_from_i64(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
