//! Generalized dimension drop interval algebras and their K-theory.
//!
//! A block `(r, m0, m, m1)` stands for `M_r(I[m0,m,m1])`, the algebra of
//! `M_m`-valued functions on `[0,1]` whose endpoint values are inflated
//! from `M_{m0}` and `M_{m1}`, amplified by `r`. Since
//! `M_r(I[m0,m,m1]) = I[r m0, r m, r m1]`, all K-theoretic data is
//! derived from the short exact sequence over the open interval, whose
//! index map on `Z + Z` is the row `(m/m0, -m/m1)`.

use crate::group::{FgGroup, GroupHom};
use crate::matrix::IntMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("block parameters must be positive, got (r={r}, m0={m0}, m={m}, m1={m1})")]
    NonPositive { r: u64, m0: u64, m: u64, m1: u64 },
    #[error("endpoint size {divisor} does not divide fiber size {m}")]
    Divisibility { divisor: u64, m: u64 },
    #[error("a direct sum needs at least one summand")]
    EmptySum,
}

/// The block `M_r(I[m0,m,m1])` with `m0 | m` and `m1 | m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DimDropBlock {
    r: u64,
    m0: u64,
    m: u64,
    m1: u64,
}

impl DimDropBlock {
    pub fn new(r: u64, m0: u64, m: u64, m1: u64) -> Result<Self, AlgebraError> {
        if r == 0 || m0 == 0 || m == 0 || m1 == 0 {
            return Err(AlgebraError::NonPositive { r, m0, m, m1 });
        }
        if !m.is_multiple_of(m0) {
            return Err(AlgebraError::Divisibility { divisor: m0, m });
        }
        if !m.is_multiple_of(m1) {
            return Err(AlgebraError::Divisibility { divisor: m1, m });
        }
        Ok(DimDropBlock { r, m0, m, m1 })
    }

    /// The classical block `I(1, p, p, 1)`, i.e. the unitized dimension
    /// drop algebra with drop `p` at both ends.
    pub fn classical(p: u64) -> Result<Self, AlgebraError> {
        Self::new(1, 1, p, 1)
    }

    pub fn r(&self) -> u64 {
        self.r
    }
    pub fn m0(&self) -> u64 {
        self.m0
    }
    pub fn m(&self) -> u64 {
        self.m
    }
    pub fn m1(&self) -> u64 {
        self.m1
    }

    /// `m / m0`: multiplicity of the left endpoint inflation.
    pub fn alpha(&self) -> u64 {
        self.m / self.m0
    }

    /// `m / m1`: multiplicity of the right endpoint inflation.
    pub fn beta(&self) -> u64 {
        self.m / self.m1
    }

    /// Order of K1: `gcd(m/m0, m/m1)`. Independent of `r`.
    pub fn k1_order(&self) -> u64 {
        self.alpha().gcd(&self.beta())
    }

    /// Endpoint ranks `(g0, g1)` of the K0 generator: the primitive
    /// solution of `(m/m0) g0 = (m/m1) g1`.
    pub fn k0_generator_ranks(&self) -> (u64, u64) {
        let p = self.k1_order();
        (self.beta() / p, self.alpha() / p)
    }

    /// The coefficient `u` with `[1] = u * generator` in K0, equal to
    /// `r * gcd(m0, m1)`.
    pub fn unit_coefficient(&self) -> u64 {
        self.r * self.m0.gcd(&self.m1)
    }

    /// Endpoint ranks of the unit: `(r m0, r m1)`.
    pub fn unit_ranks(&self) -> (u64, u64) {
        (self.r * self.m0, self.r * self.m1)
    }

    /// The same algebra with the amplification folded into the sizes.
    pub fn amplified(&self) -> DimDropBlock {
        DimDropBlock {
            r: 1,
            m0: self.r * self.m0,
            m: self.r * self.m,
            m1: self.r * self.m1,
        }
    }
}

/// A finite direct sum of dimension drop blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectSumAlgebra {
    summands: Vec<DimDropBlock>,
}

impl DirectSumAlgebra {
    pub fn new(summands: Vec<DimDropBlock>) -> Result<Self, AlgebraError> {
        if summands.is_empty() {
            return Err(AlgebraError::EmptySum);
        }
        Ok(DirectSumAlgebra { summands })
    }

    pub fn single(block: DimDropBlock) -> Self {
        DirectSumAlgebra {
            summands: vec![block],
        }
    }

    pub fn summands(&self) -> &[DimDropBlock] {
        &self.summands
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn block(&self, i: usize) -> &DimDropBlock {
        &self.summands[i]
    }
}

/// Checks divisibility and positivity of raw tuples and returns the
/// normalized algebra.
pub fn validate_algebra(raw: &[(u64, u64, u64, u64)]) -> Result<DirectSumAlgebra, AlgebraError> {
    let summands = raw
        .iter()
        .map(|&(r, m0, m, m1)| DimDropBlock::new(r, m0, m, m1))
        .collect::<Result<Vec<_>, _>>()?;
    DirectSumAlgebra::new(summands)
}

/// The positive cone of K0 of a block: nonnegative multiples of the
/// generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PositiveCone;

impl PositiveCone {
    pub fn description(&self) -> &'static str {
        "nonnegative multiples of generator"
    }

    pub fn contains(&self, coefficient: &BigInt) -> bool {
        !coefficient.is_negative()
    }
}

/// The scale: the order interval `[0, [1]]` in K0, as generator
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scale {
    pub upper: BigInt,
}

impl Scale {
    pub fn contains(&self, coefficient: &BigInt) -> bool {
        !coefficient.is_negative() && coefficient <= &self.upper
    }
}

#[derive(Clone, Debug)]
pub struct BlockKTheory {
    pub k0: FgGroup,
    pub k1: FgGroup,
    pub k0_generator_endpoint_ranks: (u64, u64),
    pub unit_coefficient: u64,
    pub k1_order: u64,
    pub positive_cone: PositiveCone,
    pub scale: Scale,
}

#[derive(Clone, Debug)]
pub struct KTheoryData {
    pub blocks: Vec<BlockKTheory>,
}

/// K-theory of every summand: K0 = Z ordered by the generator with the
/// stated endpoint ranks, K1 cyclic of order `gcd(m/m0, m/m1)`.
pub fn k_theory(algebra: &DirectSumAlgebra) -> KTheoryData {
    let blocks = algebra
        .summands()
        .iter()
        .map(|b| {
            let p = b.k1_order();
            BlockKTheory {
                k0: FgGroup::free(1),
                k1: FgGroup::cyclic(p),
                k0_generator_endpoint_ranks: b.k0_generator_ranks(),
                unit_coefficient: b.unit_coefficient(),
                k1_order: p,
                positive_cone: PositiveCone,
                scale: Scale {
                    upper: BigInt::from(b.unit_coefficient()),
                },
            }
        })
        .collect();
    KTheoryData { blocks }
}

/// K-theory with coefficients in `Z_n` for one block, presented from
/// the mapping cone of multiplication by `n` applied to the two-term
/// complex `Z+Z -> Z` with row `(alpha, -beta)`:
///
/// * `K0(.;Z_n)` is the lattice `L = {(x,y) : alpha x - beta y = 0 mod n}`
///   modulo `n Z^2`, presented in a fixed basis of `L`;
/// * `K1(.;Z_n)` is `Z / (p, n)`.
///
/// No splitting of the coefficient sequence is assumed anywhere.
#[derive(Clone, Debug)]
pub struct CoefficientGroups {
    pub n: u64,
    /// Columns form the basis of the lattice `L` above.
    pub basis: IntMatrix,
    pub k0n: FgGroup,
    pub k1n: FgGroup,
    /// Reduction `K0 -> K0(.;Z_n)`.
    pub rho0: GroupHom,
    /// Bockstein `K0(.;Z_n) -> K1`.
    pub beta0: GroupHom,
    /// Reduction `K1 -> K1(.;Z_n)`.
    pub rho1: GroupHom,
    /// Bockstein `K1(.;Z_n) -> K0` (zero for these blocks).
    pub beta1: GroupHom,
}

/// Coefficient transformations for `n | np` (both in the configured
/// set): reduction maps `K(.;Z_np) -> K(.;Z_n)` and multiplication maps
/// `K(.;Z_n) -> K(.;Z_np)`.
#[derive(Clone, Debug)]
pub struct CoefficientTransform {
    pub n: u64,
    pub np: u64,
    pub red0: GroupHom,
    pub red1: GroupHom,
    pub mul0: GroupHom,
    pub mul1: GroupHom,
}

#[derive(Clone, Debug)]
pub struct BlockTotalK {
    pub block: DimDropBlock,
    pub k0: FgGroup,
    pub k1: FgGroup,
    pub coefficients: Vec<CoefficientGroups>,
    pub transforms: Vec<CoefficientTransform>,
}

#[derive(Clone, Debug)]
pub struct TotalKModule {
    pub blocks: Vec<BlockTotalK>,
    pub coefficient_set: Vec<u64>,
}

/// Basis (as columns) of `{(x,y) : alpha x - beta y = 0 mod n}`.
pub(crate) fn coefficient_lattice_basis(alpha: u64, beta: u64, n: u64) -> IntMatrix {
    let row = IntMatrix::from_rows(&[vec![alpha as i64, -(beta as i64), -(n as i64)]]);
    let kernel = row.kernel_basis();
    assert_eq!(kernel.len(), 2, "coefficient lattice must have rank 2");
    let cols: Vec<Vec<BigInt>> = kernel.iter().map(|k| k[..2].to_vec()).collect();
    IntMatrix::from_columns(2, &cols)
}

/// Solves `basis * X = rhs` column by column; panics if the target
/// vectors do not lie in the lattice (they always do for the maps
/// built here).
fn in_basis_coords(basis: &IntMatrix, rhs: &IntMatrix) -> IntMatrix {
    let mut cols = Vec::with_capacity(rhs.cols());
    for j in 0..rhs.cols() {
        let sol = basis
            .solve(&rhs.column(j))
            .expect("vector must lie in the coefficient lattice");
        cols.push(sol.particular);
    }
    IntMatrix::from_columns(basis.cols(), &cols)
}

fn coefficient_groups_for(block: &DimDropBlock, n: u64) -> CoefficientGroups {
    assert!(n >= 1, "coefficient must be at least 1");
    let alpha = block.alpha() as i64;
    let beta = block.beta() as i64;
    let p = block.k1_order();
    let basis = coefficient_lattice_basis(block.alpha(), block.beta(), n);

    // Relations of L / nZ^2: coordinates of n e_1, n e_2 in the basis.
    let n_cols = IntMatrix::from_rows(&[vec![n as i64, 0], vec![0, n as i64]]);
    let rel_cols = in_basis_coords(&basis, &n_cols);
    let k0n = FgGroup::from_relations(2, rel_cols.transpose());

    let k1n = FgGroup::from_relations(
        1,
        IntMatrix::from_rows(&[vec![p as i64], vec![n as i64]]),
    );

    let k0 = FgGroup::free(1);
    let k1 = FgGroup::cyclic(p);

    // rho0: the K0 generator (g0, g1) lies in L; its basis coordinates
    // give the 2x1 matrix.
    let (g0, g1) = block.k0_generator_ranks();
    let gen_col = IntMatrix::from_rows(&[vec![g0 as i64], vec![g1 as i64]]);
    let rho0_matrix = in_basis_coords(&basis, &gen_col);
    let rho0 = GroupHom::new(k0.clone(), k0n.clone(), rho0_matrix)
        .expect("rho0 is well defined");

    // beta0: (x, y) in L maps to (alpha x - beta y) / n in Z / p.
    let beta0_matrix = IntMatrix::from_fn(1, 2, |_, j| {
        let num = BigInt::from(alpha) * basis.at(0, j) - BigInt::from(beta) * basis.at(1, j);
        let (q, rem) = num.div_rem(&BigInt::from(n));
        assert!(rem.is_zero(), "lattice vector must satisfy the congruence");
        q
    });
    let beta0 = GroupHom::new(k0n.clone(), k1.clone(), beta0_matrix)
        .expect("beta0 is well defined");

    let rho1 = GroupHom::new(k1.clone(), k1n.clone(), IntMatrix::identity(1))
        .expect("rho1 is well defined");
    let beta1 = GroupHom::new(k1n.clone(), k0, IntMatrix::zeros(1, 1))
        .expect("beta1 is well defined");

    CoefficientGroups {
        n,
        basis,
        k0n,
        k1n,
        rho0,
        beta0,
        rho1,
        beta1,
    }
}

fn transform_for(
    block: &DimDropBlock,
    low: &CoefficientGroups,
    high: &CoefficientGroups,
) -> CoefficientTransform {
    let _ = block;
    let (n, np) = (low.n, high.n);
    debug_assert!(np % n == 0);
    let ratio = (np / n) as i64;

    // Reduction: L_np is a sublattice of L_n; rewrite its basis.
    let red0_matrix = in_basis_coords(&low.basis, &high.basis);
    let red0 = GroupHom::new(high.k0n.clone(), low.k0n.clone(), red0_matrix)
        .expect("coefficient reduction is well defined");
    let red1 = GroupHom::new(high.k1n.clone(), low.k1n.clone(), IntMatrix::identity(1))
        .expect("coefficient reduction on K1 is well defined");

    // Multiplication by np/n maps L_n into L_np.
    let scaled = IntMatrix::from_fn(2, 2, |i, j| low.basis.at(i, j) * ratio);
    let mul0_matrix = in_basis_coords(&high.basis, &scaled);
    let mul0 = GroupHom::new(low.k0n.clone(), high.k0n.clone(), mul0_matrix)
        .expect("coefficient multiplication is well defined");
    let mul1 = GroupHom::new(
        low.k1n.clone(),
        high.k1n.clone(),
        IntMatrix::from_rows(&[vec![ratio]]),
    )
    .expect("coefficient multiplication on K1 is well defined");

    CoefficientTransform {
        n,
        np,
        red0,
        red1,
        mul0,
        mul1,
    }
}

/// Total K-theory over a finite coefficient set. The infinite sum is
/// truncated to the configured set; for fixed blocks this loses
/// nothing once the set contains the relevant torsion orders.
pub fn total_k(algebra: &DirectSumAlgebra, coefficients: &[u64]) -> TotalKModule {
    let mut set: Vec<u64> = coefficients.iter().copied().filter(|&n| n >= 1).collect();
    set.sort_unstable();
    set.dedup();
    let blocks = algebra
        .summands()
        .iter()
        .map(|b| {
            let groups: Vec<CoefficientGroups> =
                set.iter().map(|&n| coefficient_groups_for(b, n)).collect();
            let mut transforms = Vec::new();
            for (i, low) in groups.iter().enumerate() {
                for high in groups.iter().skip(i + 1) {
                    if high.n % low.n == 0 {
                        transforms.push(transform_for(b, low, high));
                    }
                }
            }
            BlockTotalK {
                block: *b,
                k0: FgGroup::free(1),
                k1: FgGroup::cyclic(b.k1_order()),
                coefficients: groups,
                transforms,
            }
        })
        .collect();
    TotalKModule {
        blocks,
        coefficient_set: set,
    }
}

impl TotalKModule {
    pub fn block(&self, i: usize) -> &BlockTotalK {
        &self.blocks[i]
    }
}

impl BlockTotalK {
    pub fn coefficient(&self, n: u64) -> Option<&CoefficientGroups> {
        self.coefficients.iter().find(|c| c.n == n)
    }
}

/// The default coefficient set: all `n >= 2` dividing `bound`.
pub fn default_coefficient_set(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|n| bound.is_multiple_of(*n)).collect()
}

pub const DEFAULT_COEFFICIENT_BOUND: u64 = 24;
