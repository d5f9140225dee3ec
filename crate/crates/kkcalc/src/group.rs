//! Finitely generated abelian groups presented by relation matrices,
//! and homomorphisms between them.
//!
//! A group is `Z^n / im(relations^T)` where each relation-matrix row is
//! one relation vector. The Smith normal form of the relation lattice
//! yields invariant factors `d1 | d2 | ...` (a zero factor encodes a
//! free summand, factors equal to one are dropped) together with a
//! unimodular change of basis, which gives every element a canonical
//! coordinate vector for equality tests.

use crate::matrix::{solve_integer, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FgGroup {
    ambient_rank: usize,
    relations: IntMatrix,
    /// Invariant factor per ambient slot in the transformed basis
    /// (including dropped 1s; 0 encodes a free slot).
    slot_factors: Vec<BigInt>,
    /// Slots whose factor is not 1, in order.
    kept: Vec<usize>,
    /// Ambient coordinates -> invariant-factor coordinates.
    to_inv: IntMatrix,
    /// Invariant-factor coordinates -> ambient coordinates.
    from_inv: IntMatrix,
}

impl FgGroup {
    /// Presents `Z^ambient / <rows of relations>`.
    pub fn from_relations(ambient: usize, relations: IntMatrix) -> FgGroup {
        assert_eq!(relations.cols(), ambient, "relation width != ambient rank");
        // The relation lattice is the column span of relations^T; its
        // Smith form U * R^T * V = D puts the lattice in diagonal
        // position in the basis given by U.
        let rt = relations.transpose();
        let snf = rt.smith_normal_form();
        let bound = rt.rows().min(rt.cols());
        let mut slot_factors = Vec::with_capacity(ambient);
        for i in 0..ambient {
            if i < bound {
                slot_factors.push(snf.d.at(i, i).clone());
            } else {
                slot_factors.push(BigInt::zero());
            }
        }
        let kept = (0..ambient)
            .filter(|&i| !slot_factors[i].is_one())
            .collect();
        let from_inv = snf
            .u
            .inverse()
            .expect("Smith transform is unimodular by construction");
        FgGroup {
            ambient_rank: ambient,
            relations,
            slot_factors,
            kept,
            to_inv: snf.u,
            from_inv,
        }
    }

    /// The free abelian group `Z^n`.
    pub fn free(n: usize) -> FgGroup {
        Self::from_relations(n, IntMatrix::zeros(0, n))
    }

    /// The cyclic group `Z_n` (`Z` for n = 0).
    pub fn cyclic(n: u64) -> FgGroup {
        Self::from_relations(1, IntMatrix::from_rows(&[vec![n as i64]]))
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// Divisibility-sorted invariant factors with 1s dropped; zeros
    /// (free summands) trail.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.kept
            .iter()
            .map(|&i| self.slot_factors[i].clone())
            .collect()
    }

    pub fn free_rank(&self) -> usize {
        self.kept
            .iter()
            .filter(|&&i| self.slot_factors[i].is_zero())
            .count()
    }

    pub fn torsion_factors(&self) -> Vec<BigInt> {
        self.kept
            .iter()
            .filter(|&&i| !self.slot_factors[i].is_zero())
            .map(|&i| self.slot_factors[i].clone())
            .collect()
    }

    pub fn torsion_order(&self) -> BigInt {
        self.torsion_factors()
            .iter()
            .product::<BigInt>()
            .max(BigInt::one())
    }

    pub fn is_trivial(&self) -> bool {
        self.kept.is_empty()
    }

    /// Total order of the group; `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank() > 0 {
            None
        } else {
            Some(self.torsion_order())
        }
    }

    /// Canonical coordinates of an ambient vector: one entry per kept
    /// invariant-factor slot, torsion entries reduced to the minimal
    /// nonnegative residue.
    pub fn canonical_coords(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.ambient_rank, "element has wrong length");
        let y = self.to_inv.mul_vec(x);
        self.kept
            .iter()
            .map(|&i| {
                let f = &self.slot_factors[i];
                if f.is_zero() {
                    y[i].clone()
                } else {
                    y[i].mod_floor(f)
                }
            })
            .collect()
    }

    /// A representative ambient vector for the given canonical
    /// coordinates (deterministic section of `canonical_coords`).
    pub fn lift_canonical(&self, coords: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(coords.len(), self.kept.len(), "wrong coordinate length");
        let mut y = vec![BigInt::zero(); self.ambient_rank];
        for (pos, &slot) in self.kept.iter().enumerate() {
            y[slot] = coords[pos].clone();
        }
        self.from_inv.mul_vec(&y)
    }

    pub fn is_zero_element(&self, x: &[BigInt]) -> bool {
        self.canonical_coords(x).iter().all(|c| c.is_zero())
    }

    pub fn elements_equal(&self, x: &[BigInt], y: &[BigInt]) -> bool {
        self.canonical_coords(x) == self.canonical_coords(y)
    }

    /// Whether `x` lies in the relation lattice (represents zero).
    pub fn in_relation_lattice(&self, x: &[BigInt]) -> bool {
        self.is_zero_element(x)
    }

    /// Rows of the relation matrix as ambient vectors.
    pub fn relation_generators(&self) -> Vec<Vec<BigInt>> {
        (0..self.relations.rows())
            .map(|r| self.relations.row(r))
            .collect()
    }

    /// All elements of a finite group, as canonical coordinate vectors.
    /// Panics if the group is infinite.
    pub fn enumerate_finite(&self) -> Vec<Vec<BigInt>> {
        assert_eq!(self.free_rank(), 0, "cannot enumerate an infinite group");
        let factors = self.torsion_factors();
        let mut out = vec![vec![]];
        for f in &factors {
            let mut next = Vec::new();
            let mut v = BigInt::zero();
            while &v < f {
                for prefix in &out {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    next.push(p);
                }
                v += 1;
            }
            out = next;
        }
        out
    }
}

/// Presents the quotient `span(gens) / span(modulo)` of two sublattices
/// of `Z^ambient` (the second must be contained in the saturation of
/// the first for the quotient to make sense; membership is resolved
/// exactly). Coordinates of the result are taken with respect to
/// `gens`.
pub fn sublattice_quotient(
    ambient: usize,
    gens: &[Vec<BigInt>],
    modulo: &[Vec<BigInt>],
) -> FgGroup {
    let s = IntMatrix::from_columns(ambient, gens);
    if modulo.is_empty() {
        return FgGroup::from_relations(gens.len(), IntMatrix::zeros(0, gens.len()));
    }
    let z = IntMatrix::from_columns(ambient, modulo);
    // Relations: coefficient vectors c with S c in im(Z), found as the
    // projection of ker [S | -Z] onto the c-block.
    let stacked = s.hstack(&IntMatrix::from_fn(ambient, modulo.len(), |i, j| {
        -z.at(i, j).clone()
    }));
    let kernel = stacked.kernel_basis();
    let rel_rows: Vec<Vec<BigInt>> = kernel
        .iter()
        .map(|k| k[..gens.len()].to_vec())
        .collect();
    let relations = if rel_rows.is_empty() {
        IntMatrix::zeros(0, gens.len())
    } else {
        IntMatrix::from_fn(rel_rows.len(), gens.len(), |i, j| rel_rows[i][j].clone())
    };
    FgGroup::from_relations(gens.len(), relations)
}

#[derive(Clone, Debug)]
pub struct GroupHom {
    pub source: FgGroup,
    pub target: FgGroup,
    pub matrix: IntMatrix,
}

impl GroupHom {
    /// Builds the homomorphism when the ambient matrix is well defined
    /// on the presented groups (maps the source relation lattice into
    /// the target relation lattice); `None` otherwise.
    pub fn new(source: FgGroup, target: FgGroup, matrix: IntMatrix) -> Option<GroupHom> {
        if matrix.rows() != target.ambient_rank() || matrix.cols() != source.ambient_rank() {
            return None;
        }
        for rel in source.relation_generators() {
            let image = matrix.mul_vec(&rel);
            if !target.in_relation_lattice(&image) {
                return None;
            }
        }
        Some(GroupHom {
            source,
            target,
            matrix,
        })
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec(x)
    }

    pub fn is_zero_hom(&self) -> bool {
        (0..self.source.ambient_rank()).all(|j| {
            self.target.in_relation_lattice(&self.matrix.column(j))
        })
    }

    pub fn compose_after(&self, inner: &GroupHom) -> GroupHom {
        assert_eq!(
            inner.target.ambient_rank(),
            self.source.ambient_rank(),
            "composition mismatch"
        );
        GroupHom {
            source: inner.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.mul(&inner.matrix),
        }
    }

    /// Generators (in source-ambient coordinates) of the preimage
    /// lattice `{x : M x in target relation lattice}`.
    pub fn kernel_lattice_generators(&self) -> Vec<Vec<BigInt>> {
        let t_rel = self.target.relations().transpose();
        let neg_trel = IntMatrix::from_fn(t_rel.rows(), t_rel.cols(), |i, j| {
            -t_rel.at(i, j).clone()
        });
        let stacked = self.matrix.hstack(&neg_trel);
        let kernel = stacked.kernel_basis();
        let ns = self.source.ambient_rank();
        let mut gens: Vec<Vec<BigInt>> = kernel.iter().map(|k| k[..ns].to_vec()).collect();
        // The source relation lattice always sits inside the preimage.
        gens.extend(self.source.relation_generators());
        gens
    }

    /// Presentation of the kernel of the induced map on presented
    /// groups.
    pub fn kernel(&self) -> FgGroup {
        let gens = self.kernel_lattice_generators();
        sublattice_quotient(
            self.source.ambient_rank(),
            &gens,
            &self.source.relation_generators(),
        )
    }

    /// Presentation of the cokernel of the induced map.
    pub fn cokernel(&self) -> FgGroup {
        let image_rows =
            IntMatrix::from_fn(self.matrix.cols(), self.matrix.rows(), |i, j| {
                self.matrix.at(j, i).clone()
            });
        let relations = self.target.relations().vstack(&image_rows);
        FgGroup::from_relations(self.target.ambient_rank(), relations)
    }

    /// Whether `x` (target-ambient) lies in `im(hom) + relations`.
    pub fn image_contains(&self, x: &[BigInt]) -> bool {
        let t_rel = self.target.relations().transpose();
        let combined = self.matrix.hstack(&t_rel);
        solve_integer(&combined, x).is_some()
    }
}

#[derive(Clone, Debug)]
pub struct InducedHom {
    pub hom: GroupHom,
    pub kernel: FgGroup,
    pub cokernel: FgGroup,
}

/// Checks well-definedness of an ambient matrix on presented groups
/// and, when valid, returns the homomorphism together with kernel and
/// cokernel presentations.
pub fn hom_check_and_induce(
    source: &FgGroup,
    target: &FgGroup,
    matrix: IntMatrix,
) -> Option<InducedHom> {
    let hom = GroupHom::new(source.clone(), target.clone(), matrix)?;
    let kernel = hom.kernel();
    let cokernel = hom.cokernel();
    Some(InducedHom {
        hom,
        kernel,
        cokernel,
    })
}

/// Convenience wrapper: invariants of `Z^n / <rows>`.
pub fn group_invariants(ambient: usize, relations: IntMatrix) -> FgGroup {
    FgGroup::from_relations(ambient, relations)
}
