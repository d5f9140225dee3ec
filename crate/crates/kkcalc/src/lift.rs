//! Positivity and existence: which KK classes come from actual
//! homomorphisms, and explicit standard-form data realizing them.
//!
//! A class lifts stably exactly when some representative ladder has a
//! nonnegative middle matrix. Shifting a representative by the
//! diagonal sublattice changes `(a, b)` by `u1 (m/m0, -m/m1)` and
//! `(c, d)` by `u2 (m/m0, -m/m1)` independently, so liftability per
//! block pair reduces to two one-dimensional integer interval
//! feasibility checks with exact rational endpoints.

use crate::algebra::DirectSumAlgebra;
use crate::kk::{canonicalize, compose, DiagramEntry, KKClass, KKDiagram};
use crate::pl::{rat_int, PlPath};
use crate::spectral::{HomomorphismData, PairData};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

/// The diagonal-lattice shift applied to one block pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairShift {
    pub u1: BigInt,
    pub u2: BigInt,
}

/// Witness of stable liftability: a representative of the class with
/// nonnegative middle matrix, together with the shifts that produced
/// it.
#[derive(Clone, Debug)]
pub struct LiftCertificate {
    pub shifted_representative: KKDiagram,
    /// Indexed `[target][source]`.
    pub shifts: Vec<Vec<PairShift>>,
    /// Whether the class carries the unit of the source exactly to the
    /// unit of the target.
    pub unital: bool,
}

/// Why a class admits no nonnegative representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftObstruction {
    pub target_index: usize,
    pub source_index: usize,
    pub reason: String,
}

/// Both one-dimensional shift intervals for an entry, as integer
/// bounds `(lo, hi)`; empty when `lo > hi`.
fn shift_interval(x: &BigInt, y: &BigInt, alpha: &BigInt, beta: &BigInt) -> (BigInt, BigInt) {
    // x + u alpha >= 0  and  y - u beta >= 0
    let lo = (-x).div_ceil(alpha);
    let hi = y.div_floor(beta);
    (lo, hi)
}

/// Whether the class maps the source unit exactly onto the target
/// unit.
pub fn is_unit_preserving(diagram: &KKDiagram) -> bool {
    diagram
        .unit_image_coefficients()
        .iter()
        .zip(diagram.target().summands())
        .all(|(w, tgt)| w == &BigInt::from(tgt.unit_coefficient()))
}

/// Whether the unit image sits below the target unit in the order.
pub fn is_subunital(diagram: &KKDiagram) -> bool {
    diagram
        .unit_image_coefficients()
        .iter()
        .zip(diagram.target().summands())
        .all(|(w, tgt)| !w.is_negative() && w <= &BigInt::from(tgt.unit_coefficient()))
}

/// Decides stable liftability with the obstruction named on failure.
pub fn try_certificate(class: &KKClass) -> Result<LiftCertificate, LiftObstruction> {
    let rep = class.representative();
    let mut shifts: Vec<Vec<PairShift>> = Vec::new();
    let mut entries: Vec<Vec<DiagramEntry>> = Vec::new();
    for (j, tgt) in class.target().summands().iter().enumerate() {
        let mut shift_row = Vec::new();
        let mut entry_row = Vec::new();
        for (i, src) in class.source().summands().iter().enumerate() {
            let e = rep.entry(j, i);
            let alpha = BigInt::from(src.alpha());
            let beta = BigInt::from(src.beta());
            let (lo1, hi1) = shift_interval(&e.a, &e.b, &alpha, &beta);
            if lo1 > hi1 {
                return Err(LiftObstruction {
                    target_index: j,
                    source_index: i,
                    reason: format!("u1 interval empty ({} > {})", lo1, hi1),
                });
            }
            let (lo2, hi2) = shift_interval(&e.c, &e.d, &alpha, &beta);
            if lo2 > hi2 {
                return Err(LiftObstruction {
                    target_index: j,
                    source_index: i,
                    reason: format!("u2 interval empty ({} > {})", lo2, hi2),
                });
            }
            // smallest feasible shifts, for determinism
            let (u1, u2) = (lo1, lo2);
            let na = BigInt::from(tgt.alpha());
            let nb = BigInt::from(tgt.beta());
            entry_row.push(DiagramEntry {
                a: &e.a + &u1 * &alpha,
                b: &e.b - &u1 * &beta,
                c: &e.c + &u2 * &alpha,
                d: &e.d - &u2 * &beta,
                s: &e.s + &na * &u1 - &nb * &u2,
            });
            shift_row.push(PairShift { u1, u2 });
        }
        shifts.push(shift_row);
        entries.push(entry_row);
    }
    let shifted =
        KKDiagram::new(class.source().clone(), class.target().clone(), entries)
            .expect("diagonal shifts preserve commutativity");
    let unital = is_unit_preserving(&shifted);
    Ok(LiftCertificate {
        shifted_representative: shifted,
        shifts,
        unital,
    })
}

/// A nonnegative representative of the class, when one exists.
pub fn stably_liftable(class: &KKClass) -> Option<LiftCertificate> {
    try_certificate(class).ok()
}

/// Stable liftability strengthened by the scale condition
/// `class([1]) <= [1]`; the certificate's `unital` flag records
/// whether the units match exactly.
pub fn unital_lift_exists(class: &KKClass) -> Option<LiftCertificate> {
    let cert = stably_liftable(class)?;
    if is_subunital(&cert.shifted_representative) {
        Some(cert)
    } else {
        None
    }
}

/// Whether the image of the unit dominates `l` copies of some nonzero
/// projection class: every target coefficient nonnegative and at least
/// one at least `l`.
pub fn is_l_large(class: &KKClass, l: u64) -> bool {
    let coeffs = class.representative().unit_image_coefficients();
    let l = BigInt::from(l);
    coeffs.iter().all(|w| !w.is_negative()) && coeffs.iter().any(|w| w >= &l)
}

/// `l+1`-largeness.
pub fn is_strictly_l_large(class: &KKClass, l: u64) -> bool {
    is_l_large(class, l + 1)
}

/// The class induced by standard-form homomorphism data.
pub fn induced_kk(h: &HomomorphismData) -> KKClass {
    h.induced_class()
}

/// The distinguished embedding class of the classical block with the
/// full fiber size into one summand: its ladder scales the two middle
/// coordinates by the endpoint sizes.
pub fn embedding_test_class(algebra: &DirectSumAlgebra, summand: usize) -> KKClass {
    let src = algebra.block(summand).amplified();
    let test_source = DirectSumAlgebra::single(
        crate::algebra::DimDropBlock::new(1, 1, src.m(), 1).expect("fiber size is positive"),
    );
    let entries: Vec<Vec<DiagramEntry>> = (0..algebra.len())
        .map(|j| {
            vec![if j == summand {
                DiagramEntry {
                    a: BigInt::from(src.m0()),
                    b: BigInt::zero(),
                    c: BigInt::zero(),
                    d: BigInt::from(src.m1()),
                    s: BigInt::from(1),
                }
            } else {
                DiagramEntry::zero()
            }]
        })
        .collect();
    let diagram = KKDiagram::new(test_source, algebra.clone(), entries)
        .expect("the embedding ladder commutes");
    canonicalize(&diagram)
}

/// Result of the local existence decision.
#[derive(Clone, Debug)]
pub enum LocalExistence {
    Realized(HomomorphismData),
    Infeasible { condition: String },
}

/// Decides whether the class comes from a homomorphism respecting the
/// scale, and constructs standard-form data realizing it when so.
///
/// Condition (1) is positivity of the composites with the embedding
/// test class of each source summand; condition (2) is the scale
/// inequality on the unit. On success the certificate's nonnegative
/// middle matrix is converted into endpoint multiplicities in the
/// standard range plus straight eigenvalue paths between the
/// endpoints; the induced class of the result equals the input.
pub fn local_existence(class: &KKClass) -> LocalExistence {
    for i in 0..class.source().len() {
        let test = embedding_test_class(class.source(), i);
        let composite = compose(&test, class).expect("test class targets the source");
        if let Err(obstruction) = try_certificate(&composite) {
            return LocalExistence::Infeasible {
                condition: format!(
                    "positivity of the embedding test for source summand {} fails: {}",
                    i, obstruction.reason
                ),
            };
        }
    }
    let cert = match try_certificate(class) {
        Ok(cert) => cert,
        Err(obstruction) => {
            return LocalExistence::Infeasible {
                condition: format!("no nonnegative representative: {}", obstruction.reason),
            }
        }
    };
    if !is_subunital(&cert.shifted_representative) {
        return LocalExistence::Infeasible {
            condition: "scale: the unit image exceeds the target unit".to_string(),
        };
    }
    let data = realize_certificate(&cert);
    debug_assert_eq!(&induced_kk(&data), class, "realization round trip");
    LocalExistence::Realized(data)
}

/// Converts a nonnegative representative into standard-form data.
///
/// Per pair, the two endpoint columns of the middle matrix determine
/// the endpoint multiplicities modulo the inflations; the quotients
/// count eigenvalue paths pinned to 0 or 1 at each end, realized as
/// straight lines.
pub fn realize_certificate(cert: &LiftCertificate) -> HomomorphismData {
    let diagram = &cert.shifted_representative;
    let source = diagram.source().clone();
    let target = diagram.target().clone();
    let blocks: Vec<Vec<PairData>> = (0..target.len())
        .map(|j| {
            let tgt = target.block(j);
            (0..source.len())
                .map(|i| {
                    let src = source.block(i);
                    let e = diagram.entry(j, i);
                    let alpha = BigInt::from(src.alpha());
                    let beta = BigInt::from(src.beta());
                    let na = BigInt::from(tgt.alpha());
                    let nb = BigInt::from(tgt.beta());
                    let a_na = &e.a * &na;
                    let b_na = &e.b * &na;
                    let c_nb = &e.c * &nb;
                    let d_nb = &e.d * &nb;
                    let s0 = a_na.mod_floor(&alpha);
                    let s1 = b_na.mod_floor(&beta);
                    debug_assert_eq!(s0, c_nb.mod_floor(&alpha), "commutativity ties the ends");
                    debug_assert_eq!(s1, d_nb.mod_floor(&beta), "commutativity ties the ends");
                    let z0 = (&a_na - &s0) / &alpha;
                    let o0 = (&b_na - &s1) / &beta;
                    let z1 = (&c_nb - &s0) / &alpha;
                    let o1 = (&d_nb - &s1) / &beta;
                    let total = &z0 + &o0;
                    debug_assert_eq!(total, &z1 + &o1, "path count balances");
                    let z0 = z0.to_u64().expect("path counts fit u64");
                    let z1 = z1.to_u64().expect("path counts fit u64");
                    let total = total.to_u64().expect("path counts fit u64");
                    let paths = (0..total)
                        .map(|k| {
                            let start = if k < z0 { rat_int(0) } else { rat_int(1) };
                            let end = if k < z1 { rat_int(0) } else { rat_int(1) };
                            PlPath::line(start, end)
                        })
                        .collect();
                    PairData {
                        s0: s0.to_u64().expect("multiplicity fits u64"),
                        s1: s1.to_u64().expect("multiplicity fits u64"),
                        paths,
                    }
                })
                .collect()
        })
        .collect();
    HomomorphismData::new(source, target, blocks)
        .expect("nonnegative representatives realize as valid data")
}
