//! Inductive systems of direct sums of dimension drop blocks:
//! composite diagnostics, element comparison under the connecting
//! maps, and the alternating ladder search between two systems.

use crate::algebra::DirectSumAlgebra;
use crate::kk::{
    coefficient_pushforward, compose, compose_diagrams, kk_group, DiagramEntry, KKClass,
    KKDiagram,
};
use crate::lift::{embedding_test_class, is_subunital, try_certificate, LiftCertificate};
use crate::matrix::{solve_integer, IntMatrix};
use crate::spectral::{compose_hom_data, finite_spectrum_proximity, spv, HomomorphismData};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IntertwineError {
    #[error("stage index out of range (stage {stage}, system has {stages})")]
    StageRange { stage: usize, stages: usize },
    #[error("system needs one connecting datum per consecutive stage pair")]
    ConnectingShape,
    #[error("connecting datum {index} does not map stage {index} to stage {next}", next = index + 1)]
    ConnectingMismatch { index: usize },
    #[error("seed must provide one class per shared stage, got {got} for {expected}")]
    SeedShape { got: usize, expected: usize },
    #[error("seed classes do not commute with the connecting maps at stage {stage}")]
    SeedIncompatible { stage: usize },
    #[error("elements carry different coefficient sets")]
    CoefficientMismatch,
}

/// A staged system `A_0 -> A_1 -> ...` with standard-form connecting
/// data.
#[derive(Clone, Debug)]
pub struct InductiveSystem {
    stages: Vec<DirectSumAlgebra>,
    connecting: Vec<HomomorphismData>,
}

impl InductiveSystem {
    pub fn new(
        stages: Vec<DirectSumAlgebra>,
        connecting: Vec<HomomorphismData>,
    ) -> Result<InductiveSystem, IntertwineError> {
        if stages.is_empty() || connecting.len() + 1 != stages.len() {
            return Err(IntertwineError::ConnectingShape);
        }
        for (i, c) in connecting.iter().enumerate() {
            if c.source() != &stages[i] || c.target() != &stages[i + 1] {
                return Err(IntertwineError::ConnectingMismatch { index: i });
            }
        }
        Ok(InductiveSystem { stages, connecting })
    }

    pub fn stages(&self) -> &[DirectSumAlgebra] {
        &self.stages
    }

    pub fn connecting(&self) -> &[HomomorphismData] {
        &self.connecting
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn stage(&self, i: usize) -> Result<&DirectSumAlgebra, IntertwineError> {
        self.stages.get(i).ok_or(IntertwineError::StageRange {
            stage: i,
            stages: self.stages.len(),
        })
    }

    /// Composite connecting data from stage `from` to stage `to`.
    pub fn composite_data(
        &self,
        from: usize,
        to: usize,
    ) -> Result<HomomorphismData, IntertwineError> {
        if from > to || to >= self.stages.len() {
            return Err(IntertwineError::StageRange {
                stage: to,
                stages: self.stages.len(),
            });
        }
        let mut acc = HomomorphismData::identity(&self.stages[from]);
        for step in from..to {
            acc = compose_hom_data(&acc, &self.connecting[step])
                .expect("validated connecting data composes");
        }
        Ok(acc)
    }

    /// Composite connecting class from stage `from` to stage `to`.
    pub fn composite_class(&self, from: usize, to: usize) -> Result<KKClass, IntertwineError> {
        let mut acc = crate::kk::canonicalize(&KKDiagram::identity(&self.stages[from]));
        if from > to || to >= self.stages.len() {
            return Err(IntertwineError::StageRange {
                stage: to,
                stages: self.stages.len(),
            });
        }
        for step in from..to {
            let step_class = self.connecting[step].induced_class();
            acc = compose(&acc, &step_class).expect("stages chain");
        }
        Ok(acc)
    }

    /// Composite connecting diagram (canonical representative chain).
    pub fn composite_diagram(&self, from: usize, to: usize) -> Result<KKDiagram, IntertwineError> {
        let mut acc = KKDiagram::identity(&self.stages[from]);
        if from > to || to >= self.stages.len() {
            return Err(IntertwineError::StageRange {
                stage: to,
                stages: self.stages.len(),
            });
        }
        for step in from..to {
            acc = compose_diagrams(&acc, &self.connecting[step].induced_diagram())
                .expect("stages chain");
        }
        Ok(acc)
    }
}

/// One row of the staged diagnostics.
#[derive(Clone, Debug)]
pub struct SystemReportRow {
    pub stage: usize,
    pub spv: BigRational,
    /// Spread bound for the weak variation of 1-Lipschitz profile
    /// families (the modulus of the identity profile at the spectral
    /// variation).
    pub omega_upper: BigRational,
    /// Largest distance of a composite path from the nearest constant.
    pub finite_spectrum_proximity: BigRational,
}

/// Diagnostic decay report for the composites out of one stage. The
/// flags witness monotone decay over the inspected horizon; they are
/// evidence, never a proof of a limit property.
#[derive(Clone, Debug)]
pub struct SystemReport {
    pub from_stage: usize,
    pub horizon: usize,
    pub rows: Vec<SystemReportRow>,
    pub spv_monotone_decreasing: bool,
    pub proximity_monotone_decreasing: bool,
}

pub fn system_report(
    system: &InductiveSystem,
    from_stage: usize,
    horizon: usize,
) -> Result<SystemReport, IntertwineError> {
    if from_stage >= horizon || horizon >= system.len() {
        return Err(IntertwineError::StageRange {
            stage: horizon,
            stages: system.len(),
        });
    }
    let mut rows = Vec::new();
    for r in from_stage + 1..=horizon {
        let composite = system.composite_data(from_stage, r)?;
        let s = spv(&composite, 0);
        rows.push(SystemReportRow {
            stage: r,
            spv: s.clone(),
            omega_upper: s,
            finite_spectrum_proximity: finite_spectrum_proximity(&composite),
        });
    }
    let monotone = |take: &dyn Fn(&SystemReportRow) -> BigRational| {
        rows.windows(2).all(|w| take(&w[0]) >= take(&w[1]))
    };
    Ok(SystemReport {
        from_stage,
        horizon,
        spv_monotone_decreasing: monotone(&|r| r.spv.clone()),
        proximity_monotone_decreasing: monotone(&|r| r.finite_spectrum_proximity.clone()),
        rows,
    })
}

/// Element of the total-K module at one stage: per block, the K0 and
/// K1 ambient coordinates plus, per configured coefficient, the
/// coordinates in the coefficient-lattice basis and the cyclic part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalKElement {
    pub stage: usize,
    pub coefficients: Vec<u64>,
    pub blocks: Vec<BlockElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockElement {
    pub k0: BigInt,
    pub k1: BigInt,
    /// One entry per coefficient `n`: (two K0(.;Z_n) coordinates,
    /// one K1(.;Z_n) coordinate).
    pub with_coefficients: Vec<([BigInt; 2], BigInt)>,
}

impl BlockElement {
    pub fn zero(coefficients: &[u64]) -> BlockElement {
        BlockElement {
            k0: BigInt::zero(),
            k1: BigInt::zero(),
            with_coefficients: coefficients
                .iter()
                .map(|_| ([BigInt::zero(), BigInt::zero()], BigInt::zero()))
                .collect(),
        }
    }
}

impl TotalKElement {
    pub fn zero(system: &InductiveSystem, stage: usize, coefficients: &[u64]) -> TotalKElement {
        let blocks = (0..system.stages[stage].len())
            .map(|_| BlockElement::zero(coefficients))
            .collect();
        TotalKElement {
            stage,
            coefficients: coefficients.to_vec(),
            blocks,
        }
    }

    /// The K1 generator of one block, zero elsewhere.
    pub fn k1_generator(
        system: &InductiveSystem,
        stage: usize,
        block: usize,
        coefficients: &[u64],
    ) -> TotalKElement {
        let mut e = Self::zero(system, stage, coefficients);
        e.blocks[block].k1 = BigInt::from(1);
        e
    }

    /// The K0 generator of one block, zero elsewhere.
    pub fn k0_generator(
        system: &InductiveSystem,
        stage: usize,
        block: usize,
        coefficients: &[u64],
    ) -> TotalKElement {
        let mut e = Self::zero(system, stage, coefficients);
        e.blocks[block].k0 = BigInt::from(1);
        e
    }
}

/// Pushes an element one stage forward along the connecting diagram.
fn push_once(system: &InductiveSystem, element: &TotalKElement) -> TotalKElement {
    let stage = element.stage;
    let diagram = system.connecting[stage].induced_diagram();
    let src_alg = &system.stages[stage];
    let tgt_alg = &system.stages[stage + 1];
    let l0 = diagram.lambda0_star_matrix();
    let l1 = diagram.lambda1_star_matrix();
    let blocks: Vec<BlockElement> = (0..tgt_alg.len())
        .map(|j| {
            let mut out = BlockElement::zero(&element.coefficients);
            for (i, src_block) in src_alg.summands().iter().enumerate() {
                let x = &element.blocks[i];
                out.k0 += l0.at(j, i) * &x.k0;
                out.k1 += l1.at(j, i) * &x.k1;
                for (ci, &n) in element.coefficients.iter().enumerate() {
                    let push =
                        coefficient_pushforward(src_block, tgt_alg.block(j), diagram.entry(j, i), n);
                    let image = push.mul_vec(&x.with_coefficients[ci].0);
                    out.with_coefficients[ci].0[0] += &image[0];
                    out.with_coefficients[ci].0[1] += &image[1];
                    out.with_coefficients[ci].1 +=
                        &diagram.entry(j, i).s * &x.with_coefficients[ci].1;
                }
            }
            out
        })
        .collect();
    TotalKElement {
        stage: stage + 1,
        coefficients: element.coefficients.clone(),
        blocks,
    }
}

/// Pushes an element to the given stage.
pub fn push_element(
    system: &InductiveSystem,
    element: &TotalKElement,
    to_stage: usize,
) -> Result<TotalKElement, IntertwineError> {
    if to_stage < element.stage || to_stage >= system.len() {
        return Err(IntertwineError::StageRange {
            stage: to_stage,
            stages: system.len(),
        });
    }
    let mut acc = element.clone();
    while acc.stage < to_stage {
        acc = push_once(system, &acc);
    }
    Ok(acc)
}

/// Whether two elements at the same stage are equal in the presented
/// total-K module.
fn elements_equal_at_stage(
    system: &InductiveSystem,
    x: &TotalKElement,
    y: &TotalKElement,
) -> bool {
    debug_assert_eq!(x.stage, y.stage);
    let tk = crate::algebra::total_k(&system.stages[x.stage], &x.coefficients);
    for (bi, block) in tk.blocks.iter().enumerate() {
        let xb = &x.blocks[bi];
        let yb = &y.blocks[bi];
        if !block.k0.elements_equal(std::slice::from_ref(&xb.k0), std::slice::from_ref(&yb.k0)) {
            return false;
        }
        if !block.k1.elements_equal(std::slice::from_ref(&xb.k1), std::slice::from_ref(&yb.k1)) {
            return false;
        }
        for (ci, &n) in x.coefficients.iter().enumerate() {
            let cg = block.coefficient(n).expect("configured coefficient");
            if !cg.k0n.elements_equal(
                xb.with_coefficients[ci].0.as_ref(),
                yb.with_coefficients[ci].0.as_ref(),
            ) {
                return false;
            }
            if !cg.k1n.elements_equal(
                &[xb.with_coefficients[ci].1.clone()],
                &[yb.with_coefficients[ci].1.clone()],
            ) {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitVerdict {
    /// The pushforwards agree from this stage on.
    EqualInLimitByStage(usize),
    /// Distinct at every inspected stage up to the horizon.
    DistinctUpTo(usize),
}

/// Compares two elements under the connecting maps: pushes both
/// forward and reports the first stage where the images coincide, or
/// distinctness up to the last stage.
pub fn limit_compare(
    system: &InductiveSystem,
    x: &TotalKElement,
    y: &TotalKElement,
) -> Result<LimitVerdict, IntertwineError> {
    if x.coefficients != y.coefficients {
        return Err(IntertwineError::CoefficientMismatch);
    }
    let horizon = system.len() - 1;
    let start = x.stage.max(y.stage);
    let mut xv = push_element(system, x, start)?;
    let mut yv = push_element(system, y, start)?;
    loop {
        if elements_equal_at_stage(system, &xv, &yv) {
            return Ok(LimitVerdict::EqualInLimitByStage(xv.stage));
        }
        if xv.stage == horizon {
            return Ok(LimitVerdict::DistinctUpTo(horizon));
        }
        xv = push_once(system, &xv);
        yv = push_once(system, &yv);
    }
}

/// The alternating ladder: down maps `A_{r_n} -> B_{s_n}`, up maps
/// `B_{s_n} -> A_{r_{n+1}}`, with a liftability certificate per map
/// and the two triangle families equal to the connecting classes.
#[derive(Clone, Debug)]
pub struct Ladder {
    pub source_stages: Vec<usize>,
    pub target_stages: Vec<usize>,
    pub down: Vec<KKClass>,
    pub up: Vec<KKClass>,
    pub down_certificates: Vec<LiftCertificate>,
    pub up_certificates: Vec<LiftCertificate>,
}

#[derive(Clone, Debug)]
pub struct SearchBounds {
    /// Largest stage index either side of the ladder may use.
    pub max_stage: usize,
    /// Max-norm bound for the kernel-lattice scan at each rung.
    pub coefficient_bound: i64,
    /// Hard cap on scanned candidates per rung and stage.
    pub candidate_cap: usize,
}

impl SearchBounds {
    pub fn new(max_stage: usize, coefficient_bound: i64) -> SearchBounds {
        SearchBounds {
            max_stage,
            coefficient_bound,
            candidate_cap: 100_000,
        }
    }
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found(Ladder),
    NoLadder { rung: usize, reason: String },
}

/// Linear map on flattened diagram entries `[target][source][5]`
/// induced by composing with a fixed inner diagram:
/// `xi -> xi . fixed`.
fn compose_after_matrix(
    fixed: &KKDiagram,
    var_targets: usize,
) -> IntMatrix {
    let x_sources = fixed.source().len();
    let mid = fixed.target().len();
    let rows = var_targets * x_sources * 5;
    let cols = var_targets * mid * 5;
    let mut m = IntMatrix::zeros(rows, cols);
    for t in 0..var_targets {
        for sx in 0..x_sources {
            let out = (t * x_sources + sx) * 5;
            for j in 0..mid {
                let f = fixed.entry(j, sx);
                let xi = (t * mid + j) * 5;
                // a' = xi.a f.a + xi.b f.c
                *m.at_mut(out, xi) += f.a.clone();
                *m.at_mut(out, xi + 1) += f.c.clone();
                // b' = xi.a f.b + xi.b f.d
                *m.at_mut(out + 1, xi) += f.b.clone();
                *m.at_mut(out + 1, xi + 1) += f.d.clone();
                // c' = xi.c f.a + xi.d f.c
                *m.at_mut(out + 2, xi + 2) += f.a.clone();
                *m.at_mut(out + 2, xi + 3) += f.c.clone();
                // d' = xi.c f.b + xi.d f.d
                *m.at_mut(out + 3, xi + 2) += f.b.clone();
                *m.at_mut(out + 3, xi + 3) += f.d.clone();
                // s' = xi.s f.s
                *m.at_mut(out + 4, xi + 4) += f.s.clone();
            }
        }
    }
    m
}

/// Linear map on flattened diagram entries induced by composing with a
/// fixed outer diagram: `xi -> fixed . xi`.
fn compose_before_matrix(fixed: &KKDiagram, var_sources: usize) -> IntMatrix {
    let mid = fixed.source().len();
    let z_targets = fixed.target().len();
    let rows = z_targets * var_sources * 5;
    let cols = mid * var_sources * 5;
    let mut m = IntMatrix::zeros(rows, cols);
    for tz in 0..z_targets {
        for s in 0..var_sources {
            let out = (tz * var_sources + s) * 5;
            for j in 0..mid {
                let g = fixed.entry(tz, j);
                let xi = (j * var_sources + s) * 5;
                *m.at_mut(out, xi) += g.a.clone();
                *m.at_mut(out, xi + 2) += g.b.clone();
                *m.at_mut(out + 1, xi + 1) += g.a.clone();
                *m.at_mut(out + 1, xi + 3) += g.b.clone();
                *m.at_mut(out + 2, xi) += g.c.clone();
                *m.at_mut(out + 2, xi + 2) += g.d.clone();
                *m.at_mut(out + 3, xi + 1) += g.c.clone();
                *m.at_mut(out + 3, xi + 3) += g.d.clone();
                *m.at_mut(out + 4, xi + 4) += g.s.clone();
            }
        }
    }
    m
}

/// Commutativity equations for all pairs of a diagram space, on the
/// flattened entry vector.
fn ladder_equations(source: &DirectSumAlgebra, target: &DirectSumAlgebra) -> IntMatrix {
    let pairs = source.len() * target.len();
    let mut m = IntMatrix::zeros(2 * pairs, 5 * pairs);
    for (j, tgt) in target.summands().iter().enumerate() {
        for (i, src) in source.summands().iter().enumerate() {
            let p = j * source.len() + i;
            let base = p * 5;
            let na = BigInt::from(tgt.alpha());
            let nb = BigInt::from(tgt.beta());
            let ma = BigInt::from(src.alpha());
            let mb = BigInt::from(src.beta());
            *m.at_mut(2 * p, base) = na.clone();
            *m.at_mut(2 * p, base + 2) = -nb.clone();
            *m.at_mut(2 * p, base + 4) = -ma;
            *m.at_mut(2 * p + 1, base + 1) = na;
            *m.at_mut(2 * p + 1, base + 3) = -nb;
            *m.at_mut(2 * p + 1, base + 4) = mb;
        }
    }
    m
}

/// Generators of the diagonal sublattice `M` for a diagram space, as
/// columns on the flattened entry vector.
fn m_lattice_columns(source: &DirectSumAlgebra, target: &DirectSumAlgebra) -> IntMatrix {
    let pairs = source.len() * target.len();
    let mut m = IntMatrix::zeros(5 * pairs, 2 * pairs);
    for (j, tgt) in target.summands().iter().enumerate() {
        for (i, src) in source.summands().iter().enumerate() {
            let p = j * source.len() + i;
            let base = p * 5;
            let ma = BigInt::from(src.alpha());
            let mb = BigInt::from(src.beta());
            let na = BigInt::from(tgt.alpha());
            let nb = BigInt::from(tgt.beta());
            *m.at_mut(base, 2 * p) = ma.clone();
            *m.at_mut(base + 1, 2 * p) = -mb.clone();
            *m.at_mut(base + 4, 2 * p) = na;
            *m.at_mut(base + 2, 2 * p + 1) = ma;
            *m.at_mut(base + 3, 2 * p + 1) = -mb;
            *m.at_mut(base + 4, 2 * p + 1) = -nb;
        }
    }
    m
}

fn flatten_diagram(d: &KKDiagram) -> Vec<BigInt> {
    let mut out = Vec::new();
    for row in d.entries() {
        for e in row {
            out.extend(e.to_vec());
        }
    }
    out
}

fn diagram_from_flat(
    source: &DirectSumAlgebra,
    target: &DirectSumAlgebra,
    flat: &[BigInt],
) -> KKDiagram {
    let entries: Vec<Vec<DiagramEntry>> = (0..target.len())
        .map(|j| {
            (0..source.len())
                .map(|i| {
                    let base = (j * source.len() + i) * 5;
                    DiagramEntry::from_vec(&flat[base..base + 5])
                })
                .collect()
        })
        .collect();
    KKDiagram::new(source.clone(), target.clone(), entries)
        .expect("scan candidates satisfy the ladder equations")
}

/// One class-equality constraint `left(xi) = rhs modulo M` on the
/// flattened unknowns.
struct ClassConstraint {
    map: IntMatrix,
    rhs: Vec<BigInt>,
    m_columns: IntMatrix,
}

/// Solves the rung system and scans the affine solution lattice for a
/// class passing the positivity and scale tests. Returns the class
/// with certificate, or a reason.
fn solve_rung(
    var_source: &DirectSumAlgebra,
    var_target: &DirectSumAlgebra,
    constraints: &[ClassConstraint],
    bounds: &SearchBounds,
) -> Result<(KKClass, LiftCertificate), String> {
    let dim = var_source.len() * var_target.len() * 5;
    let equations = ladder_equations(var_source, var_target);
    // Assemble [equations; constraint maps | -M columns] x = [0; rhs].
    let mut total_cols = dim;
    let mut aux_offsets = Vec::new();
    for c in constraints {
        aux_offsets.push(total_cols);
        total_cols += c.m_columns.cols();
    }
    let mut rows = equations.rows();
    for c in constraints {
        rows += c.map.rows();
    }
    let mut system = IntMatrix::zeros(rows, total_cols);
    let mut rhs = vec![BigInt::zero(); rows];
    for r in 0..equations.rows() {
        for c in 0..dim {
            *system.at_mut(r, c) = equations.at(r, c).clone();
        }
    }
    let mut row_base = equations.rows();
    for (ci, constraint) in constraints.iter().enumerate() {
        for r in 0..constraint.map.rows() {
            for c in 0..dim {
                *system.at_mut(row_base + r, c) = constraint.map.at(r, c).clone();
            }
            for c in 0..constraint.m_columns.cols() {
                *system.at_mut(row_base + r, aux_offsets[ci] + c) =
                    -constraint.m_columns.at(r, c).clone();
            }
            rhs[row_base + r] = constraint.rhs[r].clone();
        }
        row_base += constraint.map.rows();
    }

    let solution = solve_integer(&system, &rhs).ok_or_else(|| {
        "no class solves the linear constraint system".to_string()
    })?;
    let mut particular = solution.particular;
    let kernel = solution.kernel_basis;

    // Size-reduce the particular solution against the kernel lattice so
    // the scan starts near the origin.
    let norm = |v: &[BigInt]| -> BigInt {
        v[..dim]
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    };
    let mut improved = true;
    while improved {
        improved = false;
        for k in &kernel {
            loop {
                let plus: Vec<BigInt> =
                    particular.iter().zip(k).map(|(a, b)| a + b).collect();
                let minus: Vec<BigInt> =
                    particular.iter().zip(k).map(|(a, b)| a - b).collect();
                if norm(&plus) < norm(&particular) {
                    particular = plus;
                    improved = true;
                } else if norm(&minus) < norm(&particular) {
                    particular = minus;
                    improved = true;
                } else {
                    break;
                }
            }
        }
    }

    let group = kk_group(var_source, var_target);
    let tests: Vec<KKClass> = (0..var_source.len())
        .map(|i| embedding_test_class(var_source, i))
        .collect();

    let mut seen: HashSet<Vec<Vec<Vec<BigInt>>>> = HashSet::new();
    let mut scanned = 0usize;
    let mut check = |flat: &[BigInt]| -> Option<(KKClass, LiftCertificate)> {
        let diagram = diagram_from_flat(var_source, var_target, flat);
        let class = group.class_of(&diagram);
        if !seen.insert(class.canonical().clone()) {
            return None;
        }
        // Positivity on the embedding test family, then the scale.
        for test in &tests {
            let composite = compose(test, &class).expect("test targets the source");
            try_certificate(&composite).ok()?;
        }
        let cert = try_certificate(&class).ok()?;
        if !is_subunital(&cert.shifted_representative) {
            return None;
        }
        Some((class, cert))
    };

    // Shell 0: the reduced particular solution itself.
    if let Some(hit) = check(&particular[..dim]) {
        return Ok(hit);
    }
    scanned += 1;

    // Graded-lexicographic scan of kernel combinations by max-norm.
    let kdim = kernel.len();
    for shell in 1..=bounds.coefficient_bound {
        let mut coeffs = vec![-shell; kdim];
        'outer: loop {
            if scanned >= bounds.candidate_cap {
                return Err(format!(
                    "no liftable scale-compatible class within coefficient bound \
                     {} (candidate cap reached)",
                    bounds.coefficient_bound
                ));
            }
            if coeffs.iter().any(|c| c.abs() == shell) {
                let mut flat = particular[..dim].to_vec();
                for (c, k) in coeffs.iter().zip(kernel.iter()) {
                    if *c != 0 {
                        for (f, kv) in flat.iter_mut().zip(k[..dim].iter()) {
                            *f += BigInt::from(*c) * kv;
                        }
                    }
                }
                scanned += 1;
                if let Some(hit) = check(&flat) {
                    return Ok(hit);
                }
            }
            // advance odometer
            for pos in 0..kdim {
                if coeffs[pos] < shell {
                    coeffs[pos] += 1;
                    continue 'outer;
                }
                coeffs[pos] = -shell;
            }
            break;
        }
        if kdim == 0 {
            break;
        }
    }
    Err(format!(
        "no liftable scale-compatible class within coefficient bound {}",
        bounds.coefficient_bound
    ))
}

/// Checks the seed family commutes with the connecting classes.
fn check_seed(
    system_a: &InductiveSystem,
    system_b: &InductiveSystem,
    seed: &[KKClass],
) -> Result<(), IntertwineError> {
    let shared = system_a.len().min(system_b.len());
    if seed.len() != shared {
        return Err(IntertwineError::SeedShape {
            got: seed.len(),
            expected: shared,
        });
    }
    for t in 0..shared.saturating_sub(1) {
        let phi = system_a.connecting()[t].induced_class();
        let psi = system_b.connecting()[t].induced_class();
        let left = compose(&phi, &seed[t + 1]).expect("stage chain");
        let right = compose(&seed[t], &psi).expect("stage chain");
        if left != right {
            return Err(IntertwineError::SeedIncompatible { stage: t });
        }
    }
    Ok(())
}

/// Alternating construction of the ladder between two systems guided
/// by a stage-wise seed family.
///
/// Each rung solves the linear system expressing equality of the
/// composites with the connecting classes and, after pushing to the
/// last bounded stage, with the seed, then scans the affine solution
/// lattice for a class that passes the embedding-family positivity
/// tests and the scale inequality. The stage index advances when a
/// rung is infeasible at the current stage.
pub fn ladder_search(
    system_a: &InductiveSystem,
    system_b: &InductiveSystem,
    seed: &[KKClass],
    bounds: &SearchBounds,
) -> Result<SearchOutcome, IntertwineError> {
    check_seed(system_a, system_b, seed)?;
    let last_a = (system_a.len() - 1).min(bounds.max_stage);
    let last_b = (system_b.len() - 1).min(bounds.max_stage);
    // seed pushed to the comparison stage on the B side
    let compare_b = last_b;

    let mut ladder = Ladder {
        source_stages: Vec::new(),
        target_stages: Vec::new(),
        down: Vec::new(),
        up: Vec::new(),
        down_certificates: Vec::new(),
        up_certificates: Vec::new(),
    };

    let mut rung = 1usize;
    let mut r_n = 0usize; // current source stage
    let mut next_k = 0usize; // smallest admissible target stage
    loop {
        // ---- down map A_{r_n} -> B_k ----
        if r_n > last_a || r_n >= seed.len() || next_k > last_b {
            // stages exhausted; the ladder ends here
            break;
        }
        let mut found = None;
        let mut last_reason = String::new();
        for k in next_k..=last_b {
            let var_source = &system_a.stages()[r_n];
            let var_target = &system_b.stages()[k];
            let mut constraints = Vec::new();
            // seed agreement after pushing to the comparison stage
            let push_b = system_b.composite_diagram(k, compare_b).unwrap();
            let seed_pushed = {
                let to_compare = system_b.composite_class(r_n, compare_b).unwrap();
                compose(&seed[r_n], &to_compare).expect("stage chain")
            };
            constraints.push(ClassConstraint {
                map: compose_before_matrix(&push_b, var_source.len()),
                rhs: flatten_diagram(seed_pushed.representative()),
                m_columns: m_lattice_columns(var_source, &system_b.stages()[compare_b]),
            });
            // triangle with the previous up map
            if let Some(sigma_prev) = ladder.up.last() {
                let psi = system_b
                    .composite_class(*ladder.target_stages.last().unwrap(), k)
                    .unwrap();
                constraints.push(ClassConstraint {
                    map: compose_after_matrix(sigma_prev.representative(), var_target.len()),
                    rhs: flatten_diagram(psi.representative()),
                    m_columns: m_lattice_columns(sigma_prev.source(), var_target),
                });
            }
            match solve_rung(var_source, var_target, &constraints, bounds) {
                Ok((class, cert)) => {
                    found = Some((k, class, cert));
                    break;
                }
                Err(reason) => last_reason = format!("target stage {k}: {reason}"),
            }
        }
        let Some((k, rho, cert)) = found else {
            return Ok(SearchOutcome::NoLadder {
                rung,
                reason: last_reason,
            });
        };
        ladder.source_stages.push(r_n);
        ladder.target_stages.push(k);
        ladder.down.push(rho);
        ladder.down_certificates.push(cert);

        // ---- up map B_k -> A_{r_{n+1}} ----
        let s_n = k;
        let up_candidates: Vec<usize> = ((r_n + 1)..=last_a)
            .filter(|&r| r < seed.len())
            .collect();
        if up_candidates.is_empty() {
            // source stages exhausted; the ladder ends with this down map
            break;
        }
        let mut found_up = None;
        let mut last_reason_up = String::new();
        for r in up_candidates {
            let var_source = &system_b.stages()[s_n];
            let var_target = &system_a.stages()[r];
            let mut constraints = Vec::new();
            // seed-side agreement: seed[r] . sigma pushed to the
            // comparison stage equals the B-side connecting class.
            let push_after = {
                let seed_rep = seed[r].representative().clone();
                let push_b = system_b.composite_diagram(r, compare_b).unwrap();
                compose_diagrams(&seed_rep, &push_b).expect("stage chain")
            };
            let rhs_class = system_b.composite_class(s_n, compare_b).unwrap();
            constraints.push(ClassConstraint {
                map: compose_before_matrix(&push_after, var_source.len()),
                rhs: flatten_diagram(rhs_class.representative()),
                m_columns: m_lattice_columns(var_source, &system_b.stages()[compare_b]),
            });
            // triangle with the current down map
            let rho_n = ladder.down.last().unwrap();
            let phi = system_a.composite_class(r_n, r).unwrap();
            constraints.push(ClassConstraint {
                map: compose_after_matrix(rho_n.representative(), var_target.len()),
                rhs: flatten_diagram(phi.representative()),
                m_columns: m_lattice_columns(rho_n.source(), var_target),
            });
            match solve_rung(var_source, var_target, &constraints, bounds) {
                Ok((class, cert)) => {
                    found_up = Some((r, class, cert));
                    break;
                }
                Err(reason) => last_reason_up = format!("source stage {r}: {reason}"),
            }
        }
        let Some((r, sigma, cert_up)) = found_up else {
            // candidates existed but none passed: a genuine obstruction
            return Ok(SearchOutcome::NoLadder {
                rung,
                reason: last_reason_up,
            });
        };
        ladder.up.push(sigma);
        ladder.up_certificates.push(cert_up);
        r_n = r;
        next_k = s_n + 1;
        rung += 1;
    }

    if ladder.down.is_empty() || ladder.up.is_empty() {
        return Ok(SearchOutcome::NoLadder {
            rung,
            reason: "systems too short for a ladder".to_string(),
        });
    }
    debug_assert!(verify_ladder(system_a, system_b, &ladder));
    Ok(SearchOutcome::Found(ladder))
}

/// Re-verifies a ladder from scratch: both triangle families hold in
/// canonical coordinates and every rung certificate is a nonnegative
/// representative of its class.
pub fn verify_ladder(
    system_a: &InductiveSystem,
    system_b: &InductiveSystem,
    ladder: &Ladder,
) -> bool {
    let n_down = ladder.down.len();
    if ladder.source_stages.len() != n_down || ladder.target_stages.len() != n_down {
        return false;
    }
    let certificate_valid = |cert: &LiftCertificate, class: &KKClass| -> bool {
        crate::kk::canonicalize(&cert.shifted_representative) == *class
            && cert.shifted_representative.entries().iter().flatten().all(|e| {
                !e.a.is_negative()
                    && !e.b.is_negative()
                    && !e.c.is_negative()
                    && !e.d.is_negative()
            })
    };
    for i in 0..n_down {
        if !certificate_valid(&ladder.down_certificates[i], &ladder.down[i]) {
            return false;
        }
    }
    for (i, sigma) in ladder.up.iter().enumerate() {
        if !certificate_valid(&ladder.up_certificates[i], sigma) {
            return false;
        }
        // triangle 1: sigma_n . rho_n = connecting in A
        let rho = &ladder.down[i];
        let triangle = compose(rho, sigma).expect("ladder chains");
        let phi = system_a
            .composite_class(ladder.source_stages[i], ladder.source_stages[i + 1])
            .unwrap();
        if triangle != phi {
            return false;
        }
        // triangle 2: rho_{n+1} . sigma_n = connecting in B
        if let Some(rho_next) = ladder.down.get(i + 1) {
            let triangle = compose(sigma, rho_next).expect("ladder chains");
            let psi = system_b
                .composite_class(ladder.target_stages[i], ladder.target_stages[i + 1])
                .unwrap();
            if triangle != psi {
                return false;
            }
        }
    }
    true
}
