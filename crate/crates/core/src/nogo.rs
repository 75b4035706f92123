//! Verification core: decides by explicit linear algebra whether any
//! observable can register a single-event Boolean difference between
//! given states.
//!
//! Eigenstate conditions are linearized as `(I - P_k) G P_k = 0` (with
//! `P_k` the state projector), which avoids the bilinear unknown
//! `(G, g_k)`; the admissible observables form a linear subspace computed
//! by nullspace extraction, and the eigenvalues are recovered afterwards
//! as linear functionals on that subspace.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use rand_core::SeedableRng;

use crate::chain::PointerSystem;
use crate::error::{Error, Result};
use crate::linalg::{nullspace, CMatrix};
use crate::math;
use crate::qcore::{
    spectral_decompose, trace_distance, DensityMatrix, HermitianObservable, Ket, Tolerances,
};
use crate::sample;

/// "State `state` must be an eigenstate of the unknown observable, which
/// acts on the `acting` subsystems of the state's layout." Constraints
/// whose `class` tags differ must receive distinct eigenvalues.
#[derive(Debug, Clone)]
pub struct EigenConstraint {
    pub state: Ket,
    pub acting: Vec<String>,
    pub class: u32,
}

impl EigenConstraint {
    pub fn new(state: Ket, acting: &[&str], class: u32) -> Self {
        Self {
            state,
            acting: acting.iter().map(|s| String::from(*s)).collect(),
            class,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityVerdict {
    /// Some admissible observable separates every pair of distinct
    /// classes; a witness is attached.
    Feasible,
    /// A required eigenvalue difference vanishes identically on the
    /// solution space; the certificate names it.
    Infeasible,
}

/// The vanishing distinctness functional certifying infeasibility.
#[derive(Debug, Clone)]
pub struct InfeasibilityCertificate {
    /// Indices of the constraint pair whose eigenvalue difference
    /// vanishes identically.
    pub pair: (usize, usize),
    /// Coefficients of `g_j - g_k` over the solution basis.
    pub functional: Vec<f64>,
    pub functional_norm: f64,
}

/// Outcome of the eigen-observable feasibility analysis.
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    /// Dimension of the admissible-observable subspace.
    pub solution_dimension: usize,
    /// Orthonormal (Hilbert-Schmidt) Hermitian basis of that subspace,
    /// on the acting sub-layout.
    pub basis: Vec<HermitianObservable>,
    /// Per-constraint eigenvalue functionals `g_k` as linear forms over
    /// the basis coordinates.
    pub eigenvalue_functionals: Vec<Vec<f64>>,
    pub verdict: FeasibilityVerdict,
    /// Separating observable (unit Frobenius norm) when feasible.
    pub witness: Option<HermitianObservable>,
    /// Eigenvalues the witness assigns to each constraint state.
    pub witness_eigenvalues: Option<Vec<f64>>,
    pub certificate: Option<InfeasibilityCertificate>,
    /// Singular values of the constraint system, descending.
    pub singular_values: Vec<f64>,
}

/// Minimum eigenvalue gap a witness must achieve between distinct
/// classes.
pub const WITNESS_GAP: f64 = 1e-6;

/// Orthonormal Hermitian basis of a d-dimensional operator space:
/// diagonal units, then symmetric and antisymmetric off-diagonal pairs
/// scaled by 1/sqrt(2).
fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(d * d);
    for k in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        basis.push(m);
    }
    let r = 1.0 / math::sqrt(2.0);
    for i in 0..d {
        for j in (i + 1)..d {
            let mut re = CMatrix::zeros(d, d);
            re[(i, j)] = Complex64::new(r, 0.0);
            re[(j, i)] = Complex64::new(r, 0.0);
            basis.push(re);
            let mut im = CMatrix::zeros(d, d);
            im[(i, j)] = Complex64::new(0.0, r);
            im[(j, i)] = Complex64::new(0.0, -r);
            basis.push(im);
        }
    }
    basis
}

/// Decides whether a Hermitian observable on the shared acting subsystem
/// can have every constraint state as an eigenstate while assigning
/// distinct eigenvalues to distinct classes.
///
/// The solution space always contains the identity, so its dimension is
/// at least 1; the verdict is infeasible exactly when some required
/// difference `g_j - g_k` is the zero functional on the solution space
/// (no admissible observable separates that pair, so no witness can
/// exist).
pub fn eigen_observable_feasibility(
    constraints: &[EigenConstraint],
    tol: &Tolerances,
) -> Result<FeasibilityReport> {
    if constraints.is_empty() {
        return Err(Error::EmptyConstraints);
    }
    let mut classes: Vec<u32> = constraints.iter().map(|c| c.class).collect();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::TooFewClasses);
    }

    let acting_refs: Vec<&str> = constraints[0].acting.iter().map(|s| s.as_str()).collect();
    let acting_layout = constraints[0].state.layout().sub_layout(&acting_refs)?;
    for c in constraints {
        let refs: Vec<&str> = c.acting.iter().map(|s| s.as_str()).collect();
        let sub = c
            .state
            .layout()
            .sub_layout(&refs)
            .map_err(|_| Error::ConstraintSubsystemMismatch)?;
        if sub != acting_layout {
            return Err(Error::ConstraintSubsystemMismatch);
        }
    }

    let d = acting_layout.dim();
    let basis_matrices = hermitian_basis(d);
    let n_params = basis_matrices.len();

    // Lift each basis element onto each constraint's layout once.
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut lifted_basis: Vec<Vec<CMatrix>> = Vec::with_capacity(constraints.len());
    for c in constraints {
        let mut per_constraint = Vec::with_capacity(n_params);
        for b in &basis_matrices {
            let obs = HermitianObservable::new(b.clone(), acting_layout.clone())
                .expect("basis elements are Hermitian");
            per_constraint.push(obs.lift(c.state.layout())?.matrix().clone());
        }
        lifted_basis.push(per_constraint);
    }

    for (c, lifts) in constraints.iter().zip(lifted_basis.iter()) {
        let psi = c.state.amplitudes();
        let dim = psi.len();
        // (I - |psi><psi|) L(B_j) |psi> = 0, row per real/imag component.
        let mut applied: Vec<Vec<Complex64>> = Vec::with_capacity(n_params);
        for lift in lifts {
            let v = lift.matvec(psi);
            let overlap: Complex64 = psi.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            let residual: Vec<Complex64> = v
                .iter()
                .zip(psi.iter())
                .map(|(vi, pi)| vi - overlap * pi)
                .collect();
            applied.push(residual);
        }
        for comp in 0..dim {
            let mut row_re = Vec::with_capacity(n_params);
            let mut row_im = Vec::with_capacity(n_params);
            for res in &applied {
                row_re.push(res[comp].re);
                row_im.push(res[comp].im);
            }
            rows.push(row_re);
            rows.push(row_im);
        }
    }

    let ns = nullspace(&rows, n_params, tol.decision);
    let solution_dimension = ns.basis.len();

    // Materialize the solution basis as Hermitian matrices on the acting
    // layout (orthonormal because the parameter basis is).
    let mut basis = Vec::with_capacity(solution_dimension);
    for coords in &ns.basis {
        let mut m = CMatrix::zeros(d, d);
        for (x, b) in coords.iter().zip(basis_matrices.iter()) {
            if *x != 0.0 {
                m = m.add(&b.scale(Complex64::new(*x, 0.0)));
            }
        }
        basis.push(HermitianObservable::new(m, acting_layout.clone())?);
    }

    // Eigenvalue functionals g_k(x) = <psi_k| L(G_b) |psi_k> x_b.
    let mut eigenvalue_functionals = Vec::with_capacity(constraints.len());
    for (k, c) in constraints.iter().enumerate() {
        let mut form = Vec::with_capacity(solution_dimension);
        for g in &basis {
            let lifted = g.lift(c.state.layout())?;
            let v = lifted.matrix().matvec(c.state.amplitudes());
            let val: Complex64 = c
                .state
                .amplitudes()
                .iter()
                .zip(v.iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            form.push(val.re);
        }
        let _ = k;
        eigenvalue_functionals.push(form);
    }

    // Required pairs: distinct class tags, in constraint order.
    let mut required: Vec<(usize, usize)> = Vec::new();
    for j in 0..constraints.len() {
        for k in (j + 1)..constraints.len() {
            if constraints[j].class != constraints[k].class {
                required.push((j, k));
            }
        }
    }

    let functional_scale = eigenvalue_functionals
        .iter()
        .map(|f| math::sqrt(f.iter().map(|x| x * x).sum()))
        .fold(1.0_f64, f64::max);

    let mut certificate: Option<InfeasibilityCertificate> = None;
    for &(j, k) in &required {
        let delta: Vec<f64> = eigenvalue_functionals[j]
            .iter()
            .zip(eigenvalue_functionals[k].iter())
            .map(|(a, b)| a - b)
            .collect();
        let norm = math::sqrt(delta.iter().map(|x| x * x).sum());
        if norm <= tol.decision * functional_scale {
            certificate = Some(InfeasibilityCertificate {
                pair: (j, k),
                functional: delta,
                functional_norm: norm,
            });
            break;
        }
    }

    if let Some(cert) = certificate {
        return Ok(FeasibilityReport {
            solution_dimension,
            basis,
            eigenvalue_functionals,
            verdict: FeasibilityVerdict::Infeasible,
            witness: None,
            witness_eigenvalues: None,
            certificate: Some(cert),
            singular_values: ns.singular_values,
        });
    }

    // All required differences are nonzero functionals; a generic point
    // of the solution space separates every pair at once. Seeded search,
    // deterministic across runs.
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0x5eed_0b5e);
    let mut witness = None;
    let mut witness_eigenvalues = None;
    for _attempt in 0..64 {
        let mut coords: Vec<f64> = (0..solution_dimension)
            .map(|_| sample::standard_normal(&mut rng))
            .collect();
        let norm = math::sqrt(coords.iter().map(|x| x * x).sum());
        if norm == 0.0 {
            continue;
        }
        for x in coords.iter_mut() {
            *x /= norm;
        }
        let values: Vec<f64> = eigenvalue_functionals
            .iter()
            .map(|f| f.iter().zip(coords.iter()).map(|(a, b)| a * b).sum())
            .collect();
        let min_gap = required
            .iter()
            .map(|&(j, k)| math::abs(values[j] - values[k]))
            .fold(f64::INFINITY, f64::min);
        if min_gap > WITNESS_GAP {
            let mut m = CMatrix::zeros(d, d);
            for (x, g) in coords.iter().zip(basis.iter()) {
                m = m.add(&g.matrix().scale(Complex64::new(*x, 0.0)));
            }
            witness = Some(HermitianObservable::new(m, acting_layout.clone())?);
            witness_eigenvalues = Some(values);
            break;
        }
    }

    Ok(FeasibilityReport {
        solution_dimension,
        basis,
        eigenvalue_functionals,
        verdict: FeasibilityVerdict::Feasible,
        witness,
        witness_eigenvalues,
        certificate: None,
        singular_values: ns.singular_values,
    })
}

/// Result of the complete-projector-algebra argument.
#[derive(Debug, Clone)]
pub struct ProjectorCheck {
    /// `|| sum_i P_i - I ||` of the pointer set.
    pub completeness_residual: f64,
    /// `|| P_R P_i ||` per pointer projector.
    pub orthogonality_residuals: Vec<f64>,
    /// True when the candidate is orthogonal to every pointer projector.
    pub orthogonal_to_all: bool,
    /// `sum_i P_R P_i` — equal to `P_R` itself when the set is complete.
    pub sum: CMatrix,
    pub sum_norm: f64,
    /// Orthogonality to a complete set forces the candidate to vanish;
    /// set when `orthogonal_to_all` holds and the sum is numerically zero.
    pub forced_zero: bool,
}

/// Checks the argument `P_R = P_R sum_i P_i = sum_i P_R P_i = 0`: a
/// projector orthogonal to a complete pointer set can only be zero.
///
/// The candidate must be idempotent Hermitian within tolerance; the
/// pointer set must resolve the identity.
pub fn projector_completeness_check(
    pointer_projectors: &[HermitianObservable],
    candidate: &HermitianObservable,
    tol: &Tolerances,
) -> Result<ProjectorCheck> {
    let idem = candidate
        .matrix()
        .mul(candidate.matrix())
        .sub(candidate.matrix())
        .frobenius_norm();
    if idem > tol.decision {
        return Err(Error::NotAProjector(idem));
    }
    let d = candidate.dim();
    let mut sum_p = CMatrix::zeros(d, d);
    for p in pointer_projectors {
        if p.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: p.dim(),
            });
        }
        sum_p = sum_p.add(p.matrix());
    }
    let completeness_residual = sum_p.sub(&CMatrix::identity(d)).frobenius_norm();
    if completeness_residual > tol.decision {
        return Err(Error::IncompleteProjectors(completeness_residual));
    }

    let mut sum = CMatrix::zeros(d, d);
    let mut orthogonality_residuals = Vec::with_capacity(pointer_projectors.len());
    for p in pointer_projectors {
        let prod = candidate.matrix().mul(p.matrix());
        orthogonality_residuals.push(prod.frobenius_norm());
        sum = sum.add(&prod);
    }
    let orthogonal_to_all = orthogonality_residuals
        .iter()
        .all(|r| *r <= tol.decision);
    let sum_norm = sum.frobenius_norm();

    Ok(ProjectorCheck {
        completeness_residual,
        orthogonality_residuals,
        orthogonal_to_all,
        sum_norm,
        forced_zero: orthogonal_to_all && sum_norm <= tol.identity.max(1e-12),
        sum,
    })
}

/// Nullspace of the orthogonality constraints `X P_i = 0` over Hermitian
/// `X`. For a complete pointer set the nullspace is trivial, which is
/// the quantitative content of the projector argument.
#[derive(Debug, Clone)]
pub struct OrthogonalityNullspace {
    pub dimension: usize,
    pub basis: Vec<HermitianObservable>,
    pub singular_values: Vec<f64>,
}

pub fn orthogonality_nullspace(
    pointer_projectors: &[HermitianObservable],
    tol: &Tolerances,
) -> Result<OrthogonalityNullspace> {
    if pointer_projectors.is_empty() {
        return Err(Error::EmptyConstraints);
    }
    let layout = pointer_projectors[0].layout().clone();
    let d = layout.dim();
    let basis_matrices = hermitian_basis(d);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for p in pointer_projectors {
        if p.layout() != &layout {
            return Err(Error::LayoutMismatch);
        }
        // X P_i = 0, entrywise rows over the Hermitian parameterization.
        let mut products: Vec<CMatrix> = Vec::with_capacity(basis_matrices.len());
        for b in &basis_matrices {
            products.push(b.mul(p.matrix()));
        }
        for i in 0..d {
            for j in 0..d {
                let mut row_re = Vec::with_capacity(basis_matrices.len());
                let mut row_im = Vec::with_capacity(basis_matrices.len());
                for prod in &products {
                    row_re.push(prod[(i, j)].re);
                    row_im.push(prod[(i, j)].im);
                }
                rows.push(row_re);
                rows.push(row_im);
            }
        }
    }
    let ns = nullspace(&rows, basis_matrices.len(), tol.decision);
    let mut basis = Vec::with_capacity(ns.basis.len());
    for coords in &ns.basis {
        let mut m = CMatrix::zeros(d, d);
        for (x, b) in coords.iter().zip(basis_matrices.iter()) {
            m = m.add(&b.scale(Complex64::new(*x, 0.0)));
        }
        basis.push(HermitianObservable::new(m, layout.clone())?);
    }
    Ok(OrthogonalityNullspace {
        dimension: ns.basis.len(),
        basis,
        singular_values: ns.singular_values,
    })
}

/// Verdict of the single-event distinguishability check.
#[derive(Debug, Clone)]
pub enum BooleanDifference {
    /// Pairwise orthogonal supports: the witness assigns each state a
    /// distinct outcome with certainty.
    Possible { witness: HermitianObservable },
    /// Some pair overlaps; no observable (projector-valued or POV) can
    /// separate the set deterministically in one event.
    Impossible {
        max_overlap_pair: (usize, usize),
        overlap: f64,
    },
}

impl BooleanDifference {
    pub fn is_possible(&self) -> bool {
        matches!(self, BooleanDifference::Possible { .. })
    }
}

/// Deterministic single-shot discrimination requires pairwise orthogonal
/// supports; POV elements responding to a nonorthogonal unit
/// decomposition cannot produce a Boolean difference either, so support
/// orthogonality is the whole criterion.
///
/// The overlap reported for a failing pair is `Tr(Pi_i Pi_j)` of the
/// support projectors (for pure states, the squared state overlap).
pub fn boolean_difference_possible(
    states: &[DensityMatrix],
    tol: &Tolerances,
) -> Result<BooleanDifference> {
    if states.len() < 2 {
        return Err(Error::InvalidParameter("need at least two states"));
    }
    let layout = states[0].layout().clone();
    for s in states {
        if s.layout() != &layout {
            return Err(Error::LayoutMismatch);
        }
    }
    // Support projector: spectral clusters with weight above tolerance.
    let mut supports = Vec::with_capacity(states.len());
    for s in states {
        let obs = HermitianObservable::new(s.matrix().clone(), layout.clone())?;
        let spec = spectral_decompose(&obs);
        let d = s.dim();
        let mut proj = CMatrix::zeros(d, d);
        for (g, p) in spec.eigenvalues.iter().zip(spec.projectors.iter()) {
            if *g > tol.decision {
                proj = proj.add(p.matrix());
            }
        }
        supports.push(proj);
    }

    let mut worst: Option<((usize, usize), f64)> = None;
    for i in 0..states.len() {
        for j in (i + 1)..states.len() {
            let overlap = supports[i].mul(&supports[j]).trace().re;
            if overlap > worst.map(|w| w.1).unwrap_or(f64::NEG_INFINITY) {
                worst = Some(((i, j), overlap));
            }
        }
    }
    let ((wi, wj), max_overlap) = worst.expect("at least one pair");
    if max_overlap > tol.decision {
        return Ok(BooleanDifference::Impossible {
            max_overlap_pair: (wi, wj),
            overlap: max_overlap,
        });
    }

    // Witness: distinct outcome per support, values spread over [-1, 1]
    // (for two states this is the +-1 pointer observable).
    let n = states.len();
    let d = layout.dim();
    let mut m = CMatrix::zeros(d, d);
    for (i, proj) in supports.iter().enumerate() {
        let value = 1.0 - 2.0 * i as f64 / (n as f64 - 1.0);
        m = m.add(&proj.scale(Complex64::new(value, 0.0)));
    }
    Ok(BooleanDifference::Possible {
        witness: HermitianObservable::new(m, layout)?,
    })
}

/// Trace distances of the full states and of their reductions onto the
/// named subsystem: `(global, local)`.
pub fn restricted_trace_distance(
    r1: &DensityMatrix,
    r2: &DensityMatrix,
    subsystem: &[&str],
) -> Result<(f64, f64)> {
    let global = trace_distance(r1, r2)?;
    let local = trace_distance(
        &r1.partial_trace(subsystem)?,
        &r2.partial_trace(subsystem)?,
    )?;
    Ok((global, local))
}

/// Builds the standard no-go constraint set for the chain: the two
/// pointer eigenstates on the pointer subsystem, plus the entangled
/// premeasured state with the unknown observable still acting on the
/// pointer alone.
///
/// Class tags: the pointer states are classes 1 and 2. When both
/// amplitudes are nonzero the entangled state gets its own class 0 (the
/// paper's Boolean-difference demand); when one amplitude vanishes the
/// state coincides with a pointer branch and inherits that class.
pub fn pointer_constraints(psi: &Ket, pointer: &PointerSystem) -> Result<Vec<EigenConstraint>> {
    let (w0, w1) = crate::chain::branch_weights(psi, pointer.label())?;
    let psi_class = if w1 <= 1e-12 {
        1
    } else if w0 <= 1e-12 {
        2
    } else {
        0
    };
    let label = pointer.label();
    Ok(vec![
        EigenConstraint::new(psi.clone(), &[label], psi_class),
        EigenConstraint::new(pointer.eigenstate(0), &[label], 1),
        EigenConstraint::new(pointer.eigenstate(1), &[label], 2),
    ])
}
