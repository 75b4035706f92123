//! The measurement chain: a spin-1/2 system, pointer systems that record
//! its `S_z` value, and an optional qubit environment.
//!
//! Premeasurement is modeled directly as the unitary it induces,
//! `U |s_i>|x_0> = |s_i>|x_i>`, completed on the orthogonal complement by
//! the canonical choice `|x_0-perp> -> |x_(other i)>` (a controlled
//! Hadamard-type shift). Interaction times only sequence the maps, so no
//! Hamiltonian integration is performed.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::math;
use crate::qcore::{CompositeLayout, DensityMatrix, HermitianObservable, Ket, Tolerances};
use crate::restrict::{Gemenge, GemengeComponent};
use crate::sample;

/// Conventional subsystem labels used by the chain builders.
pub const SPIN_LABEL: &str = "S";
pub const DETECTOR_LABEL: &str = "D";
pub const OBSERVER_LABEL: &str = "O";

/// Measured spin state `a1 |s1> + a2 |s2>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState {
    a1: Complex64,
    a2: Complex64,
}

impl SpinState {
    pub fn new(a1: Complex64, a2: Complex64) -> Result<Self> {
        let dev = math::abs(a1.norm_sqr() + a2.norm_sqr() - 1.0);
        if dev > Tolerances::default().decision {
            return Err(Error::NotNormalized(dev));
        }
        Ok(Self { a1, a2 })
    }

    pub fn from_reals(a1: f64, a2: f64) -> Result<Self> {
        Self::new(Complex64::new(a1, 0.0), Complex64::new(a2, 0.0))
    }

    /// Equal-amplitude superposition.
    pub fn symmetric() -> Self {
        let r = 1.0 / math::sqrt(2.0);
        Self {
            a1: Complex64::new(r, 0.0),
            a2: Complex64::new(r, 0.0),
        }
    }

    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        (self.a1, self.a2)
    }

    /// Born weights `(|a1|^2, |a2|^2)`.
    pub fn probabilities(&self) -> (f64, f64) {
        (self.a1.norm_sqr(), self.a2.norm_sqr())
    }

    /// The state as a ket on the spin layout.
    pub fn ket(&self) -> Ket {
        let layout = CompositeLayout::single(SPIN_LABEL, 2).unwrap();
        Ket::new(vec![self.a1, self.a2], layout).expect("normalized by construction")
    }
}

/// Two-level pointer: eigenstates `|x1>, |x2>` of the pointer observable
/// with eigenvalues `q1 != q2`, prepared in the ready state
/// `(|x1>+|x2>)/sqrt(2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerSystem {
    label: String,
    eigenvalues: (f64, f64),
    initial: [Complex64; 2],
}

impl PointerSystem {
    pub fn new(label: impl Into<String>, eigenvalues: (f64, f64)) -> Result<Self> {
        if eigenvalues.0 == eigenvalues.1 {
            return Err(Error::InvalidParameter("pointer eigenvalues must differ"));
        }
        let r = 1.0 / math::sqrt(2.0);
        Ok(Self {
            label: label.into(),
            eigenvalues,
            initial: [Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
        })
    }

    /// The observer stage `O` with the default `+-1` eigenvalues.
    pub fn observer() -> Self {
        Self::new(OBSERVER_LABEL, (1.0, -1.0)).unwrap()
    }

    /// The detector stage `D` with the default `+-1` eigenvalues.
    pub fn detector() -> Self {
        Self::new(DETECTOR_LABEL, (1.0, -1.0)).unwrap()
    }

    /// Replaces the prepared state (used to exercise the precondition on
    /// premeasurement; the chain builders never change it).
    pub fn with_initial(mut self, initial: [Complex64; 2]) -> Result<Self> {
        let dev = math::abs(initial[0].norm_sqr() + initial[1].norm_sqr() - 1.0);
        if dev > Tolerances::default().decision {
            return Err(Error::NotNormalized(dev));
        }
        self.initial = initial;
        Ok(self)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        self.eigenvalues
    }

    pub fn layout(&self) -> CompositeLayout {
        CompositeLayout::single(self.label.clone(), 2).unwrap()
    }

    /// Pointer eigenstate `|x_i>` for `i` in `{0, 1}`.
    pub fn eigenstate(&self, i: usize) -> Ket {
        Ket::basis_state(self.layout(), i).expect("two-dimensional pointer")
    }

    pub fn initial_state(&self) -> Ket {
        Ket::new(self.initial.to_vec(), self.layout()).expect("validated on construction")
    }

    fn initial_is_ready(&self) -> Result<()> {
        let r = 1.0 / math::sqrt(2.0);
        let dev = math::hypot(
            (self.initial[0] - Complex64::new(r, 0.0)).norm(),
            (self.initial[1] - Complex64::new(r, 0.0)).norm(),
        );
        if dev > Tolerances::default().decision {
            return Err(Error::PointerNotInitial(dev));
        }
        Ok(())
    }
}

/// Pointer observable `q1 P1 + q2 P2` in the pointer basis.
pub fn pointer_observable(p: &PointerSystem) -> HermitianObservable {
    HermitianObservable::diagonal(p.layout(), &[p.eigenvalues.0, p.eigenvalues.1])
        .expect("diagonal on own layout")
}

/// The incoming test ensemble with the same pointer statistics as the
/// superposition: gemenge `{(|s_i>, |a_i|^2)}`. Phases are discarded by
/// the modulus; zero-weight components are dropped.
pub fn make_test_mixture(s: &SpinState) -> Gemenge {
    let layout = CompositeLayout::single(SPIN_LABEL, 2).unwrap();
    let (p1, p2) = s.probabilities();
    let mut components = Vec::new();
    for (i, p) in [(0usize, p1), (1usize, p2)] {
        if p > 0.0 {
            let ket = Ket::basis_state(layout.clone(), i).unwrap();
            components.push((GemengeComponent::Pure(ket), p));
        }
    }
    Gemenge::new(components).expect("probabilities sum to 1")
}

/// The premeasurement unitary on spin (x) pointer, as a 4x4 matrix:
/// branch `s_i` applies the rotation taking `(|x0>, |x0-perp>)` to
/// `(|x_i>, |x_(other)>)`. It does not depend on the pointer eigenvalues.
pub fn premeasure_unitary() -> CMatrix {
    let r = 1.0 / math::sqrt(2.0);
    // V_1 = |x1><x0| + |x2><x0p|, V_2 = |x2><x0| + |x1><x0p|.
    let v1 = CMatrix::from_reals(2, 2, &[(r, 0.0), (r, 0.0), (r, 0.0), (-r, 0.0)]);
    let v2 = CMatrix::from_reals(2, 2, &[(r, 0.0), (-r, 0.0), (r, 0.0), (r, 0.0)]);
    let mut u = CMatrix::zeros(4, 4);
    for (branch, v) in [(0usize, &v1), (1usize, &v2)] {
        for i in 0..2 {
            for j in 0..2 {
                u[(branch * 2 + i, branch * 2 + j)] = v[(i, j)];
            }
        }
    }
    u
}

fn premeasure_spin_ket(spin: &Ket, p: &PointerSystem) -> Result<Ket> {
    let u = premeasure_unitary();
    debug_assert!(
        u.mul(&u.adjoint())
            .sub(&CMatrix::identity(4))
            .frobenius_norm()
            < 1e-12,
        "premeasurement unitary failed its unitarity check"
    );
    let joint = spin.tensor(&p.initial_state())?;
    let amplitudes = u.matvec(joint.amplitudes());
    Ket::new(amplitudes, joint.layout().clone())
}

/// Premeasurement of a pure spin state: `sum_i a_i |s_i>|x_i>` on the
/// spin (x) pointer layout. The pointer must be in its ready state.
pub fn premeasure(s: &SpinState, p: &PointerSystem) -> Result<Ket> {
    p.initial_is_ready()?;
    premeasure_spin_ket(&s.ket(), p)
}

/// Component-wise premeasurement of a spin gemenge; probabilities are
/// carried over unchanged.
pub fn premeasure_gemenge(g: &Gemenge, p: &PointerSystem) -> Result<Gemenge> {
    p.initial_is_ready()?;
    let mut components = Vec::with_capacity(g.components().len());
    for (comp, prob) in g.components() {
        let mapped = match comp {
            GemengeComponent::Pure(ket) => GemengeComponent::Pure(premeasure_spin_ket(ket, p)?),
            GemengeComponent::Mixed(rho) => {
                let u = premeasure_unitary();
                let joint = rho.tensor(&p.initial_state().density())?;
                let evolved = u.mul(joint.matrix()).mul(&u.adjoint());
                GemengeComponent::Mixed(DensityMatrix::new(evolved, joint.layout().clone())?)
            }
        };
        components.push((mapped, *prob));
    }
    Gemenge::new(components)
}

/// Sequential premeasurement through several pointer stages: each stage
/// copies the branch index, producing `sum_i a_i |s_i> |X_i> |Y_i> ...`.
pub fn premeasure_chain(s: &SpinState, stages: &[&PointerSystem]) -> Result<Ket> {
    let (a1, a2) = s.amplitudes();
    let mut branch0 = Ket::basis_state(CompositeLayout::single(SPIN_LABEL, 2).unwrap(), 0)?;
    let mut branch1 = Ket::basis_state(CompositeLayout::single(SPIN_LABEL, 2).unwrap(), 1)?;
    for p in stages {
        p.initial_is_ready()?;
        branch0 = branch0.tensor(&p.eigenstate(0))?;
        branch1 = branch1.tensor(&p.eigenstate(1))?;
    }
    let layout = branch0.layout().clone();
    let amplitudes: Vec<Complex64> = branch0
        .amplitudes()
        .iter()
        .zip(branch1.amplitudes())
        .map(|(b0, b1)| a1 * b0 + a2 * b1)
        .collect();
    Ket::new(amplitudes, layout)
}

/// How the per-qubit environment branch states `|E^j_1>, |E^j_2>` are
/// chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum EnvironmentModel {
    /// `|E_1> = |0>`, `|E_2> = v|0> + sqrt(1-v^2)|1>`, overlap `v` in
    /// `[-1, 1]` (the cos-theta parameterization).
    FixedOverlap(f64),
    /// Independent Haar-random qubit pairs.
    Haar,
    /// Explicit branch pairs, one per environment qubit.
    Explicit(Vec<([Complex64; 2], [Complex64; 2])>),
}

/// Environment: number of qubits plus the branch-state rule.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentSpec {
    pub count: usize,
    pub model: EnvironmentModel,
}

impl EnvironmentSpec {
    pub fn fixed_overlap(count: usize, overlap: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&overlap) {
            return Err(Error::InvalidParameter("overlap must lie in [-1, 1]"));
        }
        Ok(Self {
            count,
            model: EnvironmentModel::FixedOverlap(overlap),
        })
    }

    pub fn haar(count: usize) -> Self {
        Self {
            count,
            model: EnvironmentModel::Haar,
        }
    }

    /// Materializes branch pairs; `rng` is only consumed by the Haar
    /// model.
    pub fn realize(&self, rng: &mut impl RngCore) -> Result<EnvironmentBranches> {
        let mut pairs = Vec::with_capacity(self.count);
        match &self.model {
            EnvironmentModel::FixedOverlap(v) => {
                let ortho = math::sqrt((1.0 - v * v).max(0.0));
                for _ in 0..self.count {
                    pairs.push((
                        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                        [Complex64::new(*v, 0.0), Complex64::new(ortho, 0.0)],
                    ));
                }
            }
            EnvironmentModel::Haar => {
                for _ in 0..self.count {
                    pairs.push((sample::haar_qubit(rng), sample::haar_qubit(rng)));
                }
            }
            EnvironmentModel::Explicit(list) => {
                if list.len() != self.count {
                    return Err(Error::DimensionMismatch {
                        expected: self.count,
                        actual: list.len(),
                    });
                }
                for pair in list {
                    for state in [&pair.0, &pair.1] {
                        let dev = math::abs(state[0].norm_sqr() + state[1].norm_sqr() - 1.0);
                        if dev > Tolerances::default().decision {
                            return Err(Error::NotNormalized(dev));
                        }
                    }
                    pairs.push(*pair);
                }
            }
        }
        Ok(EnvironmentBranches { pairs })
    }
}

/// Concrete environment branch states, ready to tensor onto a chain
/// state.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentBranches {
    pairs: Vec<([Complex64; 2], [Complex64; 2])>,
}

impl EnvironmentBranches {
    pub fn empty() -> Self {
        Self { pairs: Vec::new() }
    }

    pub fn count(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[([Complex64; 2], [Complex64; 2])] {
        &self.pairs
    }

    /// `prod_j <E^j_2 | E^j_1>` — the factor multiplying the branch
    /// coherence of the reduced state.
    pub fn overlap_product(&self) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for (e1, e2) in &self.pairs {
            let ip: Complex64 = e2[0].conj() * e1[0] + e2[1].conj() * e1[1];
            acc *= ip;
        }
        acc
    }
}

/// Splits `psi` into its two pointer-tagged branches and validates branch
/// form: the co-factors of the two pointer eigenstates must be mutually
/// orthogonal (trivially true when the pointer is the whole space).
pub(crate) struct BranchSplit {
    /// Per branch, amplitudes over the co-factor space (all non-pointer
    /// subsystems, in layout order).
    pub cofactors: [Vec<Complex64>; 2],
    pub pointer_position: usize,
}

pub(crate) fn branch_split(psi: &Ket, pointer_label: &str) -> Result<BranchSplit> {
    let layout = psi.layout();
    let pos = layout
        .position(pointer_label)
        .ok_or_else(|| Error::UnknownLabel(pointer_label.to_string()))?;
    if layout.parts()[pos].dim() != 2 {
        return Err(Error::InvalidParameter("pointer subsystem must be two-dimensional"));
    }
    let n = layout.len();
    let cofactor_dim = layout.dim() / 2;
    let mut cofactors = [
        vec![Complex64::new(0.0, 0.0); cofactor_dim],
        vec![Complex64::new(0.0, 0.0); cofactor_dim],
    ];
    let mut multi = vec![0usize; n];
    for (flat, amp) in psi.amplitudes().iter().enumerate() {
        layout.decode(flat, &mut multi);
        let branch = multi[pos];
        // Flat co-factor index: same digits with the pointer removed.
        let mut idx = 0;
        for (k, &digit) in multi.iter().enumerate() {
            if k == pos {
                continue;
            }
            idx = idx * layout.parts()[k].dim() + digit;
        }
        cofactors[branch][idx] = *amp;
    }
    if cofactor_dim > 1 {
        let cross: Complex64 = cofactors[0]
            .iter()
            .zip(cofactors[1].iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        let n0: f64 = cofactors[0].iter().map(|a| a.norm_sqr()).sum();
        let n1: f64 = cofactors[1].iter().map(|a| a.norm_sqr()).sum();
        let scale = math::sqrt(n0 * n1);
        if scale > 0.0 && cross.norm() > Tolerances::default().decision * scale.max(1.0) {
            return Err(Error::NotBranchForm(cross.norm()));
        }
    }
    Ok(BranchSplit {
        cofactors,
        pointer_position: pos,
    })
}

/// Branch weights `|a_i|^2` of a branch-form state.
pub fn branch_weights(psi: &Ket, pointer_label: &str) -> Result<(f64, f64)> {
    let split = branch_split(psi, pointer_label)?;
    let w0: f64 = split.cofactors[0].iter().map(|a| a.norm_sqr()).sum();
    let w1: f64 = split.cofactors[1].iter().map(|a| a.norm_sqr()).sum();
    Ok((w0, w1))
}

/// Tensors each pointer branch with its environment record:
/// branch `i` acquires `prod_j |E^j_i>`. With no environment qubits the
/// input is returned unchanged. Labels `E1, E2, ...` are appended.
pub fn extend_with_environment(
    psi: &Ket,
    pointer_label: &str,
    env: &EnvironmentBranches,
) -> Result<Ket> {
    let split = branch_split(psi, pointer_label)?;
    if env.count() == 0 {
        return Ok(psi.clone());
    }
    let mut env_layout_parts: Vec<(String, usize)> = Vec::with_capacity(env.count());
    for j in 0..env.count() {
        let mut label = String::from("E");
        // no_std-friendly integer formatting
        label.push_str(itoa(j + 1).as_str());
        env_layout_parts.push((label, 2));
    }
    let env_layout = CompositeLayout::new(env_layout_parts)?;
    let layout = psi.layout().concat(&env_layout)?;

    // Branch records: product state over the environment qubits.
    let mut records = [vec![Complex64::new(1.0, 0.0)], vec![Complex64::new(1.0, 0.0)]];
    for (e1, e2) in env.pairs() {
        for (record, state) in records.iter_mut().zip([e1, e2]) {
            let mut next = Vec::with_capacity(record.len() * 2);
            for amp in record.iter() {
                next.push(amp * state[0]);
                next.push(amp * state[1]);
            }
            *record = next;
        }
    }

    let env_dim = 1usize << env.count();
    let base_dim = psi.dim();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); base_dim * env_dim];
    let base_layout = psi.layout();
    let n = base_layout.len();
    let mut multi = vec![0usize; n];
    for (flat, amp) in psi.amplitudes().iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        base_layout.decode(flat, &mut multi);
        let branch = multi[split.pointer_position];
        for (e, rec) in records[branch].iter().enumerate() {
            amplitudes[flat * env_dim + e] = amp * rec;
        }
    }
    Ket::new(amplitudes, layout)
}

fn itoa(mut n: usize) -> String {
    if n == 0 {
        return "0".to_string();
    }
    let mut digits = Vec::new();
    while n > 0 {
        digits.push(b'0' + (n % 10) as u8);
        n /= 10;
    }
    digits.reverse();
    String::from_utf8(digits).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{expectation_power, is_eigenstate, partial_trace};
    use crate::sample::event_rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn test_mixture_probabilities() {
        let s = SpinState::symmetric();
        let g = make_test_mixture(&s);
        let probs: Vec<f64> = g.components().iter().map(|(_, p)| *p).collect();
        assert!((probs[0] - 0.5).abs() < 1e-12 && (probs[1] - 0.5).abs() < 1e-12);

        // Eigenstate input collapses to one component with probability 1.
        let s = SpinState::from_reals(1.0, 0.0).unwrap();
        let g = make_test_mixture(&s);
        assert_eq!(g.components().len(), 1);
        assert!((g.components()[0].1 - 1.0).abs() < 1e-15);

        // Phases are discarded by the modulus.
        let s = SpinState::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let g = make_test_mixture(&s);
        assert!((g.components()[0].1 - 0.36).abs() < 1e-12);
        assert!((g.components()[1].1 - 0.64).abs() < 1e-12);
    }

    #[test]
    fn premeasure_spin_eigenstate_factorizes() {
        let s = SpinState::from_reals(1.0, 0.0).unwrap();
        let d = PointerSystem::detector();
        let psi = premeasure(&s, &d).unwrap();
        // |s1>|D1> is basis index 0 on S (x) D.
        assert!((psi.amplitudes()[0].re - 1.0).abs() < 1e-12);
        for k in 1..4 {
            assert!(psi.amplitudes()[k].norm() < 1e-12);
        }
    }

    #[test]
    fn premeasure_symmetric_state() {
        let o = PointerSystem::observer();
        let psi = premeasure(&SpinState::symmetric(), &o).unwrap();
        let r = 1.0 / 2.0_f64.sqrt();
        assert!((psi.amplitudes()[0].re - r).abs() < 1e-12);
        assert!((psi.amplitudes()[3].re - r).abs() < 1e-12);
        assert!(psi.amplitudes()[1].norm() < 1e-12 && psi.amplitudes()[2].norm() < 1e-12);
    }

    #[test]
    fn premeasure_pointer_expectation() {
        let o = PointerSystem::observer();
        let psi = premeasure(&SpinState::from_reals(0.6, 0.8).unwrap(), &o).unwrap();
        let q_o = pointer_observable(&o);
        assert!((expectation_power(&psi, &q_o, 1).unwrap() + 0.28).abs() < 1e-12);
    }

    #[test]
    fn premeasure_requires_ready_pointer() {
        let o = PointerSystem::observer()
            .with_initial([c(1.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        assert!(matches!(
            premeasure(&SpinState::symmetric(), &o),
            Err(Error::PointerNotInitial(_))
        ));
    }

    #[test]
    fn premeasure_unitary_is_unitary() {
        let u = premeasure_unitary();
        assert!(
            u.mul(&u.adjoint())
                .sub(&CMatrix::identity(4))
                .frobenius_norm()
                < 1e-12
        );
    }

    #[test]
    fn chain_through_detector_and_observer() {
        let s = SpinState::from_reals(0.6, 0.8).unwrap();
        let d = PointerSystem::detector();
        let o = PointerSystem::observer();
        let psi = premeasure_chain(&s, &[&d, &o]).unwrap();
        assert_eq!(psi.dim(), 8);
        // Branch amplitudes sit at |s1 D1 O1> = 0 and |s2 D2 O2> = 7.
        assert!((psi.amplitudes()[0].re - 0.6).abs() < 1e-12);
        assert!((psi.amplitudes()[7].re - 0.8).abs() < 1e-12);
        // Tracing out D leaves the S-O state of the premeasured test
        // mixture: the middle stage has recorded the branch.
        let rho = partial_trace(&psi.density(), &["S", "O"]).unwrap();
        let gem = premeasure_gemenge(&make_test_mixture(&s), &o).unwrap();
        assert!(rho.matrix().sub(gem.density().matrix()).frobenius_norm() < 1e-12);
        // Pointer statistics are unchanged by the middle stage.
        let q_o = pointer_observable(&o);
        assert!((expectation_power(&psi, &q_o, 1).unwrap() + 0.28).abs() < 1e-12);
    }

    #[test]
    fn pointer_observable_eigenstate() {
        let d = PointerSystem::detector();
        let q = pointer_observable(&d);
        let d1 = d.eigenstate(0).density();
        assert_eq!(is_eigenstate(&d1, &q, 1e-9).unwrap(), Some(1.0));
        // q = (0, 1) is the projector onto |x2>.
        let p = PointerSystem::new("D2", (0.0, 1.0)).unwrap();
        let obs = pointer_observable(&p);
        assert!(obs.matrix()[(0, 0)].norm() < 1e-15);
        assert!((obs.matrix()[(1, 1)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn environment_extension_identity_for_empty() {
        let o = PointerSystem::observer();
        let psi = premeasure(&SpinState::symmetric(), &o).unwrap();
        let out = extend_with_environment(&psi, "O", &EnvironmentBranches::empty()).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn environment_with_orthogonal_records_kills_observer_coherence() {
        // Observer-only branch state: reduced rho_O keeps its diagonal and
        // the coherence picks up the overlap product (here 0).
        let o = PointerSystem::observer();
        let psi_o = Ket::new(
            vec![c(1.0 / 2.0_f64.sqrt(), 0.0), c(1.0 / 2.0_f64.sqrt(), 0.0)],
            o.layout(),
        )
        .unwrap();
        let env = EnvironmentSpec::fixed_overlap(1, 0.0)
            .unwrap()
            .realize(&mut event_rng(0, 0))
            .unwrap();
        let extended = extend_with_environment(&psi_o, "O", &env).unwrap();
        let rho_o = partial_trace(&extended.density(), &["O"]).unwrap();
        assert!((rho_o.matrix()[(0, 0)].re - 0.5).abs() < 1e-14);
        assert!((rho_o.matrix()[(1, 1)].re - 0.5).abs() < 1e-14);
        assert!(rho_o.matrix()[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn environment_overlap_product_scales_coherence() {
        let o = PointerSystem::observer();
        let psi_o = Ket::new(
            vec![c(1.0 / 2.0_f64.sqrt(), 0.0), c(1.0 / 2.0_f64.sqrt(), 0.0)],
            o.layout(),
        )
        .unwrap();
        let env = EnvironmentSpec::fixed_overlap(2, 0.5)
            .unwrap()
            .realize(&mut event_rng(0, 0))
            .unwrap();
        let extended = extend_with_environment(&psi_o, "O", &env).unwrap();
        let rho_o = partial_trace(&extended.density(), &["O"]).unwrap();
        // |a1 a2| * prod overlaps = 0.5 * 0.25.
        assert!((rho_o.matrix()[(0, 1)].norm() - 0.125).abs() < 1e-12);
    }

    #[test]
    fn non_branch_form_rejected() {
        // |s1>(|O1>+|O2>)/sqrt(2) has parallel co-factors.
        let layout = CompositeLayout::new([("S", 2), ("O", 2)]).unwrap();
        let r = 1.0 / 2.0_f64.sqrt();
        let psi = Ket::new(vec![c(r, 0.0), c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0)], layout).unwrap();
        let env = EnvironmentSpec::fixed_overlap(1, 0.5)
            .unwrap()
            .realize(&mut event_rng(0, 0))
            .unwrap();
        assert!(matches!(
            extend_with_environment(&psi, "O", &env),
            Err(Error::NotBranchForm(_))
        ));
    }

    #[test]
    fn first_kind_property() {
        // The spin marginal of the premeasured pure state equals the spin
        // marginal of the premeasured test mixture.
        for (a1, a2) in [(0.6, 0.8), (0.3, (1.0_f64 - 0.09).sqrt())] {
            let s = SpinState::from_reals(a1, a2).unwrap();
            let o = PointerSystem::observer();
            let pure = premeasure(&s, &o).unwrap().density();
            let gem = premeasure_gemenge(&make_test_mixture(&s), &o).unwrap();
            let pure_spin = partial_trace(&pure, &["S"]).unwrap();
            let gem_spin = partial_trace(&gem.density(), &["S"]).unwrap();
            assert!(pure_spin.matrix().sub(gem_spin.matrix()).frobenius_norm() < 1e-12);
        }
    }
}
