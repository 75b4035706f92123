//! Inference maps for the observer's state "from inside": the
//! partial-trace restriction, the stochastic restriction, gemenge
//! sampling, information-pattern extraction, and ensemble moment
//! bookkeeping.
//!
//! The stochastic inference map is realized as Born-rule sampling in the
//! observer pointer basis — the unique sampler consistent with outcome
//! probabilities `P_i = |a_i|^2` — so the induced ensemble is the gemenge
//! `{(xi_i, P_i)}` whose density matrix coincides with the partial-trace
//! restriction.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use rand_core::RngCore;

use crate::chain::{branch_weights, PointerSystem};
use crate::error::{Error, Result};
use crate::math;
use crate::qcore::{
    eigen_residual, is_eigenstate, spectral_decompose, CompositeLayout, DensityMatrix,
    HermitianObservable, Ket, QuantumState, Tolerances,
};
use crate::sample;

/// A component of a classical (ignorance-interpretable) mixture.
#[derive(Debug, Clone, PartialEq)]
pub enum GemengeComponent {
    Pure(Ket),
    Mixed(DensityMatrix),
}

impl GemengeComponent {
    pub fn layout(&self) -> &CompositeLayout {
        match self {
            GemengeComponent::Pure(k) => k.layout(),
            GemengeComponent::Mixed(r) => r.layout(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            GemengeComponent::Pure(k) => k.density(),
            GemengeComponent::Mixed(r) => r.clone(),
        }
    }
}

/// List of `(state, probability)` pairs with a definite decomposition,
/// as opposed to a density matrix of unknown provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Gemenge {
    components: Vec<(GemengeComponent, f64)>,
}

impl Gemenge {
    pub fn new(components: Vec<(GemengeComponent, f64)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::BadProbabilities(1.0));
        }
        let layout = components[0].0.layout().clone();
        for (c, p) in &components {
            if *c.layout() != layout {
                return Err(Error::LayoutMismatch);
            }
            if *p < -1e-12 {
                return Err(Error::BadProbabilities(*p));
            }
        }
        let total: f64 = components.iter().map(|(_, p)| p).sum();
        let dev = math::abs(total - 1.0);
        if dev > Tolerances::default().decision {
            return Err(Error::BadProbabilities(dev));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[(GemengeComponent, f64)] {
        &self.components
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.components.iter().map(|(_, p)| *p).collect()
    }

    pub fn layout(&self) -> &CompositeLayout {
        self.components[0].0.layout()
    }

    /// Statistical state `sum_i p_i rho_i` of the ensemble.
    pub fn density(&self) -> DensityMatrix {
        let parts: Vec<_> = self
            .components
            .iter()
            .map(|(c, p)| (c.to_density().matrix().clone(), *p))
            .collect();
        DensityMatrix::weighted_sum(&parts, self.layout().clone())
            .expect("convex combination of states is a state")
    }
}

/// Breuer's phenomenological restriction: the partial trace of the total
/// state onto the observer subsystem.
pub fn breuer_restriction(rho: &DensityMatrix, observer_label: &str) -> Result<DensityMatrix> {
    if !rho.layout().contains(observer_label) {
        return Err(Error::UnknownLabel(observer_label.to_string()));
    }
    rho.partial_trace(&[observer_label])
}

/// Draws one component index from the gemenge; deterministic for a given
/// generator state.
pub fn gemenge_sample<'a>(
    g: &'a Gemenge,
    rng: &mut impl RngCore,
) -> (usize, &'a GemengeComponent) {
    let probs = g.probabilities();
    let idx = sample::categorical(rng, &probs);
    (idx, &g.components()[idx].0)
}

/// One stochastic-restriction event.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticOutcome {
    /// Which pointer branch fired (0 or 1).
    pub index: usize,
    /// The registered pointer eigenvalue `q_i`.
    pub eigenvalue: f64,
    /// The observer state `xi_i = |O_i><O_i|` on the pointer layout.
    pub state: DensityMatrix,
}

/// The stochastic restriction of a branch-form total state: returns
/// `xi_i` with probability `|a_i|^2`. The induced ensemble is the
/// gemenge `W^O` (see [`stochastic_gemenge`]).
pub fn stochastic_restriction(
    psi: &Ket,
    pointer: &PointerSystem,
    rng: &mut impl RngCore,
) -> Result<StochasticOutcome> {
    let (w0, w1) = branch_weights(psi, pointer.label())?;
    let index = sample::categorical(rng, &[w0, w1]);
    let (q1, q2) = pointer.eigenvalues();
    Ok(StochasticOutcome {
        index,
        eigenvalue: if index == 0 { q1 } else { q2 },
        state: pointer.eigenstate(index).density(),
    })
}

/// The ensemble induced by the stochastic restriction:
/// `{(|O_i><O_i|, |a_i|^2)}`. Zero-weight branches are dropped.
pub fn stochastic_gemenge(psi: &Ket, pointer: &PointerSystem) -> Result<Gemenge> {
    let (w0, w1) = branch_weights(psi, pointer.label())?;
    let mut components = Vec::new();
    for (i, w) in [(0usize, w0), (1usize, w1)] {
        if w > 0.0 {
            components.push((GemengeComponent::Pure(pointer.eigenstate(i)), w));
        }
    }
    Gemenge::new(components)
}

/// One definite entry of an information pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct IpEntry {
    pub observable: String,
    pub value: f64,
}

/// The array of definite parameter values a state presents to the
/// observer in a single event. Only exact eigenvalues qualify; requested
/// observables without a definite value are listed as uncertain so
/// pure/mixed comparisons stay auditable.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InformationPattern {
    pub entries: Vec<IpEntry>,
    pub uncertain: Vec<String>,
}

impl InformationPattern {
    pub fn value_of(&self, observable: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.observable == observable)
            .map(|e| e.value)
    }

    pub fn is_uncertain(&self, observable: &str) -> bool {
        self.uncertain.iter().any(|u| u == observable)
    }
}

/// Extracts the information pattern of `state` for the named observables.
///
/// An entry is recorded only when the moment criterion accepts the state
/// as an eigenstate and the direct residual test confirms it; anything
/// else marks the observable uncertain.
pub fn information_pattern(
    state: &DensityMatrix,
    observables: &[(&str, &HermitianObservable)],
    tol: f64,
) -> Result<InformationPattern> {
    let mut ip = InformationPattern::default();
    for (label, obs) in observables {
        match is_eigenstate(state, obs, tol)? {
            Some(value) if eigen_residual(state, obs, value)? <= tol.max(1e-9) => {
                ip.entries.push(IpEntry {
                    observable: (*label).to_string(),
                    value,
                });
            }
            _ => ip.uncertain.push((*label).to_string()),
        }
    }
    Ok(ip)
}

/// Source of measurement events for ensemble simulation.
#[derive(Debug, Clone, Copy)]
pub enum MomentSource<'a> {
    /// Pure state sampled by the Born rule.
    Pure(&'a Ket),
    /// Gemenge: draw a component, then Born-sample it.
    Mixture(&'a Gemenge),
}

impl<'a> MomentSource<'a> {
    fn layout(&self) -> &CompositeLayout {
        match self {
            MomentSource::Pure(k) => k.layout(),
            MomentSource::Mixture(g) => g.layout(),
        }
    }

    fn density(&self) -> DensityMatrix {
        match self {
            MomentSource::Pure(k) => k.density(),
            MomentSource::Mixture(g) => g.density(),
        }
    }
}

/// Empirical and analytic statistics of `N` projective measurements.
#[derive(Debug, Clone)]
pub struct EnsembleReport {
    pub events: usize,
    /// Distinct outcome eigenvalues, descending.
    pub outcome_eigenvalues: Vec<f64>,
    pub counts: Vec<usize>,
    pub frequencies: Vec<f64>,
    /// Empirical moments `mean(g^l)`, l = 1..=order.
    pub empirical_moments: Vec<f64>,
    /// Analytic reference moments `<G^l>` of the source state.
    pub reference_moments: Vec<f64>,
    /// Monte-Carlo standard deviation of each empirical moment.
    pub reference_sigmas: Vec<f64>,
    /// Outcome index per event, in event order.
    pub outcome_log: Vec<u32>,
}

/// Simulates `events` projective measurements of `obs` on the source and
/// reports empirical moments next to the analytic references.
///
/// Event `n` uses the substream derived from `(seed, n)`, so results do
/// not depend on how events are partitioned across workers.
pub fn ensemble_moments(
    source: MomentSource<'_>,
    obs: &HermitianObservable,
    order: u32,
    events: usize,
    seed: u64,
) -> Result<EnsembleReport> {
    if order == 0 || events == 0 {
        return Err(Error::InvalidParameter("order and events must be >= 1"));
    }
    let lifted;
    let obs = if obs.layout() == source.layout() {
        obs
    } else {
        lifted = obs.lift(source.layout())?;
        &lifted
    };
    let spectral = spectral_decompose(obs);
    let outcomes = spectral.eigenvalues.clone();

    // Born weights per source component.
    let component_probs: Vec<Vec<f64>> = match source {
        MomentSource::Pure(k) => {
            vec![born_probabilities(k, &spectral.projectors)]
        }
        MomentSource::Mixture(g) => g
            .components()
            .iter()
            .map(|(c, _)| match c {
                GemengeComponent::Pure(k) => born_probabilities(k, &spectral.projectors),
                GemengeComponent::Mixed(r) => born_probabilities(r, &spectral.projectors),
            })
            .collect(),
    };
    let mixture_probs = match source {
        MomentSource::Pure(_) => None,
        MomentSource::Mixture(g) => Some(g.probabilities()),
    };

    let mut counts = vec![0usize; outcomes.len()];
    let mut outcome_log = Vec::with_capacity(events);
    for event in 0..events {
        let mut rng = sample::event_rng(seed, event as u64);
        let comp = match &mixture_probs {
            Some(probs) => sample::categorical(&mut rng, probs),
            None => 0,
        };
        let k = sample::categorical(&mut rng, &component_probs[comp]);
        counts[k] += 1;
        outcome_log.push(k as u32);
    }

    let frequencies = sample::frequencies(&counts, events);
    let mut empirical_moments = Vec::with_capacity(order as usize);
    let mut reference_moments = Vec::with_capacity(order as usize);
    let mut reference_sigmas = Vec::with_capacity(order as usize);
    let rho = source.density();
    for l in 1..=order {
        let emp: f64 = frequencies
            .iter()
            .zip(outcomes.iter())
            .map(|(f, g)| f * math::powi(*g, l as i32))
            .sum();
        empirical_moments.push(emp);
        let reference = rho.raw_moment(obs.matrix(), l).re;
        reference_moments.push(reference);
        let second = rho.raw_moment(obs.matrix(), 2 * l).re;
        let var = (second - reference * reference).max(0.0);
        reference_sigmas.push(math::sqrt(var / events as f64));
    }

    Ok(EnsembleReport {
        events,
        outcome_eigenvalues: outcomes,
        counts,
        frequencies,
        empirical_moments,
        reference_moments,
        reference_sigmas,
        outcome_log,
    })
}

/// `Tr(rho P_k)` for each spectral projector, clamped into [0, 1] and
/// renormalized against rounding.
pub fn born_probabilities<S: QuantumState>(
    state: &S,
    projectors: &[HermitianObservable],
) -> Vec<f64> {
    let mut probs: Vec<f64> = projectors
        .iter()
        .map(|p| state.raw_moment(p.matrix(), 1).re.max(0.0))
        .collect();
    let total: f64 = probs.iter().sum();
    if total > 0.0 {
        for p in probs.iter_mut() {
            *p /= total;
        }
    }
    probs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{make_test_mixture, pointer_observable, premeasure, SpinState};
    use crate::qcore::trace_distance;
    use crate::sample::event_rng;

    #[test]
    fn breuer_restriction_diagonal() {
        let o = PointerSystem::observer();
        for (a1, a2, p1, p2) in [
            (1.0 / 2.0_f64.sqrt(), 1.0 / 2.0_f64.sqrt(), 0.5, 0.5),
            (1.0, 0.0, 1.0, 0.0),
            (0.6, 0.8, 0.36, 0.64),
        ] {
            let psi = premeasure(&SpinState::from_reals(a1, a2).unwrap(), &o).unwrap();
            let r = breuer_restriction(&psi.density(), "O").unwrap();
            assert!((r.matrix()[(0, 0)].re - p1).abs() < 1e-12);
            assert!((r.matrix()[(1, 1)].re - p2).abs() < 1e-12);
            assert!(r.matrix()[(0, 1)].norm() < 1e-13);
        }
    }

    #[test]
    fn breuer_restriction_missing_observer() {
        let s = SpinState::symmetric().ket().density();
        assert!(matches!(
            breuer_restriction(&s, "O"),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn gemenge_sampling_degenerate_and_deterministic() {
        let g = make_test_mixture(&SpinState::from_reals(1.0, 0.0).unwrap());
        let mut rng = event_rng(5, 0);
        for _ in 0..50 {
            assert_eq!(gemenge_sample(&g, &mut rng).0, 0);
        }
        // Fixed seed reproduces the draw sequence.
        let g = make_test_mixture(&SpinState::from_reals(0.6, 0.8).unwrap());
        let seq1: Vec<usize> = {
            let mut rng = event_rng(9, 0);
            (0..100).map(|_| gemenge_sample(&g, &mut rng).0).collect()
        };
        let seq2: Vec<usize> = {
            let mut rng = event_rng(9, 0);
            (0..100).map(|_| gemenge_sample(&g, &mut rng).0).collect()
        };
        assert_eq!(seq1, seq2);
    }

    #[test]
    fn gemenge_frequencies_within_binomial_bounds() {
        let g = make_test_mixture(&SpinState::from_reals(0.6, 0.8).unwrap());
        let n = 100_000;
        let mut hits = 0usize;
        for event in 0..n {
            let mut rng = event_rng(11, event as u64);
            if gemenge_sample(&g, &mut rng).0 == 1 {
                hits += 1;
            }
        }
        let freq = hits as f64 / n as f64;
        let sigma = (0.64 * 0.36 / n as f64).sqrt();
        assert!(
            (freq - 0.64).abs() < 4.0 * sigma,
            "frequency {freq} outside 4 sigma of 0.64"
        );
    }

    #[test]
    fn stochastic_restriction_degenerate_branch() {
        let o = PointerSystem::observer();
        let psi = premeasure(&SpinState::from_reals(1.0, 0.0).unwrap(), &o).unwrap();
        let mut rng = event_rng(1, 0);
        for _ in 0..20 {
            let out = stochastic_restriction(&psi, &o, &mut rng).unwrap();
            assert_eq!(out.index, 0);
            assert_eq!(out.eigenvalue, 1.0);
            assert!((out.state.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn stochastic_restriction_matches_gemenge_density() {
        // The density matrix of the induced ensemble W^O equals the
        // partial-trace restriction — the statistical indistinguishability
        // at the heart of the argument.
        for (a1, a2) in [(0.6, 0.8), (1.0 / 2.0_f64.sqrt(), 1.0 / 2.0_f64.sqrt())] {
            let o = PointerSystem::observer();
            let psi = premeasure(&SpinState::from_reals(a1, a2).unwrap(), &o).unwrap();
            let w_o = stochastic_gemenge(&psi, &o).unwrap();
            let breuer = breuer_restriction(&psi.density(), "O").unwrap();
            assert!(trace_distance(&w_o.density(), &breuer).unwrap() < 1e-12);
        }
    }

    #[test]
    fn information_pattern_entries() {
        let o = PointerSystem::observer();
        let q_o = pointer_observable(&o);
        let xi_1 = o.eigenstate(0).density();
        let ip = information_pattern(&xi_1, &[("Q_O", &q_o)], 1e-9).unwrap();
        assert_eq!(ip.value_of("Q_O"), Some(1.0));
        assert!(ip.uncertain.is_empty());

        // The partial-trace restriction with interference present has no
        // definite pointer value.
        let psi = premeasure(&SpinState::from_reals(0.6, 0.8).unwrap(), &o).unwrap();
        let r_b = breuer_restriction(&psi.density(), "O").unwrap();
        let ip = information_pattern(&r_b, &[("Q_O", &q_o)], 1e-9).unwrap();
        assert_eq!(ip.value_of("Q_O"), None);
        assert!(ip.is_uncertain("Q_O"));

        // A projector observable yields the Boolean parameter L_g = 1/0.
        let p_1 = HermitianObservable::projector_onto(&o.eigenstate(0));
        let ip = information_pattern(&xi_1, &[("L_g", &p_1)], 1e-9).unwrap();
        assert_eq!(ip.value_of("L_g"), Some(1.0));
        let xi_2 = o.eigenstate(1).density();
        let ip = information_pattern(&xi_2, &[("L_g", &p_1)], 1e-9).unwrap();
        assert_eq!(ip.value_of("L_g"), Some(0.0));
    }

    #[test]
    fn ensemble_moments_pure_symmetric() {
        let o = PointerSystem::observer();
        let psi = premeasure(&SpinState::symmetric(), &o).unwrap();
        let q_o = pointer_observable(&o);
        let report =
            ensemble_moments(MomentSource::Pure(&psi), &q_o, 2, 4096, 17).unwrap();
        assert!(report.reference_moments[0].abs() < 1e-12);
        assert!((report.reference_moments[1] - 1.0).abs() < 1e-12);
        // Q_O^2 = I makes the second empirical moment exact.
        assert!((report.empirical_moments[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ensemble_moments_gemenge_reference() {
        let o = PointerSystem::observer();
        let psi = premeasure(&SpinState::from_reals(0.6, 0.8).unwrap(), &o).unwrap();
        let w_mix = stochastic_gemenge(&psi, &o).unwrap();
        let q_o = pointer_observable(&o);
        let report =
            ensemble_moments(MomentSource::Mixture(&w_mix), &q_o, 3, 2048, 23).unwrap();
        let expect = [-0.28, 1.0, -0.28];
        for (m, e) in report.reference_moments.iter().zip(expect) {
            assert!((m - e).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_components_flow_through_sampling_and_premeasurement() {
        use crate::chain::premeasure_gemenge;
        use crate::qcore::CompositeLayout;

        // A gemenge whose components are density matrices rather than
        // kets: premeasurement and Born sampling handle them the same.
        let spin = CompositeLayout::single("S", 2).unwrap();
        let noisy = DensityMatrix::maximally_mixed(spin.clone());
        let sharp = Ket::basis_state(spin, 0).unwrap();
        let g = Gemenge::new(vec![
            (GemengeComponent::Mixed(noisy), 0.5),
            (GemengeComponent::Pure(sharp), 0.5),
        ])
        .unwrap();
        let o = PointerSystem::observer();
        let mapped = premeasure_gemenge(&g, &o).unwrap();
        assert!((mapped.density().trace().re - 1.0).abs() < 1e-12);

        let q_o = pointer_observable(&o);
        let report =
            ensemble_moments(MomentSource::Mixture(&mapped), &q_o, 2, 512, 19).unwrap();
        // First moment: the mixed half contributes 0, the sharp half +1.
        assert!((report.reference_moments[0] - 0.5).abs() < 1e-12);
        assert!((report.frequencies.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_and_gemenge_moments_coincide() {
        let o = PointerSystem::observer();
        let q_o = pointer_observable(&o);
        for (a1, a2) in [(0.6, 0.8), (0.28, (1.0_f64 - 0.28 * 0.28).sqrt())] {
            let psi = premeasure(&SpinState::from_reals(a1, a2).unwrap(), &o).unwrap();
            let w_mix = stochastic_gemenge(&psi, &o).unwrap();
            let pure =
                ensemble_moments(MomentSource::Pure(&psi), &q_o, 8, 16, 3).unwrap();
            let mixed =
                ensemble_moments(MomentSource::Mixture(&w_mix), &q_o, 8, 16, 3).unwrap();
            for (p, m) in pure
                .reference_moments
                .iter()
                .zip(mixed.reference_moments.iter())
            {
                assert!((p - m).abs() < 1e-12);
            }
        }
    }
}
