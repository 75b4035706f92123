//! Interference-term observables and ensemble statistics: the joint
//! observable sensitive to coherence between measurement branches, its
//! outcome distributions, and a sequential likelihood-ratio test that
//! turns "distinguishable only statistically" into an events-to-decision
//! number.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::math;
use crate::qcore::{spectral_decompose, HermitianObservable, Ket, QuantumState, Tolerances};
use crate::restrict::{born_probabilities, Gemenge};
use crate::sample;

/// The symmetric interference term `B = |b1><b2| + |b2><b1|` of two
/// orthonormal branch vectors. Its spectrum is `+1` and `-1` on the
/// symmetric/antisymmetric branch combinations and `0` on the rest of
/// the space.
pub fn make_interference_observable(b1: &Ket, b2: &Ket) -> Result<HermitianObservable> {
    if b1.layout() != b2.layout() {
        return Err(Error::LayoutMismatch);
    }
    let tol = Tolerances::default().decision;
    let cross = b1.inner(b2)?.norm();
    let n1 = math::abs(b1.norm() - 1.0);
    let n2 = math::abs(b2.norm() - 1.0);
    let dev = cross.max(n1).max(n2);
    if dev > tol {
        return Err(Error::BranchesNotOrthonormal(dev));
    }
    let m = CMatrix::outer(b1.amplitudes(), b2.amplitudes())
        .add(&CMatrix::outer(b2.amplitudes(), b1.amplitudes()));
    HermitianObservable::new(m, b1.layout().clone())
}

/// Projective outcome distribution of an observable in a state. Zero
/// probability outcomes are retained so the full spectrum stays visible.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    /// `(eigenvalue, probability)`, eigenvalues descending.
    pub outcomes: Vec<(f64, f64)>,
}

impl OutcomeDistribution {
    pub fn probabilities(&self) -> Vec<f64> {
        self.outcomes.iter().map(|(_, p)| *p).collect()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.outcomes.iter().map(|(g, _)| *g).collect()
    }

    pub fn mean(&self) -> f64 {
        self.outcomes.iter().map(|(g, p)| g * p).sum()
    }

    /// Total variation distance to another distribution over the same
    /// spectrum.
    pub fn total_variation(&self, other: &OutcomeDistribution) -> f64 {
        0.5 * self
            .outcomes
            .iter()
            .zip(other.outcomes.iter())
            .map(|((_, p), (_, q))| math::abs(p - q))
            .sum::<f64>()
    }
}

/// Born probabilities `Tr(rho P_k)` per spectral projector.
pub fn outcome_distribution<S: QuantumState>(
    state: &S,
    obs: &HermitianObservable,
) -> Result<OutcomeDistribution> {
    let lifted;
    let obs = if obs.layout() == state.layout() {
        obs
    } else {
        lifted = obs.lift(state.layout())?;
        &lifted
    };
    let spec = spectral_decompose(obs);
    let probs = born_probabilities(state, &spec.projectors);
    Ok(OutcomeDistribution {
        outcomes: spec.eigenvalues.iter().copied().zip(probs).collect(),
    })
}

/// Which hypothesis generates the simulated data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrueSource {
    Pure,
    Mixed,
}

/// Decision state of the sequential test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    /// Log-likelihood ratio crossed the upper threshold: favor pure.
    Pure,
    /// Crossed the lower threshold: favor mixed.
    Mixed,
    /// Budget exhausted without crossing a threshold.
    Undecided,
    /// The two sources induce identical outcome distributions; every
    /// event carries zero information.
    Undecidable,
}

/// Trace of a sequential probability-ratio run.
#[derive(Debug, Clone)]
pub struct DiscriminationResult {
    pub decision: Decision,
    /// Events actually simulated (the run stops at a decision).
    pub events_simulated: usize,
    /// 1-based event index of the decision, when one was reached.
    pub events_to_decision: Option<usize>,
    /// Outcome eigenvalue per simulated event.
    pub outcomes: Vec<f64>,
    /// Cumulative log-likelihood ratio ln P(data|pure)/P(data|mixed)
    /// after each event; +-infinity marks a zero-probability outcome.
    pub llr_trajectory: Vec<f64>,
    /// Decision thresholds `+-ln(1/alpha)`.
    pub threshold: f64,
    /// Best achievable single-event error probability (equal priors):
    /// `(1 - TV)/2` for the two outcome distributions.
    pub single_event_error_floor: f64,
    /// Probability, under the mixed source, that a full horizon of
    /// events fails to certify the mixture (see [`type_ii_error`]);
    /// evaluated at a horizon capped at 64 events.
    pub type_ii_error: f64,
}

/// Sequential likelihood-ratio test between "the ensemble is the pure
/// state" and "the ensemble is the mixture", fed with projective
/// measurements of `obs` simulated from the true source.
///
/// Thresholds are `+-ln(1/alpha)`; an outcome impossible under one
/// hypothesis decides instantly. Event `n` draws from the substream
/// `(seed, n)`.
pub fn discrimination_test(
    pure_src: &Ket,
    mixed_src: &Gemenge,
    obs: &HermitianObservable,
    alpha: f64,
    events: usize,
    truth: TrueSource,
    seed: u64,
) -> Result<DiscriminationResult> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::InvalidParameter("alpha must lie in (0, 1)"));
    }
    if pure_src.layout() != mixed_src.layout() {
        return Err(Error::LayoutMismatch);
    }
    let dist_pure = outcome_distribution(pure_src, obs)?;
    let dist_mixed = outcome_distribution(&mixed_src.density(), obs)?;
    let tv = dist_pure.total_variation(&dist_mixed);
    let single_event_error_floor = 0.5 * (1.0 - tv);
    let threshold = math::ln(1.0 / alpha);

    if tv <= Tolerances::default().identity {
        return Ok(DiscriminationResult {
            decision: Decision::Undecidable,
            events_simulated: 0,
            events_to_decision: None,
            outcomes: Vec::new(),
            llr_trajectory: Vec::new(),
            threshold,
            single_event_error_floor,
            type_ii_error: 1.0,
        });
    }

    let eigenvalues = dist_pure.eigenvalues();
    let p = dist_pure.probabilities();
    let q = dist_mixed.probabilities();
    let truth_probs = match truth {
        TrueSource::Pure => &p,
        TrueSource::Mixed => &q,
    };

    let mut llr = 0.0_f64;
    let mut outcomes = Vec::new();
    let mut llr_trajectory = Vec::new();
    let mut decision = Decision::Undecided;
    let mut events_to_decision = None;
    for event in 0..events {
        let mut rng = sample::event_rng(seed, event as u64);
        let k = sample::categorical(&mut rng, truth_probs);
        outcomes.push(eigenvalues[k]);
        llr += if p[k] == 0.0 {
            f64::NEG_INFINITY
        } else if q[k] == 0.0 {
            f64::INFINITY
        } else {
            math::ln(p[k] / q[k])
        };
        llr_trajectory.push(llr);
        if llr >= threshold {
            decision = Decision::Pure;
            events_to_decision = Some(event + 1);
            break;
        }
        if llr <= -threshold {
            decision = Decision::Mixed;
            events_to_decision = Some(event + 1);
            break;
        }
    }

    let type_ii_error = type_ii_error(&dist_pure, &dist_mixed, alpha, events.min(64));

    Ok(DiscriminationResult {
        decision,
        events_simulated: outcomes.len(),
        events_to_decision,
        outcomes,
        llr_trajectory,
        threshold,
        single_event_error_floor,
        type_ii_error,
    })
}

/// Exact probability, under the mixed hypothesis, that the full
/// `horizon`-event record fails to certify the mixture: the final
/// log-likelihood ratio either favors the pure state past the threshold
/// (a wrong decision) or sits between the thresholds (undecided).
///
/// This is the fixed-horizon likelihood-ratio classification; an outcome
/// impossible under the pure hypothesis pins the ratio at minus infinity
/// and certifies the mixture with any further data. Computed by dynamic
/// programming over the reachable log-likelihood values (merged on a
/// fixed grid), so the cost grows with the horizon and the outcome
/// count; intended for short horizons.
pub fn type_ii_error(
    dist_pure: &OutcomeDistribution,
    dist_mixed: &OutcomeDistribution,
    alpha: f64,
    horizon: usize,
) -> f64 {
    let threshold = math::ln(1.0 / alpha);
    let p = dist_pure.probabilities();
    let q = dist_mixed.probabilities();

    const GRID: f64 = 1e-9;
    let quantize = |x: f64| -> i64 {
        if x >= 0.0 {
            (x / GRID + 0.5) as i64
        } else {
            (x / GRID - 0.5) as i64
        }
    };

    let mut alive: BTreeMap<i64, f64> = BTreeMap::new();
    alive.insert(0, 1.0);
    let mut certified_mixed = 0.0_f64;
    for _ in 0..horizon {
        let mut next: BTreeMap<i64, f64> = BTreeMap::new();
        for (&key, &mass) in &alive {
            let llr = key as f64 * GRID;
            for k in 0..q.len() {
                if q[k] == 0.0 {
                    continue;
                }
                let m = mass * q[k];
                if p[k] == 0.0 {
                    // Ratio hits minus infinity: the mixture is certain.
                    certified_mixed += m;
                    continue;
                }
                *next.entry(quantize(llr + math::ln(p[k] / q[k]))).or_insert(0.0) += m;
            }
        }
        alive = next;
        if alive.is_empty() {
            break;
        }
    }
    let finite_certified: f64 = alive
        .iter()
        .filter(|(&key, _)| (key as f64) * GRID <= -threshold * (1.0 - 1e-12))
        .map(|(_, &mass)| mass)
        .sum();
    1.0 - certified_mixed - finite_certified
}
