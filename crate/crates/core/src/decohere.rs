//! Environment-induced suppression of observer coherence and the
//! emergence of the preferred pointer basis.
//!
//! The observer ket `a1|O1> + a2|O2>` entangled with `N_E` environment
//! qubits reduces to a state whose pointer diagonal is untouched while
//! the coherence is multiplied by `prod_j <E^j_2|E^j_1>`; even a handful
//! of environment qubits suppress it effectively.

use alloc::vec::Vec;

use crate::chain::{extend_with_environment, EnvironmentBranches, EnvironmentModel, EnvironmentSpec};
use crate::error::Result;
use crate::math;
use crate::qcore::{DensityMatrix, Ket};
use crate::sample;

/// Default fraction of the bare coherence below which the pointer basis
/// counts as effectively selected.
pub const DEFAULT_SUPPRESSION_THRESHOLD: f64 = 0.1;

/// Extends the branch-form state with its environment records and
/// reduces onto the pointer subsystem.
///
/// For an observer-only input the reduced coherence is
/// `a1 conj(a2) * prod_j <E^j_2|E^j_1>`; ancillary branch tags (a spin
/// factor, say) make the reduction diagonal regardless, which is why
/// suppression is quantified on the observer ket itself.
pub fn decohere_pointer(
    psi: &Ket,
    pointer_label: &str,
    env: &EnvironmentBranches,
) -> Result<DensityMatrix> {
    let extended = extend_with_environment(psi, pointer_label, env)?;
    extended.density().partial_trace(&[pointer_label])
}

/// One decoherence trial.
#[derive(Debug, Clone, Copy)]
pub struct SuppressionTrial {
    /// Measured `|rho_O[0,1]|` after reduction.
    pub offdiag: f64,
    /// Analytic prediction `|a1 a2| * prod_j |<E^j_1|E^j_2>|`.
    pub prediction: f64,
}

/// Suppression statistics for one environment size.
#[derive(Debug, Clone)]
pub struct SuppressionReport {
    pub n_env: usize,
    pub trials: Vec<SuppressionTrial>,
    /// Bare coherence `|a1 a2|` (the N_E = 0 value).
    pub bare: f64,
    pub median: f64,
    pub lower_quartile: f64,
    pub upper_quartile: f64,
    /// Median off-diagonal divided by the bare coherence.
    pub median_suppression_factor: f64,
    /// True when the median falls below `threshold * bare`.
    pub suppressed: bool,
}

fn percentile(sorted: &[f64], fraction: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let pos = fraction * (sorted.len() - 1) as f64;
    let lo = pos as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let w = pos - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}

/// Sweeps environment sizes, sampling branch pairs per trial, and checks
/// the analytic product law on every trial.
///
/// Trial `t` at size `n` derives its generator from the substream
/// `(seed, n << 32 | t)`, so sweeps parallelize without reseeding.
pub fn suppression_study(
    observer_state: &Ket,
    pointer_label: &str,
    env_sizes: &[usize],
    model: &EnvironmentModel,
    trials: usize,
    threshold: f64,
    seed: u64,
) -> Result<Vec<SuppressionReport>> {
    let bare_rho = observer_state.density();
    let bare = bare_rho.matrix()[(0, 1)].norm();

    let mut reports = Vec::with_capacity(env_sizes.len());
    for &n_env in env_sizes {
        let spec = EnvironmentSpec {
            count: n_env,
            model: model.clone(),
        };
        let mut trial_data = Vec::with_capacity(trials);
        for t in 0..trials {
            let mut rng = sample::event_rng(seed, ((n_env as u64) << 32) | t as u64);
            let env = spec.realize(&mut rng)?;
            let rho = decohere_pointer(observer_state, pointer_label, &env)?;
            let offdiag = rho.matrix()[(0, 1)].norm();
            let prediction = bare * env.overlap_product().norm();
            trial_data.push(SuppressionTrial { offdiag, prediction });
        }
        let mut sorted: Vec<f64> = trial_data.iter().map(|t| t.offdiag).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = percentile(&sorted, 0.5);
        let factor = if bare > 0.0 { median / bare } else { 0.0 };
        reports.push(SuppressionReport {
            n_env,
            trials: trial_data,
            bare,
            median,
            lower_quartile: percentile(&sorted, 0.25),
            upper_quartile: percentile(&sorted, 0.75),
            median_suppression_factor: factor,
            suppressed: median < threshold * bare,
        });
    }
    Ok(reports)
}

/// Maximum deviation between measured off-diagonals and the analytic
/// product law across all trials of a study.
pub fn product_law_deviation(reports: &[SuppressionReport]) -> f64 {
    reports
        .iter()
        .flat_map(|r| r.trials.iter())
        .map(|t| math::abs(t.offdiag - t.prediction))
        .fold(0.0, f64::max)
}
