//! Deterministic random streams and the few scalar draws the simulations
//! need.
//!
//! Ensembles derive one substream per event from `(seed, event index)` so
//! runs are reproducible bit-for-bit regardless of how events are
//! distributed over workers, and reports merge associatively.

use alloc::vec::Vec;
use num_complex::Complex64;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use crate::math;

/// Generator handed to a single event or trial.
pub type EventRng = ChaCha12Rng;

/// Substream for one event: the base seed fixes the key, the event index
/// selects the ChaCha stream.
pub fn event_rng(seed: u64, event_index: u64) -> EventRng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(event_index);
    rng
}

/// Uniform draw in `[0, 1)` using the top 53 bits of one `u64`.
pub fn uniform01(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal via Box-Muller. Consumes two uniforms per call.
pub fn standard_normal(rng: &mut impl RngCore) -> f64 {
    let mut u1 = uniform01(rng);
    if u1 == 0.0 {
        u1 = f64::MIN_POSITIVE;
    }
    let u2 = uniform01(rng);
    math::sqrt(-2.0 * math::ln(u1)) * math::cos(2.0 * core::f64::consts::PI * u2)
}

/// Haar-random qubit state (two complex normal amplitudes, normalized).
pub fn haar_qubit(rng: &mut impl RngCore) -> [Complex64; 2] {
    loop {
        let raw = [
            Complex64::new(standard_normal(rng), standard_normal(rng)),
            Complex64::new(standard_normal(rng), standard_normal(rng)),
        ];
        let norm = math::sqrt(raw[0].norm_sqr() + raw[1].norm_sqr());
        if norm > 1e-6 {
            return [raw[0] / norm, raw[1] / norm];
        }
    }
}

/// Index drawn from a normalized probability vector by CDF walk.
/// Rounding leftovers fall to the last positive-probability entry.
pub fn categorical(rng: &mut impl RngCore, probs: &[f64]) -> usize {
    let u = uniform01(rng);
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1)
}

/// Empirical frequencies of `counts` against `events` draws.
pub fn frequencies(counts: &[usize], events: usize) -> Vec<f64> {
    counts
        .iter()
        .map(|&c| c as f64 / events as f64)
        .collect()
}
