//! Shared helpers for the integration suites: seeded random states and
//! observables, plus independent oracles (brute-force partial trace,
//! chi-square tail, projector grid search) kept deliberately separate
//! from the library implementations they check.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;
use qmeas_core::linalg::CMatrix;
use qmeas_core::sample::{standard_normal, uniform01, EventRng};
use qmeas_core::{CompositeLayout, DensityMatrix, HermitianObservable, Ket};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_ket(layout: &CompositeLayout, rng: &mut EventRng) -> Ket {
    let amps: Vec<Complex64> = (0..layout.dim())
        .map(|_| c(standard_normal(rng), standard_normal(rng)))
        .collect();
    Ket::new_normalized(amps, layout.clone()).unwrap()
}

/// Random mixed state: convex mix of a few random pure states.
pub fn random_density(layout: &CompositeLayout, rng: &mut EventRng) -> DensityMatrix {
    let terms = 1 + (uniform01(rng) * 3.0) as usize;
    let mut weights: Vec<f64> = (0..terms).map(|_| uniform01(rng) + 0.05).collect();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let d = layout.dim();
    let mut acc = CMatrix::zeros(d, d);
    for w in &weights {
        let k = random_ket(layout, rng);
        acc = acc.add(&CMatrix::outer(k.amplitudes(), k.amplitudes()).scale(c(*w, 0.0)));
    }
    DensityMatrix::new(acc, layout.clone()).unwrap()
}

pub fn random_hermitian(layout: &CompositeLayout, rng: &mut EventRng) -> HermitianObservable {
    let d = layout.dim();
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = c(standard_normal(rng), 0.0);
        for j in (i + 1)..d {
            let z = c(standard_normal(rng), standard_normal(rng));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianObservable::new(m, layout.clone()).unwrap()
}

/// Independent partial-trace oracle: direct element-wise index summation
/// written against the flat representation, without the library's layout
/// helpers.
pub fn partial_trace_oracle(
    rho: &DensityMatrix,
    keep_positions: &[usize],
) -> Vec<Vec<Complex64>> {
    let dims = rho.layout().dims();
    let n = dims.len();
    let traced: Vec<usize> = (0..n).filter(|p| !keep_positions.contains(p)).collect();
    let kept_dim: usize = keep_positions.iter().map(|&p| dims[p]).product();
    let traced_dim: usize = traced.iter().map(|&p| dims[p]).product();

    let decode = |mut flat: usize, positions: &[usize]| -> Vec<usize> {
        let mut out = vec![0usize; positions.len()];
        for (slot, &p) in out.iter_mut().zip(positions.iter()).rev() {
            *slot = flat % dims[p];
            flat /= dims[p];
        }
        out
    };
    let full_index = |kept: &[usize], tr: &[usize]| -> usize {
        let mut multi = vec![0usize; n];
        for (v, &p) in kept.iter().zip(keep_positions.iter()) {
            multi[p] = *v;
        }
        for (v, &p) in tr.iter().zip(traced.iter()) {
            multi[p] = *v;
        }
        let mut flat = 0;
        for (p, &d) in dims.iter().enumerate() {
            flat = flat * d + multi[p];
        }
        flat
    };

    let m = rho.matrix();
    let mut out = vec![vec![c(0.0, 0.0); kept_dim]; kept_dim];
    for i in 0..kept_dim {
        let ki = decode(i, keep_positions);
        for j in 0..kept_dim {
            let kj = decode(j, keep_positions);
            let mut acc = c(0.0, 0.0);
            for t in 0..traced_dim {
                let tt = decode(t, &traced);
                acc += m[(full_index(&ki, &tt), full_index(&kj, &tt))];
            }
            out[i][j] = acc;
        }
    }
    out
}

/// Upper-tail probability of the chi-square distribution with 1 degree
/// of freedom.
pub fn chi_square_1df_tail(x: f64) -> f64 {
    libm::erfc((x / 2.0).sqrt())
}

/// Brute-force single-shot discrimination oracle on 2-dim states: grid
/// search over rank-1 projector effects (the extreme points of the
/// effect set). Returns true when some effect answers deterministically
/// for both states within `eps`.
pub fn bd_grid_oracle(rho1: &DensityMatrix, rho2: &DensityMatrix, eps: f64) -> bool {
    assert_eq!(rho1.dim(), 2);
    let steps_theta = 181usize;
    let steps_phi = 180usize;
    let tr = |m: &CMatrix, u0: Complex64, u1: Complex64| -> f64 {
        // <u| m |u> for |u> = (u0, u1)
        let v0 = m[(0, 0)] * u0 + m[(0, 1)] * u1;
        let v1 = m[(1, 0)] * u0 + m[(1, 1)] * u1;
        (u0.conj() * v0 + u1.conj() * v1).re
    };
    for it in 0..steps_theta {
        let theta = std::f64::consts::PI * it as f64 / (steps_theta - 1) as f64 / 2.0;
        for ip in 0..steps_phi {
            let phi = 2.0 * std::f64::consts::PI * ip as f64 / steps_phi as f64;
            let u0 = c(theta.cos(), 0.0);
            let u1 = c(theta.sin() * phi.cos(), theta.sin() * phi.sin());
            let p1 = tr(rho1.matrix(), u0, u1);
            let p2 = tr(rho2.matrix(), u0, u1);
            // E = |u><u| answers "state 1" with certainty, "state 2" never
            // (or the reverse).
            if (p1 > 1.0 - eps && p2 < eps) || (p2 > 1.0 - eps && p1 < eps) {
                return true;
            }
        }
    }
    false
}
