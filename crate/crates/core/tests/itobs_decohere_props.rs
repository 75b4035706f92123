//! Interference statistics and decoherence sweeps: empirical outcome
//! frequencies, in-principle pointer indistinguishability, the
//! discrimination error law, and the coherence product law.

mod common;

use qmeas_core::chain::{
    pointer_observable, premeasure, EnvironmentModel, PointerSystem, SpinState,
};
use qmeas_core::decohere::{
    product_law_deviation, suppression_study, DEFAULT_SUPPRESSION_THRESHOLD,
};
use qmeas_core::itobs::{
    discrimination_test, make_interference_observable, outcome_distribution, type_ii_error,
    Decision, TrueSource,
};
use qmeas_core::restrict::{breuer_restriction, ensemble_moments, MomentSource};
use qmeas_core::restrict::{Gemenge, GemengeComponent};
use qmeas_core::{Ket, QuantumState};

fn branch_pair(layout: &qmeas_core::CompositeLayout) -> (Ket, Ket) {
    (
        Ket::basis_state(layout.clone(), 0).unwrap(),
        Ket::basis_state(layout.clone(), 3).unwrap(),
    )
}

fn mixed_ms(a1: f64, a2: f64, layout: &qmeas_core::CompositeLayout) -> Gemenge {
    let (b1, b2) = branch_pair(layout);
    Gemenge::new(vec![
        (GemengeComponent::Pure(b1), a1 * a1),
        (GemengeComponent::Pure(b2), a2 * a2),
    ])
    .unwrap()
}

#[test]
fn interference_frequencies_match_distribution() {
    let o = PointerSystem::observer();
    let psi = premeasure(&SpinState::symmetric(), &o).unwrap();
    let mix = mixed_ms(
        1.0 / 2.0_f64.sqrt(),
        1.0 / 2.0_f64.sqrt(),
        psi.layout(),
    );
    let (b1, b2) = branch_pair(psi.layout());
    let b = make_interference_observable(&b1, &b2).unwrap();

    let n = 100_000usize;
    let report = ensemble_moments(MomentSource::Mixture(&mix), &b, 2, n, 51).unwrap();
    let analytic = outcome_distribution(&mix.density(), &b).unwrap();
    for ((g, p), f) in analytic
        .outcomes
        .iter()
        .zip(report.frequencies.iter())
    {
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (f - p).abs() <= 4.0 * sigma + 1e-12,
            "outcome {g}: frequency {f} vs probability {p}"
        );
    }
}

#[test]
fn pointer_marginals_identical_for_pure_and_mixed() {
    // Under the pointer observable alone the pure and mixed ensembles
    // are exactly indistinguishable, for any amplitudes.
    let o = PointerSystem::observer();
    for (a1, a2) in [(0.6, 0.8), (0.3, (1.0_f64 - 0.09).sqrt())] {
        let psi = premeasure(&SpinState::from_reals(a1, a2).unwrap(), &o).unwrap();
        let mix = mixed_ms(a1, a2, psi.layout());
        let q_o = pointer_observable(&o);
        let d_pure = outcome_distribution(&psi, &q_o).unwrap();
        let d_mix = outcome_distribution(&mix.density(), &q_o).unwrap();
        assert!(d_pure.total_variation(&d_mix) < 1e-13);

        // The same holds for the reduced observer states.
        let r_pure = breuer_restriction(&psi.density(), "O").unwrap();
        let r_mix = breuer_restriction(&mix.density(), "O").unwrap();
        assert!(
            r_pure
                .matrix()
                .sub(r_mix.matrix())
                .frobenius_norm()
                < 1e-13
        );
    }
}

#[test]
fn discrimination_needs_log_alpha_events() {
    let o = PointerSystem::observer();
    let psi = premeasure(&SpinState::symmetric(), &o).unwrap();
    let mix = mixed_ms(1.0 / 2.0_f64.sqrt(), 1.0 / 2.0_f64.sqrt(), psi.layout());
    let (b1, b2) = branch_pair(psi.layout());
    let b = make_interference_observable(&b1, &b2).unwrap();

    for (alpha, expected_events) in [(0.05, 5), (0.01, 7), (0.001, 10)] {
        let r = discrimination_test(&psi, &mix, &b, alpha, 64, TrueSource::Pure, 3).unwrap();
        assert_eq!(r.decision, Decision::Pure);
        assert_eq!(
            r.events_to_decision,
            Some(expected_events),
            "alpha = {alpha}"
        );
        // ceil(log2(1/alpha)) since each event contributes ln 2.
        assert_eq!(
            expected_events,
            (1.0 / alpha).log2().ceil() as usize,
            "frozen expectation self-check"
        );
    }
}

#[test]
fn discrimination_error_law() {
    let o = PointerSystem::observer();
    let psi = premeasure(&SpinState::symmetric(), &o).unwrap();
    let mix = mixed_ms(1.0 / 2.0_f64.sqrt(), 1.0 / 2.0_f64.sqrt(), psi.layout());
    let (b1, b2) = branch_pair(psi.layout());
    let b = make_interference_observable(&b1, &b2).unwrap();
    let d_pure = outcome_distribution(&psi, &b).unwrap();
    let d_mix = outcome_distribution(&mix.density(), &b).unwrap();
    for n in 1..=12usize {
        let err = type_ii_error(&d_pure, &d_mix, 0.05, n);
        assert!((err - 0.5_f64.powi(n as i32)).abs() < 1e-12, "horizon {n}");
    }
    // Sampling from the mixture decides "mixed" almost immediately.
    let r = discrimination_test(&psi, &mix, &b, 0.05, 64, TrueSource::Mixed, 5).unwrap();
    assert_eq!(r.decision, Decision::Mixed);
    assert!(r.events_to_decision.unwrap() <= 8);
}

#[test]
fn suppression_monotone_in_environment_size() {
    let o = PointerSystem::observer();
    let psi = Ket::new(
        vec![
            num_complex::Complex64::new(1.0 / 2.0_f64.sqrt(), 0.0),
            num_complex::Complex64::new(1.0 / 2.0_f64.sqrt(), 0.0),
        ],
        o.layout(),
    )
    .unwrap();
    for overlap in [0.9, 0.5, 0.2] {
        let reports = suppression_study(
            &psi,
            "O",
            &[0, 1, 2, 3, 4, 5],
            &EnvironmentModel::FixedOverlap(overlap),
            4,
            DEFAULT_SUPPRESSION_THRESHOLD,
            9,
        )
        .unwrap();
        for w in reports.windows(2) {
            assert!(
                w[1].median <= w[0].median + 1e-12,
                "overlap {overlap}: N_E={} vs N_E={}",
                w[1].n_env,
                w[0].n_env
            );
        }
        assert!(product_law_deviation(&reports) < 1e-10);
    }
}

#[test]
fn haar_environment_suppresses_quickly() {
    let o = PointerSystem::observer();
    let psi = Ket::new(
        vec![
            num_complex::Complex64::new(1.0 / 2.0_f64.sqrt(), 0.0),
            num_complex::Complex64::new(1.0 / 2.0_f64.sqrt(), 0.0),
        ],
        o.layout(),
    )
    .unwrap();
    let reports = suppression_study(
        &psi,
        "O",
        &[4],
        &EnvironmentModel::Haar,
        1000,
        DEFAULT_SUPPRESSION_THRESHOLD,
        13,
    )
    .unwrap();
    let rep = &reports[0];
    // Monte-Carlo oracle: mean |overlap|^2 = 1/2 for Haar-random qubit
    // pairs, so four records push the median coherence below a quarter
    // of the bare value.
    assert!(rep.median < 0.125, "median {}", rep.median);
    assert!(product_law_deviation(&reports) < 1e-10);
    assert_eq!(rep.trials.len(), 1000);
}

#[test]
fn quantum_state_trait_is_usable_for_both_kinds() {
    // The sampling path sees kets and densities through one interface.
    let o = PointerSystem::observer();
    let psi = premeasure(&SpinState::symmetric(), &o).unwrap();
    let rho = psi.density();
    let q_o = pointer_observable(&o).lift(psi.layout()).unwrap();
    let a = psi.raw_moment(q_o.matrix(), 2).re;
    let b = rho.raw_moment(q_o.matrix(), 2).re;
    assert!((a - b).abs() < 1e-13);
}
