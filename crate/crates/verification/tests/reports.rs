use proptest::prelude::*;
use verification::stats::{ks_distance, ks_permutation_test};
use verification::{fingerprint, run_suite, Ensemble, Suite, SuiteReport, Verdict};

#[test]
fn planner_report_round_trips_through_json() {
    let report = run_suite(Suite::Planner, 11, 1).unwrap();
    let back: SuiteReport = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(back.reports, report.reports);
    assert_eq!(back.to_json(), report.to_json());
}

#[test]
fn every_report_carries_the_run_fingerprint() {
    let report = run_suite(Suite::Planner, 3, 1).unwrap();
    assert!(report.reports.iter().all(|r| r.fingerprint.len() == 16));
    let other = run_suite(Suite::Planner, 4, 1).unwrap();
    assert_ne!(report.reports[0].fingerprint, other.reports[0].fingerprint);
}

#[test]
fn fingerprint_depends_on_params_and_seed() {
    assert_eq!(fingerprint(&[1.0, 2.0], 5), fingerprint(&[1.0, 2.0], 5));
    assert_ne!(fingerprint(&[1.0, 2.0], 5), fingerprint(&[1.0, 2.0], 6));
    assert_ne!(fingerprint(&[1.0, 2.0], 5), fingerprint(&[1.0, 2.5], 5));
}

#[test]
fn ensemble_order_ignores_worker_count() {
    let f = |s: u64| s.wrapping_mul(0x9e37_79b9_7f4a_7c15).rotate_left(17);
    assert_eq!(Ensemble::new(1).map(257, f), Ensemble::new(3).map(257, f));
}

#[test]
fn text_report_has_one_line_per_check() {
    let report = run_suite(Suite::Planner, 0, 1).unwrap();
    assert_eq!(report.to_text().lines().count(), report.reports.len() + 1);
}

proptest! {
    #[test]
    fn ks_distance_is_a_symmetric_fraction(
        a in prop::collection::vec(-10.0f64..10.0, 1..40),
        b in prop::collection::vec(-10.0f64..10.0, 1..40),
    ) {
        let d = ks_distance(&a, &b);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!((d - ks_distance(&b, &a)).abs() < 1e-12);
        prop_assert_eq!(ks_distance(&a, &a), 0.0);
    }

    #[test]
    fn permutation_p_value_is_a_probability(
        a in prop::collection::vec(-1.0f64..1.0, 2..30),
        b in prop::collection::vec(-1.0f64..1.0, 2..30),
        seed in any::<u64>(),
    ) {
        let t = ks_permutation_test(&a, &b, 99, seed);
        prop_assert!(t.p_value > 0.0 && t.p_value <= 1.0);
        prop_assert_eq!(t, ks_permutation_test(&a, &b, 99, seed));
    }

    #[test]
    fn poor_fits_never_pass(r2 in -1.0f64..1.0, ok in any::<bool>()) {
        let v = Verdict::from_bool(ok).require_fit(r2, 0.9);
        if r2 < 0.9 {
            prop_assert_ne!(v, Verdict::Pass);
        }
        if !ok {
            prop_assert_eq!(v, Verdict::Fail);
        }
    }
}
