use highway_interference::frames::{estimate_frame_probability, frame_probability_bound};
use highway_interference::generators::{uniform_points, uniform_via_exponentials, Purpose, Seed};
use highway_interference::stats::{ks_one_sample_critical, ks_uniform_statistic};

const ALPHA: f64 = 0.01;

#[test]
fn uniform_points_pass_one_sample_ks() {
    let n = 100_000;
    let critical = ks_one_sample_critical(n, ALPHA);
    let passed = (0..100u64)
        .filter(|&index| {
            let p = uniform_points(
                n,
                Seed::stream(20_100_704, Purpose::Points, n as u64, index),
            );
            ks_uniform_statistic(p.positions()) <= critical
        })
        .count();
    assert!(
        passed >= 99,
        "only {passed}/100 seeds passed at alpha {ALPHA}"
    );
}

#[test]
fn exponential_spacings_give_uniform_points() {
    let n = 20_000;
    let critical = ks_one_sample_critical(n, ALPHA);
    let passed = (0..20u64)
        .filter(|&index| {
            let p = uniform_via_exponentials(n, Seed::stream(99, Purpose::Points, n as u64, index))
                .unwrap();
            ks_uniform_statistic(p.positions()) <= critical
        })
        .count();
    assert!(passed >= 19, "only {passed}/20 seeds passed");
}

#[test]
fn zero_frame_frequency_matches_closed_form() {
    // P(X_0 in [1, 2]) = e^-1 - e^-2
    let exact = (-1f64).exp() - (-2f64).exp();
    let est = estimate_frame_probability(0, 1_000_000, 11).unwrap();
    assert!(
        (est.empirical - exact).abs() < 0.002,
        "{} vs {exact}",
        est.empirical
    );
}

#[test]
fn frame_frequencies_dominate_bound() {
    for k in 0..=2 {
        let est = estimate_frame_probability(k, 10_000_000, 20_100_704).unwrap();
        assert_eq!(est.bound, frame_probability_bound(k));
        assert!(
            est.empirical >= est.bound - 3.0 * est.std_error,
            "k={k}: {} < {} - 3*{}",
            est.empirical,
            est.bound,
            est.std_error
        );
    }
}
