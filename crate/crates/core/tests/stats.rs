use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rcf_core::{irls_fit_with, ols_fit, pearson_correlation, rank_sum_test, IrlsOptions};

fn sample(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-50i32..200).prop_map(|v| f64::from(v) / 20.0), 1..max_len)
}

proptest! {
    #[test]
    fn rank_test_is_symmetric(a in sample(15), b in sample(15)) {
        let ab = rank_sum_test(&a, &b).unwrap();
        let ba = rank_sum_test(&b, &a).unwrap();
        prop_assert!((ab.p_value - ba.p_value).abs() <= 1e-12);
        let total = (a.len() * b.len()) as f64;
        prop_assert!((ab.statistic_u + ba.statistic_u - total).abs() <= 1e-9);
    }

    #[test]
    fn rank_test_ignores_monotone_transforms(a in sample(15), b in sample(15)) {
        let p = rank_sum_test(&a, &b).unwrap().p_value;
        let f = |v: &Vec<f64>| v.iter().map(|x| (x * 0.7).exp() + 1000.0).collect::<Vec<_>>();
        let q = rank_sum_test(&f(&a), &f(&b)).unwrap().p_value;
        prop_assert!((p - q).abs() <= 1e-12);
    }

    #[test]
    fn rank_p_is_a_probability(a in sample(30), b in sample(30)) {
        let p = rank_sum_test(&a, &b).unwrap().p_value;
        prop_assert!(p > 0.0 && p <= 1.0);
    }

    #[test]
    fn correlation_of_affine_image_is_unit(
        x in prop::collection::vec(-100.0f64..100.0, 3..40),
        scale in prop_oneof![0.1f64..10.0, -10.0f64..-0.1],
        shift in -50.0f64..50.0,
    ) {
        let spread = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - x.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assume!(spread > 1e-3);
        let y: Vec<f64> = x.iter().map(|v| scale * v + shift).collect();
        let r = pearson_correlation(&x, &y).unwrap().r;
        prop_assert!((r - scale.signum()).abs() < 1e-9);
    }
}

#[test]
fn independent_samples_are_uncorrelated() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x: Vec<f64> = (0..1000).map(|_| rng.gen_range(0.0..1.0)).collect();
    let y: Vec<f64> = (0..1000).map(|_| rng.gen_range(0.0..1.0)).collect();
    let c = pearson_correlation(&x, &y).unwrap();
    assert!(c.r.abs() < 0.1, "r = {}", c.r);
    assert!(c.p_value > 0.001);
}

/// Two-sided t tail by Simpson integration of the density.
fn t_two_sided_by_quadrature(t: f64, df: f64) -> f64 {
    let ln_norm = statrs::function::gamma::ln_gamma((df + 1.0) / 2.0)
        - statrs::function::gamma::ln_gamma(df / 2.0)
        - 0.5 * (df * std::f64::consts::PI).ln();
    let density = |x: f64| (ln_norm - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp();
    let steps = 200_000;
    let h = t / f64::from(steps);
    let mut sum = density(0.0) + density(t);
    for i in 1..steps {
        sum += density(f64::from(i) * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    1.0 - 2.0 * sum * h / 3.0
}

#[test]
fn correlation_p_matches_quadrature() {
    let x = [1.0, 2.0, 3.0, 4.0, 5.0];
    let y = [2.0, 1.0, 4.0, 3.0, 5.0];
    let c = pearson_correlation(&x, &y).unwrap();
    assert!((c.r - 0.8).abs() < 1e-12);
    let t = c.r * (3.0f64 / (1.0 - c.r * c.r)).sqrt();
    let oracle = t_two_sided_by_quadrature(t, 3.0);
    assert!(
        (c.p_value - oracle).abs() < 1e-9,
        "{} vs {oracle}",
        c.p_value
    );
}

#[test]
fn irls_agrees_with_ols_on_clean_data() {
    let noise = Normal::new(0.0, 0.05).unwrap();
    let opts = IrlsOptions {
        bootstrap_replicates: 0,
        ..IrlsOptions::default()
    };
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..80).map(|_| rng.gen_range(0.0..2.0)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| 0.3 + 1.1 * v + noise.sample(&mut rng))
            .collect();
        let irls = irls_fit_with(&x, &y, &opts).unwrap();
        let ols = ols_fit(&x, &y).unwrap();
        assert!(irls.converged);
        assert!(
            (irls.slope - ols.slope).abs() < 0.02,
            "seed {seed}: {} vs {}",
            irls.slope,
            ols.slope
        );
    }
}

#[test]
fn bootstrap_interval_covers_true_slope() {
    let noise = Normal::new(0.0, 0.2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x: Vec<f64> = (0..150).map(|_| rng.gen_range(0.0..1.5)).collect();
    let mut y: Vec<f64> = x
        .iter()
        .map(|v| 0.1 + 1.1 * v + noise.sample(&mut rng))
        .collect();
    for v in y.iter_mut().step_by(12) {
        *v += 15.0;
    }
    let fit = rcf_core::irls_fit(&x, &y, 42).unwrap();
    assert!(
        fit.slope_ci_low <= 1.1 && 1.1 <= fit.slope_ci_high,
        "{fit:?}"
    );
    assert_eq!(fit, rcf_core::irls_fit(&x, &y, 42).unwrap());
}
