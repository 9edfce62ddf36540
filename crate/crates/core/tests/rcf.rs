use proptest::prelude::*;
use rcf_core::fixture::{fixture_records, FIXTURE_SEED};
use rcf_core::{
    build_reference_class, build_uplift_table, certainty_of_contingency, default_certainty_grid,
    filter_class, forecast, trend_fit, uplift_at, ClassFilter, Metric, OverrunSample,
    ReferenceClass, Sector,
};

fn class(values: Vec<f64>) -> ReferenceClass {
    let sample = OverrunSample::new("g", Metric::Cost, values).unwrap();
    build_reference_class("g", Metric::Cost, &[sample]).unwrap()
}

fn overruns() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.9f64..20.0, 2..80)
}

proptest! {
    #[test]
    fn uplift_and_certainty_round_trip(values in overruns(), p in 0.0f64..=1.0) {
        let class = class(values);
        let uplift = uplift_at(&class, p).unwrap();
        let back = certainty_of_contingency(&class, uplift, 0.0).unwrap().certainty;
        prop_assert!(back >= p - 1e-12);
        prop_assert!(back - p <= 1.0 / (2.0 * class.n as f64) + 1e-12 || class.ecdf.values().iter().filter(|&&v| v == uplift).count() > 1);
    }

    #[test]
    fn forecast_is_linear_in_base(values in overruns(), base in 0.01f64..1e10, p in 0.0f64..=1.0) {
        let class = class(values);
        let one = forecast(base, &class, p).unwrap();
        let two = forecast(2.0 * base, &class, p).unwrap();
        prop_assert!((two.uplifted_estimate - 2.0 * one.uplifted_estimate).abs() <= 1e-9 * two.uplifted_estimate.abs().max(1.0));
        prop_assert!((one.uplifted_estimate - base * (1.0 + one.uplift)).abs() <= 1e-9 * base);
    }

    #[test]
    fn uplift_table_is_monotone(values in overruns()) {
        let table = build_uplift_table(&class(values), &default_certainty_grid()).unwrap();
        prop_assert!(table.rows.windows(2).all(|w| w[1].uplift >= w[0].uplift));
        prop_assert!(table.rows.iter().all(|r| (r.acceptable_chance + r.certainty - 1.0).abs() < 1e-12));
    }

    #[test]
    fn more_contingency_never_lowers_certainty(values in overruns(), a in -0.5f64..5.0, b in -0.5f64..5.0, e in 0.0f64..0.5) {
        let class = class(values);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let c_lo = certainty_of_contingency(&class, lo, e).unwrap().certainty;
        let c_hi = certainty_of_contingency(&class, hi, e).unwrap().certainty;
        prop_assert!(c_hi >= c_lo);
    }
}

#[test]
fn fixture_nuclear_cost_ecdf_near_two() {
    let (_, records) = fixture_records(FIXTURE_SEED);
    let sample = filter_class(&records, &ClassFilter::nuclear(), Metric::Cost).sample;
    let class = build_reference_class("nuclear", Metric::Cost, &[sample]).unwrap();
    assert!((class.ecdf.evaluate(2.0) - 0.8).abs() < 0.01);
}

#[test]
fn fixture_power_trend_is_not_decreasing() {
    let (_, records) = fixture_records(FIXTURE_SEED);
    let (years, overruns): (Vec<f64>, Vec<f64>) = records
        .iter()
        .filter(|r| r.sector == Sector::NuclearPower)
        .filter_map(|r| Some((f64::from(r.decision_year?), r.overrun(Metric::Cost)?)))
        .unzip();
    let fit = trend_fit(&years, &overruns).unwrap();
    assert!(fit.no_decrease(), "{fit:?}");
    assert!(fit.slope_ci_low < 0.0);
}
