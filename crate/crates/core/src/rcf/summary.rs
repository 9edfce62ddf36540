use serde::{Deserialize, Serialize};

use super::class::ReferenceClass;
use crate::dataset::Metric;

/// Descriptive statistics of a reference class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub name: String,
    pub metric: Metric,
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    /// Fraction of observations with overrun strictly above zero.
    pub positive_fraction: f64,
    pub p5: f64,
    pub p95: f64,
    pub proxy_count: usize,
}

pub fn summarize_class(class: &ReferenceClass) -> ClassSummary {
    let e = &class.ecdf;
    let positive = e.values().iter().filter(|&&v| v > 0.0).count();
    ClassSummary {
        name: class.name.clone(),
        metric: class.metric,
        n: class.n,
        mean: e.mean(),
        median: e.median(),
        min: e.min(),
        max: e.max(),
        positive_fraction: positive as f64 / class.n as f64,
        p5: e.quantile(0.05).expect("valid level"),
        p95: e.quantile(0.95).expect("valid level"),
        proxy_count: class.proxy_count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rcf::test_support::class_from;

    #[test]
    fn half_positive() {
        let s = summarize_class(&class_from(&[-0.1, 0.1]));
        assert_eq!(s.positive_fraction, 0.5);
        assert_eq!(s.n, 2);
        assert!((s.median - 0.0).abs() < 1e-15);
        assert_eq!(s.min, -0.1);
        assert_eq!(s.max, 0.1);
    }

    #[test]
    fn percentiles() {
        let values: Vec<f64> = (0..=20).map(|i| i as f64 / 10.0).collect();
        let s = summarize_class(&class_from(&values));
        assert!((s.p5 - 0.1).abs() < 1e-12);
        assert!((s.p95 - 1.9).abs() < 1e-12);
        assert!((s.mean - 1.0).abs() < 1e-12);
    }
}
