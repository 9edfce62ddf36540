use serde::Serialize;

use super::pooling::{pairwise_tests, PairwiseTest};
use crate::dataset::{Metric, OverrunSample};
use crate::error::{domain, Result};
use crate::stats::Ecdf;

/// A pooled set of comparable past projects and its overrun distribution.
#[derive(Clone, Debug, Serialize)]
pub struct ReferenceClass {
    pub name: String,
    pub metric: Metric,
    pub member_groups: Vec<String>,
    pub member_sizes: Vec<usize>,
    pub ecdf: Ecdf,
    pub n: usize,
    pub proxy_count: usize,
    /// Rank-sum tests for every unordered pair of member groups.
    pub pooling_evidence: Vec<PairwiseTest>,
}

/// Concatenates the member samples into one class.
pub fn build_reference_class(
    name: impl Into<String>,
    metric: Metric,
    samples: &[OverrunSample],
) -> Result<ReferenceClass> {
    let name = name.into();
    if let Some(s) = samples.iter().find(|s| s.metric() != metric) {
        return Err(domain(format!(
            "group '{}' holds {} overruns, class '{name}' is {metric}",
            s.label(),
            s.metric()
        )));
    }
    let values: Vec<f64> = samples
        .iter()
        .flat_map(|s| s.values().iter().copied())
        .collect();
    if values.is_empty() {
        return Err(domain(format!(
            "reference class '{name}' has no observations"
        )));
    }
    let non_empty: Vec<OverrunSample> = samples.iter().filter(|s| !s.is_empty()).cloned().collect();
    Ok(ReferenceClass {
        name,
        metric,
        member_groups: samples.iter().map(|s| s.label().to_string()).collect(),
        member_sizes: samples.iter().map(OverrunSample::n).collect(),
        ecdf: Ecdf::new(&values)?,
        n: values.len(),
        proxy_count: samples.iter().map(OverrunSample::proxies).sum(),
        pooling_evidence: pairwise_tests(&non_empty)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(label: &str, metric: Metric, values: &[f64]) -> OverrunSample {
        OverrunSample::new(label, metric, values.to_vec()).unwrap()
    }

    #[test]
    fn concatenates_members() {
        let class = build_reference_class(
            "nuclear",
            Metric::Cost,
            &[
                sample("a", Metric::Cost, &[0.1, 0.5]),
                sample("b", Metric::Cost, &[0.2]).with_proxies(1),
                sample("c", Metric::Cost, &[0.9, -0.1, 0.3]),
            ],
        )
        .unwrap();
        assert_eq!(class.n, 6);
        assert_eq!(class.member_sizes, vec![2, 1, 3]);
        assert_eq!(class.proxy_count, 1);
        assert_eq!(class.pooling_evidence.len(), 3);
        assert_eq!(class.ecdf.values(), &[-0.1, 0.1, 0.2, 0.3, 0.5, 0.9]);
    }

    #[test]
    fn singleton_matches_group_ecdf() {
        let s = sample("a", Metric::Schedule, &[0.4, 0.0, 1.2]);
        let class = build_reference_class("a", Metric::Schedule, std::slice::from_ref(&s)).unwrap();
        assert_eq!(class.ecdf, crate::stats::build_ecdf(&s).unwrap());
        assert!(class.pooling_evidence.is_empty());
    }

    #[test]
    fn rejects_empty_and_mixed() {
        assert!(build_reference_class("x", Metric::Cost, &[]).is_err());
        assert!(
            build_reference_class("x", Metric::Cost, &[sample("a", Metric::Cost, &[])]).is_err()
        );
        assert!(
            build_reference_class("x", Metric::Cost, &[sample("a", Metric::Schedule, &[0.1])])
                .is_err()
        );
    }
}
