use serde::{Deserialize, Serialize};

use crate::dataset::OverrunSample;
use crate::error::{domain, Result};
use crate::stats::{rank_sum_test, RankTestResult};

/// Rank-sum test between two named groups.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTest {
    pub group_a: String,
    pub group_b: String,
    pub result: RankTestResult,
}

pub(crate) fn pairwise_tests(groups: &[OverrunSample]) -> Result<Vec<PairwiseTest>> {
    let mut tests = Vec::new();
    for (i, a) in groups.iter().enumerate() {
        for b in &groups[i + 1..] {
            tests.push(PairwiseTest {
                group_a: a.label().to_string(),
                group_b: b.label().to_string(),
                result: rank_sum_test(a.values(), b.values())?,
            });
        }
    }
    Ok(tests)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoolingDecision {
    pub alpha: f64,
    pub groups: Vec<String>,
    /// One entry per unordered pair, in input order.
    pub evidence: Vec<PairwiseTest>,
    /// Groups that may share a reference class.
    pub partition: Vec<Vec<String>>,
}

impl PoolingDecision {
    pub fn p_value(&self, a: &str, b: &str) -> Option<f64> {
        self.evidence
            .iter()
            .find(|t| (t.group_a == a && t.group_b == b) || (t.group_a == b && t.group_b == a))
            .map(|t| t.result.p_value)
    }

    pub fn is_pooled(&self, a: &str, b: &str) -> bool {
        self.partition
            .iter()
            .any(|set| set.iter().any(|g| g == a) && set.iter().any(|g| g == b))
    }
}

/// Runs every pairwise rank-sum test and merges groups that are mutually
/// indistinguishable at level `alpha`.
///
/// Merging is complete-linkage agglomeration: two clusters merge only if
/// every cross pair has `p >= alpha`, always taking the pair of clusters
/// whose weakest cross p-value is largest. No pooled set therefore contains
/// a significant pair.
pub fn decide_pooling(groups: &[OverrunSample], alpha: f64) -> Result<PoolingDecision> {
    if groups.len() < 2 {
        return Err(domain("pooling needs at least two groups"));
    }
    if let Some(g) = groups.iter().find(|g| g.is_empty()) {
        return Err(domain(format!("group '{}' is empty", g.label())));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(domain(format!("alpha {alpha} outside [0, 1]")));
    }
    let evidence = pairwise_tests(groups)?;
    let k = groups.len();
    let mut p = vec![vec![1.0; k]; k];
    let pairs = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j)));
    for ((i, j), test) in pairs.zip(&evidence) {
        p[i][j] = test.result.p_value;
        p[j][i] = test.result.p_value;
    }

    let mut clusters: Vec<Vec<usize>> = (0..k).map(|i| vec![i]).collect();
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let link = clusters[a]
                    .iter()
                    .flat_map(|&i| clusters[b].iter().map(move |&j| (i, j)))
                    .map(|(i, j)| p[i][j])
                    .fold(f64::INFINITY, f64::min);
                if link >= alpha && best.is_none_or(|(_, _, l)| link > l) {
                    best = Some((a, b, link));
                }
            }
        }
        match best {
            Some((a, b, _)) => {
                let merged = clusters.remove(b);
                clusters[a].extend(merged);
                clusters[a].sort_unstable();
            }
            None => break,
        }
    }

    let labels: Vec<String> = groups.iter().map(|g| g.label().to_string()).collect();
    let partition = clusters
        .into_iter()
        .map(|c| c.into_iter().map(|i| labels[i].clone()).collect())
        .collect();
    Ok(PoolingDecision {
        alpha,
        groups: labels,
        evidence,
        partition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Metric;

    fn group(label: &str, values: &[f64]) -> OverrunSample {
        OverrunSample::new(label, Metric::Cost, values.to_vec()).unwrap()
    }

    fn spread(offset: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| offset + i as f64 * 0.1).collect()
    }

    #[test]
    fn identical_groups_pool() {
        let g = spread(0.0, 8);
        let d = decide_pooling(&[group("a", &g), group("b", &g)], 0.05).unwrap();
        assert_eq!(d.partition, vec![vec!["a".to_string(), "b".to_string()]]);
        assert_eq!(d.p_value("b", "a"), Some(1.0));
    }

    #[test]
    fn shifted_group_stays_apart() {
        let d = decide_pooling(
            &[
                group("a", &spread(0.0, 10)),
                group("b", &spread(0.05, 10)),
                group("far", &spread(50.0, 10)),
            ],
            0.05,
        )
        .unwrap();
        assert!(d.is_pooled("a", "b"));
        assert!(!d.is_pooled("a", "far"));
        assert_eq!(d.partition.len(), 2);
        assert_eq!(d.evidence.len(), 3);
    }

    #[test]
    fn no_merge_across_a_significant_pair() {
        // a~b and b~c are compatible but a vs c is not: a chain must not
        // collapse into one class
        let a = spread(0.0, 10);
        let b = spread(0.25, 10);
        let c = spread(0.5, 10);
        let d = decide_pooling(&[group("a", &a), group("b", &b), group("c", &c)], 0.05).unwrap();
        assert!(d.p_value("a", "b").unwrap() >= 0.05);
        assert!(d.p_value("b", "c").unwrap() >= 0.05);
        assert!(d.p_value("a", "c").unwrap() < 0.05);
        assert!(!d.is_pooled("a", "c"));
        for set in &d.partition {
            for x in set {
                for y in set {
                    if x != y {
                        assert!(d.p_value(x, y).unwrap() >= 0.05);
                    }
                }
            }
        }
    }

    #[test]
    fn alpha_boundaries() {
        let groups = [
            group("a", &spread(0.0, 10)),
            group("b", &spread(0.05, 10)),
            group("far", &spread(50.0, 10)),
        ];
        assert_eq!(decide_pooling(&groups, 0.0).unwrap().partition.len(), 1);
        assert_eq!(decide_pooling(&groups, 1.0).unwrap().partition.len(), 3);
    }

    #[test]
    fn preconditions() {
        assert!(decide_pooling(&[group("a", &[1.0])], 0.05).is_err());
        assert!(decide_pooling(&[group("a", &[1.0]), group("b", &[])], 0.05).is_err());
        assert!(decide_pooling(&[group("a", &[1.0]), group("b", &[2.0])], 1.5).is_err());
    }
}
