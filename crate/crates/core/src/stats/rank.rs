use serde::{Deserialize, Serialize};

use super::special::normal_sf;
use crate::error::{domain, Error, Result};

/// Largest combined sample size that gets the exact null distribution.
pub const EXACT_MAX_TOTAL: usize = 18;
/// Largest combined sample size the brute-force oracle will enumerate.
pub const ORACLE_MAX_TOTAL: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMethod {
    Exact,
    NormalApprox,
}

/// Two-sided Mann-Whitney rank-sum test outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankTestResult {
    /// `U` for the first sample: its rank sum minus `n1 (n1 + 1) / 2`.
    pub statistic_u: f64,
    pub p_value: f64,
    pub method: RankMethod,
    pub n1: usize,
    pub n2: usize,
    /// Every pooled value was identical; `p_value` is 1 by convention.
    pub degenerate: bool,
}

/// Midranks of `values` (1-based), doubled so that they are integers.
fn doubled_midranks(values: &[f64]) -> (Vec<u64>, Vec<usize>) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0u64; n];
    let mut tie_sizes = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && values[order[end + 1]] == values[order[start]] {
            end += 1;
        }
        // positions start..=end hold ranks start+1..=end+1
        let doubled = (start + 1 + end + 1) as u64;
        for &idx in &order[start..=end] {
            ranks[idx] = doubled;
        }
        tie_sizes.push(end - start + 1);
        start = end + 1;
    }
    (ranks, tie_sizes)
}

/// Two-sided Mann-Whitney U test with midranks for ties.
///
/// When `n1 + n2 <= 18` the p-value comes from the exact permutation
/// distribution of the observed (possibly tied) ranks; otherwise from the
/// normal approximation with tie-corrected variance and continuity
/// correction.
pub fn rank_sum_test(a: &[f64], b: &[f64]) -> Result<RankTestResult> {
    if a.is_empty() || b.is_empty() {
        return Err(domain("rank-sum test needs two non-empty samples"));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(domain("rank-sum test input contains NaN"));
    }
    let (n1, n2) = (a.len(), b.len());
    let n = n1 + n2;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, tie_sizes) = doubled_midranks(&pooled);
    let observed: u64 = ranks[..n1].iter().sum();
    let statistic_u = observed as f64 / 2.0 - (n1 * (n1 + 1)) as f64 / 2.0;
    let method = if n <= EXACT_MAX_TOTAL {
        RankMethod::Exact
    } else {
        RankMethod::NormalApprox
    };
    let degenerate = tie_sizes.len() == 1;
    let p_value = if degenerate {
        1.0
    } else {
        match method {
            RankMethod::Exact => exact_p(&ranks, n1, observed),
            RankMethod::NormalApprox => normal_p(statistic_u, n1, n2, &tie_sizes),
        }
    };
    Ok(RankTestResult {
        statistic_u,
        p_value: p_value.clamp(f64::MIN_POSITIVE, 1.0),
        method,
        n1,
        n2,
        degenerate,
    })
}

/// Counts, over all `C(n, n1)` assignments of the doubled ranks to the first
/// group, those whose rank sum is at least as far from its mean as observed.
fn exact_p(ranks: &[u64], n1: usize, observed: u64) -> f64 {
    let max_sum: u64 = ranks.iter().sum();
    let width = max_sum as usize + 1;
    // counts[k][s]: number of k-subsets with doubled rank sum s
    let mut counts = vec![vec![0u64; width]; n1 + 1];
    counts[0][0] = 1;
    for &r in ranks {
        let r = r as usize;
        for k in (1..=n1).rev() {
            let (lower, upper) = counts.split_at_mut(k);
            let (prev, cur) = (&lower[k - 1], &mut upper[0]);
            for s in (r..width).rev() {
                cur[s] += prev[s - r];
            }
        }
    }
    let n = ranks.len() as i64;
    let mean = n1 as i64 * (n + 1);
    let observed_dev = (observed as i64 - mean).abs();
    let (mut extreme, mut total) = (0u64, 0u64);
    for (s, &c) in counts[n1].iter().enumerate() {
        total += c;
        if (s as i64 - mean).abs() >= observed_dev {
            extreme += c;
        }
    }
    extreme as f64 / total as f64
}

fn normal_p(u: f64, n1: usize, n2: usize, tie_sizes: &[usize]) -> f64 {
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let n = n1f + n2f;
    let tie_term: f64 = tie_sizes
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let variance = n1f * n2f / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if variance <= 0.0 {
        return 1.0;
    }
    let mean = n1f * n2f / 2.0;
    let z = ((u - mean).abs() - 0.5).max(0.0) / variance.sqrt();
    (2.0 * normal_sf(z)).min(1.0)
}

/// Brute-force two-sided p-value: enumerates every split of the pooled values
/// into groups of sizes `n1` and `n2` and compares pairwise-count `U`
/// statistics. Independent of the rank machinery in [`rank_sum_test`].
pub fn permutation_oracle(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(domain("permutation oracle needs two non-empty samples"));
    }
    let n = a.len() + b.len();
    if n > ORACLE_MAX_TOTAL {
        return Err(Error::Refused(format!(
            "permutation enumeration limited to {ORACLE_MAX_TOTAL} values, got {n}"
        )));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n1 = a.len();
    let u_of = |mask: u32| -> f64 {
        let mut u = 0.0;
        for i in (0..n).filter(|i| mask & (1 << i) != 0) {
            for j in (0..n).filter(|j| mask & (1 << j) == 0) {
                if pooled[i] > pooled[j] {
                    u += 1.0;
                } else if pooled[i] == pooled[j] {
                    u += 0.5;
                }
            }
        }
        u
    };
    let center = (n1 * (n - n1)) as f64 / 2.0;
    let observed_dev = (u_of((1u32 << n1) - 1) - center).abs();
    let (mut extreme, mut total) = (0u64, 0u64);
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != n1 {
            continue;
        }
        total += 1;
        if (u_of(mask) - center).abs() >= observed_dev - 1e-9 {
            extreme += 1;
        }
    }
    Ok(extreme as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_triples() {
        let r = rank_sum_test(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(r.method, RankMethod::Exact);
        assert_eq!(r.statistic_u, 0.0);
        assert!((r.p_value - 0.1).abs() < 1e-15);
    }

    #[test]
    fn identical_samples() {
        let r = rank_sum_test(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert!(!r.degenerate);
        let big: Vec<f64> = (0..30).map(f64::from).collect();
        assert_eq!(rank_sum_test(&big, &big).unwrap().p_value, 1.0);
    }

    #[test]
    fn all_equal_is_degenerate() {
        let r = rank_sum_test(&[2.0; 4], &[2.0; 5]).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.p_value, 1.0);
        let r = rank_sum_test(&[2.0; 40], &[2.0; 5]).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.method, RankMethod::NormalApprox);
    }

    #[test]
    fn empty_sample_is_an_error() {
        assert!(rank_sum_test(&[], &[1.0]).is_err());
        assert!(permutation_oracle(&[1.0], &[]).is_err());
    }

    #[test]
    fn oracle_small_case() {
        let p = permutation_oracle(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(permutation_oracle(&[1.0, 5.0], &[1.0, 5.0]).unwrap(), 1.0);
    }

    #[test]
    fn oracle_refuses_large_inputs() {
        let a: Vec<f64> = (0..8).map(f64::from).collect();
        let b: Vec<f64> = (8..15).map(f64::from).collect();
        assert!(matches!(permutation_oracle(&a, &b), Err(Error::Refused(_))));
    }

    #[test]
    fn exact_path_with_ties_matches_oracle() {
        let a = [0.1, 0.4, 0.4, 0.9];
        let b = [0.4, 0.2, 1.5, 0.9, 2.0];
        let exact = rank_sum_test(&a, &b).unwrap().p_value;
        let oracle = permutation_oracle(&a, &b).unwrap();
        assert!((exact - oracle).abs() < 1e-12);
    }

    #[test]
    fn shift_invariance() {
        let a = [1.0, 2.0, 3.0];
        let b = [1.5, 2.5, 3.5, 0.2];
        let base = rank_sum_test(&a, &b).unwrap();
        let shifted_a: Vec<f64> = a.iter().map(|v| v + 1000.0).collect();
        let shifted_b: Vec<f64> = b.iter().map(|v| v + 1000.0).collect();
        let shifted = rank_sum_test(&shifted_a, &shifted_b).unwrap();
        assert_eq!(base, shifted);
    }

    #[test]
    fn normal_path_known_value() {
        // No ties, n1 = n2 = 10, complete separation: U = 0,
        // z = (50 - 0.5) / sqrt(175) = 3.7418...
        let a: Vec<f64> = (0..10).map(f64::from).collect();
        let b: Vec<f64> = (10..20).map(f64::from).collect();
        let r = rank_sum_test(&a, &b).unwrap();
        assert_eq!(r.method, RankMethod::NormalApprox);
        let z: f64 = 49.5 / 175f64.sqrt();
        let want = 2.0 * normal_sf(z);
        assert!((r.p_value - want).abs() < 1e-15);
        assert!((r.p_value - 1.827e-4).abs() < 1e-6);
    }
}
