//! Synthetic bundled dataset.
//!
//! Per-project data behind the published uplift grid is not public, so the
//! bundled dataset is generated: the pooled nuclear cost (n = 216) and
//! schedule (n = 200) samples are placed by inverse transform so that their
//! type-7 quantile at every 5% certainty step equals the published uplift,
//! with linear interpolation between steps out to the published extremes.
//! Group membership, pairing of cost with schedule, decision years and the
//! mining and research records are drawn from a seeded generator.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::{write_csv, DatasetMeta, ProjectRecord, Sector};

/// Cost uplift at certainty 5%, 10%, ..., 95%.
pub const COST_UPLIFTS: [f64; 19] = [
    0.02, 0.06, 0.11, 0.15, 0.21, 0.26, 0.32, 0.41, 0.49, 0.67, 0.80, 0.98, 1.32, 1.65, 1.83, 2.02,
    2.40, 2.81, 4.27,
];
/// Schedule uplift at certainty 5%, 10%, ..., 95%.
pub const SCHEDULE_UPLIFTS: [f64; 19] = [
    0.00, 0.02, 0.15, 0.20, 0.28, 0.33, 0.35, 0.36, 0.40, 0.40, 0.60, 0.63, 0.77, 0.88, 0.89, 1.04,
    1.27, 1.45, 1.63,
];
pub const COST_RANGE: (f64, f64) = (-0.30, 19.0);
pub const SCHEDULE_RANGE: (f64, f64) = (-0.15, 22.0);

pub const NUCLEAR_COST_N: usize = 216;
pub const NUCLEAR_SCHEDULE_N: usize = 200;
pub const FIXTURE_SEED: u64 = 2018;
pub const PROXY_RECORDS: usize = 3;

/// The grid levels as the quantile code computes them.
fn grid_level(k: usize) -> f64 {
    k as f64 / 20.0
}

/// `n` values whose type-7 quantile at level `k / 20` is `grid[k - 1]`
/// exactly, with minimum `range.0` and maximum `range.1`.
pub fn quantile_matched_sample(n: usize, grid: &[f64; 19], range: (f64, f64)) -> Vec<f64> {
    assert!(n >= 3, "need at least three values");
    let mut knots: Vec<(f64, f64)> = vec![(0.0, range.0)];
    knots.extend(
        grid.iter()
            .enumerate()
            .map(|(k, &q)| (grid_level(k + 1), q)),
    );
    knots.push((1.0, range.1));

    let slope = |seg: usize| {
        let ((p0, q0), (p1, q1)) = (knots[seg], knots[seg + 1]);
        (q1 - q0) / (p1 - p0)
    };
    let interpolate = |p: f64| {
        let seg = knots
            .windows(2)
            .position(|w| p <= w[1].0)
            .unwrap_or(knots.len() - 2);
        knots[seg].1 + slope(seg) * (p - knots[seg].0)
    };

    let last = (n - 1) as f64;
    let mut values: Vec<f64> = (0..n).map(|i| interpolate(i as f64 / last)).collect();
    // Inside the cell straddling a knot, continue the flatter neighbouring
    // segment so that interpolating the two order statistics hits the knot.
    for (k, &(p, q)) in knots.iter().enumerate().take(knots.len() - 1).skip(1) {
        let h = last * p;
        let i = h.floor() as usize;
        let frac = h - i as f64;
        if frac == 0.0 {
            values[i] = q;
            continue;
        }
        let (left, right) = (slope(k - 1), slope(k));
        if left <= right {
            values[i + 1] = values[i] + (q - values[i]) / frac;
        } else {
            values[i] = (q - frac * values[i + 1]) / (1.0 - frac);
        }
    }
    values
}

struct Draft {
    sector: Sector,
    depth_m: Option<f64>,
    cost: Option<f64>,
    schedule: Option<f64>,
    proxy_pct: Option<f64>,
    withheld_cost: bool,
    decision_year: i32,
}

/// Picks `count` indices out of `available`, one from each of `count`
/// equal-width strata of the (sorted) list.
fn stratified_pick(available: &mut Vec<usize>, count: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let len = available.len();
    let mut picked_positions: Vec<usize> = (0..count)
        .map(|s| {
            let lo = s * len / count;
            let hi = ((s + 1) * len / count).max(lo + 1);
            rng.gen_range(lo..hi)
        })
        .collect();
    picked_positions.sort_unstable();
    let picked: Vec<usize> = picked_positions.iter().map(|&p| available[p]).collect();
    for &p in picked_positions.iter().rev() {
        available.remove(p);
    }
    picked
}

/// Splits a sorted pooled sample into the given group sizes by stratified
/// sampling, so every group spans the whole distribution.
fn split_groups(values: &[f64], sizes: &[usize], rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut available: Vec<usize> = (0..values.len()).collect();
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for &size in &sizes[..sizes.len() - 1] {
        groups.push(
            stratified_pick(&mut available, size, rng)
                .into_iter()
                .map(|i| values[i])
                .collect(),
        );
    }
    assert_eq!(available.len(), sizes[sizes.len() - 1]);
    groups.push(available.into_iter().map(|i| values[i]).collect());
    groups
}

/// Assigns cost and schedule values to `records` projects so that the two
/// are positively rank-correlated through a Gaussian copula.
fn pair_values(
    records: usize,
    mut cost: Vec<f64>,
    mut schedule: Vec<f64>,
    rho: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<(Option<f64>, Option<f64>)> {
    let latent: Vec<f64> = (0..records).map(|_| rng.sample(StandardNormal)).collect();
    let noise: Vec<f64> = (0..records).map(|_| rng.sample(StandardNormal)).collect();
    let schedule_latent: Vec<f64> = latent
        .iter()
        .zip(&noise)
        .map(|(z, e)| rho * z + (1.0 - rho * rho).sqrt() * e)
        .collect();
    cost.sort_by(f64::total_cmp);
    schedule.sort_by(f64::total_cmp);
    let rank_fill = |holders: usize, latent: &[f64], values: &[f64]| {
        let mut order: Vec<usize> = (0..holders).collect();
        order.sort_by(|&a, &b| latent[a].total_cmp(&latent[b]));
        let mut out = vec![None; records];
        for (rank, idx) in order.into_iter().enumerate() {
            out[idx] = Some(values[rank]);
        }
        out
    };
    // the first cost.len() records hold cost values, the first schedule.len() hold schedule values
    let costs = rank_fill(cost.len(), &latent, &cost);
    let schedules = rank_fill(schedule.len(), &schedule_latent, &schedule);
    costs.into_iter().zip(schedules).collect()
}

fn draw_from_grid(
    grid: &[f64; 19],
    range: (f64, f64),
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let reference = quantile_matched_sample(201, grid, range);
    let e = crate::stats::Ecdf::new(&reference).expect("non-empty");
    (0..count)
        .map(|s| {
            let u = (s as f64 + rng.gen::<f64>()) / count as f64;
            e.quantile(u.clamp(0.0, 1.0)).expect("in range")
        })
        .collect()
}

fn normal_values(centre: f64, spread: f64, count: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..count)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            (centre + spread * z).max(-0.6)
        })
        .collect()
}

/// Generates the bundled dataset.
pub fn fixture_records(seed: u64) -> (DatasetMeta, Vec<ProjectRecord>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cost = quantile_matched_sample(NUCLEAR_COST_N, &COST_UPLIFTS, COST_RANGE);
    let schedule = quantile_matched_sample(NUCLEAR_SCHEDULE_N, &SCHEDULE_UPLIFTS, SCHEDULE_RANGE);

    // cost: hlw 11, lilw 11, new build 194; schedule: hlw 14, lilw 9, new build 177
    let cost_groups = split_groups(&cost, &[11, 11, 194], &mut rng);
    let schedule_groups = split_groups(&schedule, &[14, 9, 177], &mut rng);

    let mut drafts: Vec<Draft> = Vec::new();
    let mut push_sector = |sector: Sector,
                           pairs: Vec<(Option<f64>, Option<f64>)>,
                           years: (i32, i32),
                           depth: &dyn Fn(usize) -> Option<f64>,
                           rng: &mut ChaCha8Rng| {
        for (i, (c, s)) in pairs.into_iter().enumerate() {
            drafts.push(Draft {
                sector,
                depth_m: depth(i),
                cost: c,
                schedule: s,
                proxy_pct: None,
                withheld_cost: false,
                decision_year: rng.gen_range(years.0..=years.1),
            });
        }
    };
    let no_depth = |_: usize| None;

    let hlw = pair_values(
        14,
        cost_groups[0].clone(),
        schedule_groups[0].clone(),
        0.5,
        &mut rng,
    );
    push_sector(
        Sector::NuclearStorageHlw,
        hlw,
        (1970, 2012),
        &no_depth,
        &mut rng,
    );
    let lilw = pair_values(
        11,
        cost_groups[1].clone(),
        schedule_groups[1].clone(),
        0.5,
        &mut rng,
    );
    push_sector(
        Sector::NuclearStorageLilw,
        lilw,
        (1970, 2012),
        &no_depth,
        &mut rng,
    );
    let power = pair_values(
        194,
        cost_groups[2].clone(),
        schedule_groups[2].clone(),
        0.5,
        &mut rng,
    );
    push_sector(
        Sector::NuclearPower,
        power,
        (1955, 2012),
        &no_depth,
        &mut rng,
    );

    // mining: 11 projects at 100-300 m, 20 deeper than 300 m, 2 shallower than 100 m
    let shallow_cost = normal_values(0.33, 0.25, 11, &mut rng);
    let deep_cost = normal_values(0.0, 0.15, 20, &mut rng);
    let near_surface_cost = normal_values(0.2, 0.2, 2, &mut rng);
    let mining_schedule = draw_from_grid(&SCHEDULE_UPLIFTS, SCHEDULE_RANGE, 25, &mut rng);
    let mut mining_schedule_shuffled = mining_schedule.clone();
    mining_schedule_shuffled.shuffle(&mut rng);
    let mut sched_iter = mining_schedule_shuffled.into_iter();
    let mut mining =
        |costs: Vec<f64>, with_schedule: usize, depth: (f64, f64), rng: &mut ChaCha8Rng| {
            let pairs: Vec<(Option<f64>, Option<f64>)> = costs
                .into_iter()
                .enumerate()
                .map(|(i, c)| {
                    (
                        Some(c),
                        if i < with_schedule {
                            sched_iter.next()
                        } else {
                            None
                        },
                    )
                })
                .collect();
            let depths: Vec<f64> = (0..pairs.len())
                .map(|_| (rng.gen_range(depth.0..depth.1) / 5.0).round() * 5.0)
                .collect();
            push_sector(
                Sector::Mining,
                pairs,
                (1985, 2015),
                &|i| Some(depths[i]),
                rng,
            );
        };
    mining(shallow_cost, 8, (105.0, 295.0), &mut rng);
    mining(deep_cost, 15, (320.0, 2400.0), &mut rng);
    mining(near_surface_cost, 2, (30.0, 95.0), &mut rng);

    let research_cost = draw_from_grid(&COST_UPLIFTS, COST_RANGE, 4, &mut rng);
    let research_schedule = draw_from_grid(&SCHEDULE_UPLIFTS, SCHEDULE_RANGE, 4, &mut rng);
    let research = pair_values(4, research_cost, research_schedule, 0.5, &mut rng);
    push_sector(
        Sector::NuclearResearch,
        research,
        (1980, 2010),
        &no_depth,
        &mut rng,
    );

    // Storage records without an actual cost: 3 proxies (two LILW without a
    // final schedule, one HLW) and 3 HLW records with no usable cost.
    let lilw_start = 14;
    drafts[lilw_start + 9].proxy_pct = Some(80.0);
    drafts[lilw_start + 10].proxy_pct = Some(85.0);
    drafts[3].proxy_pct = Some(90.0);
    for d in &mut drafts[11..14] {
        d.withheld_cost = true;
    }

    let mut counters = std::collections::BTreeMap::new();
    let records = drafts
        .into_iter()
        .map(|d| {
            let (prefix, label) = match d.sector {
                Sector::NuclearPower => ("NP", "Nuclear new build"),
                Sector::NuclearStorageHlw => ("HLW", "HLW storage facility"),
                Sector::NuclearStorageLilw => ("LILW", "LILW repository"),
                Sector::NuclearResearch => ("RES", "Underground research lab"),
                Sector::Mining => ("MIN", "Underground mine"),
            };
            let count = counters.entry(prefix).or_insert(0usize);
            *count += 1;
            let cost_scale = match d.sector {
                Sector::NuclearPower => (800.0, 9000.0),
                Sector::Mining => (150.0, 2500.0),
                _ => (40.0, 3000.0),
            };
            let est_cost = (rng.gen_range(cost_scale.0..cost_scale.1) * 10.0_f64).round() / 10.0;
            let est_duration = rng.gen_range(24..=144) as f64;
            let actual_cost = d.cost.map(|o| est_cost * (1.0 + o));
            let (act_cost, forecast, pct_complete) = if d.withheld_cost {
                // one of them has a forecast but is too early in construction to use it
                if *count == 12 {
                    (None, Some((est_cost * 1.4 * 10.0).round() / 10.0), 60.0)
                } else {
                    (None, None, 100.0)
                }
            } else if let Some(pct) = d.proxy_pct {
                (actual_cost, actual_cost, pct)
            } else {
                (actual_cost, None, 100.0)
            };
            ProjectRecord {
                id: format!("{prefix}-{count:03}"),
                name: format!("Synthetic {label} {count}"),
                sector: d.sector,
                depth_m: d.depth_m,
                est_cost,
                act_cost,
                forecast_at_completion: forecast,
                est_duration_months: d.schedule.map(|_| est_duration),
                act_duration_months: d.schedule.map(|o| est_duration * (1.0 + o)),
                pct_complete,
                decision_year: Some(d.decision_year),
                cost_is_proxy: d.proxy_pct.is_some(),
            }
        })
        .collect();
    let meta = DatasetMeta {
        currency: Some("CHF".into()),
        basis_year: Some(2018),
    };
    (meta, records)
}

/// The bundled dataset rendered as CSV.
pub fn fixture_csv(seed: u64) -> String {
    let (meta, records) = fixture_records(seed);
    let mut out = Vec::new();
    write_csv(&meta, &records, &mut out).expect("writing to memory cannot fail");
    String::from_utf8(out).expect("CSV output is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Ecdf;

    #[test]
    fn matched_samples_hit_every_grid_value() {
        for (n, grid, range) in [
            (NUCLEAR_COST_N, &COST_UPLIFTS, COST_RANGE),
            (NUCLEAR_SCHEDULE_N, &SCHEDULE_UPLIFTS, SCHEDULE_RANGE),
            (57, &COST_UPLIFTS, COST_RANGE),
        ] {
            let values = quantile_matched_sample(n, grid, range);
            assert_eq!(values.len(), n);
            assert!(values.windows(2).all(|w| w[0] <= w[1]), "sorted for n={n}");
            let e = Ecdf::new(&values).unwrap();
            assert_eq!(e.min(), range.0);
            assert_eq!(e.max(), range.1);
            for (k, &q) in grid.iter().enumerate() {
                let got = e.quantile(grid_level(k + 1)).unwrap();
                assert!((got - q).abs() < 1e-12, "n={n} level {k}: {got} vs {q}");
            }
        }
    }

    #[test]
    fn generator_is_deterministic() {
        assert_eq!(fixture_csv(7), fixture_csv(7));
        assert_ne!(fixture_csv(7), fixture_csv(8));
    }

    #[test]
    fn record_counts() {
        let (_, records) = fixture_records(FIXTURE_SEED);
        let count = |s: Sector| records.iter().filter(|r| r.sector == s).count();
        assert_eq!(count(Sector::NuclearPower), 194);
        assert_eq!(count(Sector::NuclearStorageHlw), 14);
        assert_eq!(count(Sector::NuclearStorageLilw), 11);
        assert_eq!(count(Sector::Mining), 33);
        assert_eq!(
            records.iter().filter(|r| r.cost_is_proxy).count(),
            PROXY_RECORDS
        );
    }
}
