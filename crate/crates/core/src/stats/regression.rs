use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ecdf::Ecdf;
use super::special::student_t_critical;
use crate::error::{domain, Result};

/// MAD-to-sigma factor for normal residuals.
pub const MAD_SCALE: f64 = 1.4826;
/// Huber tuning constant (95% efficiency under normal errors).
pub const HUBER_K: f64 = 1.345;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    Ols,
    IrlsHuber,
}

/// Straight-line fit `y = intercept + slope * x` with a 95% slope band.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_ci_low: f64,
    pub slope_ci_high: f64,
    pub method: FitMethod,
    pub n: usize,
    pub converged: bool,
    pub iterations: usize,
}

fn check_inputs(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(domain(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(domain(format!(
            "regression needs at least 3 points, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(domain("regression input contains non-finite values"));
    }
    let first = x[0];
    if x.iter().all(|&v| v == first) {
        return Err(domain("regression undefined: x has zero variance"));
    }
    Ok(())
}

/// Weighted least squares. Returns `None` when the weighted x variance vanishes.
fn weighted_line(x: &[f64], y: &[f64], w: &[f64]) -> Option<(f64, f64)> {
    let sw: f64 = w.iter().sum();
    if sw <= 0.0 {
        return None;
    }
    let mx = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for ((xi, yi), wi) in x.iter().zip(y).zip(w) {
        let dx = xi - mx;
        sxx += wi * dx * dx;
        sxy += wi * dx * (yi - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Ordinary least squares with the classical t-based 95% slope interval.
pub fn ols_fit(x: &[f64], y: &[f64]) -> Result<RegressionFit> {
    check_inputs(x, y)?;
    let n = x.len();
    let ones = vec![1.0; n];
    let (slope, intercept) = weighted_line(x, y, &ones).expect("x variance checked");
    let mx = x.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (yi - intercept - slope * xi).powi(2))
        .sum();
    let df = (n - 2) as f64;
    let se = if df > 0.0 {
        (sse / df / sxx).sqrt()
    } else {
        0.0
    };
    let half_width = if df > 0.0 {
        student_t_critical(0.05, df) * se
    } else {
        0.0
    };
    Ok(RegressionFit {
        slope,
        intercept,
        slope_ci_low: slope - half_width,
        slope_ci_high: slope + half_width,
        method: FitMethod::Ols,
        n,
        converged: true,
        iterations: 0,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IrlsOptions {
    pub tuning: f64,
    pub max_iterations: usize,
    /// Stop once the slope moves by less than this between iterations.
    pub tolerance: f64,
    /// Pair-resampling replicates for the percentile interval; 0 skips the
    /// bootstrap and reports a degenerate band at the point estimate.
    pub bootstrap_replicates: usize,
    pub confidence: f64,
    pub seed: u64,
}

impl Default for IrlsOptions {
    fn default() -> Self {
        Self {
            tuning: HUBER_K,
            max_iterations: 50,
            tolerance: 1e-8,
            bootstrap_replicates: 2000,
            confidence: 0.95,
            seed: 42,
        }
    }
}

fn median_in_place(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

struct PointFit {
    slope: f64,
    intercept: f64,
    converged: bool,
    iterations: usize,
}

fn huber_point_fit(x: &[f64], y: &[f64], opts: &IrlsOptions) -> Option<PointFit> {
    let n = x.len();
    let mut weights = vec![1.0; n];
    let (mut slope, mut intercept) = weighted_line(x, y, &weights)?;
    let mut residuals = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    for iteration in 1..=opts.max_iterations {
        for i in 0..n {
            residuals[i] = y[i] - intercept - slope * x[i];
        }
        scratch.copy_from_slice(&residuals);
        let centre = median_in_place(&mut scratch);
        for (s, r) in scratch.iter_mut().zip(&residuals) {
            *s = (r - centre).abs();
        }
        let scale = (MAD_SCALE * median_in_place(&mut scratch)).max(f64::MIN_POSITIVE);
        for (w, r) in weights.iter_mut().zip(&residuals) {
            let u = (r / scale).abs();
            *w = if u <= opts.tuning {
                1.0
            } else {
                opts.tuning / u
            };
        }
        let Some((next_slope, next_intercept)) = weighted_line(x, y, &weights) else {
            return Some(PointFit {
                slope,
                intercept,
                converged: false,
                iterations: iteration,
            });
        };
        let step = (next_slope - slope).abs();
        slope = next_slope;
        intercept = next_intercept;
        if step < opts.tolerance {
            return Some(PointFit {
                slope,
                intercept,
                converged: true,
                iterations: iteration,
            });
        }
    }
    Some(PointFit {
        slope,
        intercept,
        converged: false,
        iterations: opts.max_iterations,
    })
}

/// Huber-weighted IRLS with default options and the given bootstrap seed.
pub fn irls_fit(x: &[f64], y: &[f64], seed: u64) -> Result<RegressionFit> {
    irls_fit_with(
        x,
        y,
        &IrlsOptions {
            seed,
            ..IrlsOptions::default()
        },
    )
}

/// Huber-weighted iteratively reweighted least squares.
///
/// Starts from OLS; each pass rescales residuals by `1.4826 * MAD` and
/// down-weights those beyond the tuning constant. The slope interval is a
/// percentile bootstrap over resampled `(x, y)` pairs. Replicate `i` draws
/// from ChaCha stream `i` of the root seed, so the interval does not depend
/// on how replicates are scheduled across threads.
pub fn irls_fit_with(x: &[f64], y: &[f64], opts: &IrlsOptions) -> Result<RegressionFit> {
    check_inputs(x, y)?;
    if !(opts.confidence > 0.0 && opts.confidence < 1.0) {
        return Err(domain(format!(
            "confidence {} outside (0, 1)",
            opts.confidence
        )));
    }
    let n = x.len();
    let point = huber_point_fit(x, y, opts).expect("x variance checked");

    let (mut low, mut high) = (point.slope, point.slope);
    if opts.bootstrap_replicates > 0 && point.converged {
        let slopes: Vec<f64> = (0..opts.bootstrap_replicates)
            .into_par_iter()
            .filter_map(|replicate| {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(replicate as u64);
                let mut bx = Vec::with_capacity(n);
                let mut by = Vec::with_capacity(n);
                for _ in 0..n {
                    let i = rng.gen_range(0..n);
                    bx.push(x[i]);
                    by.push(y[i]);
                }
                huber_point_fit(&bx, &by, opts)
                    .filter(|f| f.converged)
                    .map(|f| f.slope)
            })
            .collect();
        if !slopes.is_empty() {
            let dist = Ecdf::new(&slopes)?;
            let tail = (1.0 - opts.confidence) / 2.0;
            low = dist.quantile(tail)?;
            high = dist.quantile(1.0 - tail)?;
        }
    }
    Ok(RegressionFit {
        slope: point.slope,
        intercept: point.intercept,
        // a percentile band can miss the point estimate on skewed resamples
        slope_ci_low: low.min(point.slope),
        slope_ci_high: high.max(point.slope),
        method: FitMethod::IrlsHuber,
        n,
        converged: point.converged,
        iterations: point.iterations,
    })
}

/// OLS of overrun on decision year.
pub fn trend_fit(decision_years: &[f64], overruns: &[f64]) -> Result<RegressionFit> {
    ols_fit(decision_years, overruns)
}

impl RegressionFit {
    /// True unless the whole 95% slope band lies below zero.
    pub fn no_decrease(&self) -> bool {
        self.slope_ci_high >= 0.0
    }
}
