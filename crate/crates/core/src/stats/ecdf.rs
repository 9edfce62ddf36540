use serde::Serialize;

use crate::dataset::OverrunSample;
use crate::error::{domain, Result};

/// Empirical distribution of a sample with a continuous, piecewise-linear
/// CDF.
///
/// Order statistic `i` (0-based) sits at cumulative probability
/// `i / (n - 1)`, so [`Ecdf::quantile`] is the type-7 sample quantile and
/// [`Ecdf::evaluate`] is its inverse.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ecdf {
    sorted_values: Vec<f64>,
}

impl Ecdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(domain("cannot build an ECDF from an empty sample"));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(domain("sample contains NaN"));
        }
        let mut sorted_values = values.to_vec();
        sorted_values.sort_by(f64::total_cmp);
        Ok(Self { sorted_values })
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted_values
    }

    pub fn len(&self) -> usize {
        self.sorted_values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> f64 {
        self.sorted_values[0]
    }

    pub fn max(&self) -> f64 {
        self.sorted_values[self.len() - 1]
    }

    /// Cumulative probability at `x`: 0 below the minimum, 1 at or above the
    /// maximum, linear between adjacent order statistics.
    pub fn evaluate(&self, x: f64) -> f64 {
        let v = &self.sorted_values;
        let n = v.len();
        if x >= v[n - 1] {
            return 1.0;
        }
        if x < v[0] {
            return 0.0;
        }
        // last index with v[i] <= x; i < n - 1 because x < max
        let i = v.partition_point(|&s| s <= x) - 1;
        let frac = (x - v[i]) / (v[i + 1] - v[i]);
        (i as f64 + frac) / (n - 1) as f64
    }

    /// Type-7 quantile: with `h = (n - 1) p`, interpolate between order
    /// statistics `floor(h)` and `floor(h) + 1`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain(format!("probability {p} outside [0, 1]")));
        }
        let v = &self.sorted_values;
        let h = (v.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        if lo + 1 >= v.len() {
            return Ok(v[v.len() - 1]);
        }
        Ok(v[lo] + (h - lo as f64) * (v[lo + 1] - v[lo]))
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5).expect("0.5 is a valid probability")
    }

    pub fn mean(&self) -> f64 {
        self.sorted_values.iter().sum::<f64>() / self.len() as f64
    }

    /// Vertices `(value, cumulative probability)` of the CDF polyline.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let n = self.len();
        if n == 1 {
            return vec![(self.min(), 0.0), (self.min(), 1.0)];
        }
        self.sorted_values
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as f64 / (n - 1) as f64))
            .collect()
    }
}

pub fn build_ecdf(sample: &OverrunSample) -> Result<Ecdf> {
    Ecdf::new(sample.values())
}

/// Sample median, the type-7 quantile at one half.
pub fn median(sample: &OverrunSample) -> Result<f64> {
    Ok(build_ecdf(sample)?.median())
}
