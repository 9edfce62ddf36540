use serde::{Deserialize, Serialize};

use super::special::student_t_two_sided;
use crate::error::{domain, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    /// Two-sided, from the t statistic with `n - 2` degrees of freedom.
    pub p_value: f64,
    pub n: usize,
}

/// Pearson product-moment correlation with its two-sided p-value.
pub fn pearson_correlation(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    if x.len() != y.len() {
        return Err(domain(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(domain(format!(
            "correlation needs at least 3 pairs, got {n}"
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(domain("correlation input contains non-finite values"));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        let (dx, dy) = (xi - mx, yi - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(domain("correlation undefined for a constant series"));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let df = nf - 2.0;
    let p_value = if r.abs() >= 1.0 {
        0.0
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        student_t_two_sided(t, df)
    };
    Ok(CorrelationResult {
        r,
        p_value: p_value.clamp(f64::MIN_POSITIVE, 1.0),
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_line() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let c = pearson_correlation(&x, &y).unwrap();
        assert!((c.r - 1.0).abs() < 1e-15);
        assert!(c.p_value > 0.0 && c.p_value < 1e-10);
        let y: Vec<f64> = x.iter().map(|v| -0.5 * v).collect();
        assert!((pearson_correlation(&x, &y).unwrap().r + 1.0).abs() < 1e-15);
    }

    #[test]
    fn hand_computed_case() {
        let c = pearson_correlation(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((c.r - 0.8).abs() < 1e-15);
        // df = 2: p = 1 - t / sqrt(2 + t^2) with t^2 = 0.64 * 2 / 0.36, which is exactly 0.2
        assert!((c.p_value - 0.2).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(pearson_correlation(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(pearson_correlation(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(pearson_correlation(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }
}
