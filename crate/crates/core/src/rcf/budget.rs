use serde::{Deserialize, Serialize};

use super::class::ReferenceClass;
use super::uplift::uplift_at;
use crate::error::{domain, Error, Result};
use crate::stats::RegressionFit;

/// Average Gregorian month length in days.
pub const DAYS_PER_MONTH: f64 = 30.4375;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    pub base_estimate: f64,
    pub certainty: f64,
    pub uplift: f64,
    pub uplifted_estimate: f64,
}

/// Uplifts `base_estimate` to the requested certainty level.
pub fn forecast(
    base_estimate: f64,
    class: &ReferenceClass,
    certainty: f64,
) -> Result<ForecastResult> {
    if !(base_estimate.is_finite() && base_estimate > 0.0) {
        return Err(domain(format!(
            "base estimate must be > 0, got {base_estimate}"
        )));
    }
    let uplift = uplift_at(class, certainty)?;
    Ok(ForecastResult {
        base_estimate,
        certainty,
        uplift,
        uplifted_estimate: base_estimate * (1.0 + uplift),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdequacyResult {
    pub contingency: f64,
    pub embedded_contingency_assumption: f64,
    /// Overrun against the historic baselines that the contingency covers.
    pub effective_threshold: f64,
    pub certainty: f64,
}

/// Share of past projects whose overrun a contingency would have covered.
///
/// Historic estimates are assumed to already contain `embedded` contingency,
/// so a budget of `base * (1 + contingency)` corresponds to a historic
/// overrun of `(1 + contingency) / (1 + embedded) - 1`.
pub fn certainty_of_contingency(
    class: &ReferenceClass,
    contingency: f64,
    embedded: f64,
) -> Result<AdequacyResult> {
    if !(contingency.is_finite() && contingency > -1.0) {
        return Err(domain(format!(
            "contingency must be > -1, got {contingency}"
        )));
    }
    if !(embedded.is_finite() && embedded > -1.0) {
        return Err(domain(format!(
            "embedded contingency must be > -1, got {embedded}"
        )));
    }
    let effective_threshold = if embedded == 0.0 {
        contingency
    } else {
        (1.0 + contingency) / (1.0 + embedded) - 1.0
    };
    Ok(AdequacyResult {
        contingency,
        embedded_contingency_assumption: embedded,
        effective_threshold,
        certainty: class.ecdf.evaluate(effective_threshold),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelayCostModel {
    pub base_cost: f64,
    pub total_duration_months: f64,
    /// Cost overrun per unit schedule overrun (regression slope).
    pub cost_per_schedule_overrun: f64,
    pub cost_per_month: f64,
    pub cost_per_day: f64,
}

/// Expected extra cost per month and per day of delay.
///
/// One month of delay is a schedule overrun of `1 / total_duration_months`,
/// which the slope maps to a cost overrun fraction of `base_cost`.
pub fn delay_cost(
    base_cost: f64,
    total_duration_months: f64,
    fit: &RegressionFit,
) -> Result<DelayCostModel> {
    if !fit.converged {
        return Err(Error::Refused("regression did not converge".into()));
    }
    if !(base_cost.is_finite() && base_cost > 0.0) {
        return Err(domain(format!("base cost must be > 0, got {base_cost}")));
    }
    if !(total_duration_months.is_finite() && total_duration_months > 0.0) {
        return Err(domain(format!(
            "duration must be > 0, got {total_duration_months}"
        )));
    }
    let slope = fit.slope;
    let cost_per_day = base_cost * slope / (total_duration_months * DAYS_PER_MONTH);
    Ok(DelayCostModel {
        base_cost,
        total_duration_months,
        cost_per_schedule_overrun: slope,
        cost_per_month: cost_per_day * DAYS_PER_MONTH,
        cost_per_day,
    })
}
