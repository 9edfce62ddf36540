use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::overrun;
use crate::error::Error;

/// Minimum completion percentage at which a forecast-at-completion may stand
/// in for a missing actual cost.
pub const PROXY_MIN_PCT_COMPLETE: f64 = 75.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    NuclearPower,
    NuclearStorageHlw,
    NuclearStorageLilw,
    NuclearResearch,
    Mining,
}

impl Sector {
    pub const ALL: [Sector; 5] = [
        Sector::NuclearPower,
        Sector::NuclearStorageHlw,
        Sector::NuclearStorageLilw,
        Sector::NuclearResearch,
        Sector::Mining,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Sector::NuclearPower => "nuclear_power",
            Sector::NuclearStorageHlw => "nuclear_storage_hlw",
            Sector::NuclearStorageLilw => "nuclear_storage_lilw",
            Sector::NuclearResearch => "nuclear_research",
            Sector::Mining => "mining",
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Sector::ALL
            .into_iter()
            .find(|sector| sector.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown sector '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Cost,
    Schedule,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Cost => "cost",
            Metric::Schedule => "schedule",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cost" => Ok(Metric::Cost),
            "schedule" => Ok(Metric::Schedule),
            other => Err(Error::Domain(format!("unknown metric '{other}'"))),
        }
    }
}

/// One completed (or nearly completed) project.
///
/// Costs are in the file's declared currency and price basis; durations are
/// in months, baselined at the decision to build.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectRecord {
    pub id: String,
    pub name: String,
    pub sector: Sector,
    pub depth_m: Option<f64>,
    pub est_cost: f64,
    pub act_cost: Option<f64>,
    /// Forecast at completion as read from the input, kept so the record can
    /// be written back unchanged.
    pub forecast_at_completion: Option<f64>,
    pub est_duration_months: Option<f64>,
    pub act_duration_months: Option<f64>,
    pub pct_complete: f64,
    pub decision_year: Option<i32>,
    /// Set by [`resolve_actuals`]; never read from input.
    pub cost_is_proxy: bool,
}

impl ProjectRecord {
    pub fn is_usable(&self, metric: Metric) -> bool {
        self.estimate_and_actual(metric).is_some()
    }

    pub fn estimate_and_actual(&self, metric: Metric) -> Option<(f64, f64)> {
        match metric {
            Metric::Cost => self.act_cost.map(|a| (self.est_cost, a)),
            Metric::Schedule => self.est_duration_months.zip(self.act_duration_months),
        }
    }

    /// Overrun for `metric`, or `None` when the record lacks the
    /// estimate/actual pair.
    pub fn overrun(&self, metric: Metric) -> Option<f64> {
        let (est, act) = self.estimate_and_actual(metric)?;
        overrun(est, act).ok()
    }
}

/// Applies the proxy-actuals rule.
///
/// A record with a known actual cost is returned unchanged. Otherwise, if the
/// project is at least 75% complete and a forecast at completion is
/// available, that forecast becomes the actual cost and the record is flagged
/// as a proxy. Anything else leaves `act_cost` empty, which makes the record
/// unusable for cost analysis.
pub fn resolve_actuals(
    record: ProjectRecord,
    forecast_at_completion: Option<f64>,
) -> ProjectRecord {
    if record.act_cost.is_some() {
        return record;
    }
    match forecast_at_completion {
        Some(fac) if record.pct_complete >= PROXY_MIN_PCT_COMPLETE && fac > 0.0 => ProjectRecord {
            act_cost: Some(fac),
            cost_is_proxy: true,
            ..record
        },
        _ => record,
    }
}
