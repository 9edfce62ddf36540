use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::record::{Metric, ProjectRecord, Sector};
use crate::error::{domain, Error, Result};

/// A labelled vector of overrun fractions for one candidate group.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverrunSample {
    label: String,
    metric: Metric,
    values: Vec<f64>,
    proxies: usize,
}

impl OverrunSample {
    /// Every value must be finite and above -1 (an actual of zero or less is
    /// not a project outcome).
    pub fn new(label: impl Into<String>, metric: Metric, values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > -1.0)) {
            return Err(domain(format!(
                "overrun {bad} is not a finite value above -1"
            )));
        }
        Ok(Self {
            label: label.into(),
            metric,
            values,
            proxies: 0,
        })
    }

    /// Records how many of the values came from proxy actuals.
    pub fn with_proxies(mut self, proxies: usize) -> Self {
        self.proxies = proxies;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn proxies(&self) -> usize {
        self.proxies
    }
}

/// Which records belong to a candidate reference class.
#[derive(Clone, Debug, PartialEq)]
pub enum ClassFilter {
    Sector(Sector),
    /// Mining projects strictly deeper than the given depth in meters.
    MiningDeeperThan(f64),
    /// Records matching any member filter.
    Union(Vec<ClassFilter>),
}

impl ClassFilter {
    /// New builds plus both storage classes.
    pub fn nuclear() -> Self {
        ClassFilter::Union(vec![
            ClassFilter::Sector(Sector::NuclearStorageHlw),
            ClassFilter::Sector(Sector::NuclearStorageLilw),
            ClassFilter::Sector(Sector::NuclearPower),
        ])
    }

    pub fn matches(&self, record: &ProjectRecord) -> bool {
        match self {
            ClassFilter::Sector(s) => record.sector == *s,
            ClassFilter::MiningDeeperThan(depth) => {
                record.sector == Sector::Mining && record.depth_m.is_some_and(|d| d > *depth)
            }
            ClassFilter::Union(members) => members.iter().any(|m| m.matches(record)),
        }
    }

    /// Short label used for group names in reports.
    pub fn label(&self) -> String {
        match self {
            ClassFilter::Sector(Sector::NuclearPower) => "nuclear_power".into(),
            ClassFilter::Sector(Sector::NuclearStorageHlw) => "hlw".into(),
            ClassFilter::Sector(Sector::NuclearStorageLilw) => "lilw".into(),
            ClassFilter::Sector(Sector::NuclearResearch) => "research".into(),
            ClassFilter::Sector(Sector::Mining) => "mining".into(),
            ClassFilter::MiningDeeperThan(d) => format!("mining-{d}m"),
            u @ ClassFilter::Union(members) => {
                if *u == ClassFilter::nuclear() {
                    "nuclear".into()
                } else {
                    members
                        .iter()
                        .map(ClassFilter::label)
                        .collect::<Vec<_>>()
                        .join("+")
                }
            }
        }
    }

    fn parse_token(token: &str) -> Result<ClassFilter> {
        let filter = match token {
            "nuclear" => ClassFilter::nuclear(),
            "nuclear_power" | "power" | "new_build" => ClassFilter::Sector(Sector::NuclearPower),
            "nuclear_storage_hlw" | "hlw" => ClassFilter::Sector(Sector::NuclearStorageHlw),
            "nuclear_storage_lilw" | "lilw" => ClassFilter::Sector(Sector::NuclearStorageLilw),
            "nuclear_research" | "research" => ClassFilter::Sector(Sector::NuclearResearch),
            "mining" => ClassFilter::Sector(Sector::Mining),
            other => {
                let depth = other
                    .strip_prefix("mining-")
                    .and_then(|d| d.strip_suffix('m'))
                    .and_then(|d| d.parse::<f64>().ok())
                    .filter(|d| d.is_finite() && *d >= 0.0);
                match depth {
                    Some(d) => ClassFilter::MiningDeeperThan(d),
                    None => return Err(Error::Domain(format!("unknown class '{other}'"))),
                }
            }
        };
        Ok(filter)
    }
}

impl fmt::Display for ClassFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for ClassFilter {
    type Err = Error;

    /// Accepts a comma-separated union of `nuclear`, `nuclear_power`, `hlw`,
    /// `lilw`, `research`, `mining` and `mining-<depth>m` (strictly deeper).
    fn from_str(s: &str) -> Result<Self> {
        let mut members = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(ClassFilter::parse_token)
            .collect::<Result<Vec<_>>>()?;
        match members.len() {
            0 => Err(Error::Domain("empty class specification".into())),
            1 => Ok(members.pop().expect("one member")),
            _ => Ok(ClassFilter::Union(members)),
        }
    }
}

/// Result of applying a [`ClassFilter`] for one metric.
#[derive(Clone, Debug)]
pub struct ClassSelection {
    pub sample: OverrunSample,
    /// Records that matched the filter but lack the metric's estimate/actual pair.
    pub excluded: usize,
    pub warnings: Vec<String>,
}

/// Collects the overruns of every usable record matching `filter`.
pub fn filter_class(
    records: &[ProjectRecord],
    filter: &ClassFilter,
    metric: Metric,
) -> ClassSelection {
    let mut values = Vec::new();
    let mut excluded = 0;
    let mut proxies = 0;
    for record in records.iter().filter(|r| filter.matches(r)) {
        match record.overrun(metric) {
            Some(o) => {
                values.push(o);
                if metric == Metric::Cost && record.cost_is_proxy {
                    proxies += 1;
                }
            }
            None => excluded += 1,
        }
    }
    let label = filter.label();
    let mut warnings = Vec::new();
    if values.is_empty() {
        warnings.push(format!("class '{label}' has no usable {metric} records"));
    }
    let sample = OverrunSample::new(label, metric, values)
        .expect("validated records always yield overruns above -1")
        .with_proxies(proxies);
    ClassSelection {
        sample,
        excluded,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, sector: Sector, depth: Option<f64>, act: Option<f64>) -> ProjectRecord {
        ProjectRecord {
            id: id.into(),
            name: id.into(),
            sector,
            depth_m: depth,
            est_cost: 100.0,
            act_cost: act,
            forecast_at_completion: None,
            est_duration_months: Some(10.0),
            act_duration_months: Some(12.0),
            pct_complete: 100.0,
            decision_year: None,
            cost_is_proxy: false,
        }
    }

    #[test]
    fn depth_thresholds() {
        let records = vec![
            rec("a", Sector::Mining, Some(50.0), Some(110.0)),
            rec("b", Sector::Mining, Some(150.0), Some(120.0)),
            rec("c", Sector::Mining, Some(350.0), Some(130.0)),
        ];
        let over100 = filter_class(&records, &"mining-100m".parse().unwrap(), Metric::Cost);
        assert_eq!(over100.sample.n(), 2);
        let over300 = filter_class(&records, &"mining-300m".parse().unwrap(), Metric::Cost);
        assert_eq!(over300.sample.n(), 1);
        assert!((over300.sample.values()[0] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn missing_pairs_are_counted() {
        let records = vec![
            rec("a", Sector::NuclearPower, None, Some(110.0)),
            rec("b", Sector::NuclearPower, None, None),
        ];
        let sel = filter_class(
            &records,
            &ClassFilter::Sector(Sector::NuclearPower),
            Metric::Cost,
        );
        assert_eq!(sel.sample.n(), 1);
        assert_eq!(sel.excluded, 1);
    }

    #[test]
    fn empty_selection_warns() {
        let sel = filter_class(&[], &ClassFilter::nuclear(), Metric::Cost);
        assert!(sel.sample.is_empty());
        assert_eq!(sel.warnings.len(), 1);
    }

    #[test]
    fn parse_and_label() {
        let f: ClassFilter = "hlw,lilw,nuclear_power".parse().unwrap();
        assert_eq!(f, ClassFilter::nuclear());
        assert_eq!(f.label(), "nuclear");
        assert_eq!(
            "mining-300m".parse::<ClassFilter>().unwrap().label(),
            "mining-300m"
        );
        assert_eq!(
            "hlw,mining".parse::<ClassFilter>().unwrap().label(),
            "hlw+mining"
        );
        assert!("fusion".parse::<ClassFilter>().is_err());
        assert!("mining-deep".parse::<ClassFilter>().is_err());
        assert!("".parse::<ClassFilter>().is_err());
    }

    #[test]
    fn sample_rejects_impossible_overruns() {
        assert!(OverrunSample::new("x", Metric::Cost, vec![0.1, -1.0]).is_err());
        assert!(OverrunSample::new("x", Metric::Cost, vec![f64::NAN]).is_err());
    }
}
