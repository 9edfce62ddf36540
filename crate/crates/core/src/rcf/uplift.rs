use serde::{Deserialize, Serialize};

use super::class::ReferenceClass;
use crate::dataset::Metric;
use crate::error::{domain, Result};

/// Uplift needed so that a budget is met with probability `certainty`: the
/// class's overrun quantile at that level.
pub fn uplift_at(class: &ReferenceClass, certainty: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&certainty) {
        return Err(domain(format!("certainty {certainty} outside [0, 1]")));
    }
    class.ecdf.quantile(certainty)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpliftRow {
    pub acceptable_chance: f64,
    pub certainty: f64,
    pub uplift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpliftTable {
    pub metric: Metric,
    pub class_name: String,
    pub n: usize,
    pub rows: Vec<UpliftRow>,
}

/// Certainty levels 5%, 10%, ..., 95%.
pub fn default_certainty_grid() -> Vec<f64> {
    (1..=19).map(|k| k as f64 / 20.0).collect()
}

pub fn build_uplift_table(class: &ReferenceClass, levels: &[f64]) -> Result<UpliftTable> {
    let rows = levels
        .iter()
        .map(|&certainty| {
            Ok(UpliftRow {
                acceptable_chance: 1.0 - certainty,
                certainty,
                uplift: uplift_at(class, certainty)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(UpliftTable {
        metric: class.metric,
        class_name: class.name.clone(),
        n: class.n,
        rows,
    })
}
