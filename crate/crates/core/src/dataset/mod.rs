//! Project records, the loader, and class filters that turn records into
//! overrun samples.

mod class;
mod load;
mod record;

pub use class::{filter_class, ClassFilter, ClassSelection, OverrunSample};
pub use load::{
    load_dataset, write_csv, write_json, DatasetMeta, Diagnostic, Format, LoadedDataset, Severity,
    CSV_COLUMNS,
};
pub use record::{resolve_actuals, Metric, ProjectRecord, Sector, PROXY_MIN_PCT_COMPLETE};

use crate::error::{domain, Result};

/// Overrun of an outcome against its baseline estimate: `actual / estimated - 1`.
///
/// Used for both cost and schedule (durations in months).
pub fn overrun(estimated: f64, actual: f64) -> Result<f64> {
    if !(estimated.is_finite() && estimated > 0.0) {
        return Err(domain(format!("estimate must be > 0, got {estimated}")));
    }
    if !(actual.is_finite() && actual > 0.0) {
        return Err(domain(format!("actual must be > 0, got {actual}")));
    }
    Ok(actual / estimated - 1.0)
}
