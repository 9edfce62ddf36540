//! Reference class forecasting for project cost and schedule risk.
//!
//! The crate is organised bottom-up:
//!
//! * [`dataset`] loads completed-project records, applies the proxy-actuals
//!   rule and turns records into labelled overrun samples.
//! * [`stats`] is a small self-contained kernel: empirical CDFs with type-7
//!   quantiles, the Mann-Whitney rank-sum test, Pearson correlation, OLS and
//!   Huber IRLS regression with a seeded bootstrap.
//! * [`rcf`] builds reference classes from samples and derives uplift tables,
//!   uplifted budgets, contingency adequacy and delay-cost figures.
//! * [`fixture`] generates the bundled synthetic dataset.
//!
//! Overruns are always dimensionless fractions: `0.67` means the actual
//! outcome was 67% above the estimate.

pub mod dataset;
pub mod error;
pub mod fixture;
pub mod rcf;
pub mod stats;

pub use dataset::{
    filter_class, load_dataset, overrun, resolve_actuals, ClassFilter, ClassSelection, DatasetMeta,
    Diagnostic, Format, LoadedDataset, Metric, OverrunSample, ProjectRecord, Sector,
};
pub use error::{Error, Result};
pub use rcf::{
    build_reference_class, build_uplift_table, certainty_of_contingency, decide_pooling,
    default_certainty_grid, delay_cost, forecast, summarize_class, uplift_at, AdequacyResult,
    ClassSummary, DelayCostModel, ForecastResult, PairwiseTest, PoolingDecision, ReferenceClass,
    UpliftRow, UpliftTable, DAYS_PER_MONTH,
};
pub use stats::{
    build_ecdf, irls_fit, irls_fit_with, median, ols_fit, pearson_correlation, permutation_oracle,
    rank_sum_test, trend_fit, CorrelationResult, Ecdf, FitMethod, IrlsOptions, RankMethod,
    RankTestResult, RegressionFit,
};
