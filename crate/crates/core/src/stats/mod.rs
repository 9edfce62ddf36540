//! Statistical kernel. All randomised procedures take an explicit seed.

mod correlation;
mod ecdf;
mod rank;
mod regression;
pub mod special;

pub use correlation::{pearson_correlation, CorrelationResult};
pub use ecdf::{build_ecdf, median, Ecdf};
pub use rank::{
    permutation_oracle, rank_sum_test, RankMethod, RankTestResult, EXACT_MAX_TOTAL,
    ORACLE_MAX_TOTAL,
};
pub use regression::{
    irls_fit, irls_fit_with, ols_fit, trend_fit, FitMethod, IrlsOptions, RegressionFit, HUBER_K,
    MAD_SCALE,
};
