//! Reference class forecasting: pooling, uplifts, budgets, contingency
//! adequacy and delay cost.

mod budget;
mod class;
mod pooling;
mod summary;
mod uplift;

pub use budget::{
    certainty_of_contingency, delay_cost, forecast, AdequacyResult, DelayCostModel, ForecastResult,
    DAYS_PER_MONTH,
};
pub use class::{build_reference_class, ReferenceClass};
pub use pooling::{decide_pooling, PairwiseTest, PoolingDecision};
pub use summary::{summarize_class, ClassSummary};
pub use uplift::{build_uplift_table, default_certainty_grid, uplift_at, UpliftRow, UpliftTable};
