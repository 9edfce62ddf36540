use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rcf_core::Metric;

#[derive(Debug, Parser)]
#[command(
    name = "rcf",
    version,
    about = "Reference class forecasts of cost and schedule risk"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Project dataset (.csv or .json). Defaults to the bundled synthetic fixture.
    #[arg(long, global = true, value_name = "PATH")]
    pub data: Option<PathBuf>,

    /// Seed for every randomised step (bootstrap intervals).
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Significance level for pooling decisions.
    #[arg(long, global = true, default_value_t = 0.05)]
    pub alpha: f64,

    /// Drop records whose actual cost is a forecast-at-completion proxy.
    #[arg(long, global = true)]
    pub exclude_proxies: bool,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,

    /// Also write SVG charts into this directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub svg_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Markdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Cost,
    Schedule,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Cost => Metric::Cost,
            MetricArg::Schedule => Metric::Schedule,
        }
    }
}

pub const DEFAULT_GROUPS: &str = "hlw,lilw,nuclear_power,mining-100m";

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the dataset and count usable records per class.
    Validate,

    /// Uplift table: required uplift per level of certainty.
    Table {
        #[arg(long, value_enum, default_value_t = MetricArg::Cost)]
        metric: MetricArg,
        /// Class specification, e.g. `nuclear`, `hlw,lilw`, `mining-300m`.
        #[arg(long, default_value = "nuclear")]
        class: String,
        /// Certainty levels in percent, comma separated (default 5,10,...,95).
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<String>>,
    },

    /// Pairwise rank-sum tests and the resulting pooling of groups.
    Pool {
        #[arg(long, value_enum, default_value_t = MetricArg::Cost)]
        metric: MetricArg,
        #[arg(long, default_value = DEFAULT_GROUPS)]
        groups: String,
    },

    /// Uplift a base estimate to a level of certainty.
    Forecast {
        /// Base estimate, in the dataset's currency unit of choice.
        #[arg(long)]
        base: f64,
        /// Certainty as a fraction, e.g. 0.8 for P80.
        #[arg(long)]
        certainty: f64,
        #[arg(long, value_enum, default_value_t = MetricArg::Cost)]
        metric: MetricArg,
        #[arg(long, default_value = "nuclear")]
        class: String,
    },

    /// Certainty that a contingency would have covered past overruns.
    Adequacy {
        /// Contingency as a fraction of the base estimate.
        #[arg(long, allow_hyphen_values = true)]
        contingency: f64,
        /// Contingency assumed to be already embedded in historic estimates.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        embedded: f64,
        #[arg(long, value_enum, default_value_t = MetricArg::Cost)]
        metric: MetricArg,
        #[arg(long, default_value = "nuclear")]
        class: String,
    },

    /// Correlation and robust regression of cost overrun on schedule overrun.
    Regress {
        #[arg(long, default_value = "nuclear")]
        class: String,
    },

    /// Cost of delay per month and per day.
    DelayCost {
        #[arg(long)]
        base: f64,
        /// Time from decision to build to readiness for operations.
        #[arg(long)]
        duration_months: f64,
        /// Cost overrun per unit schedule overrun; fitted from the dataset if omitted.
        #[arg(long, allow_hyphen_values = true)]
        slope: Option<f64>,
        #[arg(long, default_value = "nuclear")]
        class: String,
    },

    /// Full report: report.md, report.json and optional charts.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Output directory for report.md and report.json.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Candidate groups for pooling.
    #[arg(long, default_value = DEFAULT_GROUPS)]
    pub groups: String,
    /// Group whose pooled class is used for forecasts and adequacy.
    #[arg(long, default_value = "hlw")]
    pub target: String,
    /// Base estimates to forecast at P50 and P80 (repeatable).
    #[arg(long = "base")]
    pub bases: Vec<f64>,
    /// Contingencies to grade (repeatable).
    #[arg(long = "contingency")]
    pub contingencies: Vec<f64>,
    /// Embedded-contingency assumptions applied to each contingency.
    #[arg(long = "embedded", value_delimiter = ',', default_value = "0,0.1,0.2")]
    pub embedded: Vec<f64>,
    /// Base cost for the delay-cost model.
    #[arg(long)]
    pub delay_base: Option<f64>,
    #[arg(long)]
    pub duration_months: Option<f64>,
    /// Keep mining in the schedule class when pooling allows it.
    #[arg(long)]
    pub schedule_include_mining: bool,
    /// Timestamp to record in the metadata (defaults to SOURCE_DATE_EPOCH, else none).
    #[arg(long)]
    pub timestamp: Option<String>,
}
