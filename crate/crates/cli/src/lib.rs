//! Command-line front end for reference class forecasting.

pub mod args;
pub mod commands;
pub mod data;
pub mod format;
pub mod report;
pub mod svg;

use std::ffi::OsString;

use anyhow::{ensure, Result};
use clap::Parser;

use crate::args::{Cli, Command, OutputFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FATAL: i32 = 1;
pub const EXIT_DROPPED_ROWS: i32 = 2;

/// Parses arguments, runs one command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_FATAL } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok((stdout, dropped)) => {
            print!("{stdout}");
            if dropped > 0 {
                eprintln!("warning: {dropped} row(s) dropped from the dataset");
                EXIT_DROPPED_ROWS
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_FATAL
        }
    }
}

fn execute(cli: &Cli) -> Result<(String, usize)> {
    let g = &cli.global;
    ensure!(
        g.alpha > 0.0 && g.alpha < 1.0,
        "--alpha must lie strictly between 0 and 1"
    );
    let data = data::load(g.data.as_deref(), g.exclude_proxies)?;
    let svg_dir = g.svg_dir.as_deref();
    let out = match &cli.command {
        Command::Validate => commands::validate(&data, g.format)?,
        Command::Table {
            metric,
            class,
            levels,
        } => commands::table(&data, g.format, svg_dir, *metric, class, levels.as_deref())?,
        Command::Pool { metric, groups } => {
            commands::pool(&data, g.format, g.alpha, *metric, groups)?
        }
        Command::Forecast {
            base,
            certainty,
            metric,
            class,
        } => commands::forecast_cmd(&data, g.format, *base, *certainty, *metric, class)?,
        Command::Adequacy {
            contingency,
            embedded,
            metric,
            class,
        } => commands::adequacy(&data, g.format, *contingency, *embedded, *metric, class)?,
        Command::Regress { class } => commands::regress(&data, g.format, g.seed, class)?,
        Command::DelayCost {
            base,
            duration_months,
            slope,
            class,
        } => commands::delay_cost_cmd(
            &data,
            g.format,
            g.seed,
            *base,
            *duration_months,
            *slope,
            class,
        )?,
        Command::Report(args) => {
            let (report, charts) = report::build_report(&data, g, args)?;
            report::write_report(&report, &charts, &args.out, svg_dir)?;
            match g.format {
                OutputFormat::Json => report::to_json(&report)?,
                OutputFormat::Markdown => report::render_markdown(&report),
                OutputFormat::Text => format!(
                    "wrote {} and {}\n",
                    args.out.join("report.md").display(),
                    args.out.join("report.json").display()
                ),
            }
        }
    };
    Ok((out, data.dropped_rows()))
}
