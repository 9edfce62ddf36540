//! The full report: JSON is the source of truth, markdown is rendered from it.

use std::path::Path;

use anyhow::{bail, Context, Result};
use rcf_core::{
    build_reference_class, build_uplift_table, certainty_of_contingency, decide_pooling,
    default_certainty_grid, delay_cost, filter_class, forecast, summarize_class, trend_fit,
    AdequacyResult, ClassFilter, ClassSummary, DelayCostModel, ForecastResult, Metric,
    OverrunSample, PoolingDecision, ProjectRecord, ReferenceClass, RegressionFit, Sector,
    UpliftTable,
};
use serde::{Deserialize, Serialize};

use crate::args::{GlobalArgs, ReportArgs};
use crate::commands::{
    fit_regression, group_samples, parse_filter, render_delay_cost, render_pooling,
    render_regression, uplift_chart, write_svg, RegressionOutput,
};
use crate::data::Dataset;
use crate::format::{markdown_table, money, p_level, pct0, pct1};
use crate::svg::{AxisFormat, Chart, Series};

pub const SCHEMA_VERSION: u32 = 1;
pub const CERTAINTIES: [f64; 2] = [0.5, 0.8];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub alpha: f64,
    pub dataset_source: String,
    pub dataset_digest: String,
    pub currency: Option<String>,
    pub basis_year: Option<i32>,
    pub timestamp: Option<String>,
    pub exclude_proxies: bool,
    pub proxy_count: usize,
    pub records: usize,
    pub dropped_rows: usize,
    pub target_group: String,
    pub schedule_include_mining: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupMedian {
    pub group: String,
    pub cost_n: usize,
    pub cost_median: Option<f64>,
    pub schedule_n: usize,
    pub schedule_median: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricPooling {
    pub metric: Metric,
    pub decision: PoolingDecision,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub member_groups: Vec<String>,
    pub member_sizes: Vec<usize>,
    pub summary: ClassSummary,
    pub uplift_table: UpliftTable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForecastEntry {
    pub class: String,
    #[serde(flatten)]
    pub result: ForecastResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdequacyEntry {
    pub class: String,
    #[serde(flatten)]
    pub result: AdequacyResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendSection {
    pub group: String,
    pub fit: RegressionFit,
    pub no_decrease: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub metadata: Metadata,
    pub group_medians: Vec<GroupMedian>,
    pub pooling: Vec<MetricPooling>,
    pub classes: Vec<ClassReport>,
    pub forecasts: Vec<ForecastEntry>,
    pub adequacy: Vec<AdequacyEntry>,
    pub regression: Option<RegressionOutput>,
    pub trend: Option<TrendSection>,
    pub delay_cost: Option<DelayCostModel>,
}

fn is_mining(filter: &ClassFilter) -> bool {
    match filter {
        ClassFilter::Sector(s) => *s == Sector::Mining,
        ClassFilter::MiningDeeperThan(_) => true,
        ClassFilter::Union(m) => m.iter().all(is_mining),
    }
}

fn timestamp(explicit: Option<&str>) -> Option<String> {
    explicit.map(str::to_string).or_else(|| {
        std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .filter(|s| !s.trim().is_empty())
    })
}

struct Built {
    class: ReferenceClass,
    report: ClassReport,
}

fn build_class(metric: Metric, set: &[String], samples: &[OverrunSample]) -> Result<Built> {
    let members: Vec<OverrunSample> = set
        .iter()
        .filter_map(|g| samples.iter().find(|s| s.label() == g))
        .cloned()
        .collect();
    let class = build_reference_class(class_name(set), metric, &members)?;
    let uplift_table = build_uplift_table(&class, &default_certainty_grid())?;
    let report = ClassReport {
        member_groups: class.member_groups.clone(),
        member_sizes: class.member_sizes.clone(),
        summary: summarize_class(&class),
        uplift_table,
    };
    Ok(Built { class, report })
}

fn class_name(set: &[String]) -> String {
    let mut sorted: Vec<&str> = set.iter().map(String::as_str).collect();
    sorted.sort_unstable();
    if sorted == ["hlw", "lilw", "nuclear_power"] {
        "nuclear".into()
    } else {
        set.join("+")
    }
}

/// Splits mining groups out of every mixed set.
fn separate_mining(partition: &[Vec<String>], mining: &[String]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for set in partition {
        let (m, rest): (Vec<String>, Vec<String>) =
            set.iter().cloned().partition(|g| mining.contains(g));
        out.extend([rest, m].into_iter().filter(|s| !s.is_empty()));
    }
    out
}

fn power_trend(records: &[ProjectRecord]) -> Option<(Vec<(f64, f64)>, RegressionFit)> {
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.sector == Sector::NuclearPower)
        .filter_map(|r| Some((f64::from(r.decision_year?), r.overrun(Metric::Cost)?)))
        .collect();
    let (x, y): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    trend_fit(&x, &y).ok().map(|fit| (points, fit))
}

pub fn build_report(
    data: &Dataset,
    global: &GlobalArgs,
    args: &ReportArgs,
) -> Result<(Report, Vec<(String, Chart)>)> {
    let records = &data.loaded.records;
    let filters: Vec<ClassFilter> = args
        .groups
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(parse_filter)
        .collect::<Result<_>>()?;
    let target = parse_filter(&args.target)?.label();
    let mining: Vec<String> = filters
        .iter()
        .filter(|f| is_mining(f))
        .map(ClassFilter::label)
        .collect();
    if !filters.iter().any(|f| f.label() == target) {
        bail!("target group '{target}' is not among --groups");
    }

    let group_medians = filters
        .iter()
        .map(|f| {
            let cost = filter_class(records, f, Metric::Cost).sample;
            let schedule = filter_class(records, f, Metric::Schedule).sample;
            let median = |s: &OverrunSample| rcf_core::median(s).ok();
            GroupMedian {
                group: f.label(),
                cost_n: cost.n(),
                cost_median: median(&cost),
                schedule_n: schedule.n(),
                schedule_median: median(&schedule),
            }
        })
        .collect();

    let mut pooling = Vec::new();
    let mut classes = Vec::new();
    let mut charts = Vec::new();
    let mut class_series = Vec::new();
    let mut target_cost_class: Option<ReferenceClass> = None;
    for metric in [Metric::Cost, Metric::Schedule] {
        let all = group_samples(records, &args.groups, metric)?;
        let samples: Vec<OverrunSample> = all.iter().filter(|s| !s.is_empty()).cloned().collect();
        let partition = if samples.len() >= 2 {
            let decision = decide_pooling(&samples, global.alpha)?;
            let partition = decision.partition.clone();
            pooling.push(MetricPooling { metric, decision });
            partition
        } else {
            samples
                .iter()
                .map(|s| vec![s.label().to_string()])
                .collect()
        };
        let partition = if metric == Metric::Schedule && !args.schedule_include_mining {
            separate_mining(&partition, &mining)
        } else {
            partition
        };
        let mut group_series: Vec<Series> = samples
            .iter()
            .filter_map(|s| {
                let ecdf = rcf_core::build_ecdf(s).ok()?;
                Some(Series::line(
                    format!("{} (n={})", s.label(), s.n()),
                    ecdf.points(),
                ))
            })
            .collect();
        let noun = if metric == Metric::Cost {
            "cost"
        } else {
            "schedule"
        };
        for set in &partition {
            let built = build_class(metric, set, &samples)?;
            class_series.push(Series::line(
                format!("{} {noun} (n={})", built.class.name, built.class.n),
                built.class.ecdf.points(),
            ));
            if metric == Metric::Cost && set.contains(&target) {
                target_cost_class = Some(built.class.clone());
            }
            classes.push(built.report);
        }
        group_series.sort_by(|a, b| a.name.cmp(&b.name));
        let chart = |title: String, window: Option<(f64, f64)>| Chart {
            title,
            x_label: format!("{noun} overrun"),
            y_label: "Cumulative frequency".into(),
            x_format: AxisFormat::Percent,
            y_format: AxisFormat::Percent,
            x_window: window,
            series: group_series.clone(),
        };
        charts.push((
            format!("ecdf_{noun}.svg"),
            chart(format!("Cumulative distribution of {noun} overrun"), None),
        ));
        if metric == Metric::Cost {
            charts.push((
                "ecdf_cost_detail.svg".into(),
                chart(
                    "Cumulative distribution of cost overrun, detail".into(),
                    Some((-0.5, 3.0)),
                ),
            ));
        }
    }

    let target_class = target_cost_class
        .with_context(|| format!("target group '{target}' has no usable cost records"))?;
    let mut forecasts = Vec::new();
    for certainty in CERTAINTIES {
        for &base in &args.bases {
            forecasts.push(ForecastEntry {
                class: target_class.name.clone(),
                result: forecast(base, &target_class, certainty)?,
            });
        }
    }
    let mut adequacy = Vec::new();
    for &contingency in &args.contingencies {
        for &embedded in &args.embedded {
            adequacy.push(AdequacyEntry {
                class: target_class.name.clone(),
                result: certainty_of_contingency(&target_class, contingency, embedded)?,
            });
        }
    }

    let class_spec = target_class.member_groups.join(",");
    let regression = fit_regression(records, &class_spec, global.seed).ok();
    let delay = match (args.delay_base, args.duration_months) {
        (Some(base), Some(months)) => {
            let Some(reg) = &regression else {
                bail!(
                    "delay cost needs a schedule/cost regression, class '{}' has too few pairs",
                    target_class.name
                );
            };
            Some(delay_cost(base, months, &reg.irls)?)
        }
        (None, None) => None,
        _ => bail!("--delay-base and --duration-months must be given together"),
    };

    let trend = power_trend(records).map(|(points, fit)| {
        let (lo, hi) = points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.0), hi.max(p.0))
            });
        let line = vec![
            (lo, fit.intercept + fit.slope * lo),
            (hi, fit.intercept + fit.slope * hi),
        ];
        charts.push((
            "trend.svg".into(),
            Chart {
                title: "Nuclear power cost overrun by decision year".into(),
                x_label: "Year of decision to build".into(),
                y_label: "Cost overrun".into(),
                x_format: AxisFormat::Number,
                y_format: AxisFormat::Percent,
                x_window: None,
                series: vec![
                    Series::scatter("projects", points),
                    Series::line("OLS trend", line),
                ],
            },
        ));
        TrendSection {
            group: "nuclear_power".into(),
            no_decrease: fit.no_decrease(),
            fit,
        }
    });

    charts.push((
        "reference_classes.svg".into(),
        Chart {
            title: "Reference classes".into(),
            x_label: "Overrun".into(),
            y_label: "Cumulative frequency".into(),
            x_format: AxisFormat::Percent,
            y_format: AxisFormat::Percent,
            x_window: None,
            series: class_series,
        },
    ));
    let tables: Vec<&UpliftTable> = classes.iter().map(|c| &c.uplift_table).collect();
    charts.push(("uplift.svg".into(), uplift_chart(&tables)));

    let metadata = Metadata {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: global.seed,
        alpha: global.alpha,
        dataset_source: data.source.clone(),
        dataset_digest: data.digest.clone(),
        currency: data.loaded.meta.currency.clone(),
        basis_year: data.loaded.meta.basis_year,
        timestamp: timestamp(args.timestamp.as_deref()),
        exclude_proxies: global.exclude_proxies,
        proxy_count: data.proxy_count(),
        records: records.len(),
        dropped_rows: data.dropped_rows(),
        target_group: target,
        schedule_include_mining: args.schedule_include_mining,
    };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        metadata,
        group_medians,
        pooling,
        classes,
        forecasts,
        adequacy,
        regression,
        trend,
        delay_cost: delay,
    };
    Ok((report, charts))
}

pub fn to_json(report: &Report) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

fn opt_pct(v: Option<f64>) -> String {
    v.map(pct0).unwrap_or_else(|| "n/a".into())
}

fn metric_noun(metric: Metric) -> &'static str {
    match metric {
        Metric::Cost => "cost",
        Metric::Schedule => "schedule",
    }
}

pub fn render_markdown(report: &Report) -> String {
    let m = &report.metadata;
    let mut s = String::from("# Reference class forecast\n\n");
    let meta_rows = vec![
        vec!["tool".into(), format!("{} {}", m.tool, m.version)],
        vec!["dataset".into(), m.dataset_source.clone()],
        vec!["sha256".into(), m.dataset_digest.clone()],
        vec![
            "currency".into(),
            m.currency.clone().unwrap_or_else(|| "n/a".into()),
        ],
        vec![
            "price basis".into(),
            m.basis_year.map_or_else(|| "n/a".into(), |y| y.to_string()),
        ],
        vec!["records".into(), m.records.to_string()],
        vec!["dropped rows".into(), m.dropped_rows.to_string()],
        vec!["proxy actual costs".into(), m.proxy_count.to_string()],
        vec!["proxies excluded".into(), m.exclude_proxies.to_string()],
        vec!["seed".into(), m.seed.to_string()],
        vec!["alpha".into(), m.alpha.to_string()],
        vec![
            "timestamp".into(),
            m.timestamp.clone().unwrap_or_else(|| "n/a".into()),
        ],
    ];
    s.push_str(&markdown_table(&["", ""], &meta_rows));

    s.push_str("\n## Median overrun by group\n\n");
    let rows: Vec<Vec<String>> = report
        .group_medians
        .iter()
        .map(|g| {
            vec![
                g.group.clone(),
                g.cost_n.to_string(),
                opt_pct(g.cost_median),
                g.schedule_n.to_string(),
                opt_pct(g.schedule_median),
            ]
        })
        .collect();
    s.push_str(&markdown_table(
        &[
            "Group",
            "n cost",
            "Median cost overrun",
            "n schedule",
            "Median schedule overrun",
        ],
        &rows,
    ));

    for p in &report.pooling {
        s.push_str(&format!(
            "\n## Pooling tests, {} overrun\n\n",
            metric_noun(p.metric)
        ));
        s.push_str(&render_pooling(&p.decision, true));
    }

    s.push_str("\n## Reference classes\n\n");
    let rows: Vec<Vec<String>> = report
        .classes
        .iter()
        .map(|c| {
            let x = &c.summary;
            vec![
                x.name.clone(),
                metric_noun(x.metric).into(),
                x.n.to_string(),
                pct0(x.mean),
                pct0(x.median),
                pct0(x.min),
                pct0(x.max),
                pct0(x.positive_fraction),
                pct0(x.p5),
                pct0(x.p95),
                x.proxy_count.to_string(),
            ]
        })
        .collect();
    s.push_str(&markdown_table(
        &[
            "Class",
            "Metric",
            "n",
            "Mean",
            "Median",
            "Min",
            "Max",
            "Share > 0",
            "P5",
            "P95",
            "Proxies",
        ],
        &rows,
    ));

    s.push_str("\n## Uplift tables\n\n");
    let mut headers = vec![
        "Acceptable chance of overrun".to_string(),
        "Level of certainty".to_string(),
    ];
    headers.extend(report.classes.iter().map(|c| {
        format!(
            "{} {} (n={})",
            c.summary.name,
            metric_noun(c.summary.metric),
            c.summary.n
        )
    }));
    let headers: Vec<&str> = headers.iter().map(String::as_str).collect();
    let first = report
        .classes
        .first()
        .map(|c| c.uplift_table.rows.len())
        .unwrap_or(0);
    let rows: Vec<Vec<String>> = (0..first)
        .map(|i| {
            let r0 = &report.classes[0].uplift_table.rows[i];
            let mut row = vec![pct0(r0.acceptable_chance), p_level(r0.certainty)];
            row.extend(report.classes.iter().map(|c| {
                c.uplift_table
                    .rows
                    .get(i)
                    .map_or_else(String::new, |r| pct0(r.uplift))
            }));
            row
        })
        .collect();
    s.push_str(&markdown_table(&headers, &rows));

    if !report.forecasts.is_empty() {
        s.push_str(&format!(
            "\n## Forecasts from class '{}'\n\n",
            report.forecasts[0].class
        ));
        let rows: Vec<Vec<String>> = report
            .forecasts
            .iter()
            .map(|f| {
                let r = &f.result;
                vec![
                    p_level(r.certainty),
                    money(r.base_estimate),
                    pct0(r.uplift),
                    money(r.uplifted_estimate),
                ]
            })
            .collect();
        s.push_str(&markdown_table(
            &[
                "Level of certainty",
                "Base estimate",
                "Uplift",
                "Uplifted estimate",
            ],
            &rows,
        ));
    }

    if !report.adequacy.is_empty() {
        s.push_str(&format!(
            "\n## Contingency adequacy against class '{}'\n\n",
            report.adequacy[0].class
        ));
        let rows: Vec<Vec<String>> = report
            .adequacy
            .iter()
            .map(|a| {
                let r = &a.result;
                vec![
                    pct1(r.contingency),
                    pct1(r.embedded_contingency_assumption),
                    pct1(r.effective_threshold),
                    pct1(r.certainty),
                    p_level(r.certainty),
                ]
            })
            .collect();
        s.push_str(&markdown_table(
            &[
                "Contingency",
                "Embedded in history",
                "Overrun threshold",
                "Past projects covered",
                "Level of certainty",
            ],
            &rows,
        ));
    }

    if let Some(reg) = &report.regression {
        s.push_str(&format!(
            "\n## Cost overrun against schedule overrun, class '{}'\n\n",
            reg.class
        ));
        s.push_str(&bullets(&render_regression(reg)));
    }
    if let Some(t) = &report.trend {
        s.push_str(&format!("\n## Cost overrun trend, {}\n\n", t.group));
        s.push_str(&bullets(&format!(
            "projects with a decision year: {}\nOLS slope per year = {:.4}, 95% CI [{:.4}, {:.4}]\n{}\n",
            t.fit.n,
            t.fit.slope,
            t.fit.slope_ci_low,
            t.fit.slope_ci_high,
            if t.no_decrease {
                "no evidence that overruns decrease over time"
            } else {
                "overruns decrease over time"
            }
        )));
    }
    if let Some(d) = &report.delay_cost {
        s.push_str("\n## Cost of delay\n\n");
        s.push_str(&bullets(&render_delay_cost(d)));
    }
    s
}

pub fn bullets(text: &str) -> String {
    text.lines().map(|l| format!("- {l}\n")).collect()
}

pub fn write_report(
    report: &Report,
    charts: &[(String, Chart)],
    out: &Path,
    svg_dir: Option<&Path>,
) -> Result<()> {
    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let json = out.join("report.json");
    std::fs::write(&json, to_json(report)?)
        .with_context(|| format!("cannot write {}", json.display()))?;
    let md = out.join("report.md");
    std::fs::write(&md, render_markdown(report))
        .with_context(|| format!("cannot write {}", md.display()))?;
    if let Some(dir) = svg_dir {
        for (name, chart) in charts {
            write_svg(dir, name, chart)?;
        }
    }
    Ok(())
}
