use std::path::Path;

use anyhow::{anyhow, bail, ensure, Context, Result};
use rcf_core::{
    build_reference_class, build_uplift_table, certainty_of_contingency, decide_pooling,
    default_certainty_grid, delay_cost, filter_class, forecast, irls_fit, ols_fit,
    pearson_correlation, AdequacyResult, ClassFilter, CorrelationResult, DelayCostModel,
    Diagnostic, ForecastResult, Metric, OverrunSample, PoolingDecision, ProjectRecord,
    ReferenceClass, RegressionFit, UpliftTable,
};
use serde::Serialize;

use crate::args::{MetricArg, OutputFormat};
use crate::data::Dataset;
use crate::format::{markdown_table, money, p_level, p_value, pct0, pct1, text_table};
use crate::svg::{AxisFormat, Chart, Series};

pub fn parse_filter(spec: &str) -> Result<ClassFilter> {
    spec.parse::<ClassFilter>()
        .map_err(|e| anyhow!("invalid class '{spec}': {e}"))
}

fn is_sector_partition(members: &[ClassFilter]) -> bool {
    members
        .iter()
        .enumerate()
        .all(|(i, m)| matches!(m, ClassFilter::Sector(_)) && !members[..i].contains(m))
}

/// Builds a class from a spec, keeping disjoint sectors as separate member groups.
pub fn reference_class(
    records: &[ProjectRecord],
    spec: &str,
    metric: Metric,
) -> Result<ReferenceClass> {
    let filter = parse_filter(spec)?;
    let members = match &filter {
        ClassFilter::Union(m) if is_sector_partition(m) => m.clone(),
        other => vec![other.clone()],
    };
    let samples: Vec<OverrunSample> = members
        .iter()
        .map(|f| filter_class(records, f, metric).sample)
        .collect();
    Ok(build_reference_class(filter.label(), metric, &samples)?)
}

/// Parses a comma separated group list into labelled samples.
pub fn group_samples(
    records: &[ProjectRecord],
    groups: &str,
    metric: Metric,
) -> Result<Vec<OverrunSample>> {
    let mut samples: Vec<OverrunSample> = Vec::new();
    for token in groups.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let filter = parse_filter(token)?;
        let sample = filter_class(records, &filter, metric).sample;
        if samples.iter().any(|s| s.label() == sample.label()) {
            bail!("group '{}' listed twice", sample.label());
        }
        samples.push(sample);
    }
    ensure!(
        samples.len() >= 2,
        "pooling needs at least two groups, got {}",
        samples.len()
    );
    Ok(samples)
}

/// (schedule overrun, cost overrun) for records usable on both metrics.
pub fn paired_overruns(records: &[ProjectRecord], filter: &ClassFilter) -> (Vec<f64>, Vec<f64>) {
    records
        .iter()
        .filter(|r| filter.matches(r))
        .filter_map(|r| Some((r.overrun(Metric::Schedule)?, r.overrun(Metric::Cost)?)))
        .unzip()
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn metric_noun(metric: Metric) -> &'static str {
    match metric {
        Metric::Cost => "cost",
        Metric::Schedule => "schedule",
    }
}

fn proxy_note(class: &ReferenceClass) -> String {
    if class.metric == Metric::Cost {
        format!(", {} proxy actuals", class.proxy_count)
    } else {
        String::new()
    }
}

#[derive(Serialize)]
struct ClassCount {
    class: String,
    cost: usize,
    schedule: usize,
}

#[derive(Serialize)]
struct ValidateOutput<'a> {
    source: &'a str,
    digest: &'a str,
    currency: Option<&'a str>,
    basis_year: Option<i32>,
    records: usize,
    dropped_rows: usize,
    proxy_count: usize,
    proxies_excluded: usize,
    diagnostics: &'a [Diagnostic],
    classes: Vec<ClassCount>,
}

const VALIDATE_CLASSES: [&str; 8] = [
    "nuclear",
    "hlw",
    "lilw",
    "nuclear_power",
    "research",
    "mining",
    "mining-100m",
    "mining-300m",
];

pub fn validate(data: &Dataset, format: OutputFormat) -> Result<String> {
    let records = &data.loaded.records;
    let classes = VALIDATE_CLASSES
        .iter()
        .map(|spec| {
            let filter = parse_filter(spec)?;
            Ok(ClassCount {
                class: filter.label(),
                cost: filter_class(records, &filter, Metric::Cost).sample.n(),
                schedule: filter_class(records, &filter, Metric::Schedule).sample.n(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = ValidateOutput {
        source: &data.source,
        digest: &data.digest,
        currency: data.loaded.meta.currency.as_deref(),
        basis_year: data.loaded.meta.basis_year,
        records: records.len(),
        dropped_rows: data.dropped_rows(),
        proxy_count: data.proxy_count(),
        proxies_excluded: data.proxies_excluded,
        diagnostics: &data.loaded.diagnostics,
        classes,
    };
    if format == OutputFormat::Json {
        return to_json(&out);
    }
    let md = format == OutputFormat::Markdown;
    let mut s = String::new();
    if md {
        s.push_str("# Dataset validation\n\n");
    }
    s.push_str(&format!(
        "dataset: {}\nsha256: {}\n",
        out.source, out.digest
    ));
    if let (Some(c), Some(y)) = (out.currency, out.basis_year) {
        s.push_str(&format!("currency: {c}, price basis {y}\n"));
    }
    s.push_str(&format!(
        "{} records loaded, {} rows dropped, {} proxy actual costs",
        out.records, out.dropped_rows, out.proxy_count
    ));
    if out.proxies_excluded > 0 {
        s.push_str(&format!(" ({} proxies excluded)", out.proxies_excluded));
    }
    s.push('\n');
    for d in out.diagnostics {
        let severity = serde_json::to_value(d.severity)?;
        s.push_str(&format!(
            "line {}: {}: {}\n",
            d.line,
            severity.as_str().unwrap_or("?"),
            d.message
        ));
    }
    s.push('\n');
    for c in &out.classes {
        s.push_str(&format!(
            "{}: {} usable cost records, {} usable schedule records\n",
            c.class, c.cost, c.schedule
        ));
    }
    Ok(s)
}

pub fn parse_levels(levels: Option<&[String]>) -> Result<Vec<f64>> {
    let Some(levels) = levels else {
        return Ok(default_certainty_grid());
    };
    levels
        .iter()
        .map(|l| {
            let t = l.trim().trim_end_matches('%');
            let v: f64 = t.parse().with_context(|| format!("invalid level '{l}'"))?;
            ensure!((0.0..=100.0).contains(&v), "level {l} outside 0..100");
            Ok(v / 100.0)
        })
        .collect()
}

#[derive(Serialize)]
struct TableOutput<'a> {
    proxy_count: usize,
    table: &'a UpliftTable,
}

pub fn render_uplift_rows(table: &UpliftTable, markdown: bool) -> String {
    let uplift_header = format!("{} uplift", capitalise(metric_noun(table.metric)));
    let headers = [
        "Acceptable chance of overrun",
        "Level of certainty",
        uplift_header.as_str(),
    ];
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            vec![
                pct0(r.acceptable_chance),
                p_level(r.certainty),
                pct0(r.uplift),
            ]
        })
        .collect();
    if markdown {
        markdown_table(&headers, &rows)
    } else {
        text_table(&headers, &rows)
    }
}

fn capitalise(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map(|f| f.to_uppercase().chain(c).collect())
        .unwrap_or_default()
}

pub fn uplift_chart(tables: &[&UpliftTable]) -> Chart {
    Chart {
        title: "Uplift to apply per acceptable chance of overrun".into(),
        x_label: "Acceptable chance of overrun".into(),
        y_label: "Required uplift".into(),
        x_format: AxisFormat::Percent,
        y_format: AxisFormat::Percent,
        x_window: None,
        series: tables
            .iter()
            .map(|t| {
                Series::line(
                    format!("{} {} (n={})", t.class_name, metric_noun(t.metric), t.n),
                    t.rows
                        .iter()
                        .map(|r| (r.acceptable_chance, r.uplift))
                        .collect(),
                )
            })
            .collect(),
    }
}

pub fn write_svg(dir: &Path, name: &str, chart: &Chart) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, chart.render())
        .with_context(|| format!("cannot write {}", path.display()))
}

pub fn table(
    data: &Dataset,
    format: OutputFormat,
    svg_dir: Option<&Path>,
    metric: MetricArg,
    class: &str,
    levels: Option<&[String]>,
) -> Result<String> {
    let metric = Metric::from(metric);
    let levels = parse_levels(levels)?;
    let class = reference_class(&data.loaded.records, class, metric)?;
    let table = build_uplift_table(&class, &levels)?;
    if let Some(dir) = svg_dir {
        write_svg(
            dir,
            &format!("uplift_{}.svg", metric_noun(metric)),
            &uplift_chart(&[&table]),
        )?;
    }
    let heading = format!(
        "{} uplifts for class '{}' (n = {}{})",
        capitalise(metric_noun(metric)),
        class.name,
        class.n,
        proxy_note(&class)
    );
    Ok(match format {
        OutputFormat::Json => to_json(&TableOutput {
            proxy_count: class.proxy_count,
            table: &table,
        })?,
        OutputFormat::Markdown => format!("## {heading}\n\n{}", render_uplift_rows(&table, true)),
        OutputFormat::Text => format!("{heading}\n{}", render_uplift_rows(&table, false)),
    })
}

/// Lower-triangular p-value matrix; below-alpha cells are starred or bolded.
pub fn render_pooling(decision: &PoolingDecision, markdown: bool) -> String {
    let groups = &decision.groups;
    let mut headers = vec![""];
    headers.extend(groups.iter().map(String::as_str));
    let rows: Vec<Vec<String>> = groups
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let mut row = vec![a.clone()];
            for (j, b) in groups.iter().enumerate() {
                let cell = if j >= i {
                    String::new()
                } else {
                    let p = decision.p_value(a, b).unwrap_or(f64::NAN);
                    match (p < decision.alpha, markdown) {
                        (true, true) => format!("**{}**", p_value(p)),
                        (true, false) => format!("{}*", p_value(p)),
                        _ => p_value(p),
                    }
                };
                row.push(cell);
            }
            row
        })
        .collect();
    let partition = decision
        .partition
        .iter()
        .map(|set| format!("{{{}}}", set.join(", ")))
        .collect::<Vec<_>>()
        .join(" ");
    let note = if markdown { "bold" } else { "*" };
    let table = if markdown {
        markdown_table(&headers, &rows)
    } else {
        text_table(&headers, &rows)
    };
    format!(
        "{table}\n{note}: p < {}\npooled classes: {partition}\n",
        decision.alpha
    )
}

pub fn pool(
    data: &Dataset,
    format: OutputFormat,
    alpha: f64,
    metric: MetricArg,
    groups: &str,
) -> Result<String> {
    let metric = Metric::from(metric);
    let samples = group_samples(&data.loaded.records, groups, metric)?;
    if let Some(empty) = samples.iter().find(|s| s.is_empty()) {
        bail!("group '{}' has no usable {metric} records", empty.label());
    }
    let decision = decide_pooling(&samples, alpha)?;
    let sizes = samples
        .iter()
        .map(|s| format!("{} n={}", s.label(), s.n()))
        .collect::<Vec<_>>()
        .join(", ");
    let heading = format!(
        "Rank-sum tests on {} overrun ({sizes})",
        metric_noun(metric)
    );
    Ok(match format {
        OutputFormat::Json => to_json(&decision)?,
        OutputFormat::Markdown => format!("## {heading}\n\n{}", render_pooling(&decision, true)),
        OutputFormat::Text => format!("{heading}\n{}", render_pooling(&decision, false)),
    })
}

#[derive(Serialize)]
struct ForecastOutput<'a> {
    class: &'a str,
    metric: Metric,
    n: usize,
    proxy_count: usize,
    #[serde(flatten)]
    result: &'a ForecastResult,
}

pub fn forecast_cmd(
    data: &Dataset,
    format: OutputFormat,
    base: f64,
    certainty: f64,
    metric: MetricArg,
    class: &str,
) -> Result<String> {
    let class = reference_class(&data.loaded.records, class, metric.into())?;
    let result = forecast(base, &class, certainty)?;
    let out = ForecastOutput {
        class: &class.name,
        metric: class.metric,
        n: class.n,
        proxy_count: class.proxy_count,
        result: &result,
    };
    let rows = vec![
        vec!["base estimate".to_string(), money(result.base_estimate)],
        vec!["level of certainty".to_string(), p_level(result.certainty)],
        vec!["uplift".to_string(), pct0(result.uplift)],
        vec![
            "uplifted estimate".to_string(),
            money(result.uplifted_estimate),
        ],
    ];
    let heading = format!(
        "Forecast from class '{}' ({}, n = {}{})",
        class.name,
        metric_noun(class.metric),
        class.n,
        proxy_note(&class)
    );
    Ok(match format {
        OutputFormat::Json => to_json(&out)?,
        OutputFormat::Markdown => {
            format!("## {heading}\n\n{}", markdown_table(&["", "value"], &rows))
        }
        OutputFormat::Text => {
            let mut s = format!("{heading}\n");
            for r in rows {
                s.push_str(&format!("{:<20}{}\n", r[0], r[1]));
            }
            s
        }
    })
}

#[derive(Serialize)]
struct AdequacyOutput<'a> {
    class: &'a str,
    metric: Metric,
    n: usize,
    proxy_count: usize,
    #[serde(flatten)]
    result: &'a AdequacyResult,
}

pub fn adequacy(
    data: &Dataset,
    format: OutputFormat,
    contingency: f64,
    embedded: f64,
    metric: MetricArg,
    class: &str,
) -> Result<String> {
    let class = reference_class(&data.loaded.records, class, metric.into())?;
    let result = certainty_of_contingency(&class, contingency, embedded)?;
    let out = AdequacyOutput {
        class: &class.name,
        metric: class.metric,
        n: class.n,
        proxy_count: class.proxy_count,
        result: &result,
    };
    let body = format!(
        "contingency {} with {} assumed embedded: historic overrun threshold {}\ncovers {} of past projects ({})\n",
        pct1(result.contingency),
        pct1(result.embedded_contingency_assumption),
        pct1(result.effective_threshold),
        pct1(result.certainty),
        p_level(result.certainty)
    );
    let heading = format!(
        "Adequacy against class '{}' ({}, n = {}{})",
        class.name,
        metric_noun(class.metric),
        class.n,
        proxy_note(&class)
    );
    Ok(match format {
        OutputFormat::Json => to_json(&out)?,
        OutputFormat::Markdown => format!("## {heading}\n\n{body}"),
        OutputFormat::Text => format!("{heading}\n{body}"),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct RegressionOutput {
    pub class: String,
    pub pairs: usize,
    pub correlation: CorrelationResult,
    pub irls: RegressionFit,
    pub ols: RegressionFit,
}

pub fn fit_regression(
    records: &[ProjectRecord],
    class: &str,
    seed: u64,
) -> Result<RegressionOutput> {
    let filter = parse_filter(class)?;
    let (x, y) = paired_overruns(records, &filter);
    ensure!(
        x.len() >= 3,
        "class '{}' has {} records usable for both cost and schedule, at least 3 are needed",
        filter.label(),
        x.len()
    );
    Ok(RegressionOutput {
        class: filter.label(),
        pairs: x.len(),
        correlation: pearson_correlation(&x, &y)?,
        irls: irls_fit(&x, &y, seed)?,
        ols: ols_fit(&x, &y)?,
    })
}

pub fn render_regression(reg: &RegressionOutput) -> String {
    let c = &reg.correlation;
    let f = &reg.irls;
    let mut s = format!(
        "pairs: {}\nPearson r = {:.3}, p = {:.3e}\nrobust slope (Huber IRLS) = {:.3}, 95% bootstrap CI [{:.3}, {:.3}], {} after {} iterations\nOLS slope = {:.3}, 95% CI [{:.3}, {:.3}]\n",
        reg.pairs,
        c.r,
        c.p_value,
        f.slope,
        f.slope_ci_low,
        f.slope_ci_high,
        if f.converged { "converged" } else { "not converged" },
        f.iterations,
        reg.ols.slope,
        reg.ols.slope_ci_low,
        reg.ols.slope_ci_high
    );
    s.push_str(&format!(
        "every 10% of schedule delay adds {} cost overrun (95% CI {} to {})\n",
        pct1(f.slope * 0.1),
        pct1(f.slope_ci_low * 0.1),
        pct1(f.slope_ci_high * 0.1)
    ));
    s
}

pub fn regress(data: &Dataset, format: OutputFormat, seed: u64, class: &str) -> Result<String> {
    let reg = fit_regression(&data.loaded.records, class, seed)?;
    let heading = format!(
        "Cost overrun against schedule overrun for class '{}'",
        reg.class
    );
    Ok(match format {
        OutputFormat::Json => to_json(&reg)?,
        OutputFormat::Markdown => format!("## {heading}\n\n{}", render_regression(&reg)),
        OutputFormat::Text => format!("{heading}\n{}", render_regression(&reg)),
    })
}

#[derive(Serialize)]
struct DelayCostOutput<'a> {
    slope_source: String,
    #[serde(flatten)]
    model: &'a DelayCostModel,
}

pub fn render_delay_cost(model: &DelayCostModel) -> String {
    format!(
        "base cost {}, {} months to operation, slope {}\ncost per month of delay: {}\ncost per day of delay: {}\n",
        money(model.base_cost),
        model.total_duration_months,
        model.cost_per_schedule_overrun,
        money(model.cost_per_month),
        money(model.cost_per_day)
    )
}

#[allow(clippy::too_many_arguments)]
pub fn delay_cost_cmd(
    data: &Dataset,
    format: OutputFormat,
    seed: u64,
    base: f64,
    duration_months: f64,
    slope: Option<f64>,
    class: &str,
) -> Result<String> {
    let (fit, source) = match slope {
        Some(s) => {
            ensure!(s.is_finite(), "slope must be finite");
            let fit = RegressionFit {
                slope: s,
                intercept: 0.0,
                slope_ci_low: s,
                slope_ci_high: s,
                method: rcf_core::FitMethod::IrlsHuber,
                n: 0,
                converged: true,
                iterations: 0,
            };
            (fit, "supplied".to_string())
        }
        None => {
            let reg = fit_regression(&data.loaded.records, class, seed)?;
            let source = format!(
                "Huber IRLS fit on {} pairs of class '{}'",
                reg.pairs, reg.class
            );
            (reg.irls, source)
        }
    };
    let model = delay_cost(base, duration_months, &fit)?;
    let body = format!("slope source: {source}\n{}", render_delay_cost(&model));
    Ok(match format {
        OutputFormat::Json => to_json(&DelayCostOutput {
            slope_source: source,
            model: &model,
        })?,
        OutputFormat::Markdown => format!("## Cost of delay\n\n{body}"),
        OutputFormat::Text => body,
    })
}
