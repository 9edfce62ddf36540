use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use super::record::{resolve_actuals, ProjectRecord, Sector};
use crate::error::{Error, Result};

/// Column order of the CSV schema. JSON objects use the same keys.
pub const CSV_COLUMNS: [&str; 11] = [
    "id",
    "name",
    "sector",
    "depth_m",
    "est_cost",
    "act_cost",
    "forecast_at_completion",
    "est_duration_months",
    "act_duration_months",
    "pct_complete",
    "decision_year",
];

const MANDATORY_KEYS: [&str; 5] = ["id", "name", "sector", "est_cost", "pct_complete"];
const META_KEYS: [&str; 2] = ["currency", "basis_year"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// `.json` files are JSON, everything else is treated as CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// File-level declaration of the money unit. Every cost in a file shares it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DatasetMeta {
    pub currency: Option<String>,
    pub basis_year: Option<i32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    /// The row was dropped.
    Error,
    /// The row was kept.
    Warning,
}

/// A per-row finding. `line` is the 1-based physical line for CSV input and
/// the 1-based array position for JSON input.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub line: usize,
    pub severity: Severity,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct LoadedDataset {
    pub meta: DatasetMeta,
    pub records: Vec<ProjectRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

impl LoadedDataset {
    pub fn dropped_rows(&self) -> usize {
        self.diagnostics
            .iter()
            .filter(|d| d.severity == Severity::Error)
            .count()
    }
}

struct RawRow {
    line: usize,
    fields: Vec<Option<String>>,
}

/// Reads a dataset and validates every row.
///
/// File-level problems (undecodable input, wrong header, missing keys, mixed
/// currency declarations) are fatal. Row-level violations drop the row and
/// produce one [`Diagnostic`] each.
pub fn load_dataset(mut source: impl Read, format: Format) -> Result<LoadedDataset> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    let text =
        String::from_utf8(bytes).map_err(|e| Error::Parse(format!("input is not UTF-8: {e}")))?;
    let (meta, rows) = match format {
        Format::Csv => read_csv_rows(&text)?,
        Format::Json => read_json_rows(&text)?,
    };

    let mut records = Vec::with_capacity(rows.len());
    let mut diagnostics = Vec::new();
    let mut seen_ids = HashSet::new();
    for row in rows {
        match parse_row(&row.fields) {
            Ok((record, fac, warnings)) => {
                if !seen_ids.insert(record.id.clone()) {
                    diagnostics.push(Diagnostic {
                        line: row.line,
                        severity: Severity::Error,
                        message: format!("duplicate id '{}'", record.id),
                    });
                    continue;
                }
                diagnostics.extend(warnings.into_iter().map(|message| Diagnostic {
                    line: row.line,
                    severity: Severity::Warning,
                    message,
                }));
                let record = resolve_actuals(record, fac);
                if record.act_cost.is_none() {
                    diagnostics.push(Diagnostic {
                        line: row.line,
                        severity: Severity::Warning,
                        message: "no actual cost or usable forecast; excluded from cost analysis"
                            .into(),
                    });
                }
                records.push(record);
            }
            Err(errors) => diagnostics.push(Diagnostic {
                line: row.line,
                severity: Severity::Error,
                message: errors.join("; "),
            }),
        }
    }
    Ok(LoadedDataset {
        meta,
        records,
        diagnostics,
    })
}

fn read_csv_rows(text: &str) -> Result<(DatasetMeta, Vec<RawRow>)> {
    let mut meta = MetaBuilder::default();
    for line in text
        .lines()
        .map(str::trim_start)
        .filter(|l| l.starts_with('#'))
    {
        for token in line.trim_start_matches('#').split_whitespace() {
            if let Some((key, value)) = token.split_once('=') {
                meta.set(key, value)?;
            }
        }
    }
    let meta = meta.finish_required()?;

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .clone();
    for column in CSV_COLUMNS {
        if !header.iter().any(|h| h.trim() == column) {
            return Err(Error::Schema(format!(
                "missing mandatory column '{column}'"
            )));
        }
    }
    if header.len() != CSV_COLUMNS.len()
        || header.iter().zip(CSV_COLUMNS).any(|(h, c)| h.trim() != c)
    {
        return Err(Error::Schema(format!(
            "header must be exactly '{}'",
            CSV_COLUMNS.join(",")
        )));
    }

    let mut rows = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| Error::Parse(e.to_string()))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let fields = record
            .iter()
            .map(|f| {
                let f = f.trim();
                (!f.is_empty()).then(|| f.to_string())
            })
            .collect();
        rows.push(RawRow { line, fields });
    }
    Ok((meta, rows))
}

fn read_json_rows(text: &str) -> Result<(DatasetMeta, Vec<RawRow>)> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let array = value
        .as_array()
        .ok_or_else(|| Error::Parse("top-level JSON value must be an array".into()))?;
    let mut meta = MetaBuilder::default();
    let mut rows = Vec::with_capacity(array.len());
    for (index, item) in array.iter().enumerate() {
        let position = index + 1;
        let object = item
            .as_object()
            .ok_or_else(|| Error::Parse(format!("array element {position} is not an object")))?;
        if let Some(key) = object
            .keys()
            .find(|k| !CSV_COLUMNS.contains(&k.as_str()) && !META_KEYS.contains(&k.as_str()))
        {
            return Err(Error::Schema(format!(
                "unknown key '{key}' in record {position}"
            )));
        }
        if let Some(key) = MANDATORY_KEYS.iter().find(|k| !object.contains_key(**k)) {
            return Err(Error::Schema(format!(
                "missing mandatory key '{key}' in record {position}"
            )));
        }
        for key in META_KEYS {
            if let Some(v) = object.get(key).and_then(json_scalar) {
                meta.set(key, &v)?;
            }
        }
        let fields = CSV_COLUMNS
            .iter()
            .map(|column| object.get(*column).and_then(json_scalar))
            .collect();
        rows.push(RawRow {
            line: position,
            fields,
        });
    }
    Ok((meta.finish(), rows))
}

fn json_scalar(value: &serde_json::Value) -> Option<String> {
    match value {
        serde_json::Value::Null => None,
        serde_json::Value::String(s) if s.trim().is_empty() => None,
        serde_json::Value::String(s) => Some(s.trim().to_string()),
        other => Some(other.to_string()),
    }
}

#[derive(Default)]
struct MetaBuilder {
    currency: Option<String>,
    basis_year: Option<i32>,
}

impl MetaBuilder {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "currency" => {
                let value = value.trim().to_ascii_uppercase();
                if let Some(existing) = &self.currency {
                    if *existing != value {
                        return Err(Error::Schema(format!(
                            "mixed currency declarations: {existing} and {value}"
                        )));
                    }
                }
                self.currency = Some(value);
            }
            "basis_year" => {
                let year: i32 = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::Schema(format!("basis_year '{value}' is not a year")))?;
                if let Some(existing) = self.basis_year {
                    if existing != year {
                        return Err(Error::Schema(format!(
                            "mixed price basis declarations: {existing} and {year}"
                        )));
                    }
                }
                self.basis_year = Some(year);
            }
            _ => {}
        }
        Ok(())
    }

    fn finish(self) -> DatasetMeta {
        DatasetMeta {
            currency: self.currency,
            basis_year: self.basis_year,
        }
    }

    fn finish_required(self) -> Result<DatasetMeta> {
        if self.currency.is_none() || self.basis_year.is_none() {
            return Err(Error::Schema(
                "missing file metadata line '# currency=<ISO code> basis_year=<year>'".into(),
            ));
        }
        Ok(self.finish())
    }
}

type ParsedRow = (ProjectRecord, Option<f64>, Vec<String>);

fn parse_row(fields: &[Option<String>]) -> std::result::Result<ParsedRow, Vec<String>> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let get = |i: usize| fields.get(i).and_then(|f| f.as_deref());

    let id = get(0).map(str::to_string).unwrap_or_else(|| {
        errors.push("id is required".to_string());
        String::new()
    });
    let name = get(1).unwrap_or_default().to_string();
    let sector = match get(2) {
        Some(s) => s
            .parse::<Sector>()
            .map_err(|e| errors.push(e.to_string()))
            .ok(),
        None => {
            errors.push("sector is required".into());
            None
        }
    };
    let depth_m = optional_number(get(3), "depth_m", |v| v >= 0.0, ">= 0", &mut errors);
    let est_cost = optional_number(get(4), "est_cost", |v| v > 0.0, "> 0", &mut errors);
    if get(4).is_none() {
        errors.push("est_cost is required".into());
    }
    let act_cost = optional_number(get(5), "act_cost", |v| v > 0.0, "> 0", &mut errors);
    let fac = optional_number(
        get(6),
        "forecast_at_completion",
        |v| v > 0.0,
        "> 0",
        &mut errors,
    );
    let est_duration = optional_number(
        get(7),
        "est_duration_months",
        |v| v > 0.0,
        "> 0",
        &mut errors,
    );
    let act_duration = optional_number(
        get(8),
        "act_duration_months",
        |v| v > 0.0,
        "> 0",
        &mut errors,
    );
    let pct_complete = optional_number(
        get(9),
        "pct_complete",
        |v| (0.0..=100.0).contains(&v),
        "within [0, 100]",
        &mut errors,
    );
    if get(9).is_none() {
        errors.push("pct_complete is required".into());
    }
    let decision_year = match get(10) {
        Some(s) => s
            .parse::<i32>()
            .map_err(|_| errors.push(format!("decision_year '{s}' is not an integer year")))
            .ok(),
        None => None,
    };

    if !errors.is_empty() {
        return Err(errors);
    }
    let sector = sector.expect("validated");
    if depth_m.is_some() && sector != Sector::Mining {
        warnings.push("depth_m is only meaningful for mining projects".into());
    }
    let record = ProjectRecord {
        id,
        name,
        sector,
        depth_m,
        est_cost: est_cost.expect("validated"),
        act_cost,
        forecast_at_completion: fac,
        est_duration_months: est_duration,
        act_duration_months: act_duration,
        pct_complete: pct_complete.expect("validated"),
        decision_year,
        cost_is_proxy: false,
    };
    Ok((record, fac, warnings))
}

fn optional_number(
    raw: Option<&str>,
    column: &str,
    valid: impl Fn(f64) -> bool,
    rule: &str,
    errors: &mut Vec<String>,
) -> Option<f64> {
    let raw = raw?;
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() && valid(v) => Some(v),
        Ok(_) => {
            errors.push(format!("{column} must be {rule}"));
            None
        }
        Err(_) => {
            errors.push(format!("{column} '{raw}' is not a number"));
            None
        }
    }
}

fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes records in the CSV schema. Proxy records are written as they were
/// read, with `act_cost` empty.
pub fn write_csv(meta: &DatasetMeta, records: &[ProjectRecord], mut out: impl Write) -> Result<()> {
    if let (Some(currency), Some(year)) = (&meta.currency, meta.basis_year) {
        writeln!(out, "# currency={currency} basis_year={year}")?;
    }
    let mut writer = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    writer.write_record(CSV_COLUMNS).map_err(io)?;
    for r in records {
        let act_cost = if r.cost_is_proxy { None } else { r.act_cost };
        writer
            .write_record([
                r.id.clone(),
                r.name.clone(),
                r.sector.to_string(),
                fmt_opt(r.depth_m),
                r.est_cost.to_string(),
                fmt_opt(act_cost),
                fmt_opt(r.forecast_at_completion),
                fmt_opt(r.est_duration_months),
                fmt_opt(r.act_duration_months),
                r.pct_complete.to_string(),
                fmt_opt(r.decision_year),
            ])
            .map_err(io)?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonRow<'a> {
    id: &'a str,
    name: &'a str,
    sector: Sector,
    depth_m: Option<f64>,
    est_cost: f64,
    act_cost: Option<f64>,
    forecast_at_completion: Option<f64>,
    est_duration_months: Option<f64>,
    act_duration_months: Option<f64>,
    pct_complete: f64,
    decision_year: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    currency: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    basis_year: Option<i32>,
}

/// Writes records as a JSON array, repeating the file metadata on every
/// object so it survives a round trip.
pub fn write_json(meta: &DatasetMeta, records: &[ProjectRecord], out: impl Write) -> Result<()> {
    let rows: Vec<JsonRow<'_>> = records
        .iter()
        .map(|r| JsonRow {
            id: &r.id,
            name: &r.name,
            sector: r.sector,
            depth_m: r.depth_m,
            est_cost: r.est_cost,
            act_cost: if r.cost_is_proxy { None } else { r.act_cost },
            forecast_at_completion: r.forecast_at_completion,
            est_duration_months: r.est_duration_months,
            act_duration_months: r.act_duration_months,
            pct_complete: r.pct_complete,
            decision_year: r.decision_year,
            currency: meta.currency.as_deref(),
            basis_year: meta.basis_year,
        })
        .collect();
    serde_json::to_writer_pretty(out, &rows).map_err(|e| Error::Io(std::io::Error::other(e)))
}
