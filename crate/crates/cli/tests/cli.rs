mod common;

use std::fs;

use common::{fixture_text, json, paired_csv, rcf, schema};
use rcf_cli::report::{render_markdown, Report};

#[test]
fn validate_fixture_counts_nuclear_cost_records() {
    let run = rcf(["validate"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(
        run.stdout.contains("nuclear: 216 usable cost records"),
        "{}",
        run.stdout
    );
    assert!(run.stdout.contains("200 usable schedule records"));
}

#[test]
fn validate_bad_row_exits_two_with_one_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    let text = fixture_text().replacen(
        "nuclear_storage_hlw,,2694.9,",
        "nuclear_storage_hlw,,abc,",
        1,
    );
    fs::write(&path, text).unwrap();
    let run = rcf([
        "validate",
        "--format",
        "json",
        "--data",
        path.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 2);
    let v: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(v["dropped_rows"], 1);
    let errors: Vec<_> = v["diagnostics"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|d| d["severity"] == "error")
        .collect();
    assert_eq!(errors.len(), 1);
    assert_eq!(errors[0]["line"], 3);
}

#[test]
fn missing_file_is_fatal() {
    let run = rcf(["validate", "--data", "/nonexistent/projects.csv"]);
    assert_eq!(run.code, 1);
    assert!(run.stderr.contains("cannot read"));
}

#[test]
fn json_dataset_is_accepted() {
    let (meta, records) = rcf_core::fixture::fixture_records(rcf_core::fixture::FIXTURE_SEED);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("projects.json");
    let mut buf = Vec::new();
    rcf_core::dataset::write_json(&meta, &records, &mut buf).unwrap();
    fs::write(&path, buf).unwrap();
    let run = rcf(["validate", "--data", path.to_str().unwrap()]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.contains("nuclear: 216 usable cost records"));
}

#[test]
fn table_default_grid() {
    let v = json(&rcf(["table", "--format", "json"]));
    let rows = v["table"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 19);
    assert_eq!(v["proxy_count"], 3);
    let text = rcf(["table"]).stdout;
    let p50 = text.lines().find(|l| l.contains("P50")).unwrap();
    assert!(p50.trim_end().ends_with("67%"), "{p50}");
}

#[test]
fn table_single_level_and_schedule() {
    let v = json(&rcf(["table", "--format", "json", "--levels", "50"]));
    assert_eq!(v["table"]["rows"].as_array().unwrap().len(), 1);
    let text = rcf(["table", "--metric", "schedule", "--class", "nuclear"]).stdout;
    let p80 = text.lines().find(|l| l.contains("P80")).unwrap();
    assert!(p80.trim_end().ends_with("104%"), "{p80}");
}

#[test]
fn table_writes_uplift_chart() {
    let dir = tempfile::tempdir().unwrap();
    let run = rcf(["table", "--svg-dir", dir.path().to_str().unwrap()]);
    assert_eq!(run.code, 0);
    let svg = fs::read_to_string(dir.path().join("uplift_cost.svg")).unwrap();
    roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(rcf(["table", "--class", "shipyards"]).code, 1);
    assert_eq!(rcf(["table", "--levels", "150"]).code, 1);
    assert_eq!(rcf(["pool", "--groups", "hlw,submarines"]).code, 1);
    assert_eq!(rcf(["pool", "--groups", "hlw"]).code, 1);
    assert_eq!(rcf(["--alpha", "1.5", "validate"]).code, 1);
    assert_eq!(rcf(["frobnicate"]).code, 1);
    assert_eq!(
        rcf(["forecast", "--base", "0", "--certainty", "0.5"]).code,
        1
    );
    assert_eq!(
        rcf(["forecast", "--base", "1", "--certainty", "1.5"]).code,
        1
    );
    assert_eq!(rcf(["--help"]).code, 0);
}

#[test]
fn forecast_at_zero_certainty_uses_minimum_overrun() {
    let v = json(&rcf([
        "forecast",
        "--format",
        "json",
        "--base",
        "10",
        "--certainty",
        "0",
    ]));
    assert!((v["uplift"].as_f64().unwrap() + 0.30).abs() < 1e-12);
    assert!((v["uplifted_estimate"].as_f64().unwrap() - 7.0).abs() < 1e-9);
}

#[test]
fn adequacy_of_huge_contingency_is_p100() {
    let run = rcf(["adequacy", "--contingency", "25.0"]);
    assert!(run.stdout.contains("(P100)"), "{}", run.stdout);
    let v = json(&rcf([
        "adequacy",
        "--format",
        "json",
        "--contingency",
        "25.0",
    ]));
    assert_eq!(v["certainty"], 1.0);
}

#[test]
fn pool_markdown_bolds_significant_pairs() {
    let run = rcf(["pool", "--format", "markdown"]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.contains("**0.000**"));
    assert!(run
        .stdout
        .contains("{hlw, lilw, nuclear_power} {mining-100m}"));
    let text = rcf(["pool", "--metric", "schedule"]).stdout;
    assert!(
        !text.contains('*')
            || text
                .lines()
                .filter(|l| l.contains('*'))
                .all(|l| l.starts_with("*:"))
    );
}

#[test]
fn delay_cost_is_linear_and_vanishes_with_zero_slope() {
    let run = |base: &str, slope: &str| {
        json(&rcf([
            "delay-cost",
            "--format",
            "json",
            "--base",
            base,
            "--duration-months",
            "360",
            "--slope",
            slope,
        ]))
    };
    let zero = run("8.229e9", "0");
    assert_eq!(zero["cost_per_month"], 0.0);
    assert_eq!(zero["cost_per_day"], 0.0);
    let one = run("8.229e9", "1.1");
    let two = run("16.458e9", "1.1");
    for key in ["cost_per_month", "cost_per_day"] {
        let (a, b) = (one[key].as_f64().unwrap(), two[key].as_f64().unwrap());
        assert!((b - 2.0 * a).abs() <= 1e-9 * b, "{key}");
    }
    assert_eq!(one["slope_source"], "supplied");
}

#[test]
fn regress_needs_three_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.csv");
    fs::write(&path, paired_csv(&[(0.1, 0.2), (0.3, 0.1)])).unwrap();
    let run = rcf(["regress", "--data", path.to_str().unwrap()]);
    assert_eq!(run.code, 1);
    assert!(run.stderr.contains("at least 3"), "{}", run.stderr);
}

#[test]
fn regress_on_linear_pairs() {
    let pairs: Vec<(f64, f64)> = (0..12)
        .map(|i| {
            let s = i as f64 * 0.1;
            (0.05 + 1.1 * s, s)
        })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("linear.csv");
    fs::write(&path, paired_csv(&pairs)).unwrap();
    let v = json(&rcf([
        "regress",
        "--format",
        "json",
        "--data",
        path.to_str().unwrap(),
    ]));
    assert!((v["correlation"]["r"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["irls"]["slope"].as_f64().unwrap() - 1.1).abs() < 1e-6);
    let text = rcf(["regress", "--data", path.to_str().unwrap()]).stdout;
    assert!(
        text.contains("every 10% of schedule delay adds 11.0% cost overrun"),
        "{text}"
    );
}

#[test]
fn every_command_emits_json() {
    for args in [
        vec!["validate"],
        vec!["pool", "--metric", "schedule"],
        vec!["adequacy", "--contingency", "0.232"],
        vec!["regress"],
        vec![
            "delay-cost",
            "--base",
            "8.229e9",
            "--duration-months",
            "360",
        ],
    ] {
        let mut full = vec!["--format", "json"];
        full.extend(args);
        json(&rcf(&full));
    }
}

fn report_args(out: &str) -> Vec<String> {
    [
        "report",
        "--out",
        out,
        "--base",
        "8.13",
        "--base",
        "8.23",
        "--contingency",
        "0.232",
        "--contingency",
        "0.23",
        "--delay-base",
        "8.229e9",
        "--duration-months",
        "360",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

#[test]
fn report_validates_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let svg = dir.path().join("svg");
    let mut args = report_args(out.to_str().unwrap());
    args.extend(["--svg-dir".into(), svg.to_str().unwrap().into()]);
    let run = rcf(&args);
    assert_eq!(run.code, 0, "{}", run.stderr);

    let text = fs::read_to_string(out.join("report.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let validator = jsonschema::validator_for(&schema()).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(&value)
        .map(|e| e.to_string())
        .collect();
    assert!(errors.is_empty(), "{errors:?}");

    let report: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(
        render_markdown(&report),
        fs::read_to_string(out.join("report.md")).unwrap()
    );
    assert_eq!(report.metadata.proxy_count, 3);
    assert!(report.group_medians.iter().any(|g| g.group == "hlw"));
    let md = fs::read_to_string(out.join("report.md")).unwrap();
    assert!(md.contains("## Median overrun by group"));
    assert!(md.contains("| 50% | P50 | 67% |"));

    for name in [
        "ecdf_cost",
        "ecdf_cost_detail",
        "ecdf_schedule",
        "reference_classes",
        "uplift",
        "trend",
    ] {
        let svg = fs::read_to_string(svg.join(format!("{name}.svg"))).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap_or_else(|e| panic!("{name}: {e}"));
        let series = doc
            .descendants()
            .filter(|n| matches!(n.tag_name().name(), "polyline" | "path"))
            .count();
        let legend = doc
            .descendants()
            .filter(|n| n.tag_name().name() == "rect" && n.attribute("height") == Some("4"))
            .count();
        assert!(series > 0, "{name}");
        assert_eq!(series, legend, "{name}");
    }
}

#[test]
fn report_without_proxies() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let mut args = vec!["--exclude-proxies".to_string()];
    args.extend(report_args(out.to_str().unwrap()));
    let run = rcf(&args);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let report: Report =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report.metadata.proxy_count, 0);
    assert!(report.metadata.exclude_proxies);
    let nuclear = report
        .classes
        .iter()
        .find(|c| c.summary.name == "nuclear")
        .unwrap();
    assert_eq!(nuclear.summary.n, 213);
    assert_eq!(nuclear.summary.proxy_count, 0);
}

#[test]
fn report_into_unwritable_path_fails() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    fs::write(&file, "x").unwrap();
    let run = rcf(report_args(file.join("sub").to_str().unwrap()));
    assert_eq!(run.code, 1);
}
