#![allow(dead_code)]

use std::path::Path;
use std::process::Command;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn rcf<I, S>(args: I) -> Run
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let out = Command::new(env!("CARGO_BIN_EXE_rcf"))
        .args(args)
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .expect("rcf binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn json(run: &Run) -> serde_json::Value {
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    serde_json::from_str(&run.stdout).expect("valid JSON on stdout")
}

pub fn fixture_text() -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/fixture.csv"))
        .unwrap()
}

pub const HEADER: &str = "id,name,sector,depth_m,est_cost,act_cost,forecast_at_completion,est_duration_months,act_duration_months,pct_complete,decision_year";

/// A small CSV whose rows are (cost overrun, schedule overrun) pairs.
pub fn paired_csv(pairs: &[(f64, f64)]) -> String {
    let mut s = format!("# currency=CHF basis_year=2018\n{HEADER}\n");
    for (i, (cost, schedule)) in pairs.iter().enumerate() {
        s.push_str(&format!(
            "P{i},Plant {i},nuclear_power,,100,{},,{},{},100,{}\n",
            100.0 * (1.0 + cost),
            60,
            60.0 * (1.0 + schedule),
            1970 + i
        ));
    }
    s
}

pub fn schema() -> serde_json::Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}
