use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn radial_synth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radial-synth"))
        .args(args)
        .env_remove("RADIAL_SYNTH_CONFIG")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

#[test]
fn eval_csv_rows() {
    let out = radial_synth(&["eval", "--dim", "3", "--lambda", "-1,2", "--r", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rdr.headers().unwrap(), vec!["dim", "lambda", "degree", "r", "re", "im"]);
    assert_eq!(rows.len(), 2);
    let re: f64 = rows[0][4].parse().unwrap();
    assert!((re - 1f64.sin()).abs() < 1e-14);
}

#[test]
fn eval_grid_and_degrees() {
    let out = radial_synth(&["eval", "--dim", "2", "--lambda", "1+1i", "--grid", "0:1:0.5", "--degree", "0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0]["re"], 1.0);
    assert_eq!(rows[3]["degree"], 1);
    assert_eq!(rows[3]["re"], 0.0);
}

#[test]
fn invalid_dimension_is_a_mechanical_error() {
    let out = radial_synth(&["eval", "--dim", "1", "--lambda", "1", "--r", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn check_exit_codes() {
    let ok = radial_synth(&["check", "product-formula", "--dim", "2,3"]);
    assert_eq!(ok.status.code(), Some(0));
    let report = json(&ok);
    assert_eq!(report["passed"], true);
    assert_eq!(report["cases"].as_array().unwrap().len(), 2 * 3 * 9);

    let strict = radial_synth(&["check", "product-formula", "--tol", "1e-30"]);
    assert_eq!(strict.status.code(), Some(1));
    assert_eq!(json(&strict)["passed"], false);
}

#[test]
fn laplacian_csv_report() {
    let out = radial_synth(&["check", "laplacian", "--grid", "0.5:1:0.5", "--lambda", "-1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("dim,lambda,r,h,residual"));
}

#[test]
fn monomial_and_commutativity_suites() {
    let out = radial_synth(&["check", "monomial", "--degree", "1"]);
    assert_eq!(out.status.code(), Some(0));
    for case in json(&out)["cases"].as_array().unwrap() {
        assert_eq!(case["reported_degree"], 1);
    }
    let out = radial_synth(&["check", "commutativity", "--dim", "2", "--lengths", "2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn lift_reports_both_semantics() {
    let dir = tempfile::tempdir().unwrap();
    let mu = dir.path().join("mu.json");
    std::fs::write(&mu, r#"{"atoms":[{"t":1.0,"w":[1.0,0.0]}]}"#).unwrap();
    let mu = mu.display().to_string();
    let out = radial_synth(&["check", "lift", "--mu", &mu, "--nu", &mu]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let case = &report["cases"][0];
    assert_eq!(case["axis_residual"], 0.0);
    let gap = case["sphere_residual"].as_f64().unwrap();
    assert!((gap - 0.29019268366493686).abs() < 1e-9);
}

#[test]
fn synthesize_writes_json_and_residual_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("residual.csv");
    let out_json = dir.path().join("fit.json");
    let out = radial_synth(&[
        "synthesize",
        &data("gaussian_disc.json"),
        "--csv",
        table.to_str().unwrap(),
        "--out",
        out_json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let fit: Value = serde_json::from_str(&std::fs::read_to_string(&out_json).unwrap()).unwrap();
    assert_eq!(fit["coefficients"].as_array().unwrap().len(), 17);
    let sup = fit["sup_error"].as_f64().unwrap();
    assert!(sup > 1e-7 && sup < 1e-5, "{sup}");
    let text = std::fs::read_to_string(&table).unwrap();
    assert_eq!(text.lines().count(), 1 + fit["dense_points"].as_u64().unwrap() as usize);
}

#[test]
fn config_file_is_merged_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"quad_order": 16}"#).unwrap();
    let run = |extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_radial-synth"));
        cmd.args(["rule-info", "--dim", "4"]).args(extra).env("RADIAL_SYNTH_CONFIG", &cfg);
        json(&cmd.output().unwrap())
    };
    assert_eq!(run(&[])["order"], 16);
    let overridden = run(&["--quad-order", "24"]);
    assert_eq!(overridden["order"], 24);
    let total: f64 = overridden["weights"].as_array().unwrap().iter().map(|w| w.as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-14);

    std::fs::write(&cfg, r#"{"quad_ordr": 16}"#).unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_radial-synth"));
    let out = cmd.args(["rule-info"]).env("RADIAL_SYNTH_CONFIG", &cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_lists_defaults() {
    let out = radial_synth(&["--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("depth_cap"));
    assert!(text.contains("Exit codes"));
}
