use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn sbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbm"))
        .args(args)
        .env_remove("SBM_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Parsed CSV body: header and numeric rows.
fn csv(out: &Output) -> (Vec<String>, Vec<Vec<f64>>) {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(out);
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn column(out: &Output, name: &str) -> Vec<f64> {
    let (header, rows) = csv(out);
    let k = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[k]).collect()
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn phi_table() {
    let out = sbm(&[
        "phi", "--kind", "stable", "--alpha", "1", "--lmin", "1", "--lmax", "100", "--points", "3",
    ]);
    let phi = column(&out, "phi");
    assert_eq!(phi.len(), 3);
    assert!((phi[0] - 1.0).abs() < 1e-14);
    assert!((phi[1] - 10f64.sqrt()).abs() < 1e-13);
    assert!((phi[2] - 10.0).abs() < 1e-13);
}

#[test]
fn json_matches_csv() {
    let args = [
        "phi",
        "--kind",
        "relativistic",
        "--alpha",
        "1.2",
        "--m",
        "0.5",
        "--points",
        "7",
    ];
    let (header, rows) = csv(&sbm(&args));
    let mut with_json = args.to_vec();
    with_json.extend(["--format", "json"]);
    let records: Vec<Value> = serde_json::from_str(&stdout(&sbm(&with_json))).unwrap();
    assert_eq!(records.len(), rows.len());
    for (rec, row) in records.iter().zip(&rows) {
        for (h, v) in header.iter().zip(row) {
            assert_eq!(rec[h].as_f64().unwrap(), *v);
        }
    }
}

#[test]
fn csv_uses_seventeen_digits() {
    let text = stdout(&sbm(&[
        "phi", "--kind", "stable", "--alpha", "1", "--lambda", "2",
    ]));
    let field = text.lines().nth(1).unwrap().split(',').nth(1).unwrap();
    assert_eq!(field, "1.4142135623730951e0");
}

#[test]
fn malformed_phi_is_a_usage_error() {
    let out = sbm(&["phi", "--phi", "{\"kind\": \"stab"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let out = sbm(&[
        "phi",
        "--phi",
        "{\"kind\": \"stable\", \"alpha\": 1, \"m\": 2}",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(sbm(&["phi", "--kind", "stable"]).status.code(), Some(2));
    assert_eq!(
        sbm(&["phi", "--kind", "stable", "--alpha", "1", "--bogus"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn phi_from_json() {
    let out = sbm(&[
        "phi",
        "--phi",
        "{\"kind\":\"sum\",\"alpha\":1,\"beta\":0.5}",
        "--lambda",
        "16",
    ]);
    assert!((column(&out, "phi")[0] - 6.0).abs() < 1e-13);
}

#[test]
fn kernel_green_column() {
    let out = sbm(&[
        "kernel", "--kind", "stable", "--alpha", "1", "--dim", "3", "--r", "1",
    ]);
    let g = column(&out, "G")[0];
    assert!((g - 0.050_660_6).abs() < 1e-7, "{g}");
}

#[test]
fn kernel_recurrent_dimension_is_an_error() {
    let out = sbm(&[
        "kernel", "--kind", "stable", "--alpha", "1", "--dim", "1", "--r", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ladder_chi_identity() {
    let out = sbm(&[
        "ladder", "chi", "--kind", "stable", "--alpha", "1", "--lambda", "4",
    ]);
    assert!((column(&out, "chi")[0] - 2.0).abs() < 1e-12);
}

#[test]
fn ladder_green_value() {
    let out = sbm(&[
        "ladder", "green", "--kind", "stable", "--alpha", "1", "--x", "1", "--y", "2",
    ]);
    assert!((column(&out, "G_halfline")[0] - 0.561_100).abs() < 1e-6);
}

#[test]
fn density_closed_form() {
    let out = sbm(&["density", "--kind", "stable", "--alpha", "1", "--t", "1"]);
    assert!((column(&out, "u")[0] - 0.564_190).abs() < 1e-6);
}

#[test]
fn sandwich_check_passes() {
    let out = sbm(&[
        "check", "sandwich", "--kind", "sum", "--alpha", "1", "--beta", "0.5", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rep: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(rep["min"].as_f64().unwrap() > 0.2 && rep["max"].as_f64().unwrap() < 4.9);
    assert_eq!(rep["pass"], Value::Bool(true));
}

#[test]
fn zahle_check_passes() {
    let out = sbm(&[
        "check", "zahle", "--kind", "stable", "--alpha", "0.5", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rep: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(rep["max"].as_f64().unwrap() <= 1.58198);
}

#[test]
fn failed_check_exits_with_one_and_keeps_report() {
    // a tiny path count makes the refinement deltas blow up
    let out = sbm(&[
        "check", "harnack", "--kind", "stable", "--alpha", "1", "--paths", "3", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let rep: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rep["pass"], Value::Bool(false));
}

#[test]
fn simulate_exit_mean() {
    let args = [
        "simulate", "exit", "--kind", "stable", "--alpha", "1", "--dim", "1", "--radius", "1",
        "--paths", "100000", "--seed", "7", "--format", "json",
    ];
    let out = sbm(&args);
    let rep: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let (mean, se) = (
        rep["mean"].as_f64().unwrap(),
        rep["std_error"].as_f64().unwrap(),
    );
    assert!((mean - 1.0).abs() < 3.0 * se, "{mean} ± {se}");
    assert_eq!(rep["n"], 100000);
    assert_eq!(rep["censored"], 0);
}

#[test]
fn zero_paths_is_a_usage_error() {
    let out = sbm(&[
        "simulate", "exit", "--kind", "stable", "--alpha", "1", "--paths", "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn start_outside_ball_is_a_usage_error() {
    let out = sbm(&[
        "simulate", "exit", "--kind", "stable", "--alpha", "1", "--x0", "2", "--paths", "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn manifest_and_replay() {
    let out_path = tmp("replay.csv");
    let o = out_path.to_str().unwrap();
    let args = [
        "simulate", "exit", "--kind", "stable", "--alpha", "1.5", "--dim", "2", "--paths", "500",
        "--seed", "4", "--output", o,
    ];
    let run = Command::new(env!("CARGO_BIN_EXE_sbm"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1234")
        .status()
        .unwrap();
    assert!(run.success());
    let manifest_path = tmp("replay.csv.manifest.json");
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(m["command"], "simulate exit");
    assert_eq!(m["seed"], 4);
    assert_eq!(m["timestamp"], 1234);
    assert!(m["artifact_version"].is_string());
    assert!(!m["flags"]
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f == "--output"));

    let again = tmp("replay-again.csv");
    let out = sbm(&[
        "rerun",
        manifest_path.to_str().unwrap(),
        "--output",
        again.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(&out_path).unwrap(),
        std::fs::read(&again).unwrap()
    );
}

#[test]
fn per_path_dump() {
    let dump = tmp("dump.csv");
    let out = sbm(&[
        "simulate",
        "exit",
        "--kind",
        "stable",
        "--alpha",
        "1",
        "--dim",
        "2",
        "--paths",
        "50",
        "--dump",
        dump.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&dump).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "path,tau,exit_1,exit_2,by_jump,censored"
    );
    assert_eq!(text.lines().count(), 51);
}
