//! End-to-end checks of the `fcs` binary: output formats, exit codes, and a
//! few pinned values.

use std::process::{Command, Output};

fn fcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    stdout(out)
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn coeffs_skewness_pinned_value() {
    let out = fcs(&["--decimals", "9", "coeffs", "--dist", "skewness", "-n", "22", "-K", "12", "-J", "50"]);
    assert!(out.status.success());
    let rows = csv_rows(&out);
    assert_eq!(rows[0], vec!["k", "a_hat"]);
    assert_eq!(rows.len(), 14);
    let k12: f64 = rows[13][1].parse().unwrap();
    assert!((k12 - 1.05205e-3).abs() < 5e-9, "k12 = {k12}");
}

#[test]
fn coeffs_exact_flag() {
    let out = fcs(&["coeffs", "--dist", "uniform-sum", "-n", "4", "--exact"]);
    assert!(out.status.success());
    let rows = csv_rows(&out);
    assert_eq!(rows[0], vec!["k", "a_hat", "a_exact", "abs_diff"]);
    let max_diff: f64 = rows[1..]
        .iter()
        .map(|r| r[3].parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!(max_diff < 2.0 * 5.73436e-10, "max diff {max_diff}");

    // No exact oracle exists for skewness.
    let bad = fcs(&["coeffs", "--dist", "skewness", "-n", "6", "--exact"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn eval_cdf_center_and_tail() {
    let out = fcs(&["eval", "--dist", "uniform-sum", "-n", "4", "--which", "cdf", "--x", "0"]);
    let rows = csv_rows(&out);
    assert_eq!(rows[1][1], "0.500000");

    let out = fcs(&["--decimals", "4", "eval", "--dist", "skewness", "-n", "10", "--which", "tail", "--x", "1.4"]);
    let rows = csv_rows(&out);
    assert_eq!(rows[1][1], "0.0103");
}

#[test]
fn eval_grid_normalizes() {
    let out = fcs(&["eval", "--dist", "uniform-sum", "-n", "4", "--which", "pdf", "--grid", "-2:2:4000"]);
    assert!(out.status.success());
    let rows = csv_rows(&out);
    let vals: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    let h = 4.0 / 4000.0;
    let trapezoid: f64 =
        h * (vals.iter().sum::<f64>() - 0.5 * (vals[0] + vals[vals.len() - 1]));
    assert!((trapezoid - 1.0).abs() < 1e-6, "mass {trapezoid}");

    let bad = fcs(&["eval", "--dist", "uniform-sum", "-n", "4", "--which", "pdf", "--grid", "-9:9:10"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn percentile_pinned_values() {
    let out = fcs(&["--decimals", "4", "percentile", "--dist", "uniform-sum", "-n", "12", "--alpha", "0.999,0.5"]);
    let rows = csv_rows(&out);
    assert_eq!(rows[1][1], "2.9964");
    assert_eq!(rows[2][1], "0.0000");

    let out = fcs(&["--decimals", "4", "percentile", "--dist", "skewness", "-n", "20", "--alpha", "0.950"]);
    let rows = csv_rows(&out);
    assert_eq!(rows[1][1], "0.7721");

    let bad = fcs(&["percentile", "--dist", "skewness", "-n", "20", "--alpha", "1.5"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn reproduce_exit_codes() {
    let out = fcs(&["reproduce", "--table", "1"]);
    assert!(out.status.success());
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 7);
    assert!(rows[1..].iter().all(|r| r[6] == "true"));

    let bad = fcs(&["reproduce", "--table", "10"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn reproduce_json_shape() {
    let out = fcs(&["--format", "json", "reproduce", "--table", "9"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema"], "fcs-output/1");
    assert_eq!(v["command"], "reproduce");
    assert_eq!(v["params"]["pass"], true);
    assert_eq!(v["results"].as_array().unwrap().len(), 60);
}

#[test]
fn mc_is_deterministic_and_writes_histogram() {
    let dir = std::env::temp_dir();
    let p1 = dir.join("fcs_mc_test_1.csv");
    let p2 = dir.join("fcs_mc_test_2.csv");
    let args = |p: &std::path::Path| {
        vec![
            "mc".to_string(),
            "--dist".into(),
            "uniform-sum".into(),
            "-n".into(),
            "4".into(),
            "-N".into(),
            "20000".into(),
            "--seed".into(),
            "7".into(),
            "--bins".into(),
            "40".into(),
            "--out".into(),
            p.to_str().unwrap().into(),
        ]
    };
    let out1 = Command::new(env!("CARGO_BIN_EXE_fcs")).args(args(&p1)).output().unwrap();
    let out2 = Command::new(env!("CARGO_BIN_EXE_fcs")).args(args(&p2)).output().unwrap();
    assert!(out1.status.success() && out2.status.success());
    assert_eq!(out1.stdout, out2.stdout);
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    let ks: f64 = csv_rows(&out1)[1][0].parse().unwrap();
    assert!(ks < 0.02, "ks {ks}");
    std::fs::remove_file(p1).ok();
    std::fs::remove_file(p2).ok();

    let bad = fcs(&["mc", "--dist", "uniform-sum", "-n", "4", "-N", "50"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn check_geary_restriction_and_symmetry() {
    let bad = fcs(&["check-geary", "-n", "5"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8(bad.stderr).unwrap().contains("n >= 6"));

    let out = fcs(&["check-geary", "-n", "6", "--grid-points", "5", "--quad-points", "128"]);
    assert!(out.status.success());
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 6);
    // Symmetric grid: recurrence output symmetric in x.
    let first: f64 = rows[1][1].parse().unwrap();
    let last: f64 = rows[5][1].parse().unwrap();
    assert!((first - last).abs() < 1e-6);
}
