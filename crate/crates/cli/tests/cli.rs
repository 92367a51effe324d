use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn deltashell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deltashell"))
        .args(args)
        .output()
        .unwrap()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn spectrum_csv() {
    let out = deltashell(&["spectrum", "--lambda", "2", "--j-max", "3/2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "j,sign,kappa,multiplicity,a,residual");
    assert_eq!(lines.len(), 5);
    // the j = 1/2 eigenvalues at lambda = 2 are symmetric about 0
    let a: Vec<f64> = lines[1..3].iter().map(|l| l.split(',').nth(4).unwrap().parse().unwrap()).collect();
    assert!((a[0] + a[1]).abs() < 1e-12);
}

#[test]
fn spectrum_json_echoes_config() {
    let out = deltashell(&["spectrum", "--lambda", "2", "--j-max", "1/2", "--format", "json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["command"], "spectrum");
    assert_eq!(v["config"]["lambda"], 2.0);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn negative_lambda_is_rejected() {
    let out = deltashell(&["spectrum", "--lambda", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("-lambda"));
}

#[test]
fn bad_mode_is_a_usage_error() {
    assert_eq!(deltashell(&["curve", "--j", "1"]).status.code(), Some(2));
    assert_eq!(deltashell(&["curve", "--sign", "0"]).status.code(), Some(2));
}

#[test]
fn curve_rows() {
    let out = deltashell(&["curve", "--j", "1.5", "--sign", "-1", "--grid", "11"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 12);
    for line in text.lines().skip(1) {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cells[1] > 0.0 && cells[2] < 1e-9);
    }
}

#[test]
fn converge_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("converge.csv");
    let out = deltashell(&["converge", "--mu", "1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = read(&path);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "eps,a_eps,a_star,abs_err,ratio,status");
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 9);
    let errors: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]));
    let a_star: f64 = rows[0][2].parse().unwrap();
    assert!((a_star - -0.5648834674188178).abs() < 1e-12);
    let footer = text.lines().last().unwrap().strip_prefix("# ").unwrap();
    let summary: Value = serde_json::from_str(footer).unwrap();
    let extrapolated = summary[0]["extrapolated"].as_f64().unwrap();
    assert!((extrapolated - a_star).abs() < errors[8]);
}

#[test]
fn converge_rejects_bad_mu() {
    assert_eq!(deltashell(&["converge", "--mu", "0"]).status.code(), Some(2));
    assert_eq!(deltashell(&["converge", "--mu", "4"]).status.code(), Some(2));
}

#[test]
fn converge_with_no_roots_exits_3() {
    // L is never real at eps = 0.9 with mu = 0.1
    let out = deltashell(&["converge", "--mu", "0.1", "--eps-list", "0.9"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn approx_roots() {
    let out = deltashell(&["approx", "--mu", "1", "--eps", "2^-10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let a: f64 = text.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((a - -0.5648834674188178).abs() < 1e-2);
}

#[test]
fn conjecture_default_run() {
    let out = deltashell(&["conjecture"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["violations"], 0);
    assert!(v["conjecture"]["worst_margin"].as_f64().unwrap() > 0.0);
    assert_eq!(v["config"]["n_max"], 50);
}

#[test]
fn conjecture_smallest_case() {
    let out = deltashell(&["conjecture", "--n-max", "2", "--grid", "2"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["conjecture"]["worst_n"], 2);
}

#[test]
fn inequality_report() {
    let out = deltashell(&["conjecture", "--kind", "inequality", "--j-max", "5/2"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["violations"], 0);
    let equal: Vec<&Value> = v["gaps"].as_array().unwrap().iter().filter(|g| g["equality"] == true).collect();
    assert!(!equal.is_empty());
    assert!(equal.iter().all(|g| g["kappa"] == 1));
}

#[test]
fn violations_exit_4() {
    // a negative tolerance makes the exact equalities count as violations
    let out = deltashell(&["conjecture", "--kind", "inequality", "--j-max", "1/2", "--tol=-1"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn eigenfunction_samples() {
    let out = deltashell(&["eigenfun", "--lambda", "2", "--grid", "8", "--r-max", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "r,f,g");
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 9);
    assert_eq!(deltashell(&["eigenfun", "--lambda", "2", "--root", "5"]).status.code(), Some(3));
    assert_eq!(deltashell(&["eigenfun"]).status.code(), Some(2));
}

#[test]
fn figure_reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = deltashell(&["figures", "--figure", "2", "--grid", "64", "--out", path.to_str().unwrap()]);
        assert!(out.status.success());
        read(&path)
    };
    let first = run("a.csv");
    assert_eq!(first, run("b.csv"));
    assert!(first.starts_with("a,lambda,residual\n"));
}

#[test]
fn unwritable_output_exits_1() {
    let out = deltashell(&["figures", "--figure", "2", "--grid", "8", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/dir/x.csv"));
}
