//! End-to-end behaviour of the `wwrcva` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn wwrcva(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wwrcva")).args(args).output().unwrap()
}

fn table1() -> String {
    configs().join("table1.toml").display().to_string()
}

#[test]
fn csv_schema_and_rows() {
    let out = wwrcva(&["table", "--config", &table1(), "--methods", "corr-exp,independence"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "rho,method,value,ci95_halfwidth,err_vs_mc,runtime_s");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| r.len() == 6 && r[5].is_empty() && r[3].is_empty()));
    let indep: Vec<&str> = rows.iter().filter(|r| r[1] == "independence").map(|r| r[2]).collect();
    assert_eq!(indep.len(), 10);
    assert!(indep.iter().all(|v| *v == indep[0]));
}

#[test]
fn mc_rows_carry_intervals_and_errors() {
    let out = wwrcva(&[
        "table", "--config", &table1(), "--methods", "mc,vol-exp", "--rho", "-0.5,0.5", "--paths", "4000", "--steps", "50",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        match f[1] {
            "mc" => assert!(!f[3].is_empty() && f[4].is_empty()),
            "vol-exp" => assert!(f[3].is_empty() && !f[4].is_empty()),
            m => panic!("unexpected method {m}"),
        }
    }
}

#[test]
fn timings_are_opt_in() {
    let out = wwrcva(&["cva", "--config", &table1(), "--methods", "drift-adj", "--timings"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(!row.rsplit(',').next().unwrap().is_empty());
}

#[test]
fn markdown_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.md");
    let out = wwrcva(&[
        "table", "--config", &table1(), "--methods", "corr-exp", "--format", "markdown", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("| rho | corr-exp |"));
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn price_subcommand() {
    let out = wwrcva(&["price", "--config", &table1(), "--methods", "independence,corr-exp", "--rho", "0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let values: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!((values[0] - values[1]).abs() < 1e-9);
    assert!(values[0] > 3.8 && values[0] < 3.99);
}

#[test]
fn g1_subcommand() {
    let out = wwrcva(&["g1", "--config", &table1(), "--eta", "0.1,1e-6"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let abs: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!((abs[0] - 0.0466).abs() < 1.5e-3);
    assert!(abs[1] < 1e-5);
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, std::fs::read_to_string(table1()).unwrap().replace("sigma = 0.1", "sigma = -0.1")).unwrap();
    let out = wwrcva(&["table", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigma must be positive"));

    assert_eq!(wwrcva(&["table", "--config", "/nonexistent.toml"]).status.code(), Some(1));
    assert_eq!(wwrcva(&["table", "--config", &table1(), "--rho", "2"]).status.code(), Some(1));
    assert_eq!(wwrcva(&["table", "--config", &table1(), "--methods", "magic"]).status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_with_two_but_keep_other_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tight.toml");
    let text = std::fs::read_to_string(table1()).unwrap() + "\n[numerics]\nmax_order = 1\n";
    std::fs::write(&cfg, text).unwrap();
    let out = wwrcva(&["table", "--config", cfg.to_str().unwrap(), "--methods", "corr-exp,independence", "--rho", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.contains("0.5,corr-exp,error"));
    assert!(csv.lines().any(|l| l.starts_with("0.5,independence,0.")));
}
