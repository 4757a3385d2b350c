use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lfharm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lfharm"))
        .args(args)
        .env_remove("LFHARM_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = lfharm(&all);
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn reports_are_deterministic() {
    let args = ["maximal", "--q", "3", "--k", "2", "--m", "1", "--seed", "9"];
    let a = lfharm(&args);
    let b = lfharm(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_reports_carry_the_schema_version() {
    let v = json(&["ap", "--w", "power:0.5", "--p", "2", "--k", "4"]);
    assert_eq!(v["schema_version"], "1.0.0");
    assert_eq!(v["command"], "ap");
    assert!(v["violation"].is_null());
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(lfharm(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(lfharm(&["ap", "--w", "power:x", "--p", "2", "--k", "3"]).status.code(), Some(2));
}

#[test]
fn selftest_passes_in_characteristic_two() {
    let out = lfharm(&["field-selftest", "--char", "p", "--p", "2", "--k", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn kernel_audit_q3() {
    let out = lfharm(&["kernel-audit", "--q", "3", "--nmax", "81"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    // metadata, header and one row per n
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 82);
}

#[test]
fn buckley_ratios_clear_the_lower_bound() {
    let v = json(&["buckley", "--p", "2", "--theta", "0.25"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows.iter().all(|r| r["ratio_above_bound"] == true));
}

#[test]
fn output_dir_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_lfharm"))
        .args(["doubling", "--w", "power:1", "--k", "3"])
        .env("LFHARM_OUTPUT_DIR", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.path().join("doubling.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["summary"]["max"].as_f64(), Some(4.0));
}

#[test]
fn out_flag_takes_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested").join("k.csv");
    let out = lfharm(&["dirichlet", "--n", "5", "--k", "3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(Path::new(&path).exists());
}

#[test]
fn insufficient_resolution_is_a_library_error() {
    let out = lfharm(&["dirichlet", "--n", "9", "--k", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("level"));
}

#[test]
fn formats_can_be_switched() {
    let csv = lfharm(&["doubling", "--w", "power:1", "--k", "3", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("# schema_version=1.0.0\n"));
    assert!(text.contains("key,value\nmax,4.0000000000000000e0\n"));
    let v = json(&["tiling", "--char", "p", "--standard", "1", "--k", "2"]);
    assert_eq!(v["summary"]["tiles"], true);
}

#[test]
fn function_files_round_trip_through_maximal() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    // 1 on P, 0 elsewhere, at level 1 over Q_3
    std::fs::write(
        &path,
        r#"{"q":3,"p":3,"c":1,"char":0,"level":1,"values":[[1,0],[0,0],[0,0]]}"#,
    )
    .unwrap();
    let v = json(&["maximal", "--input", path.to_str().unwrap(), "--m", "0"]);
    let vals: Vec<f64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["value"].as_f64().unwrap())
        .collect();
    assert_eq!(vals.len(), 3);
    assert_eq!(vals[0], 1.0);
    assert!((vals[1] - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn moved_cell_breaks_the_tiling() {
    let v = json(&["tiling", "--char", "p", "--standard", "2", "--k", "3", "--move-cell", "0,5"]);
    assert_eq!(v["summary"]["tiles"], false);
}

/// The report layout is pinned to its version: changing either needs the other updated.
#[test]
fn schema_layout_matches_version() {
    assert_eq!(lfharm_cli::output::report_schema_version(), "1.0.0");
    let v = json(&["sn-norms", "--w", "unit", "--k", "2", "--nmax", "2"]);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["schema_version", "command", "params", "summary", "rows", "violation"]);
    let csv = String::from_utf8(lfharm(&["sn-norms", "--w", "unit", "--k", "2", "--nmax", "2"]).stdout).unwrap();
    assert_eq!(csv.lines().find(|l| !l.starts_with('#')), Some("n,norm,residual"));
}
