//! End-to-end CLI behavior: exit codes, filters, formats, determinism.

use std::io::Write;
use std::process::{Command, Output};

fn qtau(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtau"))
        .args(args)
        .env_remove("QTAU_PROD_TAIL_TOL")
        .output()
        .expect("binary runs")
}

fn write_config(content: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(content.as_bytes()).unwrap();
    f.flush().unwrap();
    f
}

#[test]
fn malformed_config_exits_2_without_output() {
    let f = write_config("{not json");
    let out = qtau(&["eval", "--config", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty(), "no partial output on config error");
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_keys_exit_2() {
    let f = write_config(r#"{"famly": "VI"}"#);
    let out = qtau(&["eval", "--config", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_step_exits_2() {
    let f = write_config(r#"{"step": "VI_to_IV"}"#);
    let out = qtau(&["degenerate", "--config", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_error_exits_3_naming_symbol() {
    // sigma = 0.5 puts 2 sigma on the integer lattice: denominators vanish
    let f = write_config(r#"{"family": "III3A", "params": {"sigma": 0.5}}"#);
    let out = qtau(&["eval", "--config", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("denominator") || err.contains("pole"),
        "stderr should name the failure: {err}"
    );
}

#[test]
fn verify_default_exits_0_and_proved_rows_pass() {
    let out = qtau(&["verify", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut proved = 0;
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 8, "row: {line}");
        if cols[2] == "proved" {
            proved += 1;
            assert_eq!(cols[7], "true", "proved row failed: {line}");
        }
    }
    assert!(proved >= 40, "expected a full proved table, got {proved}");
}

#[test]
fn verify_filter_selects_conjectured_vi_block() {
    let out = qtau(&["verify", "--format", "csv", "--filter", "VI.B*"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 8, "{text}");
    for line in rows {
        let cols: Vec<&str> = line.split(',').collect();
        assert!(cols[0].starts_with("VI.B"));
        assert_eq!(cols[2], "conjectured");
    }
}

#[test]
fn verify_tight_tolerance_exits_1() {
    // nothing satisfies 1e-20; proved-row failures drive the exit code
    let out = qtau(&["verify", "--tolerance", "1e-20", "--filter", "III1.B1"]);
    assert_eq!(out.status.code(), Some(1));
    // conjectured-only failures do not
    let out = qtau(&["verify", "--tolerance", "1e-20", "--filter", "VI.B1"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn eval_csv_has_header() {
    let out = qtau(&["eval", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t_re,t_im,tau_re,tau_im,y_re,y_im,z_re,z_im\n"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn eval_at_zero_t_documents_prefactor() {
    // at t = 0 only the n = 0 term survives; with Re(sigma^2) > 0 the
    // t-power vanishes and no (y, z) columns are emitted
    let f = write_config(r#"{"family": "III3A", "t": 0.0}"#);
    let out = qtau(&[
        "eval",
        "--config",
        f.path().to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"y\":null"));
    assert!(text.contains("\"tau\":{\"re\":0.0000000000000000e0,\"im\":0.0000000000000000e0}"));
}

#[test]
fn eval_t_grid_rows() {
    let f = write_config(r#"{"family": "VI", "t_grid": [0.01, 0.02, 0.03]}"#);
    let out = qtau(&[
        "eval",
        "--config",
        f.path().to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn degenerate_single_lambda_has_no_ratio() {
    let f = write_config(r#"{"step": "III2_to_III3A", "lambdas": [8.0]}"#);
    let out = qtau(&[
        "degenerate",
        "--config",
        f.path().to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"fitted_ratio\":null"), "{text}");
}

#[test]
fn runs_are_byte_identical() {
    for args in [
        vec!["eval", "--single-thread"],
        vec!["verify", "--single-thread"],
        vec!["degenerate", "--single-thread", "--format", "csv"],
    ] {
        let a = qtau(&args);
        let b = qtau(&args);
        assert_eq!(a.stdout, b.stdout, "non-deterministic output for {args:?}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = qtau(&["eval", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("{\"config\":"));
}

#[test]
fn env_var_overrides_tail_tolerance() {
    let out = Command::new(env!("CARGO_BIN_EXE_qtau"))
        .args(["eval"])
        .env("QTAU_PROD_TAIL_TOL", "1e-9")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let tol_field = text
        .split("\"prod_tail_tol\":")
        .nth(1)
        .and_then(|rest| rest.split(',').next())
        .unwrap();
    assert_eq!(tol_field.parse::<f64>().unwrap(), 1e-9, "{tol_field}");
    // invalid value is a config error
    let out = Command::new(env!("CARGO_BIN_EXE_qtau"))
        .args(["eval"])
        .env("QTAU_PROD_TAIL_TOL", "bogus")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
