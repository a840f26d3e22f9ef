//! End-to-end checks of the binary: output schemas, exit codes and
//! byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_relapse"))
}

fn baseline_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/relapse_baseline.json")
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn relapse");
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn equilibria_reports_three_endemic_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(&[
        "equilibria",
        "--config",
        baseline_config().to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.contains("3 endemic point(s)"), "{summary}");

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("equilibria.json")).unwrap())
            .unwrap();
    let endemic = json["endemic"].as_array().unwrap();
    assert_eq!(endemic.len(), 3);
    let labels: Vec<&str> = endemic
        .iter()
        .map(|p| p["stability"].as_str().unwrap())
        .collect();
    assert_eq!(labels, ["stable", "unstable", "stable"]);
    assert_eq!(json["dfe"]["stability"], "unstable");
    let i1 = endemic[0]["i_star"].as_f64().unwrap();
    assert!((i1 - 0.004914).abs() < 1e-4);
}

#[test]
fn stability_lists_eigenvalue_real_parts() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "stability",
        "--config",
        baseline_config().to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("stability.json")).unwrap())
            .unwrap();
    let rows = json.as_array().unwrap();
    assert_eq!(rows.len(), 4); // disease-free plus three endemic
    for row in rows {
        assert_eq!(row["eigenvalue_real_parts"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn sturm_count_matches_known_roots() {
    let out = run_ok(&["sturm", "count", "--coeffs", "0,-1,0,1", "--interval", "-2,2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"count\": 3"), "{text}");
}

#[test]
fn theorem_check_reports_inequality() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "theorem",
        "check",
        "--config",
        baseline_config().to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("theorem.json")).unwrap())
            .unwrap();
    assert_eq!(json["inequality_holds"], true);
    let r0_max = json["r0_max"].as_f64().unwrap();
    assert!((r0_max - 1.0116).abs() < 2e-3, "r0_max = {r0_max}");
}

#[test]
fn missing_config_is_a_usage_error() {
    let out = bin()
        .args(["equilibria", "--config", "/nonexistent/nope.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = bin()
        .args(["equilibria", "--definitely-not-a-flag"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_parameters_are_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(
        &config,
        r#"{"beta": 0.5, "gamma": -1.0, "phi": 0.0, "mu": 0.1,
            "c_i": 3.0, "kappa": 0.8, "theta": 1.7,
            "window": {"kappa": 0.8, "theta": 1.7}}"#,
    )
    .unwrap();
    let out = bin()
        .args([
            "window",
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().join("out").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("gamma"), "{err}");
}

#[test]
fn contact_forms_are_mutually_exclusive() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("both.json");
    std::fs::write(
        &config,
        r#"{"beta": 0.5, "gamma": 0.1, "phi": 0.0, "mu": 0.1,
            "c_s": 3.75, "c_i": 3.0, "c_r": 6.375, "kappa": 0.8, "theta": 1.7,
            "window": {"kappa": 0.8, "theta": 1.7}}"#,
    )
    .unwrap();
    let out = bin()
        .args([
            "window",
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().join("out").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    // Schema-level misuse is a usage error.
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not both"), "{err}");
}

#[test]
fn identical_configs_give_byte_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    std::fs::write(
        &config,
        r#"{"beta": 0.00096, "gamma": 0.0027, "phi": 0.0044, "mu": 0.00015,
            "c_i": 3.0, "kappa": 0.8, "theta": 1.7,
            "bifurcate": {"r0_min": 0.9, "r0_max": 1.05, "steps": 60},
            "heatmap": {"kappa_min": 0.2, "kappa_max": 0.9, "kappa_cells": 6,
                        "theta_min": 1.0, "theta_max": 1.9, "theta_cells": 6,
                        "i0": 0.05, "horizon": 200000, "stride": 500,
                        "payload": "limit"}}"#,
    )
    .unwrap();
    for (sub, file) in [("bifurcate", "branches.csv"), ("heatmap", "heatmap.csv")] {
        let out_a = dir.path().join(format!("{sub}_a"));
        let out_b = dir.path().join(format!("{sub}_b"));
        run_ok(&[
            sub,
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_a.to_str().unwrap(),
            "--workers",
            "4",
        ]);
        run_ok(&[
            sub,
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_b.to_str().unwrap(),
            "--workers",
            "2",
        ]);
        let a = std::fs::read(out_a.join(file)).unwrap();
        let b = std::fs::read(out_b.join(file)).unwrap();
        assert_eq!(a, b, "{sub} output differs between runs");
    }
}

#[test]
fn simulate_writes_trajectory_schema() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "simulate",
        "--config",
        baseline_config().to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let body = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("t,s,i,r"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 4);
    let last = body.lines().last().unwrap();
    let i_final: f64 = last.split(',').nth(2).unwrap().parse().unwrap();
    assert!((i_final - 0.238099).abs() < 1e-3);
}

#[test]
fn basin_splits_between_attractors() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "basin",
        "--config",
        baseline_config().to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let body = std::fs::read_to_string(dir.path().join("basin.csv")).unwrap();
    let indices: Vec<i64> = body
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(indices, [1, 1, 1, 1, 1, 3, 3, 3, 3, 3]);
}
