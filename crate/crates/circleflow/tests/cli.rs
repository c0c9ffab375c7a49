//! Binary-level tests: exit codes, report determinism, and file handling.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn circleflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circleflow"))
        .args(args)
        .env_remove("CIRCLEFLOW_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn validate_fixtures_pass() {
    for (name, chi) in [
        ("tetrahedron.json", 2),
        ("torus3x3.json", 0),
        ("octagon-genus2.json", -2),
    ] {
        let out = circleflow(&["validate", fixture(name).to_str().unwrap()]);
        assert!(out.status.success(), "{name} should validate");
        let report = stdout_json(&out);
        assert_eq!(report["complex"]["euler_characteristic"], chi);
        assert_eq!(report["face_condition"]["pass"], true);
    }
}

#[test]
fn validate_rejects_malformed_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ \"format\": \"simple\", ").unwrap();
    let out = circleflow(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("parse"), "diagnostic missing: {stderr}");
}

#[test]
fn validate_rejects_non_manifold_spec() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nonmanifold.json");
    std::fs::write(
        &path,
        r#"{
            "format": "simple",
            "vertex_count": 3,
            "faces": [[0,1,2]],
            "weights": {"0": "pi/3", "1": "pi/3", "2": "pi/3"}
        }"#,
    )
    .unwrap();
    let out = circleflow(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("slots"), "diagnostic missing: {stderr}");
}

#[test]
fn flow_exit_codes_are_the_documented_contract() {
    // Hyperbolic octagon: converged -> 0.
    let out = circleflow(&[
        "flow",
        fixture("octagon-genus2.json").to_str().unwrap(),
        "--geometry",
        "hyperbolic",
    ]);
    assert_eq!(out.status.code(), Some(0));

    // Hyperbolic tetrahedron: collapse -> 2.
    let out = circleflow(&[
        "flow",
        fixture("tetrahedron.json").to_str().unwrap(),
        "--geometry",
        "hyperbolic",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Budget too small: undetermined -> 3.
    let out = circleflow(&[
        "flow",
        fixture("octagon-genus2.json").to_str().unwrap(),
        "--geometry",
        "hyperbolic",
        "--max-time",
        "0.001",
        "--radii",
        write_values(&[0.2]).to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

fn write_values(values: &[f64]) -> PathBuf {
    let dir = tempfile::tempdir().unwrap().keep();
    let path = dir.join("values.json");
    let doc = serde_json::json!({ "values": values });
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    path
}

#[test]
fn euclidean_prescribed_sum_mismatch_fails_before_integration() {
    // Sum must be 2 pi chi = 0 on the torus.
    let kbar = write_values(&[0.1; 9]);
    let out = circleflow(&[
        "flow",
        fixture("torus3x3.json").to_str().unwrap(),
        "--geometry",
        "euclidean",
        "--prescribed",
        kbar.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("sum"), "diagnostic missing: {stderr}");
}

#[test]
fn reports_are_deterministic_up_to_timestamp() {
    let run = || {
        let out = circleflow(&[
            "criteria",
            fixture("tetrahedron.json").to_str().unwrap(),
            "--geometry",
            "hyperbolic",
        ]);
        assert!(out.status.success());
        let mut v = stdout_json(&out);
        v.as_object_mut().unwrap().remove("generated_at");
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn flow_report_and_trajectory_land_in_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_circleflow"))
        .args([
            "flow",
            fixture("octagon-genus2.json").to_str().unwrap(),
            "--geometry",
            "hyperbolic",
            "--out",
            "report.json",
            "--traj",
            "traj.csv",
        ])
        .env("CIRCLEFLOW_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("report.json").exists());
    let csv = std::fs::read_to_string(dir.path().join("traj.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,r_1,gap_supnorm,conserved_sum"));
    assert!(lines.next().unwrap().starts_with("0,1,"));
}

#[test]
fn gradcheck_contract() {
    // Pass/fail must not depend on the seed.
    for seed in ["1", "17", "9999"] {
        let out = circleflow(&["gradcheck", "--samples", "300", "--seed", seed]);
        assert_eq!(out.status.code(), Some(0), "seed {seed}");
        let report = stdout_json(&out);
        for row in report["gradcheck"].as_array().unwrap() {
            assert_eq!(row["pass"], true);
            assert!(row["max_rel_error"].as_f64().unwrap() < 1e-6);
        }
    }
    // Zero samples is a usage error (clap range), exit code 2.
    let out = circleflow(&["gradcheck", "--samples", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn criteria_reports_prescribed_and_subsets() {
    let kbar = write_values(&[-std::f64::consts::PI]);
    let out = circleflow(&[
        "criteria",
        fixture("octagon-genus2.json").to_str().unwrap(),
        "--geometry",
        "hyperbolic",
        "--prescribed",
        kbar.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["prescribed"]["verdict"], "exists-unique");
    let modes: Vec<&str> = report["subset_checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["mode"].as_str().unwrap())
        .collect();
    assert!(modes.contains(&"ghz-h3"));
    assert!(modes.contains(&"ghz-e3"));
    assert!(modes.contains(&"bs-hyperbolic"));
}
