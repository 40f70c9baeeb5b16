//! End-to-end checks of the experiment runner: catalog, golden-file
//! regeneration, determinism, and the perturbed negative control.

use std::process::Command;

use isospec_cli::{describe, experiment_names, parse_name, run, ExperimentConfig};

#[test]
fn catalog_lists_all_experiments() {
    let names = experiment_names();
    assert!(names.len() >= 9);
    for required in [
        "sphere9-ex46",
        "ball10-ex46",
        "sphere7-ex410",
        "ball8-ex410",
        "sphere13-ex44",
        "ball14-ex44",
        "so14-group",
        "su9-group",
        "sphere9-ex46-scaled",
    ] {
        assert!(names.iter().any(|n| n == required), "{required} missing");
        assert!(parse_name(required).is_some());
        assert!(describe(required).is_some());
    }
}

#[test]
fn golden_sphere9_laplace_regenerates_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::for_name("sphere9-ex46").unwrap();
    cfg.out_dir = Some(dir.path().to_path_buf());
    let report = run(&cfg).unwrap();
    assert!(report.overall_pass);
    let generated = std::fs::read_to_string(
        dir.path().join("sphere9-ex46").join("spectra_pencil_laplace_lhs.csv"),
    )
    .unwrap();
    let golden = include_str!("golden/sphere9-ex46-d2-laplace.csv");
    assert_eq!(generated, golden, "sphere9 Laplace spectra must regenerate byte-identically");
}

#[test]
fn golden_so14_defining_regenerates_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::for_name("so14-group").unwrap();
    cfg.out_dir = Some(dir.path().to_path_buf());
    let report = run(&cfg).unwrap();
    assert!(report.overall_pass);
    let generated = std::fs::read_to_string(
        dir.path().join("so14-group").join("spectra_block_defining_j.csv"),
    )
    .unwrap();
    let golden = include_str!("golden/so14-group-defining.csv");
    assert_eq!(generated, golden, "so14 defining spectra must regenerate byte-identically");
}

#[test]
fn reruns_are_byte_identical() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let mut cfg = ExperimentConfig::for_name("sphere9-ex46").unwrap();
        cfg.out_dir = Some(dir.path().to_path_buf());
        run(&cfg).unwrap();
    }
    for file in
        ["spectra_pencil_laplace_lhs.csv", "spectra_pencil_schrodinger_hbar_0.5_lhs.csv"]
    {
        let a = std::fs::read(dir_a.path().join("sphere9-ex46").join(file)).unwrap();
        let b = std::fs::read(dir_b.path().join("sphere9-ex46").join(file)).unwrap();
        assert_eq!(a, b, "{file} must be reproducible");
    }
}

#[test]
fn perturbed_negative_control_fails_with_visible_gap() {
    let mut cfg = ExperimentConfig::for_name("sphere9-ex46").unwrap();
    cfg.perturb = Some(0.1);
    let report = run(&cfg).unwrap();
    assert!(!report.overall_pass, "perturbed run must fail");
    // The metric pair stays slot-swap-isometric, so the failure is carried
    // by the family check, the intertwining conditions and the potential
    // comparisons.
    assert!(!report.certificate("family_isospectral").unwrap().pass);
    assert!(!report.certificate("star_condition").unwrap().pass);
    let schrodinger = report.certificate("pencil_schrodinger_hbar_1").unwrap();
    assert!(!schrodinger.pass);
    let gap = schrodinger.detail["max_rel_gap"].as_f64().unwrap();
    assert!(gap >= 1e-4, "detectability: gap {gap}");
}

#[test]
fn binary_list_and_describe() {
    let bin = env!("CARGO_BIN_EXE_isospec");
    let out = Command::new(bin).arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 9);
    let out = Command::new(bin).args(["describe", "sphere7-ex410"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Hopf"));
    assert!(text.contains("-Id"));
    let out = Command::new(bin).args(["describe", "no-such-thing"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn binary_run_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_isospec");
    let ok = Command::new(bin)
        .args(["run", "sphere9-ex46"])
        .output()
        .unwrap();
    assert!(ok.status.success(), "healthy run exits 0");
    let bad = Command::new(bin)
        .args(["run", "sphere9-ex46", "--perturb", "0.1"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1), "failed certification exits 1");
}

#[test]
fn config_file_round_trip_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::for_name("sphere9-ex46").unwrap();
    cfg.degree = 1;
    let path = dir.path().join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    let bin = env!("CARGO_BIN_EXE_isospec");
    let out = Command::new(bin)
        .args(["run", "sphere9-ex46", "--config"])
        .arg(&path)
        .args(["--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("sphere9-ex46/report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["config"]["degree"], 1);
}
