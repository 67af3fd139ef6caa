//! End-to-end tests of the installed binary: output layout, determinism,
//! and the exit-code contract.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_atom-cavity"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should spawn")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be utf-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr should be utf-8")
}

#[test]
fn preset_scan_writes_expected_resonant_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig3.csv");
    let out = run(&["scan", "--preset", "fig3", "-o", path.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let descriptor = lines.next().unwrap();
    assert!(descriptor.starts_with("# {"), "descriptor comment first");
    assert!(descriptor.contains("\"eta_c\":10.0"));
    assert_eq!(
        lines.next().unwrap(),
        "delta_over_gamma,delta_c_over_kappa,transmission,fs_emission,cavity_emission,fs_emission_ratio,sidebeam_T"
    );

    let resonant: Vec<&str> = lines
        .find(|l| l.starts_with("0.00000000000e0,"))
        .unwrap()
        .split(',')
        .collect();
    assert_eq!(resonant[2], "8.26446280992e-3", "transmission 1/121");
    assert_eq!(resonant[3], "1.65289256198e-1", "free-space emission 20/121");
    assert_eq!(resonant[4], "", "driven-atom columns stay empty");
    assert_eq!(resonant[6], "", "sidebeam column stays empty");

    // 801 grid rows plus descriptor and header
    assert_eq!(text.lines().count(), 803);
}

#[test]
fn scan_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = run(&["scan", "--preset", "fig6", "-o", path.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn json_format_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.json");
    let out = run(&[
        "scan",
        "--eta",
        "10",
        "--kappa-over-gamma",
        "1",
        "--scan-mode",
        "driven-atom",
        "--format",
        "json",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["scenario"]["scan"], "driven_atom");
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 801);
    let center = rows.iter().find(|r| r["delta_over_gamma"] == 0.0).unwrap();
    assert!((center["cavity_emission"].as_f64().unwrap() - 10.0 / 121.0).abs() < 1e-12);
    assert!(center["transmission"].is_null());
}

#[test]
fn ensemble_is_deterministic_and_matches_scaling() {
    let args = [
        "ensemble",
        "--kind",
        "uniform",
        "--n",
        "50",
        "--estimator",
        "F2",
        "--samples",
        "400",
        "--seed",
        "20240816",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success(), "stderr: {}", stderr(&first));
    assert_eq!(first.stdout, second.stdout, "same seed, same bytes");

    let doc: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(doc["kind"], "uniform");
    assert_eq!(doc["samples"], 400);
    let mean = doc["mean"]["re"].as_f64().unwrap();
    let se = doc["std_error"].as_f64().unwrap();
    assert!(
        (mean - 0.02).abs() < 5.0 * se,
        "<|F|^2> = 1/N within 5 standard errors, got {mean} +- {se}"
    );
}

#[test]
fn check_passes_clean_and_fails_perturbed() {
    let clean = run(&["check"]);
    assert!(clean.status.success(), "stderr: {}", stderr(&clean));
    let report = stdout(&clean);
    assert!(report.contains("optical theorem"));
    assert!(report.contains("0 failed"));
    assert!(!report.contains("FAIL"));

    let perturbed = run(&["check", "--perturb", "beta", "1e-3"]);
    assert_eq!(perturbed.status.code(), Some(1));
    let report = stdout(&perturbed);
    assert!(report.contains("optical theorem"));
    assert!(report.contains("FAIL"));
}

#[test]
fn usage_errors_exit_2() {
    let missing_output = run(&["scan", "--preset", "fig3"]);
    assert_eq!(missing_output.status.code(), Some(2));
    assert!(stderr(&missing_output).contains("--output"));

    let conflicting = run(&[
        "scan",
        "--preset",
        "fig3",
        "--eta",
        "10",
        "-o",
        "/tmp/never-written.csv",
    ]);
    assert_eq!(conflicting.status.code(), Some(2));
    assert!(!Path::new("/tmp/never-written.csv").exists());

    let partial_geometry = run(&["scan", "--lambda", "780e-9", "-o", "/tmp/never-written.csv"]);
    assert_eq!(partial_geometry.status.code(), Some(2));
    assert!(stderr(&partial_geometry).contains("--waist"));

    let bad_estimator = run(&[
        "ensemble",
        "--kind",
        "uniform",
        "--n",
        "8",
        "--estimator",
        "Q",
        "--samples",
        "4",
        "--seed",
        "1",
    ]);
    assert_eq!(bad_estimator.status.code(), Some(2));

    let bad_quantity = run(&["check", "--perturb", "waist", "1e-3"]);
    assert_eq!(bad_quantity.status.code(), Some(2));
}

#[test]
fn config_merges_with_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scan.json");
    let output = dir.path().join("out.csv");
    std::fs::write(
        &config,
        format!(
            "{{\"preset\":\"fig3\",\"dstep\":0.5,\"output\":{:?}}}",
            config.with_file_name("ignored.csv")
        ),
    )
    .unwrap();

    // flags beat the config: fine step and the real output path
    let out = run(&[
        "scan",
        "--config",
        config.to_str().unwrap(),
        "--dstep",
        "0.01",
        "-o",
        output.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert_eq!(std::fs::read_to_string(&output).unwrap().lines().count(), 803);

    let unknown_key = dir.path().join("typo.json");
    std::fs::write(&unknown_key, "{\"preset\":\"fig3\",\"dsteps\":0.5}").unwrap();
    let out = run(&["scan", "--config", unknown_key.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("dsteps"));
}

#[test]
fn unwritable_output_exits_3() {
    let out = run(&[
        "scan",
        "--preset",
        "fig3",
        "-o",
        "/nonexistent-directory/out.csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
}
