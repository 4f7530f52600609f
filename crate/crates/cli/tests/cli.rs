//! End-to-end tests of the command-line interface, run against the real
//! binary with artifacts written to temporary directories.

use std::path::Path;
use std::process::{Command, Output};

use mismatch_smc::ScenarioConfig;
use tempfile::tempdir;

const GOLDEN_HEADER: &str = "t,x1,x2,u,s,d_true,d_hat_bn,d_hat_sl,tau_c,tau_n,eta";
const OUT_ENV: &str = "MISMATCH_SMC_OUT";

/// The binary with the output env var scrubbed, so an ambient value on the
/// machine running the tests cannot redirect artifacts.
fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mismatch-smc"));
    cmd.env_remove(OUT_ENV);
    cmd
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary starts");
    assert!(
        out.status.success(),
        "command {args:?} failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()))
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&read(path))
        .unwrap_or_else(|e| panic!("{} is not valid JSON: {e}", path.display()))
}

#[test]
fn run_writes_the_documented_artifacts() {
    let dir = tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&[
        "run",
        "--preset",
        "scenario1",
        "--controller",
        "smc-sldo",
        "--out",
        out,
    ]);

    let csv = read(&dir.path().join("scenario1_trajectory.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(GOLDEN_HEADER));
    assert_eq!(
        lines.count(),
        30001,
        "30 s at 1 kHz plus the initial sample"
    );

    let metrics = read_json(&dir.path().join("scenario1_metrics.json"));
    assert_eq!(metrics["name"], "scenario1");
    assert_eq!(metrics["controller"], "smc-sldo");
    assert_eq!(metrics["diverged"], false);
    assert!(metrics["mean_abs_x1"].is_f64(), "flattened metric missing");
    assert!(metrics["rms_estimation_error"].is_f64());
    assert!(metrics["settling_times"].is_array());
}

#[test]
fn run_defaults_to_the_first_scenario() {
    let dir = tempdir().unwrap();
    run_ok(&[
        "run",
        "--duration",
        "0.1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(dir.path().join("scenario1_trajectory.csv").exists());
    assert!(dir.path().join("scenario1_metrics.json").exists());
}

#[test]
fn low_gain_baseline_metrics_land_in_the_reference_band() {
    let dir = tempdir().unwrap();
    run_ok(&[
        "run",
        "--preset",
        "scenario2",
        "--controller",
        "smc",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let metrics = read_json(&dir.path().join("scenario2_metrics.json"));
    let mean = metrics["mean_abs_x1"].as_f64().unwrap();
    assert!((1.0..=3.0).contains(&mean), "mean |x1| = {mean}");
    assert!(
        metrics.get("rms_estimation_error").is_none(),
        "plain controller has no estimate column"
    );
}

#[test]
fn presets_lists_both_scenarios() {
    let out = run_ok(&["presets"]);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("scenario1"));
    assert!(text.contains("scenario2"));
    assert!(text.contains("lambda"));
    assert!(text.contains("disturbance"));
}

#[test]
fn compare_writes_csv_and_text_tables() {
    let dir = tempdir().unwrap();
    let out = run_ok(&[
        "compare",
        "--preset",
        "scenario2",
        "--duration",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);

    let csv = read(&dir.path().join("scenario2_comparison.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5, "header plus one row per controller");
    assert!(lines[0].starts_with("controller,status,mean_abs_x1"));
    for (line, kind) in lines[1..]
        .iter()
        .zip(["smc", "ismc", "smc-bndo", "smc-sldo"])
    {
        assert!(
            line.starts_with(&format!("{kind},ok,")),
            "unexpected row: {line}"
        );
    }

    let table = read(&dir.path().join("scenario2_comparison.txt"));
    assert!(table.contains("smc-sldo"));
    assert!(String::from_utf8_lossy(&out.stdout).contains("smc-sldo"));
}

#[test]
fn degenerate_compare_still_produces_the_table() {
    let dir = tempdir().unwrap();
    run_ok(&[
        "compare",
        "--preset",
        "scenario1",
        "--duration",
        "0.001",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let csv = read(&dir.path().join("scenario1_comparison.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(
        !lines[0].contains("settle_at"),
        "no disturbance events inside one millisecond"
    );
}

#[test]
fn config_files_round_trip_and_drive_the_run() {
    let mut cfg = ScenarioConfig::scenario2();
    cfg.name = "custom".to_owned();
    cfg.duration = 1.0;
    cfg.k = 0.2;

    let text = serde_json::to_string_pretty(&cfg).unwrap();
    let reloaded: ScenarioConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(reloaded, cfg, "serialization must round-trip");

    let dir = tempdir().unwrap();
    let config_path = dir.path().join("custom.json");
    std::fs::write(&config_path, text).unwrap();
    run_ok(&[
        "run",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(dir.path().join("custom_trajectory.csv").exists());
    assert!(dir.path().join("custom_metrics.json").exists());
}

#[test]
fn invalid_configs_name_the_offending_field() {
    let dir = tempdir().unwrap();

    let cases = [
        (r#"{"k": "big"}"#, "k"),
        (r#"{"lambda2": 3}"#, "lambda2"),
        (r#"{"k": -1.0}"#, "k"),
    ];
    for (body, field) in cases {
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, body).unwrap();
        let out = bin()
            .args([
                "run",
                "--config",
                path.to_str().unwrap(),
                "--out",
                dir.path().to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(!out.status.success(), "config {body} was accepted");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(
            stderr.contains(field),
            "diagnostic for {body} does not mention `{field}`: {stderr}"
        );
    }
}

#[test]
fn the_output_directory_env_var_is_honored() {
    let dir = tempdir().unwrap();
    let env_dir = dir.path().join("from-env");
    let out = bin()
        .env(OUT_ENV, &env_dir)
        .args(["run", "--preset", "scenario2", "--duration", "0.5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(env_dir.join("scenario2_trajectory.csv").exists());

    // An explicit --out wins over the environment.
    let flag_dir = dir.path().join("from-flag");
    let out = bin()
        .env(OUT_ENV, dir.path().join("ignored"))
        .args([
            "run",
            "--preset",
            "scenario2",
            "--duration",
            "0.5",
            "--out",
            flag_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(flag_dir.join("scenario2_trajectory.csv").exists());
    assert!(!dir.path().join("ignored").exists());
}

#[test]
fn diverging_runs_fail_loudly_but_keep_the_partial_csv() {
    let dir = tempdir().unwrap();
    let out = bin()
        .args([
            "run",
            "--preset",
            "scenario1",
            "--controller",
            "smc",
            "--dt",
            "0.5",
            "--duration",
            "20",
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("diverged"));

    let csv = read(&dir.path().join("scenario1_trajectory.csv"));
    assert!(csv.lines().count() > 2, "partial trajectory retained");
    let metrics = read_json(&dir.path().join("scenario1_metrics.json"));
    assert_eq!(metrics["diverged"], true);
}

#[test]
fn plots_are_emitted_on_request() {
    let dir = tempdir().unwrap();
    run_ok(&[
        "run",
        "--preset",
        "scenario1",
        "--controller",
        "smc-sldo",
        "--duration",
        "1",
        "--plot",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    for stem in ["x1", "x2", "u", "disturbance"] {
        let svg = read(&dir.path().join(format!("scenario1_{stem}.svg")));
        assert!(svg.starts_with("<svg"), "{stem} panel is not an SVG");
        assert!(svg.contains("polyline"));
    }
}

#[test]
fn unknown_controllers_are_rejected() {
    let out = bin().args(["run", "--controller", "pid"]).output().unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("smc-sldo"),
        "error lists the valid kinds: {stderr}"
    );
}
