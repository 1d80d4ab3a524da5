//! End-to-end tests of the `tlkit` binary: exit codes, JSON output shape,
//! CSV round-trips, config validation, and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn tlkit() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tlkit"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run_ok(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn gen_writes_csv_with_header_and_labels() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.csv");
    let out = tlkit()
        .args(["gen", "--dist", "cube", "--n", "4", "--samples", "25", "--seed", "7"])
        .args(["--out", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,x3,x4,y"));
    assert_eq!(lines.count(), 25);
    for line in text.lines().skip(1) {
        let y = line.rsplit(',').next().unwrap();
        assert!(y == "1" || y == "-1", "label {y:?}");
    }
}

#[test]
fn gen_is_deterministic_per_seed() {
    let a = tlkit()
        .args(["gen", "--dist", "gaussian", "--n", "3", "--samples", "10", "--seed", "42"])
        .output()
        .unwrap();
    let b = tlkit()
        .args(["gen", "--dist", "gaussian", "--n", "3", "--samples", "10", "--seed", "42"])
        .output()
        .unwrap();
    let c = tlkit()
        .args(["gen", "--dist", "gaussian", "--n", "3", "--samples", "10", "--seed", "43"])
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn gen_rejects_bad_distribution() {
    let out = tlkit()
        .args(["gen", "--dist", "exotic", "--n", "3", "--samples", "5", "--seed", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown distribution"));
}

#[test]
fn run_rejects_unknown_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        r#"{"mode":"gauss_pair","seed":1,"sample_count":9}"#,
    );
    let out = tlkit().args(["run", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown field"), "stderr: {err}");
}

#[test]
fn run_rejects_unknown_param_keys_and_zero_trials() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        r#"{"mode":"gauss_pair","seed":1,"params":{"epsilon":0.5}}"#,
    );
    let out = tlkit().args(["run", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field"));

    let cfg = write(dir.path(), "zero.json", r#"{"mode":"gauss_pair","seed":1,"trials":0}"#);
    let out = tlkit().args(["run", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trials must be >= 1"));
}

#[test]
fn run_gauss_accepts_gaussian_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "g.json",
        r#"{"mode":"gauss_pair","seed":3,"params":{"label_noise":0.1,"holdout":500}}"#,
    );
    let report_path = dir.path().join("report.json");
    let out = tlkit()
        .args(["run", "--config", cfg.to_str().unwrap()])
        .args(["--out", report_path.to_str().unwrap()])
        .output()
        .unwrap();
    let report = run_ok(&out);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report["accept_rate"], 1.0);
    assert!(report["mean_holdout_error"].as_f64().unwrap() <= 0.25);
    // --out writes the same JSON that went to stdout.
    let written: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(written, report);
}

#[test]
fn run_gauss_rejects_scaled_gaussian_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "g.json",
        r#"{"mode":"gauss_pair","seed":4,"params":{"distribution":"scaled-gaussian"}}"#,
    );
    let out = tlkit().args(["run", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["accept_rate"], 0.0);
    assert!(report["learn_reports"].as_array().unwrap().is_empty());
}

#[test]
fn force_learn_runs_learner_despite_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "g.json",
        r#"{"mode":"gauss_pair","seed":4,"params":{"distribution":"scaled-gaussian","holdout":200}}"#,
    );
    let out = tlkit()
        .args(["run", "--config", cfg.to_str().unwrap(), "--force-learn"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "rejection still wins the exit code");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["learn_reports"].as_array().unwrap().len(), 1);
}

#[test]
fn run_report_is_deterministic_modulo_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "g.json",
        r#"{"mode":"gauss_pair","seed":5,"trials":2,"params":{"label_noise":0.05,"holdout":300}}"#,
    );
    let strip = |out: &Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        // The wall clock and the echoed worker count legitimately vary.
        v.as_object_mut().unwrap().remove("timestamp_unix_secs");
        v.as_object_mut().unwrap().remove("threads");
        v
    };
    let a = tlkit().args(["run", "--config", cfg.to_str().unwrap()]).output().unwrap();
    let b = tlkit()
        .args(["run", "--config", cfg.to_str().unwrap()])
        .env("TLKIT_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(strip(&a), strip(&b), "report depends on thread count or invocation");
}

#[test]
fn tlkit_threads_must_be_positive_integer() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "g.json", r#"{"mode":"gauss_pair","seed":1}"#);
    let out = tlkit()
        .args(["run", "--config", cfg.to_str().unwrap()])
        .env("TLKIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("TLKIT_THREADS"));
}

#[test]
fn gen_then_run_ingests_csv() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    let out = tlkit()
        .args(["gen", "--dist", "gaussian", "--n", "3", "--samples", "700", "--seed", "9"])
        .args(["--out", data.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    // The file has 700 rows; shrink the tester stages to fit and loosen the
    // moment tolerance to what 400 samples can honestly resolve.
    let cfg = write(
        dir.path(),
        "g.json",
        &format!(
            r#"{{"mode":"gauss_pair","seed":9,"params":{{"dataset":{:?},
                "overrides":{{"tail_samples":200,"n2":400,"moment_tol":0.75,"delta":2}}}}}}"#,
            data.to_str().unwrap()
        ),
    );
    let out = tlkit().args(["run", "--config", cfg.to_str().unwrap()]).output().unwrap();
    let report = run_ok(&out);
    assert_eq!(report["accept_rate"], 1.0);
    // Finite file data: no fresh holdout is available.
    assert!(report["mean_holdout_error"].is_null());
    assert!(report["learn_reports"][0]["train_01"].as_f64().unwrap() <= 0.2);
}

#[test]
fn ingest_reports_row_and_column_on_bad_data() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "bad.csv", "x1,x2,y\n0.5,1.0,1\n0.1,oops,-1\n");
    let cfg = write(
        dir.path(),
        "g.json",
        &format!(
            r#"{{"mode":"gauss_pair","seed":1,"params":{{"n":2,"dataset":{:?}}}}}"#,
            data.to_str().unwrap()
        ),
    );
    let out = tlkit().args(["run", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 3") && err.contains("x2"), "stderr: {err}");
}

#[test]
fn ingest_maps_zero_one_labels_only_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "zo.csv", "x1,x2,y\n0.5,1.0,1\n0.1,0.2,0\n");
    let base = format!(
        r#"{{"mode":"gauss_pair","seed":1,"params":{{"n":2,"dataset":{:?}ZO}}}}"#,
        data.to_str().unwrap()
    );
    let strict = write(dir.path(), "strict.json", &base.replace("ZO", ""));
    let out = tlkit().args(["run", "--config", strict.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("label 0"));

    let mapped = write(
        dir.path(),
        "mapped.json",
        &base.replace("ZO", r#","zero_one_labels":true"#),
    );
    let out = tlkit().args(["run", "--config", mapped.to_str().unwrap()]).output().unwrap();
    // Two rows are far too few for the tester; the point is the labels parse.
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(!err.contains("label"), "stderr: {err}");
}

#[test]
fn fool_requires_fooling_mode_and_emits_report() {
    let dir = tempfile::tempdir().unwrap();
    let wrong = write(dir.path(), "w.json", r#"{"mode":"gauss_pair","seed":1}"#);
    let out = tlkit().args(["fool", "--config", wrong.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    let cfg = write(
        dir.path(),
        "f.json",
        r#"{"mode":"fooling","seed":11,"params":{
            "m_support":20000,"n_budget":60,"delta2":0.1,"delta_fool":0.9,
            "alpha":0.05,"domain":"cube","n":16,"seed":11,"trials":4,"holdout":500}}"#,
    );
    let out = tlkit().args(["fool", "--config", cfg.to_str().unwrap()]).output().unwrap();
    let report = run_ok(&out);
    assert!(report["collision_exact"].as_f64().unwrap() > 0.0);
    assert!(report["acceptance_empirical"].as_f64().unwrap() >= 0.0);
}
