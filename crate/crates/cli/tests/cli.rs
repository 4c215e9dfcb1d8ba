use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qidlab(dir: &Path, args: &[&str]) -> (Output, Option<Value>) {
    let out = dir.join("report.json");
    let _ = std::fs::remove_file(&out);
    let output = Command::new(env!("CARGO_BIN_EXE_qidlab"))
        .args(args)
        .arg("--out")
        .arg(&out)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    let report = std::fs::read_to_string(&out)
        .ok()
        .map(|t| serde_json::from_str(&t).expect("report is JSON"));
    (output, report)
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const BIT: &str = r#"{"alphabet_size": 2, "dim": 2, "signals": [
  [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
  [[[0, 0], [0, 0]], [[0, 0], [1, 0]]]
]}"#;

#[test]
fn valid_channel_summary() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "bit.json", BIT);
    let (out, report) = qidlab(tmp.path(), &["validate-channel", "bit.json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = report.unwrap();
    assert_eq!(report["status"], "ok");
    assert_eq!(report["payload"]["alphabet_size"], 2);
    assert_eq!(report["payload"]["dim"], 2);
    assert!(report["inputs"]["channel"]["sha256"].as_str().unwrap().len() == 64);
}

#[test]
fn trace_error_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "bad.json",
        r#"{"signals": [[[[1.1, 0], [0, 0]], [[0, 0], [0, 0]]]]}"#,
    );
    let (out, report) = qidlab(tmp.path(), &["validate-channel", "bad.json"]);
    assert_eq!(out.status.code(), Some(1));
    let report = report.unwrap();
    assert_eq!(report["status"], "error");
    assert_eq!(report["error"]["kind"], "TraceNotOne");
    assert_eq!(report["error"]["stage"], "channel");
}

#[test]
fn malformed_json_reports_location() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "broken.json", "{\n  \"signals\": [\n    oops\n  ]\n}");
    let (out, report) = qidlab(tmp.path(), &["validate-channel", "broken.json"]);
    assert_eq!(out.status.code(), Some(1));
    let message = report.unwrap()["error"]["message"].as_str().unwrap().to_string();
    assert!(message.contains("line 3"), "{message}");
}

#[test]
fn unknown_config_key_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "cfg.json", r#"{"m": 10, "lamda": 0.5}"#);
    let (out, _) = qidlab(tmp.path(), &["build-family", "--config", "cfg.json"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("lamda"), "{stderr}");
}

#[test]
fn unmet_precondition_is_a_stage_error() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "bit.json", BIT);
    write(
        tmp.path(),
        "cfg.json",
        r#"{"channel": "bit.json", "n": 3, "m": 8, "epsilon": 0.5, "lambda1": 0.25, "lambda2": 0.5, "enforce_precondition": true}"#,
    );
    let (out, report) = qidlab(tmp.path(), &["build-id-code", "--config", "cfg.json"]);
    assert_eq!(out.status.code(), Some(1));
    let report = report.unwrap();
    assert_eq!(report["error"]["stage"], "family");
    assert_eq!(report["error"]["kind"], "PrerequisiteNotVerified");
}

#[test]
fn separation_rejects_large_error_sum() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "bit.json", BIT);
    write(
        tmp.path(),
        "build.json",
        r#"{"channel": "bit.json", "n": 3, "m": 8, "set_size": 3, "lambda1": 0.4, "lambda2": 0.8, "id_code_out": "id.json"}"#,
    );
    let (out, _) = qidlab(tmp.path(), &["build-id-code", "--config", "build.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    write(
        tmp.path(),
        "sep.json",
        r#"{"channel": "bit.json", "id_code_file": "id.json", "lambda1": 0.4, "lambda2": 0.6}"#,
    );
    let (out, report) = qidlab(tmp.path(), &["separation", "--config", "sep.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report.unwrap()["error"]["kind"], "PrerequisiteNotVerified");
}

#[test]
fn orthogonal_capacity_is_one_bit() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "bit.json", BIT);
    write(tmp.path(), "cfg.json", r#"{"channel": "bit.json"}"#);
    let (out, report) = qidlab(tmp.path(), &["capacity", "--config", "cfg.json"]);
    assert_eq!(out.status.code(), Some(0));
    let c = report.unwrap()["payload"]["capacity"].as_f64().unwrap();
    assert!((c - 1.0).abs() < 1e-6, "{c}");
}

#[test]
fn point_mass_resolves_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "bit.json", BIT);
    write(
        tmp.path(),
        "cfg.json",
        r#"{"channel": "bit.json", "n": 2, "input": {"kind": "point", "word": [1, 2]}, "ladder": [1, 8], "trials": 4}"#,
    );
    let (out, report) = qidlab(tmp.path(), &["resolvability", "--config", "cfg.json"]);
    assert_eq!(out.status.code(), Some(0));
    for row in report.unwrap()["payload"]["ladder"].as_array().unwrap() {
        assert_eq!(row["max"].as_f64(), Some(0.0));
    }
}

#[test]
fn bad_tolerance_override() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "bit.json", BIT);
    let (out, _) = qidlab(tmp.path(), &["validate-channel", "bit.json", "--tolerance", "nonsense=1"]);
    assert_eq!(out.status.code(), Some(1));
    let (out, report) = qidlab(
        tmp.path(),
        &["validate-channel", "bit.json", "--tolerance", "validation=1e-6"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report.unwrap()["settings"]["tolerances"]["validation"].as_f64(), Some(1e-6));
}

#[test]
fn missing_subcommand_is_usage_error() {
    let output = Command::new(env!("CARGO_BIN_EXE_qidlab")).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}
