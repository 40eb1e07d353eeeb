use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_subsetspace"))
}

fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json_out(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn golden_generic_sample() {
    let out = bin().args(["sample", "--stratum", "generic", "--n", "3", "--dim", "1", "--seed", "42"]).output().unwrap();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/generic_seed42_n3_d1.json");
    assert_eq!(json_out(&out), serde_json::from_str::<Value>(&std::fs::read_to_string(golden).unwrap()).unwrap());
}

#[test]
fn verify_writes_a_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let report = dir.path().join("report.json");
    std::fs::write(&cfg, r#"{"samples": 200, "n": 4, "p": "inf"}"#).unwrap();
    let out = bin().args(["verify", "delta-2lip", "--config"]).arg(&cfg).arg("--out").arg(&report).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("[PASS] delta-2lip"));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    for field in ["suite", "anchors", "config", "checks", "runtime_ms"] {
        assert!(r.get(field).is_some(), "missing {field}");
    }
    let check = &r["checks"][0];
    assert_eq!(check["name"], "delta-2lip");
    assert_eq!(check["samples"], 200);
    assert_eq!(check["pass"], true);
    assert!(!check["anchor"].as_str().unwrap().is_empty());
    assert_eq!(r["config"]["p"], "inf");
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"samples": 100, "n": 3}"#).unwrap();
    let a = bin().args(["verify", "relations", "--config"]).arg(&cfg).output().unwrap();
    let b = bin().args(["verify", "relations", "--config"]).arg(&cfg).env("RAYON_NUM_THREADS", "1").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_failure_and_errors_set_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"samples": 50, "tolerances": {"diam-2lip": -1.0}}"#).unwrap();
    let failing = bin().args(["verify", "diam-2lip", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(failing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&failing.stderr).contains("[FAIL] diam-2lip"));

    let unknown = bin().args(["verify", "no-such-suite"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("unknown suite"));

    std::fs::write(&cfg, r#"{"samplez": 50}"#).unwrap();
    let bad = bin().args(["verify", "diam-2lip", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn suites_lists_groups() {
    let out = bin().arg("suites").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for s in ["delta-2lip", "quasigeodesic-modulus", "spaced-sharpness", "normed-core", "flow", "all"] {
        assert!(text.lines().any(|l| l == s), "{s} not listed");
    }
}

#[test]
fn retract_reads_stdin() {
    let r2 = json_out(&run_with_stdin(&["retract", "r2"], r#"{"n": 2, "p": 2, "points": [[0, 0], [2, 4]]}"#));
    assert_eq!(r2["points"], serde_json::json!([[1.0, 2.0]]));
    assert_eq!(r2["n"], 1);

    let flow = json_out(&run_with_stdin(&["retract", "flow"], r#"{"n": 3, "p": 2, "points": [[-1], [0], [1]]}"#));
    assert_eq!(flow["n"], 2);
    assert!(flow["points"][0][0].as_f64().unwrap().abs() < 1e-6);

    for map in ["r3", "rn2", "selector"] {
        let out = json_out(&run_with_stdin(&["retract", map], r#"{"n": 3, "p": 2, "points": [[0, 0], [1, 0], [0, 1]]}"#));
        assert!(out["points"].as_array().unwrap().len() <= 2);
    }

    let err = run_with_stdin(&["retract", "r2"], r#"{"n": 3, "p": 2, "points": [[0], [1], [2]]}"#);
    assert_eq!(err.status.code(), Some(2));
}

#[test]
fn path_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("path.json");
    let input = r#"{"x": {"n": 3, "p": 2, "points": [[0], [3], [5]]}, "y": {"n": 3, "p": 2, "points": [[-1], [1], [4]]}}"#;
    let o = run_with_stdin(&["path", "quasigeodesic", "--out", out.to_str().unwrap()], input);
    assert!(o.status.success());
    let path: subsetspace::path::QuasiPath = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(path.legs().len(), 2);
    assert_eq!(subsetspace::path_length(&path, 512).unwrap(), 2.0);

    let g = json_out(&run_with_stdin(&["path", "geodesic"], input));
    assert_eq!(g["legs"].as_array().unwrap().len(), 1);
}

#[test]
fn flow_run_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = bin()
        .args(["flow", "run", "--n", "4", "--dim", "2", "--p", "2", "--eps-coll", "1e-9", "--theta", "0.05", "--trace"])
        .arg(&trace)
        .output()
        .unwrap();
    let v = json_out(&out);
    let t = v["collision_time"].as_f64().unwrap();
    assert!(t > 0.0);
    assert_eq!(v["retract"]["n"], 3);
    let mut rdr = csv::Reader::from_path(&trace).unwrap();
    let header = rdr.headers().unwrap().clone();
    assert_eq!(&header[0], "t");
    assert_eq!(&header[1], "delta");
    assert_eq!(header.len(), 2 + 4 * 2);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert!(rows.len() > 2);
    let first_delta: f64 = rows[0][1].parse().unwrap();
    let last_delta: f64 = rows.last().unwrap()[1].parse().unwrap();
    assert!(last_delta < first_delta);

    let tight = bin().args(["flow", "run", "--max-steps", "3"]).output().unwrap();
    assert_eq!(tight.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&tight.stderr).contains("did not terminate"));
}

#[test]
fn estimate_dumps_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let csv_path = dir.path().join("ratios.csv");
    std::fs::write(&cfg, r#"{"samples": 50, "n": 2, "dim": 3}"#).unwrap();
    let out = bin().args(["estimate", "r2", "--config"]).arg(&cfg).arg("--csv").arg(&csv_path).output().unwrap();
    let v = json_out(&out);
    assert!(v["max_ratio"].as_f64().unwrap() <= 1.0 + 1e-9);
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert!(text.starts_with("pair_id,d_H_in,d_H_out,ratio,bound,stratum\n"));
}
