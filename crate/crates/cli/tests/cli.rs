use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn rankloss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankloss")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(rankloss(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(rankloss(&["--help"]).status.code(), Some(0));
    assert_eq!(rankloss(&["certify", "/no/such/file.json"]).status.code(), Some(3));
    assert_eq!(rankloss(&["certify", &fixture("E1.json"), "--tau", "99"]).status.code(), Some(2));
    assert_eq!(rankloss(&["mc-rank", &fixture("E1.json"), "--bits", "0"]).status.code(), Some(2));
    let out = rankloss(&["tim", "scheme", &fixture("T9a.json"), "--n", "9", "--m", "5"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(rankloss(&["tim", "dof", &fixture("E1.json")]).status.code(), Some(3));
}

#[test]
fn report_envelope() {
    let out = rankloss(&["mc-rank", &fixture("E1.json"), "--seed", "3"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["command"], "mc-rank");
    assert_eq!(v["argv"][0], "mc-rank");
    assert!(v["timing_ms"].as_f64().unwrap() >= 0.0);
    assert_eq!(v["result"]["sampled_ranks"].as_array().unwrap().len(), 20);
}

#[test]
fn scheme_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t9a-scheme.json");
    let p = path.to_str().unwrap();
    let out = rankloss(&["tim", "scheme", &fixture("T9a.json"), "--scheme-out", p]);
    assert!(out.status.success());
    assert_eq!(json(&out)["result"]["m"], 4);
    let out = rankloss(&["tim", "verify", &fixture("T9a.json"), p]);
    assert!(out.status.success());
    assert_eq!(json(&out)["result"]["decodability"]["all_decodable"], true);
    let norm = dir.path().join("normalized.json");
    let out = rankloss(&["tim", "normalize", &fixture("T9a.json"), p, "--scheme-out", norm.to_str().unwrap()]);
    assert!(out.status.success());
    let before: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let after: Value = serde_json::from_str(&std::fs::read_to_string(&norm).unwrap()).unwrap();
    assert_eq!(before, after);
}

#[test]
fn out_flag_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = rankloss(&["tim", "dof", &fixture("T6.json"), "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
    assert_eq!(json(&out)["result"]["chi_regular"], 3);
}
