use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

const RECT_NV2: &str = r#"{"degree":[[0,-1],[0,-1],[0,-1],[1,0],[1,0],[0,1],[0,1],[0,1],[-1,0],[-1,0]],"genus":1,"nv":2}"#;

fn broccoli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_broccoli")).args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn stderr_error(o: &Output) -> (String, String) {
    let v: Value = serde_json::from_slice(&o.stderr).expect("stderr is JSON");
    (
        v["error"]["kind"].as_str().unwrap().to_string(),
        v["error"]["message"].as_str().unwrap().to_string(),
    )
}

#[test]
fn compute_rectangle() {
    let o = broccoli(&["compute", "--inline", RECT_NV2]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["invariant"]["terms"]["1"], "2");
    assert_eq!(v["invariant"]["terms"]["0"], "12");
    assert_eq!(v["invariant"]["terms"]["-1"], "2");
    assert_eq!(v["y1"], "16");
    assert_eq!(v["ym1"], "8");
}

#[test]
fn polygon_and_degree_agree() {
    let poly = r#"{"polygon":[[0,0],[3,0],[3,2],[0,2]],"genus":1,"nv":2}"#;
    let a = stdout_json(&broccoli(&["compute", "--inline", poly]));
    let b = stdout_json(&broccoli(&["compute", "--inline", RECT_NV2]));
    assert_eq!(a["invariant"], b["invariant"]);
}

#[test]
fn input_file_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.json");
    let out = dir.path().join("r.json");
    fs::write(&q, RECT_NV2).unwrap();
    let o = broccoli(&["compute", "--input", q.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["y1"], "16");
}

#[test]
fn thread_count_does_not_change_output() {
    let a = broccoli(&["--threads", "1", "compute", "--inline", RECT_NV2]);
    let b = broccoli(&["--threads", "4", "compute", "--inline", RECT_NV2]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn errors_are_json() {
    let bad_count = r#"{"degree":[[0,-1],[0,-1],[0,-1],[1,0],[1,0],[0,1],[0,1],[0,1],[-1,0],[-1,0]],"genus":1,"nv":2,"ne":2}"#;
    let o = broccoli(&["compute", "--inline", bad_count]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_error(&o).0, "InvalidInput");

    let o = broccoli(&["compute", "--inline", RECT_NV2, "--direction", "1,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_error(&o).0, "NotGeneric");

    let o = broccoli(&["--budget", "4", "compute", "--inline", RECT_NV2]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_error(&o).0, "BudgetExceeded");

    let o = broccoli(&["compute", "--inline", "{}", "--input", "x"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_error(&o).0, "InvalidInput");

    let o = broccoli(&["compute", "--input", "/nonexistent/q.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_error(&o).0, "Io");
}

#[test]
fn invariance_check_passes() {
    let o = broccoli(&["check-invariance", "--inline", RECT_NV2, "--directions", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let v = stdout_json(&o);
    assert!(v.is_object());
}

#[test]
fn dump_writes_subdivisions_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("d.json");
    let svg = dir.path().join("d.svg");
    let q = r#"{"degree":[[0,-1],[0,-1],[0,-1],[1,0],[1,0],[1,0],[-1,1],[-1,1],[-1,1]],"nv":0}"#;
    let o = broccoli(&[
        "dump",
        "--inline",
        q,
        "--dump-subdivisions",
        dump.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(&dump).unwrap()).unwrap();
    assert!(!v["curves"].as_array().unwrap().is_empty());
    let s = fs::read_to_string(&svg).unwrap();
    assert!(s.starts_with("<svg") || s.starts_with("<?xml"));
    assert!(s.contains("<polygon") || s.contains("<path"));
}
