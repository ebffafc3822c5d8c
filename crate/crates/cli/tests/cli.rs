use serde_json::Value;
use std::io::Write;
use std::process::{Command, Output, Stdio};

const EXAMPLE: &str = r#"{"amplitudes":{"0100":"2","1101":"1","1111":"4","0010":"3"}}"#;
const GHZ: &str = r#"{"0000":"1","1111":"1"}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qslocc4")).args(args).output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn classify_inline() {
    let o = run(&["classify", "--inline", EXAMPLE]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["label"], "L_aa0_2");
    assert_eq!(v["case_path"][1], "3(c)");
}

#[test]
fn classify_pretty() {
    let o = run(&["classify", GHZ, "--format", "pretty"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("type [G_abcd; a=b=0, c=d]"), "{text}");
    assert!(text.contains("parameters"));
}

#[test]
fn classify_from_stdin_and_file() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qslocc4"))
        .args(["classify", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(GHZ.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(json(&o)["label"], "G_00aa");

    let path = std::env::temp_dir().join(format!("qslocc4-cli-{}.json", std::process::id()));
    std::fs::write(&path, EXAMPLE).unwrap();
    let o = run(&["classify", path.to_str().unwrap(), "--backend", "float"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(json(&o)["label"], "L_aa0_2");
}

#[test]
fn batch_keeps_order_and_reports_errors() {
    let path = std::env::temp_dir().join(format!("qslocc4-batch-{}.jsonl", std::process::id()));
    std::fs::write(&path, format!("{GHZ}\n{{\"0000\":\"x\"}}\n{EXAMPLE}\n")).unwrap();
    let o = run(&["classify", "--batch", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(2));
    let lines: Vec<Value> =
        String::from_utf8(o.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["label"], "G_00aa");
    assert!(lines[1]["error"].is_string());
    assert_eq!(lines[2]["label"], "L_aa0_2");
}

#[test]
fn gen_round_trips() {
    let o = run(&["gen", "G", "1", "0", "0", "1"]);
    assert!(o.status.success());
    let state = String::from_utf8(o.stdout).unwrap();
    let v = json(&run(&["classify", "--inline", state.trim()]));
    assert_eq!(v["label"], "G_00aa");

    let o = run(&["gen", "L_abc2", "1", "-2", "--spec", "c=b"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(run(&["gen", "L_abc2", "1"]).status.code() == Some(2));
    assert!(run(&["gen", "nonsense", "1"]).status.code() == Some(2));
}

#[test]
fn invariants_and_strata() {
    let v = json(&run(&["invariants", "--inline", GHZ]));
    assert_eq!(v["invariants"]["B"], "1");
    assert_eq!(v["quartics"].as_array().unwrap().len(), 3);
    assert_eq!(v["nilpotent"], false);
    let v = json(&run(&["strata", "--inline", GHZ]));
    assert_eq!(v["so8_holds"], true);
    assert_eq!(v["chain_respected"], true);
    assert_eq!(v["stratum"]["dual"], true);
}

#[test]
fn equiv_verdicts() {
    let moved = r#"{"0011":"5","1100":"5"}"#;
    let v = json(&run(&["equiv", GHZ, moved]));
    assert_eq!(v["equivalent"], true);
    let v = json(&run(&["equiv", GHZ, EXAMPLE]));
    assert_eq!(v["equivalent"], false);
    let nil = r#"{"0000":"1"}"#;
    let v = json(&run(&["equiv", nil, r#"{"0001":"1"}"#]));
    assert!(v["equivalent"].is_null());
    assert_eq!(v["verdict"], "undecided");
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["known_conflicts"][0]["row"], "L_00c2");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["classify", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "/nonexistent/state.json"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--inline", r#"{"0000":"1/0"}"#]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--inline", r#"{"0000":"0"}"#]).status.code(), Some(2));
    assert_eq!(run(&["classify"]).status.code(), Some(2));
}
