use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

const COUNTDOWN: &str = "var x:8;\nx := 0;\nwhile x < 3 do x := x + 1 od\n";
const LOOP: &str = "var x:2;\nwhile true do x := x + 1 od\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_elgot-iter"))
}

fn write(dir: &TempDir, name: &str, src: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, src).unwrap();
    p
}

fn run(args: &[&str]) -> (i32, String, String) {
    let Output { status, stdout, stderr } = bin().args(args).output().unwrap();
    (
        status.code().unwrap(),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s).unwrap_or_else(|e| panic!("{e}: {s}"))
}

#[test]
fn countdown_extensional() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "countdown.whl", COUNTDOWN);
    let (code, out, _) = run(&["run", p.to_str().unwrap(), "--backend", "extensional"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "x = 3");
}

#[test]
fn countdown_intensional_json() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "countdown.whl", COUNTDOWN);
    let (code, out, _) = run(&["run", p.to_str().unwrap(), "--output", "json"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["status"], "converged");
    assert_eq!(v["store"]["x"], 3);
    assert_eq!(v["steps"], 8);
}

#[test]
fn loop_runs_out_of_fuel() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "loop.whl", LOOP);
    let (code, out, _) = run(&["run", p.to_str().unwrap(), "--backend", "intensional", "--fuel", "10"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "UNKNOWN after 10 steps");
    let (code, out, _) = run(&["run", p.to_str().unwrap(), "--backend", "extensional"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "DIVERGES");
}

#[test]
fn initial_values() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "countdown.whl", "var x:8; while x < 3 do x := x + 1 od");
    let (code, out, _) = run(&["run", p.to_str().unwrap(), "--set", "x=7"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "x = 7");
    let (code, _, err) = run(&["run", p.to_str().unwrap(), "--set", "x=300"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn trace_lists_steps() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "countdown.whl", COUNTDOWN);
    let (code, out, _) = run(&["trace", p.to_str().unwrap(), "--fuel", "3"]);
    assert_eq!(code, 0);
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[1].contains("while-guard"), "{out}");
    assert_eq!(lines[3], "UNKNOWN after 3 steps");

    let (_, out, _) = run(&["trace", p.to_str().unwrap(), "--output", "json"]);
    let v = json(&out);
    assert_eq!(v["entries"].as_array().unwrap().len(), 8);
    assert_eq!(v["status"], "converged");
    assert_eq!(v["store"]["x"], 3);
}

#[test]
fn collapse_agrees() {
    let dir = TempDir::new().unwrap();
    for (name, src) in [("countdown.whl", COUNTDOWN), ("loop.whl", LOOP)] {
        let p = write(&dir, name, src);
        let (code, out, _) = run(&["collapse", p.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.starts_with("AGREE\n"), "{out}");
        let (_, out, _) = run(&["collapse", p.to_str().unwrap(), "--output", "json"]);
        assert_eq!(json(&out)["agree"], true);
    }
}

#[test]
fn restriction_suite_json() {
    let (code, out, _) = run(&["laws", "--suite", "restriction", "--max-size", "2", "--output", "json"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["suite"], "restriction");
    assert_eq!(v["failures"], serde_json::json!([]));
    assert!(v["instances"].as_u64().unwrap() > 0);
    assert!(v["elapsed_ms"].is_u64());
}

#[test]
fn all_suites_json_is_an_array() {
    let (code, out, _) = run(&["laws", "--max-size", "1", "--output", "json", "--deterministic"]);
    assert_eq!(code, 0);
    let v = json(&out);
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 10);
    for r in reports {
        assert_eq!(r["failures"], serde_json::json!([]), "{r}");
        assert!(r.get("elapsed_ms").is_none());
        let keys: Vec<_> = r.as_object().unwrap().keys().cloned().collect();
        assert!(keys.iter().all(|k| ["suite", "instances", "failures", "exactness"].contains(&k.as_str())), "{keys:?}");
    }
}

#[test]
fn deterministic_json_is_byte_identical() {
    let args = ["laws", "--suite", "delay", "--seed", "7", "--output", "json", "--deterministic"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    let seq = run(&[&args[..], &["--sequential"]].concat());
    assert_eq!(a.1, seq.1);
}

#[test]
fn budget_overflow_is_a_usage_error() {
    let out = bin()
        .args(["laws", "--suite", "restriction", "--max-size", "3"])
        .env("ELGOT_ITER_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn errors_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "bad.whl", "var x:2; x := y");
    let (code, _, err) = run(&["run", p.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("undeclared variable `y`"), "{err}");

    let missing = dir.path().join("missing.whl");
    assert_eq!(run(&["run", missing.to_str().unwrap()]).0, 2);
    assert_eq!(run(&["laws", "--suite", "nonsense"]).0, 2);
    assert_eq!(run(&["run"]).0, 2);
    assert_eq!(run(&["laws", "--max-size", "0"]).0, 2);
}
