use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const CLEAN: &str = r#"{"parameters": ["0", "1/2", "1"], "outcomes": ["0", "1"],
  "kernel": [["1", "0"], ["1/2", "1/2"], ["0", "1"]]}"#;
const NOISY: &str = r#"{"parameters": ["0", "1/2", "1"], "outcomes": ["0", "1"],
  "kernel": [["0.95", "0.05"], ["1/2", "1/2"], ["0.05", "0.95"]]}"#;

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_infoelicit")).args(args).output().unwrap()
}

fn run_paths(head: &[&str], paths: &[&Path]) -> Output {
    let mut args: Vec<String> = head.iter().map(|s| s.to_string()).collect();
    args.extend(paths.iter().map(|p| p.display().to_string()));
    Command::new(env!("CARGO_BIN_EXE_infoelicit")).args(&args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn compare_blackwell_both_ways() {
    let dir = TempDir::new().unwrap();
    let clean = write(&dir, "clean.json", CLEAN);
    let noisy = write(&dir, "noisy.json", NOISY);

    let out = run_paths(&["compare", "blackwell"], &[&clean, &noisy]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["holds"], true);
    assert_eq!(v["witness"]["entries"], serde_json::json!([["19/20", "1/20"], ["1/20", "19/20"]]));

    // A negative answer is still a completed query.
    let out = run_paths(&["compare", "blackwell"], &[&noisy, &clean]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["holds"], false);

    let out = run_paths(&["compare", "elicitation"], &[&noisy, &clean]);
    assert_eq!(stdout_json(&out)["holds"], true);
}

#[test]
fn compare_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let clean = write(&dir, "clean.json", CLEAN);
    let bad = write(&dir, "bad.json", r#"{"parameters": ["a"], "outcomes": ["0"], "kernel": [["1/2"]]}"#);
    let out = run_paths(&["compare", "blackwell"], &[&clean, &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sums to"));

    let out = run_paths(&["compare", "sideways"], &[&clean, &clean]);
    assert!(!out.status.success());
}

#[test]
fn unbiased_and_complete() {
    let dir = TempDir::new().unwrap();
    let clean = write(&dir, "clean.json", CLEAN);
    let stats = write(
        &dir,
        "stats.json",
        r#"{"parameters": ["0", "1/2", "1"], "functions": {"mean": ["0", "1/2", "1"], "square": ["0", "1/4", "1"]}}"#,
    );
    let out = run_paths(&["unbiased"], &[&clean, &stats]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["mean"]["elicitable"], true);
    assert_eq!(v["square"]["elicitable"], false);

    let out = run_paths(&["complete"], &[&clean]);
    let v = stdout_json(&out);
    assert_eq!(v["full_belief_elicitable"], false);
    assert_eq!(v["min_copies"], 2);
}

#[test]
fn ic_verify_quadratic() {
    let dir = TempDir::new().unwrap();
    let mech = write(&dir, "mech.json", &format!(r#"{{"kind": "quadratic_panel", "experiment": {CLEAN}}}"#));
    let out = run_paths(&["ic-verify", "--d", "4"], &[&mech]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["incentive_compatible"], true);
    assert_eq!(v["elicits_target"], true);
}

#[test]
fn demo_reports() {
    let out = run(&["demo", "german_tank", "--param", "n_max=4"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["demo"], "german_tank");
    assert_eq!(v["inputs"]["n_max"], 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("3 claims, 0 failed"));

    let out = run(&["demo", "regression", "--param", "covariates=2;2"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["demo", "german_tank", "--param", "depth=3"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["demo", "tanks"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_claim_exits_nonzero() {
    // The n·MISE spread claim does not hold for the exponential density.
    let out = run(&["demo", "density", "--param", "densities=exp"]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    let failed: Vec<&str> = v["claims"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["description"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["[exp] n·MISE stays within a factor 10 of its median"]);
}
