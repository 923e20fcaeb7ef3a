use std::process::{Command, Output};

use serde_json::Value;

fn indinet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_indinet"))
        .args(args)
        .env_remove("INDINET_MAX_PERMANENT_DIM")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = indinet(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

#[test]
fn run_reports_exact_probabilities() {
    let f = json(&["run", "fermionic_shared", "--pairs", "2"]);
    assert_eq!(f["probability"], "2/9");
    assert_eq!(f["fidelity_psi_minus"], "1");
    assert_eq!(f["branches"][0]["final_ab_label"], "Psi-");
    assert_eq!(json(&["run", "separated", "-N", "2"])["probability"], "1/4");
    assert_eq!(json(&["run", "fermionic_shared", "--pairs", "3"])["probability"], "1/8");
}

#[test]
fn bosonic_run_has_three_equal_branches() {
    let r = json(&["run", "bosonic_shared", "--pairs", "2", "--mode", "enumerate"]);
    assert_eq!(r["probability"], "6/25");
    let branches = r["branches"].as_array().unwrap();
    assert_eq!(branches.len(), 3);
    assert!(branches.iter().all(|b| b["probability"] == "1/3"));
    let labels: Vec<_> = branches.iter().map(|b| b["final_ab_label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["Psi+", "Phi+", "Phi-"]);
}

#[test]
fn output_is_byte_deterministic() {
    for args in [
        &["run", "bosonic_shared", "--pairs", "3", "--mode", "sample", "--seed", "11"][..],
        &["run", "separated", "--pairs", "3"][..],
        &["sweep", "--n-max", "8"][..],
        &["expand", "bosonic_shared", "--post-select"][..],
    ] {
        assert_eq!(stdout(args), stdout(args), "{args:?}");
    }
    let timed = json(&["run", "separated", "--timing"]);
    assert!(timed["elapsed_ms"].is_number());
    assert!(json(&["run", "separated"]).get("elapsed_ms").is_none());
}

#[test]
fn sweep_rows_and_header() {
    let csv = stdout(&["sweep", "--n-max", "8"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "kind,n,probability_exact,probability_float");
    assert_eq!(lines.len(), 10);
    assert!(lines.contains(&"separated,8,1/16,0.0625"));
    let fermions = stdout(&["sweep", "--kinds", "fermionic_shared", "--n-max", "6"]);
    assert!(fermions.contains("fermionic_shared,6,1/8,0.125"));
    let anchors = json(&["sweep", "--n-max", "4", "--format", "json"]);
    let exact: Vec<_> = anchors
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["probability_exact"].as_str().unwrap())
        .collect();
    assert_eq!(exact, ["1/4", "2/9", "6/25"]);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["sweep", "--n-max", "7"][..],
        &["run", "fermionic_shared", "--statistics", "boson"][..],
        &["run", "separated", "--pairs", "1"][..],
        &["run", "teleport"][..],
        &["verify", "--n-max", "3"][..],
    ] {
        assert_eq!(indinet(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn permanent_bound_can_be_lowered() {
    let out = Command::new(env!("CARGO_BIN_EXE_indinet"))
        .args(["sweep", "--n-max", "8"])
        .env("INDINET_MAX_PERMANENT_DIM", "6")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn expand_term_counts() {
    let count = |args: &[&str]| json(args)["terms"].as_array().unwrap().len();
    assert_eq!(count(&["expand", "fermionic_shared"]), 9);
    assert_eq!(count(&["expand", "separated"]), 16);
    assert_eq!(count(&["expand", "separated", "--statistics", "boson"]), 16);
    let post = json(&["expand", "bosonic_shared", "--post-select"]);
    assert_eq!(post["norm_squared"]["rat"], "6");
    let kets: Vec<String> = post["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["ket"].as_array().unwrap().iter().map(|m| m.as_str().unwrap()).collect())
        .collect();
    assert!(kets.contains(&"A↓M↑M↑B↓".to_string()));
}

#[test]
fn verify_passes_and_detects_tampering() {
    let ok = indinet(&["verify"]);
    assert_eq!(ok.status.code(), Some(0));
    let text = String::from_utf8(ok.stdout).unwrap();
    assert!(!text.contains("FAIL"));
    assert!(text.ends_with("0 failed\n"));

    let bad = indinet(&["verify", "--n-max", "4", "--chain-overlap", "1/3"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8(bad.stdout).unwrap();
    assert!(text.contains("FAIL closed form fermionic_shared n=4"));
    assert!(text.contains("FAIL closed form bosonic_shared n=4"));
    assert!(text.contains("PASS closed form separated n=4"));
}
