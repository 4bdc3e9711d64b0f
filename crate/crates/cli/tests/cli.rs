use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pdtoda(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdtoda"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn random_state_is_reproducible() {
    let a = pdtoda(&["random-state", "--nm", "4,2", "--seed", "9"]);
    let b = pdtoda(&["random-state", "--nm", "4,2", "--seed", "9"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let s = json(&a);
    assert_eq!((s["N"].as_u64(), s["M"].as_u64()), (Some(4), Some(2)));
}

#[test]
fn random_states_pass_the_degree_profile() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..100 {
        let out = pdtoda(&["random-state", "--nm", "4,2", "--seed", &seed.to_string()]);
        let p = write(dir.path(), "s.json", std::str::from_utf8(&out.stdout).unwrap());
        let out = pdtoda(&["spectrum", "--input", &p]);
        assert!(out.status.success(), "seed {seed}");
        assert_eq!(json(&out)["genus"], 4);
    }
}

#[test]
fn single_site_is_a_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "s.json", r#"{"N":1,"M":1,"t":0,"V":["1"],"I":[["2"]]}"#);
    let out = pdtoda(&["simulate", "--input", &p, "--steps", "4"]);
    assert!(out.status.success());
    let states = json(&out)["states"].as_array().unwrap().clone();
    assert_eq!(states.len(), 5);
    for f in &states {
        assert_eq!(f["state"]["V"], states[0]["state"]["V"]);
        assert_eq!(f["state"]["I"], states[0]["state"]["I"]);
    }
}

#[test]
fn replay_from_the_middle_matches() {
    let dir = tempfile::tempdir().unwrap();
    let s = pdtoda(&["random-state", "--nm", "3,2", "--seed", "4"]);
    let p = write(dir.path(), "s.json", std::str::from_utf8(&s.stdout).unwrap());
    let full = json(&pdtoda(&["simulate", "--input", &p, "--steps", "10"]));
    let frames = full["states"].as_array().unwrap();
    let c0 = &frames[0]["conserved"];
    assert!(frames.iter().all(|f| &f["conserved"] == c0));
    let mid = write(dir.path(), "mid.json", &frames[5]["state"].to_string());
    let tail = json(&pdtoda(&["simulate", "--input", &mid, "--steps", "5"]));
    assert_eq!(tail["states"].as_array().unwrap()[..], frames[5..]);
}

#[test]
fn divisor_degrees_follow_the_genus() {
    let dir = tempfile::tempdir().unwrap();
    let s = pdtoda(&["random-state", "--nm", "3,1", "--seed", "2"]);
    let p = write(dir.path(), "s.json", std::str::from_utf8(&s.stdout).unwrap());
    let out = pdtoda(&["divisor", "--input", &p, "--steps", "3"]);
    assert!(out.status.success());
    let rep = json(&out);
    assert_eq!(rep["g"], 2);
    for step in rep["steps"].as_array().unwrap() {
        assert_eq!(step["roots"].as_array().unwrap().len(), 2);
    }
}

#[test]
fn appendix_suite_dispatches() {
    let out = pdtoda(&["verify", "--suite", "appendix", "--thin", "25"]);
    assert!(out.status.success());
    let rep = json(&out);
    let checks = rep["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["suite"] == "appendix" && c["pass"] == true));
}

#[test]
fn thinned_verify_is_byte_identical() {
    let args = ["verify", "--suite", "all", "--seed", "42", "--thin", "10"];
    let a = pdtoda(&args);
    let b = pdtoda(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn corrupted_beta_fails_with_a_dump() {
    let out = pdtoda(&["verify", "--suite", "appendix", "--thin", "25", "--corrupt-beta", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let rep = json(&out);
    let c = rep["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "appendix.second_row")
        .unwrap();
    assert_eq!(c["pass"], false);
    assert!(c["counterexample"]["V"].is_array());
    assert!(c["detail"].as_str().unwrap().contains("(N, M)"));
}

#[test]
fn theta_check_passes_and_rejects_other_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let s = pdtoda(&["random-state", "--nm", "2,1", "--seed", "11"]);
    let p = write(dir.path(), "s.json", std::str::from_utf8(&s.stdout).unwrap());
    let out = pdtoda(&["theta-check", "--input", &p]);
    assert!(out.status.success());
    let rep = json(&out);
    assert_eq!(rep["rows"].as_array().unwrap().len(), 22);
    let q = pdtoda(&["random-state", "--nm", "3,1", "--seed", "11"]);
    let p = write(dir.path(), "q.json", std::str::from_utf8(&q.stdout).unwrap());
    assert_eq!(pdtoda(&["theta-check", "--input", &p]).status.code(), Some(2));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{ not json");
    assert_eq!(pdtoda(&["simulate", "--input", &bad]).status.code(), Some(2));
    let invalid = write(dir.path(), "inv.json", r#"{"N":2,"M":1,"t":0,"V":["2","2"],"I":[["1","3"]]}"#);
    let out = pdtoda(&["simulate", "--input", &invalid]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("prod V = 4"));
    assert_eq!(pdtoda(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(pdtoda(&["random-state", "--nm", "4"]).status.code(), Some(2));
}

#[test]
fn homogeneous_theta_input_is_numeric_failure() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "h.json", r#"{"N":2,"M":1,"t":0,"V":["1","1"],"I":[["3","3"]]}"#);
    assert_eq!(pdtoda(&["theta-check", "--input", &p]).status.code(), Some(3));
}
