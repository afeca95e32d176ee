use std::process::{Command, Output};

use serde_json::Value;

fn strata(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strata")).args(args).output().expect("run strata")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn assert_report_shape(r: &Value) {
    for key in ["check", "inputs", "degrees", "pass", "ms"] {
        assert!(r.get(key).is_some(), "report lacks `{key}`: {r}");
    }
    for row in r["degrees"].as_array().unwrap() {
        assert!(row["k"].is_u64() && row["computed"].is_string(), "bad row {row}");
    }
}

#[test]
fn compute_prints_a_report_and_exits_zero() {
    let out = strata(&["compute", "--space", "rp2", "--theory", "ih", "--perversity", "0", "--ring", "Z"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_report_shape(&r);
    assert_eq!(r["check"], "compute");
    assert_eq!(r["inputs"]["space"], "rp2");
    let computed: Vec<&str> = r["degrees"].as_array().unwrap().iter().map(|d| d["computed"].as_str().unwrap()).collect();
    assert_eq!(computed, ["Z", "Z/2", "0"]);
}

#[test]
fn borel_moore_with_removed_vertex() {
    let out = strata(&["compute", "--space", "s2", "--theory", "bm", "--ring", "Q", "--remove", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let computed: Vec<&str> = r["degrees"].as_array().unwrap().iter().map(|d| d["computed"].as_str().unwrap()).collect();
    assert_eq!(computed, ["0", "0", "Q"]);
}

#[test]
fn passing_check_exits_zero() {
    let out = strata(&["check", "cone", "--space", "s2", "--ring", "Q,Z/2", "--scan-perversity", "0..1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let reports = json(&out);
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 4);
    reports.iter().for_each(assert_report_shape);
    assert!(reports.iter().all(|r| r["pass"] == true));
}

#[test]
fn failing_check_exits_one() {
    let out = strata(&["check", "example38"]);
    assert_eq!(out.status.code(), Some(1));
    let reports = json(&out);
    assert!(reports.as_array().unwrap().iter().any(|r| r["pass"] == false));
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(strata(&["compute", "--space", "s2", "--theory", "nope"]).status.code(), Some(2));
    assert_eq!(strata(&["compute", "--space", "nowhere", "--theory", "ih"]).status.code(), Some(2));
    assert_eq!(strata(&["check", "cone", "--ring", "Z/0"]).status.code(), Some(2));
}

#[test]
fn corpus_lists_and_describes() {
    let out = strata(&["corpus", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let ids: Vec<String> = json(&out).as_array().unwrap().iter().map(|e| e["id"].as_str().unwrap().to_string()).collect();
    assert!(ids.iter().any(|i| i == "susp_rp3_punctured"));

    let out = strata(&["corpus", "describe", "cone_rp2"]);
    assert_eq!(out.status.code(), Some(0));
    let d = json(&out);
    assert_eq!(d["dim"], 3);
    assert_eq!(d["strata"].as_array().unwrap().len(), 2);
}
