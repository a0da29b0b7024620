use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invsieve")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn heights_of_a_projective_point() {
    let out = run(&["heights", "--point", r#"["1/2", "3"]"#]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["height"], "6");
    assert_eq!(v["lift"], serde_json::json!(["1", "6"]));
}

#[test]
fn primes_over_f2t() {
    let out = run(&["--field", "F2T", "primes", "--bound", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    // T, T+1, T^2+T+1, T^3+T+1, T^3+T^2+1
    assert!(text.contains("T^3"), "{text}");
}

#[test]
fn siegel_returns_a_kernel_vector() {
    let out = run(&["siegel", "--system", "[[1, 2, 3]]"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let c: Vec<i64> = v["vector"].as_array().unwrap().iter().map(|x| x.as_str().unwrap().parse().unwrap()).collect();
    assert_eq!(c[0] + 2 * c[1] + 3 * c[2], 0);
    assert_eq!(v["within_bound"], true);
}

#[test]
fn noether_on_the_pythagorean_conic() {
    let out = run(&["noether", "--conic", "pythagorean", "--samples", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn sunit_reduction() {
    let out = run(&["lift", "--primes", "2,3", "--targets", "1,2,0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["distance"].as_f64().unwrap() <= v["covering_constant"].as_f64().unwrap());
}

#[test]
fn unknown_field_is_a_usage_error() {
    let out = run(&["--field", "Z", "primes", "--bound", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "Parse");
}

#[test]
fn bad_flags_exit_with_two() {
    assert_eq!(run(&["primes"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn sieve_audit_from_a_generator() {
    let out = run(&[
        "--seed",
        "3",
        "sieve-audit",
        "--generator",
        r#"{"type":"random-uniform","dim":2,"size":40,"N":"1000"}"#,
        "--Q",
        "30",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["audit"]["holds"], true);
    assert_eq!(v["audit"]["identity_exact"], true);
}

#[test]
fn experiment_writes_its_report() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"generator": {"type": "polynomial-image", "coordinates": [{"2": 1, "0": 1}], "domain": [-40, 40]},
            "stages": ["audit", "occupancy", "reconstruct"], "expect": "Structured"}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&["--out", out_dir.to_str().unwrap(), "experiment", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    for name in ["report.json", "events.jsonl", "timings.json", "tables/audit.csv", "tables/occupancy.csv"] {
        assert!(out_dir.join(name).exists(), "missing {name}");
    }
    let report: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert!(report["content_hash"].as_str().is_some_and(|h| h.len() == 64));
}

#[test]
fn failed_assertion_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"generator": {"type": "polynomial-image", "coordinates": [{"2": 1}], "domain": [-40, 40]},
            "stages": ["reconstruct"], "expect": "NoStructureFound"}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&["--out", out_dir.to_str().unwrap(), "experiment", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
}
