//! Runs an experiment spec and writes its report directory.
//!
//! cargo run --example experiment -- [spec.json] [out-dir]

use std::path::PathBuf;

use invsieve::experiment::{run_experiment, ExperimentSpec};

const DEFAULT_SPEC: &str = r#"{
  "generator": {"type": "polynomial-image", "coordinates": [{"2": 1, "1": 3}], "domain": [-60, 60]},
  "stages": ["audit", "occupancy", "generic", "characteristic", "reconstruct"],
  "expect": "Structured",
  "seed": 1
}"#;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let text = match args.get(1).filter(|p| !p.is_empty()) {
        Some(path) => std::fs::read_to_string(path).expect("readable spec"),
        None => DEFAULT_SPEC.to_string(),
    };
    let out = PathBuf::from(args.get(2).map(String::as_str).unwrap_or("out/example"));
    let spec = ExperimentSpec::from_json_str(&text).unwrap();
    let run = run_experiment(&spec).unwrap();
    run.write_to(&out).unwrap();
    for a in &run.assertions {
        println!("{a:?}");
    }
    println!("passed: {}, report in {}", run.passed(), out.display());
}
