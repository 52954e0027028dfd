#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use vbcomp::cli::Flags;
use vbcomp::commands::Outcome;
use vbcomp::config::RunConfig;
use vbcomp::report::Format;

/// Deterministic linear data: `y = 1 + 2 x1 + 0 x2 + noise`.
pub fn write_linear_csv(dir: &Path, n: usize) -> PathBuf {
    let mut s = String::from("y,x1,x2\n");
    for i in 0..n {
        let x1 = (i as f64 * 0.731).sin();
        let x2 = (i as f64 * 1.379).cos();
        let e = 0.5 * (i as f64 * 2.113).sin() + 0.3 * (i as f64 * 0.177).cos();
        writeln!(s, "{},{x1},{x2}", 1.0 + 2.0 * x1 + e).unwrap();
    }
    let p = dir.join("linear.csv");
    std::fs::write(&p, s).unwrap();
    p
}

pub fn flags(data: &Path) -> Flags {
    Flags {
        data: Some(data.to_path_buf()),
        response: Some("y".into()),
        workers: Some(2),
        ..Flags::default()
    }
}

pub fn with_format(mut f: Flags, format: Format) -> Flags {
    f.format = Some(format);
    f
}

pub fn run(cmd: fn(&RunConfig) -> vbcomp::error::Result<Outcome>, f: &Flags) -> Outcome {
    cmd(&RunConfig::from_flags(f).unwrap()).unwrap()
}

pub fn schema() -> serde_json::Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schemas/report-v1.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn assert_valid(doc: &serde_json::Value) {
    let schema = schema();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
}

/// Agreement to `digits` significant digits.
pub fn close(a: f64, b: f64, digits: i32) -> bool {
    a == b || (a - b).abs() <= 10f64.powi(-digits) * a.abs().max(b.abs())
}
