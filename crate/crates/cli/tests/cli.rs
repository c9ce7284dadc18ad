use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use shiftlab_cli::catalog::presets;
use shiftlab_cli::ExperimentConfig;

fn shiftlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shiftlab")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, config: Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, config.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

fn quick() -> Value {
    json!({ "trials": 10, "resolution": 256 })
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn block_method_run_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "b.json", json!({
        "seed": 3,
        "construction": { "type": "BLOCK_METHOD", "p": [2, 4] },
        "checks": quick(),
    }));
    let out = shiftlab(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["passed"], true);
    assert_eq!(r["config"]["seed"], 3);
    let ids: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["check_id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["isometry", "range_images", "range_witness", "round_trip", "kernel", "orbit_identity", "orbit_density", "generators"]);
    let generators = &r["checks"][7];
    assert_eq!(generators["verdict"], "2_GENERATED");
}

#[test]
fn unit_sum_composition_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", json!({
        "construction": { "type": "COMPOSITION", "delta": [0.5, 0.5], "period": 1 },
    }));
    let out = shiftlab(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(δ₁+δ₂)^1 = 1"));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_and_io_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(shiftlab(&["run", dir.path().join("missing.json").to_str().unwrap()]).status.code(), Some(2));
    let bad = write_config(dir.path(), "bad.json", json!({ "construction": { "type": "BLOCK_METHOD", "p": [2, 6] } }));
    assert_eq!(shiftlab(&["run", &bad]).status.code(), Some(2));
    let unknown = write_config(dir.path(), "u.json", json!({ "construction": { "type": "GOLDEN_ARC_MODEL", "colour": 1 } }));
    assert_eq!(shiftlab(&["run", &unknown]).status.code(), Some(2));
    assert_eq!(shiftlab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn parity_counterexample_reports_its_witness() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p.json", json!({
        "construction": { "type": "COUNTEREXAMPLE", "which": "PARITY" },
    }));
    let out = shiftlab(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["construction"], "COUNTEREXAMPLE:PARITY");
    assert_eq!(r["checks"][0]["verdict"], "NOT_A_SHIFT witness verified");
    assert!(r["checks"][0]["metric"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn csv_has_one_row_per_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "g.json", json!({
        "construction": { "type": "GOLDEN_ARC_MODEL", "degree": 8 },
        "checks": quick(),
    }));
    let out_dir = dir.path().join("out");
    let out = shiftlab(&["run", &cfg, "--format", "csv", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(out_dir.join("report.csv")).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["check_id", "construction", "verdict", "metric", "tolerance", "elapsed_ms"]
    );
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r[3].parse::<f64>().is_ok()));
}

#[test]
fn report_without_checks_is_valid_json() {
    let cfg = ExperimentConfig::from_json(r#"{"construction": {"type": "COUNTEREXAMPLE", "which": "FIXED_POINT"}}"#).unwrap();
    let report = shiftlab_cli::RunReport::new(cfg, Vec::new());
    let v: Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(v["checks"], json!([]));
    assert_eq!(v["passed"], true);
    let csv = report.to_csv().unwrap();
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn spectrum_plot_is_nonincreasing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", json!({
        "construction": { "type": "COMPOSITION", "delta": [0.25, 0.25], "period": 2 },
        "checks": quick(),
    }));
    let out_dir = dir.path().join("out");
    let out = shiftlab(&["run", &cfg, "--out", out_dir.to_str().unwrap(), "--emit-plots"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(out_dir.join("plots/kernel_spectrum.dat")).unwrap();
    let values: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(values.len() > 1);
    assert!(values.windows(2).all(|w| w[0] >= w[1]));
    let orbit = std::fs::read_to_string(out_dir.join("plots/orbit_density_orbit_1.dat")).unwrap();
    assert!(orbit.starts_with("# iterations coverage"));
}

fn without_timing(mut v: Value) -> Value {
    for c in v["checks"].as_array_mut().unwrap() {
        c.as_object_mut().unwrap().remove("elapsed_ms");
    }
    v
}

#[test]
fn runs_are_deterministic_and_parallel_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "x.json", json!({
        "seed": 11,
        "construction": { "type": "COMPLEX_FAMILY", "n": 2, "degree": 8 },
        "checks": quick(),
    }));
    let a = without_timing(report(&shiftlab(&["run", &cfg])));
    let b = without_timing(report(&shiftlab(&["run", &cfg])));
    let c = without_timing(report(&shiftlab(&["run", &cfg, "--parallel"])));
    assert_eq!(a, b);
    assert_eq!(a, c);
    let d = without_timing(report(&shiftlab(&["run", &cfg, "--seed", "12"])));
    assert_eq!(d["config"]["seed"], 12);
    let metrics = |v: &Value| v["checks"].as_array().unwrap().iter().map(|c| c["metric"].clone()).collect::<Vec<_>>();
    assert_ne!(metrics(&a), metrics(&d));
}

#[test]
fn configs_round_trip() {
    for p in presets() {
        let text = serde_json::to_string(&p.config).unwrap();
        let back = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(back, p.config, "{}", p.name);
    }
    let scalar = ExperimentConfig::from_json(
        r#"{"construction": {"type": "COMPLEX_FAMILY", "n": 2, "z": [[0.0, 0.5], 0.25]}}"#,
    )
    .unwrap();
    let text = serde_json::to_string(&scalar).unwrap();
    assert_eq!(ExperimentConfig::from_json(&text).unwrap(), scalar);
    assert!(ExperimentConfig::from_json(r#"{"construction": {"type": "COMPLEX_FAMILY", "n": 2, "z": [0.6, 0.25]}}"#).is_err());
}

#[test]
fn catalog_lists_and_writes_presets() {
    let out = shiftlab(&["catalog", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), presets().len());
    let dir = tempfile::tempdir().unwrap();
    let out = shiftlab(&["catalog", "--write", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    for p in presets() {
        let path = dir.path().join(format!("{}.json", p.name));
        assert_eq!(ExperimentConfig::load(&path).unwrap(), p.config);
    }
}
