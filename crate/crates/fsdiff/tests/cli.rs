use std::path::Path;
use std::process::{Command, Output};

use fsdiff_core::fsdist::pdf;
use fsdiff_core::FsParams;
use serde_json::Value;

fn fsdiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsdiff")).args(args).output().unwrap()
}

fn fsdiff_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsdiff")).args(args).env(key, val).output().unwrap()
}

fn ok(o: &Output) {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
}

fn envelope(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().last().expect("error envelope on stderr");
    serde_json::from_str(line).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_then_estimate_recovers_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("path.csv");
    let json = dir.path().join("report.json");
    ok(&fsdiff(&[
        "simulate", "--alpha", "5", "--beta", "20", "--theta", "1", "--stationary", "--t-end", "4000", "--dt",
        "0.02", "--seed", "42", "--out", s(&csv),
    ]));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,x\n"));
    assert_eq!(text.lines().count(), 200_002);
    ok(&fsdiff(&["estimate", "--in", s(&csv), "--out", s(&json)]));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(r["schema_version"], 1);
    let ci = |k: &str| (r[k][0].as_f64().unwrap(), r[k][1].as_f64().unwrap());
    let (a, b) = (ci("ci_alpha"), ci("ci_beta"));
    assert!(a.0 < 5.0 && 5.0 < a.1, "{a:?}");
    assert!(b.0 < 20.0 && 20.0 < b.1, "{b:?}");
    assert!((r["theta_hat"].as_f64().unwrap() - 1.0).abs() < 0.15);
    assert!(r["cov_asymptotic"].is_array());
}

#[test]
fn estimate_report_has_explicit_nulls() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("path.csv");
    ok(&fsdiff(&[
        "simulate", "--alpha", "5", "--beta", "6", "--theta", "1", "--stationary", "--t-end", "200", "--seed", "3",
        "--out", s(&csv),
    ]));
    let o = fsdiff(&["estimate", "--in", s(&csv)]);
    ok(&o);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["cov_asymptotic", "ci_alpha", "ci_beta"] {
        assert!(r.as_object().unwrap().contains_key(key));
        if r["beta_hat"].as_f64().unwrap() <= 8.0 {
            assert!(r[key].is_null(), "{key}");
        }
    }
}

#[test]
fn density_near_stationarity_matches_pdf() {
    let o = fsdiff(&["density", "--alpha", "5", "--beta", "20", "--theta", "0.5", "--x0", "1.5", "--t", "16", "--grid", "0.2,3,8"]);
    ok(&o);
    let p = FsParams::new(5.0, 20.0, 0.5).unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,p_d,p_c,p"));
    let mut n = 0;
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let want = pdf(&p, v[0]);
        assert!((v[3] - want).abs() < 1e-3 * want.max(0.1), "x={} p={} pdf={want}", v[0], v[3]);
        n += 1;
    }
    assert_eq!(n, 8);
}

#[test]
fn density_rejects_even_alpha() {
    let o = fsdiff(&["density", "--alpha", "4", "--beta", "20", "--theta", "1", "--x0", "1", "--t", "1", "--grid", "0.5,2,4"]);
    assert_eq!(o.status.code(), Some(1));
    let e = envelope(&o);
    assert_eq!(e["error"]["code"], "SPECTRAL_HYPOTHESIS");
    assert_eq!(e["schema_version"], 1);
    assert!(o.stdout.is_empty());
}

#[test]
fn simulate_is_byte_identical_for_equal_seeds() {
    let args = ["simulate", "--alpha", "5", "--beta", "20", "--theta", "1", "--stationary", "--t-end", "50", "--seed", "9"];
    let a = fsdiff(&args);
    let b = fsdiff(&args);
    ok(&a);
    assert_eq!(a.stdout, b.stdout);
    let mut other = args.to_vec();
    other[11] = "10";
    assert_ne!(fsdiff(&other).stdout, a.stdout);
}

#[test]
fn seed_is_mandatory() {
    let o = fsdiff(&["simulate", "--alpha", "5", "--beta", "20", "--theta", "1", "--x0", "1", "--t-end", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(envelope(&o)["error"]["code"], "MISSING_SEED");
    let o = fsdiff(&["replicate", "--study", "size", "--reps", "2", "--alpha", "5", "--beta", "20", "--theta", "1"]);
    assert_eq!(envelope(&o)["error"]["code"], "MISSING_SEED");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"alpha": 5, "beta": 20, "theta": 1, "stationary": true, "t_end": 20, "seed": 3, "scheme": "euler"}"#,
    )
    .unwrap();
    let from_cfg = fsdiff(&["--config", s(&cfg), "simulate", "--seed", "4"]);
    ok(&from_cfg);
    let direct = fsdiff(&[
        "simulate", "--alpha", "5", "--beta", "20", "--theta", "1", "--stationary", "--t-end", "20", "--seed", "4",
        "--scheme", "euler",
    ]);
    assert_eq!(from_cfg.stdout, direct.stdout);
    let seed3 = fsdiff(&["--config", s(&cfg), "simulate"]);
    assert_ne!(seed3.stdout, direct.stdout);
}

#[test]
fn config_errors_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"alpah": 5}"#).unwrap();
    let o = fsdiff(&["--config", s(&cfg), "poly"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(envelope(&o)["error"]["code"], "INVALID_CONFIG");
    let o = fsdiff(&["--config", s(&dir.path().join("missing.json")), "poly"]);
    assert_eq!(envelope(&o)["error"]["code"], "IO");
}

#[test]
fn invalid_csv_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("neg.csv");
    std::fs::write(&csv, "t,x\n0,1.0\n1,-0.5\n2,1.2\n").unwrap();
    let o = fsdiff(&["estimate", "--in", s(&csv)]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(envelope(&o)["error"]["code"], "INVALID_PATH");
    std::fs::write(&csv, "t,x\n0,abc\n").unwrap();
    assert_eq!(envelope(&fsdiff(&["estimate", "--in", s(&csv)]))["error"]["code"], "INVALID_CSV");
}

#[test]
fn usage_errors_exit_one() {
    let o = fsdiff(&["simulate", "--alpha"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(envelope(&o)["error"]["code"], "USAGE");
    assert!(fsdiff(&["--help"]).status.success());
}

#[test]
fn test_command_known_and_estimated() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("path.csv");
    ok(&fsdiff(&[
        "simulate", "--alpha", "5", "--beta", "20", "--theta", "1", "--stationary", "--t-end", "500", "--dt", "0.5",
        "--scheme", "exact-drift", "--seed", "5", "--out", s(&csv),
    ]));
    let o = fsdiff(&["test", "--in", s(&csv), "--alpha", "5", "--beta", "20", "--theta", "1", "--m", "2"]);
    ok(&o);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["params_source"], "known");
    assert_eq!(r["dof"], 2);
    assert!((r["dt"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let o = fsdiff(&["test", "--in", s(&csv), "--j", "1"]);
    ok(&o);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["params_source"], "estimated");
    assert_eq!(r["degrees"], serde_json::json!([1]));
}

#[test]
fn poly_table() {
    let o = fsdiff(&["poly", "--alpha", "5", "--beta", "20", "--theta", "1", "--max-degree", "2"]);
    ok(&o);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,eigenvalue,norm_const,c0,c1,c2");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("2,"));
}

#[test]
fn replicate_is_deterministic_across_thread_counts() {
    let args = [
        "replicate", "--study", "coverage", "--reps", "6", "--seed", "11", "--alpha", "5", "--beta", "20", "--theta",
        "1", "--n-obs", "2000",
    ];
    let a = fsdiff_env(&args, "FSDIFF_THREADS", "1");
    let b = fsdiff_env(&args, "FSDIFF_THREADS", "3");
    ok(&a);
    assert_eq!(a.stdout, b.stdout);
    let r: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["study"], "coverage");
    assert_eq!(r["rows"].as_array().unwrap().len(), 6);
    assert!(r["metrics"]["coverage_alpha"].is_number());
    let bad = fsdiff_env(&args, "FSDIFF_THREADS", "zero");
    assert_eq!(envelope(&bad)["error"]["code"], "INVALID_ARGUMENT");
}

#[test]
fn replicate_size_and_theta_rows() {
    let o = fsdiff(&[
        "replicate", "--study", "size", "--reps", "4", "--seed", "2", "--alpha", "5", "--beta", "20", "--theta", "1",
        "--n-obs", "1000", "--m", "1,2",
    ]);
    ok(&o);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["m"], serde_json::json!([1, 2]));
    assert_eq!(r["rows"][0]["p_value"].as_array().unwrap().len(), 2);
    let o = fsdiff(&[
        "replicate", "--study", "theta", "--reps", "3", "--seed", "2", "--alpha", "5", "--beta", "20", "--theta", "0.5",
        "--n-obs", "5000",
    ]);
    ok(&o);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r["rows"][2]["theta_hat"].is_number());
}
