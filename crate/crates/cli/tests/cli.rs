//! Drives the `harmonic-certify` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harmonic-certify"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn figure1_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, threads) in [(&a, "1"), (&b, "4")] {
        let o = run(&["figure1", "--out", path(out), "--trials", "5", "--seed", "7", "--threads", threads]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for file in ["figure1.csv", "figure1_trials.csv"] {
        let (x, y) = (fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap());
        assert!(!x.is_empty());
        assert_eq!(x, y, "{file} differs");
    }
    let header = fs::read_to_string(a.join("figure1.csv")).unwrap();
    assert!(header.starts_with("sigma,trials,certified,"));
}

#[test]
fn sharpness_and_vandermonde_succeed() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["sharpness", "--out", path(dir.path())])), 0);
    let rows = fs::read_to_string(dir.path().join("sharpness.csv")).unwrap();
    assert_eq!(rows.lines().count(), 4);
    for mode in ["separated", "pairs"] {
        let csv = dir.path().join(format!("{mode}.csv"));
        let o = run(&["vandermonde", "verify", "--mode", mode, "--trials", "20", "--out", path(&csv)]);
        assert_eq!(code(&o), 0);
        assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 61);
    }
}

#[test]
fn bound_suite_exit_codes_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let clean = dir.path().join("clean");
    assert_eq!(code(&run(&["bounds", "suite", "--trials", "10", "--out", path(&clean)])), 0);
    assert!(!clean.join("reproducers").exists());

    let config = dir.path().join("strict.json");
    fs::write(&config, json!({"experiment": "bound_suite", "trials": 10, "perturbation": 1.01}).to_string()).unwrap();
    let strict = dir.path().join("strict");
    let o = run(&["bounds", "suite", "--config", path(&config), "--out", path(&strict)]);
    assert_eq!(code(&o), 1);
    let reproducer = fs::read_dir(strict.join("reproducers")).unwrap().next().unwrap().unwrap().path();

    let replay = run(&["bounds", "check", "--config", path(&reproducer)]);
    assert_eq!(code(&replay), 1);
    assert!(stdout(&replay).contains("lhs,rhs,slack,holds"));
    assert!(stdout(&replay).trim_end().ends_with("false"));
    assert_eq!(code(&run(&["bounds", "check", "--config", path(&reproducer), "--perturbation", "1"])), 0);

    let bare: Value = serde_json::from_str(&fs::read_to_string(&reproducer).unwrap()).unwrap();
    let scenario = dir.path().join("scenario.json");
    fs::write(&scenario, bare["scenario"].to_string()).unwrap();
    assert_eq!(code(&run(&["bounds", "check", "--config", path(&scenario)])), 0);
}

#[test]
fn phi_table() {
    let o = run(&["phi", "eval", "--grid", "0:3:4"]);
    assert_eq!(code(&o), 0);
    let values: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values, vec![0.0, 1.0, 1.0, 0.0]);
    let o = run(&["phi", "eval", "--grid", "0:0:1", "--fourier"]);
    assert!(stdout(&o).contains("0,2,0"));
    let o = run(&["phi", "eval", "--grid", "0:3:4", "--dilate", "2"]);
    assert_eq!(stdout(&o).lines().nth(4).unwrap(), "3,0,0");
}

fn model_samples(sigma_shift: f64) -> Value {
    let terms = [(0.1, 1.1), (0.3, -1.1), (0.6, 2.0), (0.9, 2.0)];
    let samples: Vec<[f64; 2]> = (-20i32..=20)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (y, c) in terms {
                let a = 2.0 * std::f64::consts::PI * y * k as f64;
                re += c * a.cos();
                im += c * a.sin();
            }
            [re + sigma_shift * (k as f64 * 0.37).sin(), im]
        })
        .collect();
    json!({"start": -20, "samples": samples})
}

#[test]
fn estimate_then_certify() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("samples.json");
    fs::write(&samples, model_samples(1e-3).to_string()).unwrap();
    let o = run(&["estimate", "--in", path(&samples), "--order", "4"]);
    assert_eq!(code(&o), 0);
    let estimate: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let freqs: Vec<f64> = estimate["frequencies"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    for (got, want) in freqs.iter().zip([0.1, 0.3, 0.6, 0.9]) {
        assert!((got - want).abs() < 1e-3, "{got} vs {want}");
    }
    let est_path = dir.path().join("estimate.json");
    fs::write(&est_path, stdout(&o)).unwrap();
    let truth = dir.path().join("truth.json");
    fs::write(
        &truth,
        json!({"frequencies": [0.1, 0.3, 0.6, 0.9], "coefficients": [[1.1, 0.0], [-1.1, 0.0], [2.0, 0.0], [2.0, 0.0]]}).to_string(),
    )
    .unwrap();
    let o = run(&[
        "apost", "--samples", path(&samples), "--estimate", path(&est_path), "--sigma", "0.001", "--delta", "0.9",
        "--truth", path(&truth),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cert: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(cert["verdict"], "certified");
    assert_eq!(cert["estimate_holds"], true);
}

#[test]
fn errors_exit_with_two() {
    assert_eq!(code(&run(&["phi", "eval", "--grid", "nonsense"])), 2);
    assert_eq!(code(&run(&["bounds", "check", "--config", "/nonexistent/file.json"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"trials": 0}"#).unwrap();
    assert_eq!(code(&run(&["figure1", "--config", path(&bad), "--out", path(dir.path())])), 2);
}
