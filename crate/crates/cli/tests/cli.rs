use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ontic_core::linalg::{HermitianOp, Ket};
use ontic_core::ontomodel::{Experiment, ResponseKernel};
use ontic_core::povm::Povm;
use ontic_core::scenario::{model_to_inline, ModelSpec, Scenario};
use ontic_core::Tolerances;
use serde_json::Value;
use tempfile::TempDir;

fn ontic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ontic")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn fixture(dir: &TempDir, args: &[&str]) -> PathBuf {
    let p = dir.path().join(format!("{}.json", args.join("_")));
    let mut full = vec!["fixture"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", p.to_str().unwrap()]);
    let o = ontic(&full);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    p
}

/// Trivial qubit scenario plus a self-measurement experiment `G` with POVM
/// `{P0, P1, P+, P-}/2` and the given response rows (identity when `None`).
fn self_measurement_scenario(rows: Option<Vec<Vec<f64>>>) -> String {
    let mut s = Scenario::fixture("trivial", 2, None).unwrap();
    let m = s.build(&Tolerances::default()).unwrap().model;
    let labels = m.ontic().to_vec();
    let kets = [
        Ket::basis(2, 0),
        Ket::basis(2, 1),
        Ket::from_reals(&[1.0, 1.0]).unwrap(),
        Ket::from_reals(&[1.0, -1.0]).unwrap(),
    ];
    let povm = Povm::new(labels.clone(), kets.iter().map(|k| HermitianOp::projector(k).scale(0.5)).collect()).unwrap();
    let kernel = match rows {
        None => ResponseKernel::identity(&labels),
        Some(r) => ResponseKernel::new(labels, r, 1e-12).unwrap(),
    };
    let m = m.with_experiment(Experiment::new("G", povm, kernel).unwrap(), &Tolerances::default()).unwrap();
    s.model = ModelSpec::Inline(model_to_inline(&m));
    s.self_measurement = Some("G".into());
    s.to_json()
}

#[test]
fn fixture_emission_is_canonical() {
    let dir = TempDir::new().unwrap();
    let a = fixture(&dir, &["trivial"]);
    let text = std::fs::read_to_string(&a).unwrap();
    let reparsed = Scenario::from_json(&text).unwrap();
    assert_eq!(reparsed.to_json(), text);
    let o = ontic(&["fixture", "trivial"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), text);

    let o = ontic(&["validate", "--scenario", a.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["result"]["valid"], true);
    assert_eq!(report["result"]["lines"]["complete"], true);
    assert_eq!(report["scenario_digest"], reparsed.digest());
}

#[test]
fn malformed_complex_reports_its_path() {
    let dir = TempDir::new().unwrap();
    let a = fixture(&dir, &["trivial"]);
    let mut v = read_json(&a);
    v["lines"][1][0] = serde_json::json!([1.0]);
    let bad = write(&dir, "bad.json", &v.to_string());
    let out = dir.path().join("err.json");
    let o = ontic(&["validate", "--scenario", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("lines[1][0]"), "{}", stderr(&o));
    let r = read_json(&out);
    assert!(r["error"]["path"].as_str().unwrap().starts_with("lines[1][0]"));
}

#[test]
fn non_stochastic_kernel_row_is_rejected() {
    let dir = TempDir::new().unwrap();
    let mut v: Value = serde_json::from_str(&self_measurement_scenario(None)).unwrap();
    v["model"]["experiments"][0]["response"]["rows"][3] = serde_json::json!([0.5, 0.4]);
    let bad = write(&dir, "bad.json", &v.to_string());
    let o = ontic(&["validate", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("model.experiments[0].response.rows[3]"), "{}", stderr(&o));
}

#[test]
fn unknown_fixture_and_missing_file() {
    let o = ontic(&["fixture", "bohm"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("trivial"));
    let o = ontic(&["validate", "--scenario", "/nonexistent/scenario.json"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn adequacy_of_fixtures() {
    let dir = TempDir::new().unwrap();
    let t = fixture(&dir, &["trivial", "--dim", "3"]);
    let o = ontic(&["adequacy", "--scenario", t.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["result"]["passed"], true);
    assert!(r["result"]["max_deviation"].as_f64().unwrap() <= 1e-12);

    let b = fixture(&dir, &["binned", "--bins", "10"]);
    let o = ontic(&["adequacy", "--scenario", b.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r["result"]["max_deviation"].as_f64().unwrap() <= 0.1);
}

#[test]
fn witness_mode_reports_a_violated_step() {
    let dir = TempDir::new().unwrap();
    let t = fixture(&dir, &["trivial"]);
    let o = ontic(&["nogo", "--scenario", t.to_str().unwrap(), "--mode", "witness"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let res = &r["result"];
    assert_eq!(res["candidate_source"], "least_squares");
    assert!(res["verdict"]["contradiction"].is_string());
    assert_eq!(res["steps"].as_array().unwrap().len(), 6);
    assert_eq!(res["floor_met"], true);
}

#[test]
fn search_mode_is_deterministic_and_above_the_floor() {
    let dir = TempDir::new().unwrap();
    let t = fixture(&dir, &["trivial"]);
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = ontic(&[
            "nogo", "--scenario", t.to_str().unwrap(), "--mode", "search", "--restarts", "4", "--max-iter", "300",
            "--seed", "5", "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        std::fs::read(&out).unwrap()
    };
    let a = run("a.json");
    assert_eq!(a, run("b.json"));
    let r: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(r["seed"], 5);
    let res = &r["result"];
    assert_eq!(res["search"]["restarts"].as_array().unwrap().len(), 4);
    assert!(res["search"]["residual"].as_f64().unwrap() >= res["floor"].as_f64().unwrap());
    assert_eq!(res["floor_met"], true);
    assert!(res["certificate"]["verdict"]["contradiction"].is_string());
}

#[test]
fn theorem1_mode_accepts_identity_and_rejects_broken_kernels() {
    let dir = TempDir::new().unwrap();
    let ok = write(&dir, "ok.json", &self_measurement_scenario(None));
    let o = ontic(&["nogo", "--scenario", ok.to_str().unwrap(), "--mode", "theorem1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r["result"]["verdict"]["contradiction"].is_string());
    assert_eq!(r["result"]["identity_kernel"]["passed"], true);

    let mut rows = vec![vec![0.0; 4]; 4];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    rows[1] = vec![0.0, 0.8, 0.2, 0.0];
    let broken = write(&dir, "broken.json", &self_measurement_scenario(Some(rows)));
    let out = dir.path().join("r.json");
    let o = ontic(&["nogo", "--scenario", broken.to_str().unwrap(), "--mode", "theorem1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let r = read_json(&out);
    assert_eq!(r["result"]["verdict"], "rejected_kernel");
    assert!(r["result"]["pipeline"].is_null());
    assert_eq!(r["result"]["identity_kernel"]["location"]["ontic"], "s1");

    let t = fixture(&dir, &["trivial"]);
    let o = ontic(&["nogo", "--scenario", t.to_str().unwrap(), "--mode", "theorem1"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn sweep_mode_reports_one_row_per_eps() {
    let dir = TempDir::new().unwrap();
    let b = fixture(&dir, &["binned", "--bins", "4"]);
    let mut v = read_json(&b);
    v["run"]["eps_grid"] = serde_json::json!([0.5, 0.25]);
    let s = write(&dir, "sweep.json", &v.to_string());
    let o = ontic(&["nogo", "--scenario", s.to_str().unwrap(), "--mode", "sweep", "--restarts", "2", "--max-iter", "100"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = r["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["bins"], 2);
    assert_eq!(rows[1]["bins"], 4);
    assert_eq!(r["result"]["residual_positive"], true);
}

#[test]
fn tolerance_flag_reaches_the_report() {
    let dir = TempDir::new().unwrap();
    let t = fixture(&dir, &["trivial"]);
    let o = ontic(&["validate", "--scenario", t.to_str().unwrap(), "--tol", "1e-8"]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["tolerances"]["eig"], 1e-8);
    assert_eq!(r["tolerances"]["adequacy"], 1e-7);
    let o = ontic(&["validate", "--scenario", t.to_str().unwrap(), "--tol", "-1"]);
    assert_eq!(code(&o), 2);
}
