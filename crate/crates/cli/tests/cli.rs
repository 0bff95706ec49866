use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn framekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_framekit"))
        .args(args)
        .env_remove("FRAMEKIT_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn shift_suite_passes() {
    let out = framekit(&["verify", "--suite", "shift", "--seed", "7", "--trials", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["schema"], "framekit-report/1");
    assert_eq!(report["verdict"], "pass");
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    for c in checks {
        assert_eq!(c["verdict"], "pass");
        assert_eq!(c["residuals"]["max_residual"], "0/1");
        assert!(!c["anchor"].as_str().unwrap().is_empty());
    }
}

#[test]
fn witness_command() {
    let out = framekit(&["witness", "--n", "16", "--x", "1/2", "--y", "2", "--c-phase", "1/7"]);
    assert_eq!(out.status.code(), Some(0));
    let w = json(&out);
    assert_eq!(w["numerator_exact"], "1/1");
    assert_eq!(w["norm_sq"], "8/1");
    assert_eq!(w["ratio"], 0.125);

    let contrast = framekit(&["witness", "--n", "4", "--x", "1", "--y", "1/2"]);
    assert_eq!(contrast.status.code(), Some(1));
    assert_eq!(json(&contrast)["integer_product"], false);

    assert_eq!(framekit(&["witness", "--n", "4", "--x", "1/0", "--y", "1"]).status.code(), Some(2));
}

#[test]
fn bounds_command() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("frame.json");
    fs::write(&path, r#"{"dim":2,"vectors":[[[1,0],[0,0]],[[1,0],[0,0]],[[0,0],[1,0]]]}"#).unwrap();
    let out = framekit(&["bounds", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let b = json(&out);
    assert_eq!(b["A"], 1.0);
    assert_eq!(b["B"], 2.0);

    fs::write(&path, r#"{"dim":2,"vectors":[[[1,0]]]}"#).unwrap();
    assert_eq!(framekit(&["bounds", "--input", path.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&path, "not json").unwrap();
    assert_eq!(framekit(&["bounds", "--input", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn catalogue_lists_thirteen_suites() {
    let out = framekit(&[]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 13);

    let out = framekit(&["list", "--format", "json"]);
    let suites = json(&out)["suites"].as_array().unwrap().clone();
    assert_eq!(suites.len(), 13);
    assert!(suites.iter().all(|s| !s["anchor"].as_str().unwrap().is_empty()));
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(framekit(&["verify", "--suite", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(framekit(&["verify", "--suite", "shift", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(framekit(&["verify", "--suite", "shift", "--tol.nope", "1"]).status.code(), Some(2));
    assert_eq!(
        framekit(&["verify", "--suite", "shift", "--input", "/nonexistent.json"]).status.code(),
        Some(2)
    );
    assert_eq!(
        framekit(&["verify", "--suite", "riesz", "--input", "/nonexistent.json"]).status.code(),
        Some(2)
    );
}

#[test]
fn tolerance_override_can_force_a_violation() {
    let out = framekit(&[
        "verify",
        "--suite",
        "recover",
        "--trials",
        "3",
        "--tol.recover=0",
        "--tol.bound",
        "0",
    ]);
    let report = json(&out);
    assert_eq!(report["tolerances"]["recover"], 0.0);
    let code = out.status.code().unwrap();
    let verdict = report["verdict"].as_str().unwrap();
    assert_eq!(code == 0, verdict == "pass");
    assert!(code == 0 || code == 1);
}

#[test]
fn frame_input_is_used_and_validated() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("frame.json");
    fs::write(&path, r#"{"dim":2,"vectors":[[[1,0],[0,0]],[[1,0],[0,0]],[[0,0],[1,0]]]}"#).unwrap();
    let p = path.to_str().unwrap();
    let out = framekit(&["verify", "--suite", "transform-law", "--trials", "5", "--input", p]);
    assert_eq!(out.status.code(), Some(0));
    // Three vectors in C² are not a Riesz basis.
    assert_eq!(framekit(&["verify", "--suite", "riesz", "--input", p]).status.code(), Some(2));
    // Not a frame at all.
    fs::write(&path, r#"{"dim":2,"vectors":[[[1,0],[0,0]]]}"#).unwrap();
    assert_eq!(framekit(&["verify", "--suite", "recover", "--input", p]).status.code(), Some(2));
}

#[test]
fn gabor_and_piecewise_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, r#"{"N":4,"a":1,"b":1,"window":[[1,0],[0.5,0],[0,0],[0,-1]]}"#).unwrap();
    let out = framekit(&["verify", "--suite", "gabor-lattice", "--input", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    fs::write(&spec, r#"{"N":4,"a":3,"b":1,"window":[[1,0],[0,0],[0,0],[0,0]]}"#).unwrap();
    let out = framekit(&["verify", "--suite", "gabor-lattice", "--input", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let g = dir.path().join("g.json");
    fs::write(&g, r#"{"pieces":[{"l":"0/1","r":"3/2","freq":"1/3","coef":[0.5,-0.25]}]}"#).unwrap();
    let out = framekit(&["verify", "--suite", "factorization", "--trials", "10", "--input", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn reports_are_reproducible_and_written_to_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (path, threads) in [(&a, "1"), (&b, "4")] {
        let status = Command::new(env!("CARGO_BIN_EXE_framekit"))
            .args(["verify", "--suite", "projection-sum", "--trials", "12", "--seed", "99", "--out"])
            .arg(path)
            .env("RAYON_NUM_THREADS", threads)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let via_env = Command::new(env!("CARGO_BIN_EXE_framekit"))
        .args(["verify", "--suite", "projection-sum", "--trials", "12"])
        .env("FRAMEKIT_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(via_env.stdout, fs::read(&a).unwrap());
}

#[test]
fn every_suite_passes_with_small_trial_counts() {
    for suite in [
        "transform-law",
        "two-sided",
        "sum-operator",
        "projection-sum",
        "recover",
        "riesz",
        "power-sum",
        "two-frame",
        "shift",
        "tlstar",
        "witness",
        "factorization",
        "gabor-lattice",
    ] {
        let out = framekit(&["verify", "--suite", suite, "--trials", "6", "--seed", "21", "--format", "text"]);
        let text = String::from_utf8_lossy(&out.stdout);
        assert_eq!(out.status.code(), Some(0), "{suite}: {text}");
        assert!(text.starts_with(&format!("suite {suite} ")));
    }
}
