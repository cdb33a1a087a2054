//! End-to-end tests of the binary: exit codes, report shape, round-tripping
//! of emitted files, and the documented command walk-throughs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    run_with_env(args, &[])
}

fn run_with_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_absorbd"));
    cmd.args(args).env_remove("ABSORBD_VERTEX_CAP");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    assert!(
        !out.stdout.is_empty(),
        "no stdout; stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn match_constructs_the_order_two_policy() {
    let model = fixture("twostate.json");
    let out = run(&["match", model.to_str().unwrap(), "--target", "[14/15]"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["mode"], "exact");
    assert_eq!(r["result"]["verification"]["order"], 2);
    assert_eq!(r["result"]["verification"]["residual"], "0");
    assert_eq!(r["result"]["verification"]["performance"][0], "14/15");
    assert_eq!(r["result"]["policy"]["type"], "chattering");
}

#[test]
fn match_rejects_unachievable_targets() {
    let model = fixture("twostate.json");
    let out = run(&["match", model.to_str().unwrap(), "--target", "[2]"]);
    assert_eq!(code(&out), 2);
    assert_eq!(stderr_json(&out)["code"], "unachievable");
}

#[test]
fn solve_honors_mass_constraints_and_reports_duals() {
    let model = fixture("twostate.json");
    let out = run(&[
        "solve",
        model.to_str().unwrap(),
        "--objective",
        "[1]",
        "--constraint",
        "mass=4/3",
    ]);
    assert_eq!(code(&out), 0);
    let r = &report(&out)["result"];
    assert_eq!(r["value"], "14/15");
    assert_eq!(r["tight_criteria"], 1);
    assert_eq!(r["order_bound"], 2);
    assert_eq!(r["dual"]["feasible"], true);
    assert_eq!(r["dual"]["complementary"], true);
    assert_eq!(r["constraints"][0]["slack"], "0");
}

#[test]
fn solve_reports_infeasible_systems_with_exit_two() {
    let model = fixture("twostate.json");
    let out = run(&[
        "solve",
        model.to_str().unwrap(),
        "--objective",
        "[1]",
        "--constraint",
        "mass=3",
    ]);
    assert_eq!(code(&out), 2);
    assert_eq!(stderr_json(&out)["code"], "infeasible");
}

#[test]
fn solve_minimizes_on_request() {
    let model = fixture("twostate.json");
    let out = run(&[
        "solve",
        model.to_str().unwrap(),
        "--objective",
        "[1]",
        "--goal",
        "min",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["result"]["value"], "4/5");
}

#[test]
fn validate_accepts_the_fixture_and_rejects_garbage() {
    let model = fixture("twostate.json");
    let out = run(&["validate", model.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["result"]["ok"], true);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert_eq!(stderr_json(&out)["exit"], 2);
}

#[test]
fn validate_lists_violations_as_data() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("substochastic.json");
    std::fs::write(
        &path,
        r#"{
            "states": ["s", "t"], "delta": ["t"],
            "actions": {"s": ["a"]},
            "kernel": [{"x": "s", "a": "a", "to": {"t": "1/2"}}],
            "eta": {"s": "1"},
            "rewards": [{"x": "s", "a": "a", "r": ["1"]}]
        }"#,
    )
    .unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let r = &report(&out)["result"];
    assert_eq!(r["ok"], false);
    assert!(!r["violations"].as_array().unwrap().is_empty());
}

#[test]
fn absorb_check_exit_code_tracks_the_verdict() {
    let out = run(&["absorb-check", fixture("twostate.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let r = &report(&out)["result"];
    assert_eq!(r["uniformly_absorbing"], true);
    assert_eq!(r["certificate"]["type"], "decay");

    let out = run(&["absorb-check", fixture("selfloop.json").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let r = &report(&out)["result"];
    assert_eq!(r["uniformly_absorbing"], false);
    assert_eq!(r["certificate"]["type"], "sure-survival-cycle");
    assert_eq!(r["certificate"]["cycle"][0][0], "s0");
    assert_eq!(r["certificate"]["cycle"][0][1], "stay");
}

#[test]
fn occmeasure_accepts_policies_emitted_by_match() {
    let dir = tempfile::tempdir().unwrap();
    let model = fixture("twostate.json");
    let out = run(&["match", model.to_str().unwrap(), "--target", "[14/15]"]);
    assert_eq!(code(&out), 0);
    let policy = report(&out)["result"]["policy"].clone();
    let policy_path = dir.path().join("policy.json");
    std::fs::write(&policy_path, serde_json::to_string(&policy).unwrap()).unwrap();

    let out = run(&[
        "occmeasure",
        model.to_str().unwrap(),
        "--policy",
        policy_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let r = &report(&out)["result"];
    assert_eq!(r["total_mass"], "4/3");
    assert_eq!(r["performance"][0], "14/15");
    assert_eq!(r["mass"][0]["mass"], "2/3");
    assert_eq!(r["mass"][1]["mass"], "2/3");
}

#[test]
fn vertices_enumerates_and_slices_the_polytope() {
    let model = fixture("twostate.json");
    let out = run(&["vertices", model.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["result"]["count"], 2);

    let out = run(&[
        "vertices",
        model.to_str().unwrap(),
        "--constraint",
        "mass=4/3",
    ]);
    assert_eq!(code(&out), 0);
    let r = &report(&out)["result"];
    assert_eq!(r["count"], 1);
    assert_eq!(r["vertices"][0]["measure"]["total_mass"], "4/3");
    assert_eq!(r["vertices"][0]["policy"]["type"], "stationary");
    assert_eq!(r["vertices"][0]["policy"]["weights"]["s0"]["a1"], "1/2");

    let out = run(&[
        "vertices",
        model.to_str().unwrap(),
        "--constraint",
        "mass<=2",
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(stderr_json(&out)["code"], "usage");
}

#[test]
fn image_reports_hull_vertices_and_memberships() {
    let model = fixture("twostate.json");
    let out = run(&[
        "image",
        model.to_str().unwrap(),
        "--target",
        "[14/15]",
        "--target",
        "[1]",
        "--target",
        "[2]",
    ]);
    assert_eq!(code(&out), 0);
    let r = &report(&out)["result"];
    assert_eq!(r["vertices"], serde_json::json!([["4/5"], ["1"]]));
    assert_eq!(r["targets"][0]["member"], true);
    assert_eq!(r["targets"][0]["relative_interior"], true);
    assert_eq!(r["targets"][1]["member"], true);
    assert_eq!(r["targets"][1]["relative_interior"], false);
    assert_eq!(r["targets"][2]["member"], false);
    assert_eq!(r["targets"][2]["relative_interior"], false);
}

#[test]
fn reduce_stage_preserves_performance() {
    let dir = tempfile::tempdir().unwrap();
    let model = fixture("twostate.json");
    let policy_path = dir.path().join("markov.json");
    std::fs::write(
        &policy_path,
        r#"{
            "type": "markov",
            "stages": [{"s0": {"a1": "1/2", "a2": "1/2"}}],
            "tail": {"s0": {"a1": "1"}}
        }"#,
    )
    .unwrap();
    let out = run(&[
        "reduce-stage",
        model.to_str().unwrap(),
        "--policy",
        policy_path.to_str().unwrap(),
        "--stage",
        "0",
    ]);
    assert_eq!(code(&out), 0);
    let r = &report(&out)["result"];
    // Exact performance of this staged policy: 1/2·1 + 1/2·(2/5 + 1/2·1).
    assert_eq!(r["performance"][0], "19/20");
    assert!(r["support"]["after"].as_u64().unwrap() <= 3);
    assert_eq!(r["policy"]["type"], "markov");

    let out = run(&[
        "reduce-stage",
        model.to_str().unwrap(),
        "--policy",
        policy_path.to_str().unwrap(),
        "--stage",
        "0",
        "--mode",
        "float",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn simulate_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let model = fixture("twostate.json");
    let policy_path = dir.path().join("uniform.json");
    std::fs::write(
        &policy_path,
        r#"{"type": "stationary", "weights": {"s0": {"a1": "1/2", "a2": "1/2"}}}"#,
    )
    .unwrap();
    let args = [
        "simulate",
        model.to_str().unwrap(),
        "--policy",
        policy_path.to_str().unwrap(),
        "--episodes",
        "2000",
        "--seed",
        "42",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(report(&first)["result"], report(&second)["result"]);
    let r = &report(&first)["result"];
    assert_eq!(r["episodes"], 2000);
    assert_eq!(r["horizon_cap_hits"], 0);
    let mean = r["mean_performance"][0].as_f64().unwrap();
    let se = r["se_performance"][0].as_f64().unwrap();
    assert!((mean - 14.0 / 15.0).abs() <= 4.0 * se);
}

#[test]
fn verify_passes_and_rejects_float_mode() {
    let out = run(&["verify", "--trials", "5", "--seed", "7"]);
    assert_eq!(code(&out), 0);
    let r = &report(&out)["result"];
    assert_eq!(r["all_passed"], true);
    assert_eq!(r["suites"].as_array().unwrap().len(), 7);

    let out = run(&[
        "verify",
        "--trials",
        "5",
        "--suite",
        "extreme-points",
        "--seed",
        "3",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        report(&out)["result"]["suites"][0]["name"],
        "extreme-points"
    );

    let out = run(&["verify", "--trials", "5", "--mode", "float"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stderr_json(&out)["code"], "usage");

    let out = run(&["verify", "--suite", "no-such-suite"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn float_mode_runs_the_same_pipeline() {
    let model = fixture("twostate.json");
    let out = run(&[
        "solve",
        model.to_str().unwrap(),
        "--objective",
        "[1]",
        "--constraint",
        "mass=4/3",
        "--mode",
        "float",
        "--eps",
        "1e-9",
    ]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["mode"], "float");
    let value: f64 = r["result"]["value"].as_str().unwrap().parse().unwrap();
    assert!((value - 14.0 / 15.0).abs() < 1e-9);
}

#[test]
fn vertex_cap_env_var_is_honored() {
    let model = fixture("twostate.json");
    let out = run_with_env(
        &["vertices", model.to_str().unwrap()],
        &[("ABSORBD_VERTEX_CAP", "1")],
    );
    assert_eq!(code(&out), 2);
    assert_eq!(stderr_json(&out)["code"], "too-large");
}

#[test]
fn usage_errors_exit_one() {
    let out = run(&["no-such-command"]);
    assert_eq!(code(&out), 1);
    let model = fixture("twostate.json");
    let out = run(&[
        "solve",
        model.to_str().unwrap(),
        "--objective",
        "[1]",
        "--constraint",
        "mass~1",
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(stderr_json(&out)["code"], "usage");
    let out = run(&["match", model.to_str().unwrap(), "--target", "[oops]"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn missing_files_exit_two() {
    let out = run(&["validate", "/no/such/file.json"]);
    assert_eq!(code(&out), 2);
    assert_eq!(stderr_json(&out)["code"], "invalid-input");
}
