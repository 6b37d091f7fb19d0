use std::path::Path;
use std::process::{Command, Output};

use mixmean::constructions::{kedlaya_transition, ProfileMatrix};
use mixmean::distributions::TransitionMatrix;
use mixmean::gridexpand::ExpansionMatrix;
use mixmean::solver::Solved;
use serde_json::Value;

fn mixmean(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixmean"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn construct_kedlaya_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = mixmean(&["construct", "kedlaya", "--n", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["matrix"], serde_json::json!([[["1"]]]));
    assert_eq!(doc["certificate"]["verdict"], "valid");
}

#[test]
fn construct_comb_rejects_hypothesis() {
    let dir = tempfile::tempdir().unwrap();
    let out = mixmean(
        &["construct", "comb", "--n", "4", "--k", "2", "--l", "2"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn solve_cyclic_transition() {
    let dir = tempfile::tempdir().unwrap();
    let out = mixmean(
        &[
            "solve",
            "transition",
            "--left",
            "cyclic:7,4",
            "--right",
            "cyclic:7,5",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["status"], "feasible");
    assert_eq!(doc["certificate"]["verdict"], "valid");
}

#[test]
fn solve_cyclic_profile_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let out = mixmean(
        &[
            "solve",
            "cyclic-profile",
            "--n",
            "4",
            "--k",
            "2",
            "--l",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["status"], "infeasible");
}

#[test]
fn solve_custom_single_distribution() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("custom.json"), "[[1,2,3]]").unwrap();
    let out = mixmean(
        &[
            "solve",
            "transition",
            "--left",
            "custom.json",
            "--right",
            "custom.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["status"], "feasible");
    assert_eq!(doc["matrix"], serde_json::json!([[["1/6", "1/3", "1/2"]]]));
}

#[test]
fn construct_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = mixmean(
        &["--out", "out.json", "construct", "kedlaya", "--n", "3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let out = mixmean(
        &[
            "verify",
            "transition",
            "--left",
            "kedlaya:3",
            "--right",
            "kedlaya:3",
            "--matrix",
            "out.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "valid");

    let out = mixmean(
        &[
            "verify",
            "transition",
            "--left",
            "kedlaya:3",
            "--right",
            "comb:3,2",
            "--matrix",
            "out.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn expand_kedlaya_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = mixmean(
        &["--out", "kedlaya2.json", "construct", "kedlaya", "--n", "2"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let out = mixmean(&["expand", "--matrix", "kedlaya2.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(
        doc["expansion"]["entries"],
        serde_json::json!([[1, 1], [1, 2]])
    );
    assert_eq!(doc["certificate"]["verdict"], "valid");
}

#[test]
fn inequality_suite_is_clean_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "inequality",
        "--M",
        "power:0",
        "--N",
        "power:1",
        "--families",
        "cyclic:7,3/cyclic:7,5",
        "--count",
        "1000",
        "--seed",
        "42",
    ];
    let first = mixmean(&args, dir.path());
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(json(&first)["failures"], 0);
    let second = mixmean(&args, dir.path());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn certificates_round_trip() {
    let dir = tempfile::tempdir().unwrap();

    let out = mixmean(&["construct", "kedlaya", "--n", "4"], dir.path());
    let doc = json(&out);
    let r: TransitionMatrix = serde_json::from_value(doc["matrix"].clone()).unwrap();
    assert_eq!(r, kedlaya_transition(4).unwrap());
    assert_eq!(serde_json::to_value(&r).unwrap(), doc["matrix"]);

    let out = mixmean(
        &["construct", "cyclic-profile", "--n", "7", "--k", "4"],
        dir.path(),
    );
    let doc = json(&out);
    let a: ProfileMatrix = serde_json::from_value(doc["profile"].clone()).unwrap();
    assert_eq!(serde_json::to_value(&a).unwrap(), doc["profile"]);

    let out = mixmean(&["construct", "kedlaya", "--n", "3"], dir.path());
    std::fs::write(dir.path().join("k3.json"), &out.stdout).unwrap();
    let out = mixmean(&["expand", "--matrix", "k3.json"], dir.path());
    let doc = json(&out);
    let e: ExpansionMatrix = serde_json::from_value(doc["expansion"].clone()).unwrap();
    assert_eq!(serde_json::to_value(&e).unwrap(), doc["expansion"]);

    let out = mixmean(
        &[
            "solve",
            "transition",
            "--left",
            "cyclic:5,2",
            "--right",
            "cyclic:5,4",
        ],
        dir.path(),
    );
    let doc = json(&out);
    let solved: Solved<TransitionMatrix> = serde_json::from_value(serde_json::json!({
        "status": "feasible",
        "certificate": doc["matrix"],
    }))
    .unwrap();
    assert!(solved.is_feasible());
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{not json").unwrap();
    let out = mixmean(
        &[
            "verify",
            "transition",
            "--left",
            "kedlaya:2",
            "--right",
            "kedlaya:2",
            "--matrix",
            "bad.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let out = mixmean(
        &[
            "solve",
            "transition",
            "--left",
            "nonsense:3",
            "--right",
            "kedlaya:3",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}
