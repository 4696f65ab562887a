use std::path::Path;
use std::process::{Command, Output};

fn adamtype(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adamtype"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn run_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = adamtype(
        &[
            "run",
            "--problem",
            "quadratic_100",
            "--variant",
            "amsgrad",
            "--alpha",
            "0.01",
            "--iters",
            "500",
            "--record-every",
            "5",
            "--out",
            "logs/q",
        ],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("logs/q.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 100);
    assert!(csv.starts_with("t,f_x,grad_norm_sq,"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("logs/q.json")).unwrap())
            .unwrap();
    assert_eq!(json["verdict"], "converging");
    assert_eq!(stdout_json(&out), json);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"{
        "problem": {"name": "term_b_counterexample"},
        "optimizer": {"variant": "adam", "alpha": {"kind": "constant", "alpha": 1.0},
                      "beta2": {"kind": "constant", "beta2": 0.1}},
        "iters": 1000,
        "seed": 3,
        "x1": [0.5]
    }"#;
    std::fs::write(dir.path().join("spec.json"), spec).unwrap();
    let out = adamtype(
        &[
            "run",
            "--config",
            "spec.json",
            "--iters",
            "200",
            "--variant",
            "amsgrad",
        ],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json = stdout_json(&out);
    assert_eq!(json["iters"], 200);
    assert_eq!(json["variant"], "amsgrad");
    assert_eq!(json["seed"], 3);
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &[
            "run",
            "--problem",
            "nope",
            "--variant",
            "sgd",
            "--alpha",
            "0.1",
            "--iters",
            "10",
        ],
        &[
            "run",
            "--problem",
            "quadratic_100",
            "--variant",
            "lion",
            "--alpha",
            "0.1",
            "--iters",
            "10",
        ],
        &[
            "run",
            "--problem",
            "quadratic_100",
            "--variant",
            "sgd",
            "--alpha",
            "0.1",
        ],
        &["run", "--config", "missing.json"],
        &["scenario", "fig9"],
    ];
    for args in cases {
        assert_eq!(
            adamtype(args, dir.path()).status.code(),
            Some(2),
            "{args:?}"
        );
    }
    std::fs::write(dir.path().join("bad.json"), "{\"iters\": 3}").unwrap();
    assert_eq!(
        adamtype(&["run", "--config", "bad.json"], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn numeric_abort_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = adamtype(
        &[
            "run",
            "--problem",
            "quadratic_100",
            "--variant",
            "sgd",
            "--alpha",
            "0.1",
            "--iters",
            "10000",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let json = stdout_json(&out);
    assert_eq!(json["verdict"], "diverging");
    assert!(json["aborted_at"].as_u64().unwrap() > 1);
}

#[test]
fn lemma_checks_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = adamtype(&["check", "lemmas", "--seed", "7"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let verdicts = stdout_json(&out);
    assert!(verdicts
        .as_array()
        .unwrap()
        .iter()
        .all(|v| v["holds"] == true));
}

#[test]
fn scenario_writes_all_members() {
    let dir = tempfile::tempdir().unwrap();
    let out = adamtype(&["scenario", "fig1", "--out", "figs"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in [
        "fig1_sgd.csv",
        "fig1_adam.csv",
        "fig1_amsgrad.csv",
        "fig1_certification.json",
    ] {
        assert!(dir.path().join("figs").join(name).exists(), "{name}");
    }
    let aggregate = stdout_json(&out);
    assert_eq!(aggregate["amsgrad"], "converging");
    assert_eq!(aggregate["adam"], "diverging");
}
