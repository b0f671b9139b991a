//! CLI-level acceptance: report determinism (criterion 10), exit codes,
//! and recheck round-trips for every report-producing subcommand.

use std::path::Path;
use std::process::{Command, Output};

const S3: &str = "x1 x2 x3 + x3 x1 x2 + x2 x3 x1 - x2 x1 x3 - x1 x3 x2 - x3 x2 x1";
const COMMUTATOR: &str = "x1 x2 - x2 x1";

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_preserver-lab")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .env("PRESERVER_LAB_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn normalized(out: &Output) -> serde_json::Value {
    let mut v = stdout_json(out);
    v.as_object_mut()
        .expect("report is an object")
        .insert("elapsed_ms".into(), serde_json::json!(0));
    v
}

fn write_tau_map(dir: &Path, n: usize) -> std::path::PathBuf {
    let n2 = n * n;
    let mut entries = vec![vec!["0".to_string(); n2]; n2];
    for i in 0..n {
        for j in 0..n {
            // τ sends e_ij to e_ji
            entries[j * n + i][i * n + j] = "1".to_string();
        }
    }
    let path = dir.join(format!("tau{n}.json"));
    std::fs::write(
        &path,
        serde_json::to_string(&serde_json::json!({ "n": n2, "entries": entries })).unwrap(),
    )
    .unwrap();
    path
}

fn write_params_map(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("params.json");
    std::fs::write(
        &path,
        r#"{"alpha":"2","a":{"n":3,"entries":[["1","1","0"],["0","1","0"],["2","0","1"]]},"g":["1","0","0","0","-1","0","0","2","1"],"transpose":false}"#,
    )
    .unwrap();
    path
}

fn write_generic_map(dir: &Path) -> std::path::PathBuf {
    // invertible (unipotent) but sends 1 to 1 + e21, so not standard
    let path = dir.join("generic.json");
    std::fs::write(
        &path,
        r#"{"n":4,"entries":[["1","1","0","0"],["0","1","1","0"],["0","0","1","1"],["0","0","0","1"]]}"#,
    )
    .unwrap();
    path
}

#[test]
fn criterion_10_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let tau = write_tau_map(dir.path(), 2);
    let tau_s = tau.to_str().unwrap();
    let params = write_params_map(dir.path());
    let params_s = params.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["classify", "--poly", S3],
        vec!["identity-test", "--poly", S3, "--n", "2", "--seed", "7"],
        vec![
            "preserve-check",
            "--poly",
            "x1 x2",
            "--map",
            tau_s,
            "--trials",
            "40",
            "--seed",
            "11",
        ],
        vec![
            "preserve-check",
            "--poly",
            COMMUTATOR,
            "--map",
            params_s,
            "--trials",
            "25",
            "--seed",
            "3",
        ],
        vec!["decompose", "--map", params_s],
        vec!["witness-theta", "--poly", "x1 x2 x3 x4", "--n", "3"],
        vec!["lemma23", "--poly", COMMUTATOR, "--n", "2", "--seed", "5"],
    ];
    for args in &commands {
        let first = run(args);
        let second = run(args);
        assert_eq!(
            normalized(&first),
            normalized(&second),
            "run of {args:?} must be reproducible"
        );
        assert_eq!(first.status.code(), second.status.code());
    }
    println!("[PASS] criterion 10: repeated runs with identical flags and seed produce identical reports");
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    // 0: value/pass
    assert_eq!(run(&["classify", "--poly", "x1 x2"]).status.code(), Some(0));
    assert_eq!(
        run(&["identity-test", "--poly", COMMUTATOR, "--n", "1"])
            .status
            .code(),
        Some(0)
    );
    // 1: fail with witness
    assert_eq!(
        run(&["identity-test", "--poly", S3, "--n", "2"])
            .status
            .code(),
        Some(1)
    );
    let tau = write_tau_map(dir.path(), 2);
    assert_eq!(
        run(&[
            "preserve-check",
            "--poly",
            "x1 x2",
            "--map",
            tau.to_str().unwrap(),
            "--trials",
            "30"
        ])
        .status
        .code(),
        Some(1)
    );
    let generic = write_generic_map(dir.path());
    assert_eq!(
        run(&["decompose", "--map", generic.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    // 2: usage/input errors
    assert_eq!(
        run(&["classify", "--poly", "x1 +"]).status.code(),
        Some(2),
        "syntax error"
    );
    assert_eq!(
        run(&["classify", "--poly", "x1 x1"]).status.code(),
        Some(2),
        "non-multilinear input"
    );
    assert_eq!(
        run(&["witness-theta", "--poly", "x1 x2 x3 x4", "--n", "2"])
            .status
            .code(),
        Some(2),
        "degree out of range"
    );
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    println!("[PASS] exit codes: 0 = pass/value, 1 = fail with witness, 2 = usage/input error");
}

#[test]
fn recheck_verifies_every_report_kind() {
    let dir = tempfile::tempdir().unwrap();
    let tau = write_tau_map(dir.path(), 2);
    let params = write_params_map(dir.path());
    let generic = write_generic_map(dir.path());
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["classify", "--poly", S3], "classify"),
        (
            vec!["identity-test", "--poly", S3, "--n", "2"],
            "identity-fail",
        ),
        (
            vec!["identity-test", "--poly", S3, "--n", "3", "--seed", "2"],
            "identity-fail-n3",
        ),
        (
            vec![
                "preserve-check",
                "--poly",
                "x1 x2",
                "--map",
                tau.to_str().unwrap(),
                "--trials",
                "30",
            ],
            "preserve-fail",
        ),
        (
            vec![
                "preserve-check",
                "--poly",
                COMMUTATOR,
                "--map",
                params.to_str().unwrap(),
                "--trials",
                "20",
            ],
            "preserve-pass",
        ),
        (
            vec!["decompose", "--map", params.to_str().unwrap()],
            "decompose-value",
        ),
        (
            vec!["decompose", "--map", generic.to_str().unwrap()],
            "decompose-fail",
        ),
        (
            vec!["witness-theta", "--poly", S3, "--n", "3"],
            "witness-theta",
        ),
        (vec!["lemma23", "--poly", COMMUTATOR, "--n", "2"], "lemma23"),
    ];
    for (args, name) in cases {
        let out = run(&args);
        let report_path = dir.path().join(format!("{name}.json"));
        std::fs::write(&report_path, &out.stdout).unwrap();
        let recheck = run(&["recheck", "--report", report_path.to_str().unwrap()]);
        assert_eq!(
            recheck.status.code(),
            Some(0),
            "recheck of {name} must pass: {}",
            String::from_utf8_lossy(&recheck.stdout)
        );
        let verdict = stdout_json(&recheck);
        assert_eq!(verdict["verdict"], "pass");
    }
    println!("[PASS] recheck verifies witnesses and recomputations for every report kind");
}

#[test]
fn recheck_catches_tampered_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["identity-test", "--poly", S3, "--n", "2"]);
    let mut report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // flip the claimed witness value
    let value = report["witness"]["value"]["entries"][0][1]
        .as_str()
        .unwrap()
        .to_string();
    report["witness"]["value"]["entries"][0][1] = serde_json::json!(format!("{value}7"));
    let path = dir.path().join("tampered.json");
    std::fs::write(&path, serde_json::to_vec(&report).unwrap()).unwrap();
    let recheck = run(&["recheck", "--report", path.to_str().unwrap()]);
    assert_eq!(recheck.status.code(), Some(1));
    assert_eq!(stdout_json(&recheck)["verdict"], "fail");
}

#[test]
fn thread_env_var_does_not_change_verdicts() {
    let mut single = Command::new(bin());
    single
        .args(["identity-test", "--poly", S3, "--n", "2"])
        .env("PRESERVER_LAB_THREADS", "1");
    let mut many = Command::new(bin());
    many.args(["identity-test", "--poly", S3, "--n", "2"])
        .env("PRESERVER_LAB_THREADS", "4");
    let a = single.output().unwrap();
    let b = many.output().unwrap();
    assert_eq!(normalized(&a), normalized(&b));
}

#[test]
fn text_format_is_available() {
    let out = run(&["classify", "--poly", "x1 x2", "--format", "text"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("verdict: value"));
    assert!(text.contains("command: classify"));
}
