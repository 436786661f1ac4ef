use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn pidkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pidkit"))
        .args(args)
        .env_remove("PID_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn field(v: &Value, path: &[&str]) -> f64 {
    let leaf = path.iter().fold(v, |v, k| &v[*k]);
    leaf.as_f64()
        .unwrap_or_else(|| leaf.to_string().parse().unwrap())
}

#[test]
fn and_file_round_trip() {
    let and = data("and.json");
    let v = json(&pidkit(&[
        "compute",
        and.to_str().unwrap(),
        "--target",
        "Z",
        "--src1",
        "X",
        "--src2",
        "Y",
        "--json",
    ]));
    assert!((field(&v, &["decomposition", "si"]) - 0.311).abs() < 1e-3);
    assert!(field(&v, &["decomposition", "ui_y"]).abs() < 1e-6);
    assert!(field(&v, &["decomposition", "ui_z"]).abs() < 1e-6);
}

#[test]
fn xor_file_round_trip() {
    let v = json(&pidkit(&[
        "compute",
        data("xor.json").to_str().unwrap(),
        "--json",
    ]));
    assert!((field(&v, &["decomposition", "ci"]) - 1.0).abs() < 1e-9);
    let v = json(&pidkit(&[
        "compute",
        data("nogo.json").to_str().unwrap(),
        "--json",
    ]));
    assert!((field(&v, &["decomposition", "ci"]) - 1.0).abs() < 1e-9);
    let v = json(&pidkit(&[
        "compute",
        data("nogo.json").to_str().unwrap(),
        "--target",
        "Y1,Y2",
        "--src1",
        "Y1",
        "--src2",
        "Y2",
        "--json",
    ]));
    assert!(field(&v, &["decomposition", "si"]).abs() < 1e-9);
    assert!((field(&v, &["decomposition", "ui_y"]) - 1.0).abs() < 1e-9);
}

#[test]
fn frank_wolfe_method_from_the_command_line() {
    let out = pidkit(&[
        "compute",
        data("xor.json").to_str().unwrap(),
        "--method",
        "frank-wolfe",
        "--json",
    ]);
    assert!((field(&json(&out), &["decomposition", "ci"]) - 1.0).abs() < 1e-6);
}

#[test]
fn input_errors_exit_with_two() {
    let and = data("and.json");
    let out = pidkit(&["compute", and.to_str().unwrap(), "--target", "Q"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown variable"));
    assert_eq!(
        pidkit(&["compute", "/nonexistent/file.json"]).status.code(),
        Some(2)
    );

    let dir = tempfile::tempdir().unwrap();
    let dup = dir.path().join("dup.json");
    let text = std::fs::read_to_string(&and)
        .unwrap()
        .replace("[0, 1, 0]", "[0, 0, 0]");
    std::fs::write(&dup, text).unwrap();
    assert_eq!(
        pidkit(&["compute", dup.to_str().unwrap()]).status.code(),
        Some(2)
    );

    let short = dir.path().join("short.json");
    let text = std::fs::read_to_string(&and)
        .unwrap()
        .replacen("0.25", "0.15", 1);
    std::fs::write(&short, text).unwrap();
    let out = pidkit(&["compute", short.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("0.9"));
}

#[test]
fn oracle_reports_discrepancy_and_cap() {
    let v = json(&pidkit(&[
        "oracle",
        data("xor.json").to_str().unwrap(),
        "--resolution",
        "1e-2",
        "--json",
    ]));
    assert!(field(&v, &["max_discrepancy"]) <= 1e-2);

    let dir = tempfile::tempdir().unwrap();
    let big = dir.path().join("big.json");
    let mut entries = Vec::new();
    for x in 0..3 {
        for y in 0..4 {
            for z in 0..4 {
                entries.push(format!(
                    r#"{{"state": [{x}, {y}, {z}], "p": 0.0208333333333333333}}"#
                ));
            }
        }
    }
    let text = format!(
        r#"{{"variables": [{{"name": "X", "alphabet_size": 3}}, {{"name": "Y", "alphabet_size": 4}}, {{"name": "Z", "alphabet_size": 4}}], "probabilities": [{}]}}"#,
        entries.join(",")
    );
    std::fs::write(&big, text).unwrap();
    assert_eq!(
        pidkit(&["oracle", big.to_str().unwrap()]).status.code(),
        Some(4)
    );
}

#[test]
fn nogo_ledger() {
    let out = pidkit(&["nogo"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("I_∂(top) ≤ −1 bit"), "{text}");
    assert!(text.contains("MI(X:{Y1,Y2,Y3}) = 2 bit"));
    let v = json(&pidkit(&["nogo", "--json"]));
    assert_eq!(field(&v, &["bound"]), -1.0);
    assert_eq!(v["verdict"], "local positivity violated");
}

#[test]
fn properties_are_deterministic_and_seeded() {
    let args = [
        "properties",
        "--suite",
        "identity",
        "--trials",
        "25",
        "--seed",
        "7",
        "--json",
    ];
    let a = pidkit(&args);
    let b = pidkit(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let sequential = pidkit(&[&args[..], &["--sequential"]].concat());
    assert_eq!(a.stdout, sequential.stdout);

    let env = Command::new(env!("CARGO_BIN_EXE_pidkit"))
        .args([
            "properties",
            "--suite",
            "identity",
            "--trials",
            "25",
            "--json",
        ])
        .env("PID_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(a.stdout, env.stdout);
    assert_eq!(json(&env)["seed"], 7);
}

#[test]
fn conjecture_never_fails_the_run() {
    let out = pidkit(&["properties", "--suite", "conjecture", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn counterexamples_pass_with_margins() {
    let v = json(&pidkit(&[
        "properties",
        "--suite",
        "counterexamples",
        "--json",
    ]));
    assert_eq!(v["passed"], true);
    let margins: Vec<f64> = v["counterexamples"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|c| c["relations"].as_array().unwrap().iter())
        .filter(|r| r["comparison"] != "equal")
        .map(|r| field(r, &["margin"]))
        .collect();
    assert!(margins.iter().all(|m| *m >= 0.3), "{margins:?}");
}
