use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac-forge")).args(args).output().unwrap()
}

fn corpus(file: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(file).to_string_lossy().into_owned()
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dirac-forge-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn identity_exits_zero() {
    let out = bin(&["run", &corpus("01-identity.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["summary"]["passed"], 1);
}

#[test]
fn scaled_identity_is_skipped_with_reason() {
    let out = bin(&["run", &corpus("03-two-identity.json")]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let verdicts = &v["reports"][0]["verdicts"];
    assert_eq!(verdicts["orthogonal"]["status"], "fail");
    assert_eq!(verdicts["integrable-direct"]["status"], "skipped");
    assert_eq!(verdicts["integrable-direct"]["reason"], "matrix is not orthogonal");
}

#[test]
fn malformed_arity_names_the_row() {
    let out = bin(&["run", &corpus("21-malformed-arity.json")]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["reports"][0]["error"]["kind"], "schema");
    assert!(String::from_utf8_lossy(&out.stderr).contains("matrix row 1 has 3 entries"));
}

#[test]
fn exact_backend_on_trig_is_a_backend_error() {
    let out = bin(&["run", "--backend", "exact", &corpus("13-rotation-by-x.json")]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn spec_errors_outrank_backend_errors() {
    let p = scratch(
        "mixed.json",
        r#"[{"matrix":[["cos(x)","-sin(x)"],["sin(x)","cos(x)"]],"backend":{"mode":"exact"}},{"matrix":[["1","0"],["0"]]}]"#,
    );
    assert_eq!(bin(&["run", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn check_flag_restricts_verdicts() {
    let out = bin(&["run", "--check", "orthogonal", "--check", "norm", &corpus("05-rotation-quarter.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["reports"][0]["order"], serde_json::json!(["orthogonal", "norm"]));
}

#[test]
fn grid_and_box_flags_reach_the_backend() {
    let out = bin(&["run", "--grid", "5", "--box", "-2,2", "--tol", "1e-10", &corpus("13-rotation-by-x.json")]);
    let backend = &json(&out)["reports"][0]["backend"];
    assert_eq!(backend["points"], 5);
    assert_eq!(backend["box"][0], serde_json::json!([-2.0, 2.0]));
    assert_eq!(bin(&["run", "--box", "2,1", &corpus("01-identity.json")]).status.code(), Some(2));
}

#[test]
fn text_format_and_output_file() {
    let target = std::env::temp_dir().join(format!("dirac-forge-out-{}.txt", std::process::id()));
    let out = bin(&["run", "--format", "text", "-o", target.to_str().unwrap(), &corpus("01-identity.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.starts_with("dirac-forge "));
    assert!(text.contains("[pass] identity"));
}

#[test]
fn seed_is_echoed() {
    let out = Command::new(env!("CARGO_BIN_EXE_dirac-forge"))
        .args(["run", &corpus("01-identity.json")])
        .env("DIRAC_FORGE_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(json(&out)["seed"], "42");
}

#[test]
fn parse_prints_normal_form() {
    let out = bin(&["parse", "(x + 1)^2 - x^2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1 + 2*x");
}

#[test]
fn parse_error_shows_a_caret() {
    let out = bin(&["parse", "sin(x"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("\n  sin(x\n       ^"), "{err}");
}

#[test]
fn missing_path_is_a_spec_error() {
    assert_eq!(bin(&["run", "/nonexistent/spec.json"]).status.code(), Some(2));
}
