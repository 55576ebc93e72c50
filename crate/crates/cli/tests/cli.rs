//! End-to-end tests of the binary: exit codes, text output, the JSON
//! report schema, and input-error diagnostics.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn write_doc(name: &str, text: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("abtheme-test-{}-{}", std::process::id(), name));
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abtheme"))
        .args(args)
        .output()
        .unwrap()
}

const RANK2_DOC: &str = "series S = 1 + b;\ngenerator e = s^(5/2)*L^1 + S*s^(1/2);\nanalyze e;\n";

#[test]
fn analyze_text_report() {
    let p = write_doc("an-text", RANK2_DOC);
    let out = run(&["analyze", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("rank 2"), "{}", text);
    assert!(text.contains("lambda_1 = 5/2"), "{}", text);
    assert!(text.contains("p_1 = 2"), "{}", text);
    assert!(text.contains("alpha_1 = -15/8"), "{}", text);
}

#[test]
fn analyze_json_schema() {
    let p = write_doc("an-json", RANK2_DOC);
    let out = run(&["analyze", p.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let v: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("stdout is one JSON object");
    assert_eq!(v["rank"], 2);
    assert_eq!(v["lambda1"], "5/2");
    assert_eq!(v["p"], serde_json::json!([2]));
    assert_eq!(v["principal_params"], serde_json::json!(["-15/8"]));
    assert!(v["effective_order"].as_u64().unwrap() > 0);
    assert!(v["assumptions"].is_array());
}

#[test]
fn analyze_rank_one_names_e_lambda() {
    let p = write_doc("an-r1", "generator e = s^(3/2);\nanalyze e;\n");
    let out = run(&["analyze", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("rank 1"), "{}", text);
    assert!(text.contains("isomorphic to E_lambda: true"), "{}", text);
}

#[test]
fn annihilator_command() {
    let p = write_doc(
        "ann",
        "series S = 1 + b;\ngenerator e = s^(5/2)*L^1 + S*s^(1/2);\nannihilator e;\n",
    );
    let out = run(&["annihilator", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("rank 2"), "{}", text);
    assert!(text.contains("P = "), "{}", text);
}

#[test]
fn pushforward_verifies_and_reports() {
    let p = write_doc(
        "push",
        "series S = 1 + b;\ngenerator e = s^(5/2)*L^1 + S*s^(1/2);\ncov c = theta 2*a + a^3;\npushforward e by c;\n",
    );
    let out = run(&["pushforward", p.to_str().unwrap(), "--order", "16"]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("invariants: preserved"), "{}", text);
    // p_1 = 2, r = 2: alpha scales by 4 to -15/2
    assert!(text.contains("-15/2"), "{}", text);
}

#[test]
fn pushforward_json_is_verified() {
    let p = write_doc(
        "push-json",
        "generator e = s^(3/2);\ncov c = subst t + t^2;\npushforward e by c;\n",
    );
    let out = run(&[
        "pushforward",
        p.to_str().unwrap(),
        "--order",
        "12",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verified"], true);
    assert_eq!(v["rank"], 1);
    assert_eq!(v["r"], "1");
}

#[test]
fn parse_error_exits_two_with_position() {
    let p = write_doc("bad-syntax", "generator e = s^(3/2)\nanalyze e;\n");
    let out = run(&["analyze", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{:?}", out);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("input error"), "{}", err);
    assert!(err.contains("2:1"), "missing line:col in {}", err);
}

#[test]
fn undeclared_name_exits_two() {
    let p = write_doc("undeclared", "generator e = s^(3/2);\nanalyze f;\n");
    let out = run(&["analyze", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{:?}", out);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("undeclared generator 'f'"), "{}", err);
}

#[test]
fn exponent_class_mismatch_exits_two() {
    let p = write_doc(
        "class-mismatch",
        "generator e = s^(1/2) + s^(1/3);\nanalyze e;\n",
    );
    let out = run(&["analyze", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{:?}", out);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("classes mod 1"), "{}", err);
}

#[test]
fn invalid_cov_exits_two() {
    let p = write_doc(
        "bad-cov",
        "generator e = s^(3/2);\ncov c = theta a^2;\npushforward e by c;\n",
    );
    let out = run(&["pushforward", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{:?}", out);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("linear term"), "{}", err);
}

#[test]
fn missing_file_exits_two() {
    let out = run(&["analyze", "/nonexistent/abtheme-doc"]);
    assert_eq!(out.status.code(), Some(2), "{:?}", out);
}

#[test]
fn no_matching_command_exits_two() {
    let p = write_doc("no-cmd", "generator e = s^(3/2);\nanalyze e;\n");
    let out = run(&["pushforward", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{:?}", out);
}

#[test]
fn verify_suite_subcommand_passes() {
    let out = run(&["verify-suite"]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches(": PASS").count(), 12, "{}", text);
}
