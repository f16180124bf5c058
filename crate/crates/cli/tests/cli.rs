use std::path::PathBuf;
use std::process::{Command, Output};

use gptdyn_core::mub::MubReport;
use gptdyn_core::restriction::RestrictionReport;
use gptdyn_core::solver::{SolveReport, TheoremReport, VerificationReport};
use serde::de::DeserializeOwned;
use serde::Serialize;

fn gptdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gptdyn")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gptdyn-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

/// Parses the emitted JSON into `T` and renders it again.
fn assert_typed_round_trip<T: Serialize + DeserializeOwned>(text: &str) {
    let parsed: T = serde_json::from_str(text).unwrap();
    assert_eq!(format!("{}\n", serde_json::to_string_pretty(&parsed).unwrap()), text);
}

#[test]
fn solve_gbit_low_is_unique_identity() {
    let out = gptdyn(&["solve", "--builtin", "gbit", "--branch", "low"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("unique_identity"));
}

#[test]
fn theorem_on_qubit_reports_dynamics() {
    let out = gptdyn(&["theorem", "--builtin", "qubit"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("non-classical dynamics present"));
}

#[test]
fn identity_verifies_on_gbit() {
    let id = scratch("id.json", r#"{"rows": [["1","0","0"],["0","1","0"],["0","0","1"]]}"#);
    let out = gptdyn(&[
        "verify",
        "--builtin",
        "gbit",
        "--branch",
        "low",
        "--transform",
        id.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("branch low: Pass"));
}

#[test]
fn failed_verification_still_exits_zero() {
    // Half shear on the low branch of the gbit: moves a state outside the square.
    let shear = scratch(
        "shear.json",
        r#"{"rows": [["1","0","0"],["0","1","0"],["1/2","-1/2","1/2"]]}"#,
    );
    let out = gptdyn(&[
        "verify",
        "--builtin",
        "gbit",
        "--branch",
        "low",
        "--transform",
        shear.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let report: VerificationReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!report.passed());
}

#[test]
fn input_errors_exit_two() {
    let missing = gptdyn(&["analyze", "--theory", "/definitely/not/here.json"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("i/o error"));

    let unknown = gptdyn(&["solve", "--builtin", "pr-box"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(unknown.stdout.is_empty());

    let bad_branch = gptdyn(&["solve", "--builtin", "gbit", "--branch", "sideways"]);
    assert_eq!(bad_branch.status.code(), Some(2));

    let both = gptdyn(&["solve", "--builtin", "gbit", "--theory", "x.json"]);
    assert_eq!(both.status.code(), Some(2));

    let wrong_shape = scratch("wide.json", r#"{"rows": [["1","0"],["0","1"]]}"#);
    let out = gptdyn(&[
        "verify",
        "--builtin",
        "gbit",
        "--transform",
        wrong_shape.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_measurement_config_reports_its_line() {
    let cfg = scratch(
        "empty.json",
        "{\n  \"name\": \"empty\",\n  \"measurements\": [],\n  \"state_space\": {\"type\": \"ball\"}\n}\n",
    );
    let out = gptdyn(&["analyze", "--theory", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("parse error at line 3"), "{err}");
}

#[test]
fn theory_file_matches_builtin() {
    let cfg = scratch(
        "square.json",
        r#"{
  "name": "square",
  "measurements": [
    {"label": "Z", "outcomes": 2, "role": "branch"},
    {"label": "X", "outcomes": 2, "role": "fiducial"}
  ],
  "state_space": {
    "type": "polytope_v",
    "vertices": [["1","1","1"], ["1","1","0"], ["1","0","1"], ["1","0","0"]]
  }
}"#,
    );
    let file = gptdyn(&["solve", "--theory", cfg.to_str().unwrap(), "--format", "json"]);
    let built = gptdyn(&["solve", "--builtin", "gbit", "--format", "json"]);
    assert!(file.status.success(), "{}", String::from_utf8_lossy(&file.stderr));
    assert_eq!(file.stdout, built.stdout);
}

#[test]
fn cube_table_shows_two_free_directions_per_branch() {
    let text = stdout(&gptdyn(&["analyze", "--builtin", "cube"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "class: FullyIndependent  (N = 2, M = 2, d = 4)");
    assert_eq!(lines[1], "branch  freedom");
    assert_eq!(lines[3], "up      2");
    assert_eq!(lines[4], "low     2");
}

#[test]
fn octahedron_table_has_family_dimension_one() {
    let text = stdout(&gptdyn(&["solve", "--builtin", "octahedron"]));
    let header = text.lines().next().unwrap();
    let col = header.find("family_dim").unwrap();
    for row in text.lines().skip(2) {
        assert_eq!(row[col..].split_whitespace().next(), Some("1"), "{row}");
    }
}

#[test]
fn json_round_trips_byte_for_byte() {
    for name in ["gbit", "cube", "qubit", "classical2", "octahedron"] {
        let json = |cmd: &str| stdout(&gptdyn(&[cmd, "--builtin", name, "--format", "json"]));
        assert_typed_round_trip::<RestrictionReport>(&json("analyze"));
        assert_typed_round_trip::<Vec<SolveReport>>(&json("solve"));
        if name != "classical2" {
            assert_typed_round_trip::<MubReport>(&json("mub"));
        }
        assert_typed_round_trip::<TheoremReport>(&json("theorem"));
    }
    let single = stdout(&gptdyn(&[
        "solve",
        "--builtin",
        "octahedron",
        "--branch",
        "up",
        "--format",
        "json",
    ]));
    assert_typed_round_trip::<SolveReport>(&single);
    let demo = stdout(&gptdyn(&["demo", "--format", "json"]));
    let value: serde_json::Value = serde_json::from_str(&demo).unwrap();
    assert_eq!(format!("{}\n", serde_json::to_string_pretty(&value).unwrap()), demo);
}

#[test]
fn rationals_are_never_decimals() {
    let outputs = [
        gptdyn(&["demo", "--format", "json"]),
        gptdyn(&["demo"]),
        gptdyn(&["solve", "--builtin", "octahedron", "--format", "json"]),
    ];
    for out in &outputs {
        assert!(!has_decimal(&stdout(out)), "{}", stdout(out));
    }
}

/// True if the text contains a digit, a dot and another digit in a row.
fn has_decimal(text: &str) -> bool {
    text.as_bytes()
        .windows(3)
        .any(|w| w[0].is_ascii_digit() && w[1] == b'.' && w[2].is_ascii_digit())
}

#[test]
fn demo_passes_and_labels_the_contrast_theory() {
    let out = gptdyn(&["demo"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("octahedron: constructed contrast theory, not a standard model"));
    assert!(text.contains("allowed-set dimension: gbit 0 vs octahedron 1: strictly smaller"));
    assert!(text.trim_end().ends_with("demo: all checks pass"));
}

#[test]
fn theorem_comparison_fails_when_order_is_reversed() {
    let out = gptdyn(&["theorem", "--builtin", "octahedron", "--compare-builtin", "gbit"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("not strictly smaller"));
}

#[test]
fn mub_counterexample_for_a_lopsided_triangle() {
    let cfg = scratch(
        "triangle.json",
        r#"{
  "name": "triangle",
  "measurements": [
    {"label": "Z", "outcomes": 2, "role": "branch"},
    {"label": "X", "outcomes": 2, "role": "fiducial"}
  ],
  "state_space": {
    "type": "polytope_v",
    "vertices": [["1","1","1"], ["1","0","1"], ["1","1/2","0"]]
  }
}"#,
    );
    let out = gptdyn(&[
        "mub",
        "--theory",
        cfg.to_str().unwrap(),
        "--measurements",
        "Z,X",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: MubReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.counterexample.is_some());
}
