//! End-to-end tests of the installed binary: exit codes, report shapes,
//! JSON round-trip stability, and the file-based input formats.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use brauerk::abelian::AbGroup;
use brauerk::algebra::matrix_algebra;
use brauerk::cli::algebra_to_file;
use brauerk::config::Config;
use brauerk::ring::parse_ring;
use brauerk::smc::from_abelian_group;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_brauerk"));
    c.env_remove("BRAUERK_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn json_report(args: &[&str]) -> (Output, Value) {
    let out = run(args);
    let report: Value = serde_json::from_str(&stdout_of(&out)).expect("json report");
    (out, report)
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("brauerk-test-{}-{name}", std::process::id()));
    fs::write(&path, contents).expect("write temp file");
    path
}

#[test]
fn exit_codes_follow_the_contract() {
    assert_eq!(run(&["ring", "info", "Z/6"]).status.code(), Some(0));
    assert_eq!(run(&["ring", "info", "Z/1"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["ring", "info"]).status.code(), Some(1));
}

#[test]
fn zero_ring_is_rejected_with_a_message() {
    let out = run(&["ring", "info", "Z/1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error:"), "stderr was {err:?}");
}

#[test]
fn size_caps_exit_as_inconclusive() {
    let config = temp_file("tiny-config.json", r#"{"max_ring_order": 4}"#);
    let out = bin()
        .env("BRAUERK_CONFIG", &config)
        .args(["ring", "info", "Z/6"])
        .output()
        .expect("binary runs");
    fs::remove_file(&config).ok();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn composite_ring_invariants_come_out_right() {
    let (out, report) = json_report(&["brauer", "compute", "Z/12", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report["schema"], "v1");
    assert_eq!(report["command"], "brauer compute Z/12 --json");
    assert_eq!(report["complete"], true);
    let result = &report["result"];
    assert_eq!(result["br"], serde_json::json!([]));
    assert_eq!(result["pic"], serde_json::json!([]));
    assert_eq!(result["gl1"], serde_json::json!([2, 2]));
    assert!(report["wall_ms"].is_u64());
}

#[test]
fn reports_reserialize_byte_identically() {
    for args in [
        vec!["ring", "info", "Z/12", "--json"],
        vec!["picard", "compute", "Z/9", "--json"],
        vec!["brauer", "compute", "Z/6", "--json"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "args {args:?}");
        let text = stdout_of(&out);
        let value: Value = serde_json::from_str(&text).expect("parses");
        let again = serde_json::to_string_pretty(&value).unwrap() + "\n";
        assert_eq!(again, text, "round trip changed bytes for {args:?}");
    }
}

#[test]
fn delooping_a_cyclic_group_dump_reports_its_order() {
    let amb = from_abelian_group(&AbGroup::from_cyclic_orders(&[3]));
    let path = temp_file("c3-groupoid.json", &serde_json::to_string(&amb).unwrap());
    let path_str = path.to_str().unwrap().to_string();
    let (out, report) = json_report(&["gamma", "deloop", "--input", &path_str, "--json"]);
    fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(0));
    let result = &report["result"];
    assert_eq!(result["pi0_components"], 1);
    assert_eq!(result["pi1_torsion"], serde_json::json!([3]));
    assert_eq!(result["ok"], true);
}

#[test]
fn malformed_groupoid_files_error_out() {
    let amb = from_abelian_group(&AbGroup::from_cyclic_orders(&[2]));
    let mut value = serde_json::to_value(&amb).unwrap();
    value["symmetry"][0] = serde_json::json!(99);
    let path = temp_file("bad-groupoid.json", &value.to_string());
    let path_str = path.to_str().unwrap().to_string();
    let out = run(&["gamma", "deloop", "--input", &path_str]);
    fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(1));
    let not_json = temp_file("not-json.json", "{");
    let out = run(&["gamma", "deloop", "--input", not_json.to_str().unwrap()]);
    fs::remove_file(&not_json).ok();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn algebra_files_drive_azumaya_and_morita() {
    let config = Config::default();
    let ring = parse_ring("Z/6", &config).unwrap();
    let a = matrix_algebra(&ring, 2, &config).unwrap();
    let file = algebra_to_file(&a);
    let path = temp_file("m2-z6.json", &serde_json::to_string(&file).unwrap());
    let path_str = path.to_str().unwrap().to_string();

    let (out, report) = json_report(&["azumaya", "check", "Z/6", "--algebra", &path_str, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report["result"]["azumaya"], true);
    assert_eq!(report["result"]["ranks"], serde_json::json!([4, 4]));

    let (out, report) = json_report(&["morita", "witness", "Z/6", "--algebra", &path_str, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report["result"]["trivial"], true);
    assert_eq!(report["result"]["witness"]["generator_ranks"], serde_json::json!([2, 2]));

    let out = run(&["azumaya", "check", "Z/12", "--algebra", &path_str]);
    assert_eq!(out.status.code(), Some(1));
    fs::remove_file(&path).ok();
}

#[test]
fn relative_accepts_the_arrow_spelling() {
    let map = temp_file(
        "z4-z2-map.json",
        r#"{"schema": "v1", "src": "Z/4", "tgt": "Z/2", "map": [0, 1, 0, 1]}"#,
    );
    let map_str = map.to_str().unwrap().to_string();
    let (out, report) =
        json_report(&["relative", "Z/4", "->", "Z/2", "--map", &map_str, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report["result"]["alternating_identity"], true);
    assert_eq!(report["result"]["cardinality_identity"], true);

    let out = run(&["relative", "Z/4", "Z/2", "--map", &map_str]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["relative", "Z/4", "Z/3", "--map", &map_str]);
    assert_eq!(out.status.code(), Some(1));
    fs::remove_file(&map).ok();
}

#[test]
fn budget_starved_selftest_is_deterministic() {
    let first = run(&["selftest", "--budget", "1", "--json"]);
    let second = run(&["selftest", "--budget", "1", "--json"]);
    assert_eq!(first.status.code(), Some(2));
    assert_eq!(second.status.code(), Some(2));
    assert_eq!(stdout_of(&first), stdout_of(&second));
    let report: Value = serde_json::from_str(&stdout_of(&first)).expect("json report");
    assert!(report.get("wall_ms").is_none());
    assert_eq!(report["result"]["checks"].as_array().unwrap().len(), 10);
}

#[test]
fn text_reports_mirror_the_json_verdicts() {
    let out = run(&["picard", "compute", "Z/12"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("unit invariants: [2, 2]"), "text was {text:?}");
    assert!(text.contains("invertible classes: 1"), "text was {text:?}");
}
