//! Runs the `phasecrit` binary against the core fixtures and checks output
//! and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn phasecrit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasecrit"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn check_pass_and_fail() {
    let o = phasecrit(&["check", &fixture("z4.structure")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("overall: PASS"));

    let o = phasecrit(&["check", &fixture("s3.structure")]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("[FAIL] termination"));
    assert!(out.contains("replay: stalls mode=ascending stable={e} excluded=(12)"));
}

#[test]
fn dual_flag_switches_the_verdict() {
    let file = fixture("q8-pulled-back.structure");
    assert_eq!(phasecrit(&["check", &file]).status.code(), Some(1));
    assert_eq!(
        phasecrit(&["check", &file, "--dual", "canonical"]).status.code(),
        Some(0)
    );
    let o = phasecrit(&["check", &fixture("z4.structure"), "--dual", "declared"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("declares no dual"));
}

#[test]
fn literal_filtration_flag() {
    let o = phasecrit(&["--filtration", "literal", "check", &fixture("q8.structure")]);
    assert!(stdout(&o).contains("literal filtration"));
}

#[test]
fn construct_writes_dot() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("q8.dot");
    let o = phasecrit(&["construct", &fixture("q8.structure"), "--dot", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("phase object: 4 carrier element(s)"));
    let graph = std::fs::read_to_string(&dot).unwrap();
    assert!(graph.starts_with("digraph filtration {"));
    assert_eq!(graph.matches("subgraph cluster_").count(), 1);

    let o = phasecrit(&["construct", &fixture("s3.structure")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("witnesses:"));
}

#[test]
fn decompose_regular_module() {
    let o = phasecrit(&[
        "decompose",
        &fixture("z4.structure"),
        "--module",
        &fixture("z4-regular.module"),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.matches(": dimension 1").count(), 4);
    assert!(out.contains("ΣE = I: holds"));

    // the faithful module of Q8 is not constant on the response classes
    let o = phasecrit(&[
        "decompose",
        &fixture("q8.structure"),
        "--module",
        &fixture("q8-2dim.module"),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not constant on response classes"));
}

#[test]
fn islands_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("islands.dot");
    let o = phasecrit(&["islands", &fixture("z4.structure"), "--dot", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("{0,2} internal depth 0"));
    let graph = std::fs::read_to_string(&dot).unwrap();
    assert!(graph.contains("s0 -> s1;"));

    let o = phasecrit(&["--max-enumeration", "2", "islands", &fixture("z4.structure")]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn oracle_census() {
    let o = phasecrit(&["oracle", &fixture("q8.structure")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("preserving bijections: 24"));

    let o = phasecrit(&["oracle", &fixture("z4.structure"), &fixture("v4.structure")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("preserving bijections: 0"));

    let o = phasecrit(&["oracle", &fixture("heis3.structure")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("exceeds the enumeration bound"));
}

#[test]
fn json_report_is_deterministic() {
    let args = ["report", &fixture("z4.structure"), "--format", "json"];
    let first = phasecrit(&args);
    let second = phasecrit(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let out = stdout(&first);
    let keys: Vec<usize> = [
        "\"criterion\"",
        "\"witnesses\"",
        "\"phase_object\"",
        "\"forced_structure\"",
    ]
    .iter()
    .map(|k| out.find(k).unwrap())
    .collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
    assert!(out.contains("\"overall\": \"pass\""));
}

#[test]
fn text_report_matches_golden_forced_section() {
    let o = phasecrit(&["report", &fixture("z4.structure")]);
    assert_eq!(o.status.code(), Some(0));
    let golden = std::fs::read_to_string(fixture("z4-forced.txt")).unwrap();
    assert!(stdout(&o).ends_with(&golden));

    let o = phasecrit(&["report", &fixture("s3.structure"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("\"condition\": \"termination\""));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.structure");
    std::fs::write(&bad, "[structure]\nname = X\nelements = a b\n\n[op]\na b\nb\n").unwrap();
    let o = phasecrit(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ragged row at line 7"), "{}", stderr(&o));

    let o = phasecrit(&["check", dir.path().join("missing").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
