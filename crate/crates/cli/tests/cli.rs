//! End-to-end tests of the `modpair` binary: exit codes, document formats,
//! and byte-stable reports.

use std::path::PathBuf;
use std::process::{Command, Output};

use modpair_core::report::VerificationReport;

fn modpair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modpair"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("modpair-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn selfcheck_passes_and_emits_a_json_report() {
    let out = modpair(&["selfcheck"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let report = VerificationReport::from_json(&stdout_of(&out)).expect("valid report");
    assert_eq!(report.case, "selfcheck");
    assert!(report.passed());
    assert!(report.metrics.contains_key("schrod.borchers.residual"));
}

#[test]
fn selfcheck_on_a_tiny_grid_runs_structural_checks_only() {
    let out = modpair(&["selfcheck", "--grid-N", "16", "--grid-L", "4"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let report = VerificationReport::from_json(&stdout_of(&out)).expect("valid report");
    assert!(report.passed());
    assert!(!report.metrics.contains_key("schrod.borchers.residual"));
    assert!(report.metrics.contains_key("schrod.weyl.group_law"));
}

#[test]
fn invalid_grid_size_exits_2_and_names_the_field() {
    let out = modpair(&["selfcheck", "--grid-N", "1023"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("grid.N"), "stderr: {}", stderr_of(&out));
}

#[test]
fn unknown_example_and_sweep_names_exit_2() {
    let out = modpair(&["example", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("unknown example"));

    let out = modpair(&["sweep", "nope", "--sizes", "64"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("unknown sweep case"));
}

#[test]
fn malformed_sweep_sizes_exit_2() {
    let out = modpair(&["sweep", "appendix-a", "--sizes", "12x4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("invalid sweep size"));

    let out = modpair(&["sweep", "appendix-a", "--sizes", "63"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("even positive"));
}

#[test]
fn zero_translation_parameter_exits_2() {
    let out = modpair(&["appendix-a", "--s", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("nonzero"));
}

#[test]
fn expected_failure_suite_exits_0_when_the_failure_is_detected() {
    let out = modpair(&["example", "sinh-4.5", "--grid-N", "1024"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let report = VerificationReport::from_json(&stdout_of(&out)).expect("valid report");
    assert!(report.passed());
    let spectral = &report.metrics["inclusion.forward.spectral.defect"];
    assert!(spectral.value > 0.2, "defect {}", spectral.value);
}

#[test]
fn asserting_suite_exits_1_when_the_inclusion_fails() {
    let out = modpair(&[
        "inclusion",
        "--phase1",
        "sinh",
        "--phase2",
        "id",
        "--grid-N",
        "1024",
    ]);
    assert_eq!(out.status.code(), Some(1), "stderr: {}", stderr_of(&out));
    let report = VerificationReport::from_json(&stdout_of(&out)).expect("valid report");
    assert!(!report.passed());
    assert!(stderr_of(&out).contains("checks failed"));
}

#[test]
fn reports_are_byte_stable_across_reruns() {
    let args = ["example", "wiesbrock", "--grid-N", "1024"];
    let first = modpair(&args);
    let second = modpair(&args);
    assert_eq!(first.status.code(), Some(0));
    let a = VerificationReport::from_json(&stdout_of(&first)).expect("valid report");
    let b = VerificationReport::from_json(&stdout_of(&second)).expect("valid report");
    assert_eq!(a.canonical_bytes(), b.canonical_bytes());
}

#[test]
fn out_flag_writes_the_full_report_with_timings() {
    let path = temp_path("out.json");
    let out = modpair(&[
        "example",
        "wiesbrock",
        "--grid-N",
        "1024",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let text = std::fs::read_to_string(&path).expect("report written");
    let report = VerificationReport::from_json(&text).expect("valid report");
    assert!(!report.timings.is_empty());
    std::fs::remove_file(&path).ok();
}

#[test]
fn sweep_emits_a_csv_table_with_one_row_per_size() {
    let out = modpair(&["sweep", "appendix-a", "--sizes", "512,1024"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "N,discrepancy");
    assert!(lines[1].starts_with("512,"));
    assert!(lines[2].starts_with("1024,"));
}

#[test]
fn csv_report_format_lists_one_metric_per_row() {
    let out = modpair(&["selfcheck", "--grid-N", "16", "--grid-L", "4", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("metric,value,threshold,direction,state")
    );
    assert!(lines.clone().count() >= 10);
    assert!(lines.all(|l| l.split(',').count() == 5));
}

#[test]
fn config_subcommand_output_is_a_normalization_fixpoint() {
    let out = modpair(&["config", "--grid-N", "2048", "--phase1", "exp:0.25"]);
    assert_eq!(out.status.code(), Some(0));
    let first = stdout_of(&out);
    let path = temp_path("config.ini");
    std::fs::write(&path, &first).expect("config written");
    let out = modpair(&["config", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    assert_eq!(stdout_of(&out), first);
    std::fs::remove_file(&path).ok();
}

#[test]
fn config_file_and_flags_merge_with_flags_winning() {
    let path = temp_path("merge.ini");
    std::fs::write(&path, "[grid]\nN = 512\nL = 40\n").expect("config written");
    let out = modpair(&[
        "config",
        "--config",
        path.to_str().unwrap(),
        "--grid-N",
        "256",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("N = 256"), "flag wins: {text}");
    assert!(text.contains("L = 40"), "file survives: {text}");
    std::fs::remove_file(&path).ok();
}
