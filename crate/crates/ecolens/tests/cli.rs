//! Command-line contract: exit codes, output files, and the stdout tables.
//!
//! Exit code 2 marks configuration errors (bad flags, unusable paths), 3
//! marks data errors (missing or inconsistent datasets), 0 success.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

/// Runs the binary against `manifest` with a fresh output directory.
fn run(manifest: &str, args: &[&str]) -> (Output, TempDir) {
    let out = tempfile::tempdir().unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_ecolens"))
        .arg("--manifest")
        .arg(fixture(manifest))
        .arg("--out")
        .arg(out.path())
        .args(args)
        .output()
        .unwrap();
    (output, out)
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no exit code")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

#[test]
fn missing_manifest_flag_is_a_config_error() {
    let output = Command::new(env!("CARGO_BIN_EXE_ecolens"))
        .args(["homogenize"])
        .output()
        .unwrap();
    assert_eq!(code(&output), 2, "stderr: {}", stderr(&output));
    assert!(stderr(&output).contains("--manifest"));
}

#[test]
fn nonexistent_manifest_file_is_a_data_error() {
    let (output, _out) = run("no_such_manifest.json", &["homogenize"]);
    assert_eq!(code(&output), 3, "stderr: {}", stderr(&output));
}

#[test]
fn inverted_emergence_thresholds_are_rejected_before_loading_data() {
    // jump-min at or below the tolerance band cannot classify anything.
    let (output, _out) = run(
        "manifest.json",
        &["scaling", "--near-random-tol", "0.3", "--jump-min", "0.2"],
    );
    assert_eq!(code(&output), 2, "stderr: {}", stderr(&output));
}

#[test]
fn unwritable_output_directory_is_a_config_error() {
    let output = Command::new(env!("CARGO_BIN_EXE_ecolens"))
        .arg("--manifest")
        .arg(fixture("manifest.json"))
        .args(["--out", "/dev/null/sub", "homogenize"])
        .output()
        .unwrap();
    assert_eq!(code(&output), 2, "stderr: {}", stderr(&output));
}

#[test]
fn missing_resolutions_file_is_a_config_error() {
    let (output, _out) = run(
        "rater_manifest.json",
        &["index", "resolve", "--resolutions", "/no/such/file.json"],
    );
    assert_eq!(code(&output), 2, "stderr: {}", stderr(&output));
}

#[test]
fn agree_needs_a_multi_rater_bundle() {
    // The main bundle has one sheet per entity and edition.
    let (output, _out) = run("manifest.json", &["index", "agree"]);
    assert_eq!(code(&output), 3, "stderr: {}", stderr(&output));
}

#[test]
fn aggregate_rejects_unmerged_rater_sheets() {
    let (output, _out) = run("rater_manifest.json", &["index", "aggregate"]);
    assert_eq!(code(&output), 3, "stderr: {}", stderr(&output));
    assert!(
        stderr(&output).contains("index resolve"),
        "error should point at the merge workflow: {}",
        stderr(&output)
    );
}

#[test]
fn metrics_marks_logs_without_confidences_as_skipped() {
    let (output, _out) = run("manifest.json", &["metrics"]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("skipped: no confidences"), "{text}");
    assert!(text.contains("skipped: no toxicity scorer"), "{text}");
}

#[test]
fn report_without_thresholds_skips_emergence_with_a_reason() {
    let (output, _out) = run("manifest.json", &["report"]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("## skipped"), "{text}");
    assert!(text.contains("no emergence thresholds"), "{text}");
}

#[test]
fn scaling_flags_an_emergent_curve_with_its_threshold() {
    let (output, _out) = run(
        "manifest.json",
        &["scaling", "--near-random-tol", "0.05", "--jump-min", "0.2"],
    );
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("1e23"), "threshold missing: {text}");
    assert!(text.contains("true"), "emergent flag missing: {text}");
}

#[test]
fn efficiency_reports_the_exact_energy_figure() {
    let (output, _out) = run("manifest.json", &["efficiency"]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("352.000"), "{}", stdout(&output));
}

#[test]
fn format_selection_controls_which_files_are_written() {
    let (output, out) = run("manifest.json", &["--format", "json", "homogenize"]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let files: Vec<String> = std::fs::read_dir(out.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(!files.is_empty());
    assert!(
        files.iter().all(|f| f.ends_with(".json")),
        "non-JSON files written: {files:?}"
    );
}

#[test]
fn duplicate_formats_collapse_instead_of_erroring() {
    let (output, out) = run("manifest.json", &["--format", "csv,csv", "homogenize"]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let n = std::fs::read_dir(out.path()).unwrap().count();
    let (output2, out2) = run("manifest.json", &["--format", "csv", "homogenize"]);
    assert_eq!(code(&output2), 0);
    assert_eq!(n, std::fs::read_dir(out2.path()).unwrap().count());
}

#[test]
fn resolve_merges_rater_pairs_and_writes_the_sheet() {
    let (output, out) = run(
        "rater_manifest.json",
        &[
            "index",
            "resolve",
            "--resolutions",
            fixture("resolutions.json").to_str().unwrap(),
        ],
    );
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("## resolved_sheet"));
    assert!(out.path().join("resolved_acme.csv").is_file());
    assert!(out.path().join("resolved_acme.json").is_file());
}

#[test]
fn agree_quantifies_rater_disagreement() {
    let (output, _out) = run("rater_manifest.json", &["index", "agree"]);
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("## rater_agreement"), "{text}");
    assert!(text.contains("## rater_disagreements"), "{text}");
    // 97 jointly scored indicators, 11 of them in conflict.
    assert!(text.contains("0.887"), "agreement rate missing: {text}");
}

#[test]
fn precision_flag_controls_rounding_of_printed_tables() {
    let (coarse, _o1) = run("manifest.json", &["--precision", "1", "homogenize"]);
    let (fine, _o2) = run("manifest.json", &["--precision", "6", "homogenize"]);
    assert_eq!(code(&coarse), 0);
    assert_eq!(code(&fine), 0);
    assert!(stdout(&coarse).contains("0.5"), "{}", stdout(&coarse));
    assert!(stdout(&fine).contains("0.500000"), "{}", stdout(&fine));
}

#[test]
fn report_composes_every_analysis_into_one_run() {
    let (output, out) = run(
        "manifest.json",
        &[
            "report",
            "--near-random-tol",
            "0.05",
            "--jump-min",
            "0.2",
        ],
    );
    assert_eq!(code(&output), 0, "stderr: {}", stderr(&output));
    let text = stdout(&output);
    for table in [
        "## failure_rates",
        "## outcome_distribution",
        "## scenario_metrics",
        "## win_rates",
        "## training_efficiency",
        "## index_overall",
        "## smc_matrix",
        "## emergence",
    ] {
        assert!(text.contains(table), "missing {table} in report output");
    }
    // The fixture bundle is internally consistent, so the violation table
    // stays empty and empty tables are not emitted.
    assert!(!text.contains("## cross_validation"), "{text}");
    // Markdown files land next to CSV and JSON for each printed table.
    assert!(out.path().join("failure_rates.md").is_file());
    assert!(out.path().join("failure_rates.csv").is_file());
    assert!(out.path().join("failure_rates.json").is_file());
}
