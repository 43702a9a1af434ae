//! End-to-end checks of the `rctx` binary: exit codes, report shape,
//! and determinism of the emitted output.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn rctx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rctx"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn corpus_path(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(name)
        .display()
        .to_string()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("rctx-test-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).expect("temp file writes");
    path
}

#[test]
fn validate_accepts_every_corpus_file() {
    for entry in rctx_cli::corpus::ENTRIES {
        let out = rctx(&["validate", &corpus_path(entry.file)]);
        assert_eq!(out.status.code(), Some(0), "{} should validate", entry.name);
    }
}

#[test]
fn validate_rejects_truncated_input_with_exit_one() {
    let path = temp_file("truncated.model", "{\"format\": \"rctx-model/1\",");
    let out = rctx(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let _ = std::fs::remove_file(path);
}

#[test]
fn validate_flags_semantic_errors_with_exit_two() {
    let bad = r#"{
  "format": "rctx-model/1",
  "semiring": "boolean",
  "scenario": {
    "measurements": ["a"],
    "contexts": [["a"], ["a", "b"]],
    "outcomes": {"a": ["0"]}
  },
  "tables": {"a": {"0": "1"}}
}"#;
    let path = temp_file("semantic.model", bad);
    let out = rctx(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_file(path);
}

#[test]
fn validate_warns_on_disturbing_but_accepts() {
    let disturbing = r#"{
  "format": "rctx-model/1",
  "semiring": "boolean",
  "scenario": {
    "measurements": ["a", "b", "c"],
    "contexts": [["a", "b"], ["b", "c"], ["a", "c"]],
    "outcomes": {"a": ["0","1"], "b": ["0","1"], "c": ["0","1"]}
  },
  "tables": {
    "a,b": {"00": "1"},
    "b,c": {"10": "1"},
    "a,c": {"00": "1"}
  }
}"#;
    let path = temp_file("disturbing.model", disturbing);
    let out = rctx(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("warning: model is disturbing"));

    let out = rctx(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("analyses skipped"));
    let _ = std::fs::remove_file(path);
}

#[test]
fn analyze_reports_the_divergence_on_the_correlated_cycle() {
    let out = rctx(&[
        "analyze",
        &corpus_path("correlated-cycle.model"),
        "--generalized",
        "--classical",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("generalized obstruction: contextual"));
    assert!(stdout.contains("classical obstruction: all sections trivial"));
    assert!(stdout.contains("witness section: a,d -> 01"));
}

#[test]
fn analyze_with_oracle_agrees_and_exits_zero() {
    for file in ["prbox.model", "hardy.model", "deterministic.model"] {
        let out = rctx(&["analyze", &corpus_path(file), "--oracle"]);
        assert_eq!(out.status.code(), Some(0), "{file} oracle run");
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert!(stdout.contains("oracle cross-checks:"));
        assert!(!stdout.contains("MISMATCH"));
    }
}

#[test]
fn analyze_fraction_of_the_pr_box_is_one() {
    let out = rctx(&["analyze", &corpus_path("prbox.model"), "--fraction"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("contextual fraction: 1"));
}

#[test]
fn analyze_fraction_rejects_boolean_models() {
    let out = rctx(&[
        "analyze",
        &corpus_path("correlated-cycle.model"),
        "--fraction",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cutoff_is_enforced_with_exit_four() {
    let out = rctx(&[
        "analyze",
        &corpus_path("prbox.model"),
        "--cutoff",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn semiring_collapse_override_works() {
    let out = rctx(&[
        "analyze",
        &corpus_path("prbox.model"),
        "--semiring",
        "boolean",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("semiring: boolean"));

    let out = rctx(&[
        "analyze",
        &corpus_path("correlated-cycle.model"),
        "--semiring",
        "nonneg-rational",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let out_path = std::env::temp_dir().join(format!("rctx-report-{}.json", std::process::id()));
    let mut renders = Vec::new();
    for _ in 0..2 {
        let out = rctx(&[
            "analyze",
            &corpus_path("correlated-cycle.model"),
            "--generalized",
            "--classical",
            "--oracle",
            "--seed",
            "11",
            "--out",
            out_path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        renders.push((
            out.stdout.clone(),
            std::fs::read(&out_path).expect("report written"),
        ));
    }
    assert_eq!(renders[0].0, renders[1].0);
    assert_eq!(renders[0].1, renders[1].1);
    let _ = std::fs::remove_file(out_path);
}

#[test]
fn corpus_regression_passes() {
    let out = rctx(&["corpus", "--seed", "7"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "corpus output:\n{stdout}");
    assert!(stdout.contains("corpus: all expectations met"));
    for entry in rctx_cli::corpus::ENTRIES {
        assert!(stdout.contains(&format!("corpus {}: ok", entry.name)));
    }
}

#[test]
fn corrupted_expectation_is_itemized() {
    use rctx_cli::corpus;
    let expectations = corpus::expectations();
    let entry = corpus::ENTRIES
        .iter()
        .find(|e| e.name == "prbox")
        .unwrap();
    let mut corrupted = expectations
        .iter()
        .find(|e| e.name == "prbox")
        .unwrap()
        .clone();
    corrupted.contextual = false;
    corrupted.fraction = Some("1/3".to_string());
    corrupted.generalized_nontrivial.clear();
    let diffs = corpus::check_entry(entry, &corrupted);
    assert!(diffs.iter().any(|d| d.starts_with("contextual:")));
    assert!(diffs.iter().any(|d| d.starts_with("fraction:")));
    assert!(diffs
        .iter()
        .any(|d| d.starts_with("generalized nontrivial sections:")));

    // The honest expectation produces no differences.
    let good = expectations.iter().find(|e| e.name == "prbox").unwrap();
    assert!(corpus::check_entry(entry, good).is_empty());
}
