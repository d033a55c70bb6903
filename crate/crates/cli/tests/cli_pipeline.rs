//! End-to-end exercises of the `pairlens` binary: the full eight-command
//! pipeline on a small synthetic world, config/flag precedence, and the
//! machine-readable error contract (exit codes + JSON on stderr).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn lexicons_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../lexicons")
}

fn pairlens(out_dir: &Path, lexicons: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pairlens"))
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .env("PAIRLENS_LEXICON_DIR", lexicons)
        .output()
        .expect("spawn pairlens")
}

fn expect_ok(out: &Output, what: &str) -> Value {
    assert!(
        out.status.success(),
        "{what} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout.clone()).expect("utf-8 stdout");
    let line = stdout
        .lines()
        .last()
        .unwrap_or_else(|| panic!("{what}: empty stdout"));
    serde_json::from_str(line).unwrap_or_else(|e| panic!("{what}: stdout not JSON ({e}): {line}"))
}

fn expect_error(out: &Output, exit: i32, code: &str, what: &str) {
    assert_eq!(out.status.code(), Some(exit), "{what}: wrong exit code");
    let stderr = String::from_utf8(out.stderr.clone()).expect("utf-8 stderr");
    let line = stderr
        .lines()
        .last()
        .unwrap_or_else(|| panic!("{what}: empty stderr"));
    let err: Value = serde_json::from_str(line)
        .unwrap_or_else(|e| panic!("{what}: stderr not JSON ({e}): {line}"));
    assert_eq!(err["code"], code, "{what}: stderr payload {err}");
    assert!(
        err["message"].as_str().is_some_and(|m| !m.is_empty()),
        "{what}: missing message in {err}"
    );
}

#[test]
fn full_pipeline_produces_all_artifacts() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let out_dir = tmp.path().join("out");
    let config = tmp.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"seed": 3, "synth": {"n_subreddits": 6, "posts_per_subreddit": 200}}"#,
    )
    .expect("write config");
    let lex = lexicons_dir();

    let commands: [&[&str]; 8] = [
        &["synth"],
        &["ingest"],
        &["pair"],
        &["features"],
        &["analyze"],
        &["bins"],
        &["rank", "--ablate", "70,80,90"],
        &["report"],
    ];
    for args in commands {
        let full: Vec<&str> = args
            .iter()
            .copied()
            .chain(["--config", config.to_str().unwrap()])
            .collect();
        let summary = expect_ok(
            &pairlens(&out_dir, &lex, &full),
            &format!("pairlens {args:?}"),
        );
        assert_eq!(
            summary["command"], args[0],
            "summary names the wrong command"
        );
    }

    for name in [
        "posts.jsonl",
        "videos.jsonl",
        "ground_truth.json",
        "joined.jsonl",
        "subreddits.csv",
        "ingest_stats.json",
        "exact.jsonl",
        "similar.jsonl",
        "inverse.jsonl",
        "mixed.jsonl",
        "pairing_stats.json",
        "features.csv",
        "stat_reports.json",
        "time_windows.csv",
        "vvr_intervals.csv",
        "ld_bins.csv",
        "ld_bins_quantile.csv",
        "model.json",
        "predictions.csv",
        "results.csv",
        "ablation.csv",
        "report.md",
    ] {
        let path = out_dir.join(name);
        let meta =
            std::fs::metadata(&path).unwrap_or_else(|e| panic!("missing artifact {name}: {e}"));
        assert!(meta.len() > 0, "artifact {name} is empty");
    }

    let report = std::fs::read_to_string(out_dir.join("report.md")).expect("read report");
    for heading in [
        "Ingest",
        "Pairing",
        "battery",
        "Ranker accuracy",
        "ablation",
    ] {
        assert!(
            report.to_lowercase().contains(&heading.to_lowercase()),
            "report.md lacks a {heading} section"
        );
    }
}

#[test]
fn flags_override_config_file_which_overrides_defaults() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let out_dir = tmp.path().join("out");
    let config = tmp.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"synth": {"seed": 9, "n_subreddits": 3, "posts_per_subreddit": 80}}"#,
    )
    .expect("write config");

    let out = pairlens(
        &out_dir,
        &lexicons_dir(),
        &[
            "synth",
            "--config",
            config.to_str().unwrap(),
            "--seed",
            "42",
        ],
    );
    expect_ok(&out, "synth with config + seed flag");

    let truth: Value = serde_json::from_str(
        &std::fs::read_to_string(out_dir.join("ground_truth.json")).expect("read ground truth"),
    )
    .expect("parse ground truth");
    let cfg = &truth["config"];
    assert_eq!(
        cfg["seed"], 42,
        "--seed flag must beat the config-file seed"
    );
    assert_eq!(
        cfg["n_subreddits"], 3,
        "config-file value must beat the default"
    );
    assert_eq!(
        cfg["views_alpha"], 1.11,
        "untouched fields keep their defaults"
    );
}

#[test]
fn missing_lexicons_exit_with_lexicon_code() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let out_dir = tmp.path().join("out");
    let empty = tmp.path().join("no-lexicons");
    std::fs::create_dir_all(&empty).expect("mkdir");
    let lex = lexicons_dir();

    // features needs a joined dataset before it checks lexicons
    expect_ok(&pairlens(&out_dir, &lex, &["synth"]), "synth");
    expect_ok(&pairlens(&out_dir, &lex, &["ingest"]), "ingest");

    let out = pairlens(&out_dir, &empty, &["features"]);
    expect_error(&out, 2, "LEXICON_MISSING", "features without lexicons");
}

#[test]
fn invalid_configuration_is_a_config_error() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let out_dir = tmp.path().join("out");
    let lex = lexicons_dir();

    let out = pairlens(&out_dir, &lex, &["synth", "--vvr-max", "0.5"]);
    expect_error(&out, 2, "CONFIG_INVALID", "vvr_max below 1");

    let config = tmp.path().join("config.json");
    std::fs::write(&config, r#"{"no_such_key": true}"#).expect("write config");
    let out = pairlens(
        &out_dir,
        &lex,
        &["synth", "--config", config.to_str().unwrap()],
    );
    expect_error(&out, 2, "CONFIG_INVALID", "unknown config key");
}

#[test]
fn missing_input_is_an_io_error() {
    let tmp = tempfile::tempdir().expect("tempdir");
    let out_dir = tmp.path().join("out");
    let out = pairlens(&out_dir, &lexicons_dir(), &["pair"]);
    expect_error(&out, 1, "IO_ERROR", "pair without a joined dataset");
}
