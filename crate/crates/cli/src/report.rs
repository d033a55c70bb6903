//! `report` subcommand: fold the analysis artifacts in out_dir into a single
//! markdown summary. Sections appear only for artifacts that exist; at
//! minimum one of stat_reports.json / results.csv must be present.

use std::fmt::Write as _;
use std::path::Path;

use pairlens_core::stats::{Conclusion, StatReport};

use crate::config::RunConfig;
use crate::CliError;

/// Render any of the pipeline's CSV artifacts as a markdown table.
fn csv_to_markdown(path: &Path) -> Result<String, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::io(format!("cannot open {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?
        .clone();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "| {} |",
        headers.iter().collect::<Vec<_>>().join(" | ")
    );
    let _ = writeln!(out, "|{}|", vec!["---"; headers.len()].join("|"));
    for record in reader.records() {
        let record = record.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        let _ = writeln!(out, "| {} |", record.iter().collect::<Vec<_>>().join(" | "));
    }
    Ok(out)
}

fn conclusion_str(c: Option<Conclusion>) -> &'static str {
    match c {
        Some(Conclusion::Group1Larger) => "group1 larger",
        Some(Conclusion::Group1Smaller) => "group1 smaller",
        Some(Conclusion::NoDifference) => "no difference",
        Some(Conclusion::Inconclusive) => "inconclusive",
        None => "-",
    }
}

fn stat_reports_section(path: &Path) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let reports: Vec<StatReport> = serde_json::from_str(&text)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;

    let mut out = String::new();
    let n_pass = reports.iter().filter(|r| r.passes_bonferroni).count();
    let _ = writeln!(
        out,
        "{} metric tests ran; {} pass their Bonferroni-corrected threshold.\n",
        reports.len(),
        n_pass
    );
    let _ = writeln!(
        out,
        "| metric | test | statistic | p-value | corrected alpha | passes | conclusion | n |"
    );
    let _ = writeln!(out, "|---|---|---|---|---|---|---|---|");
    for r in &reports {
        let _ = writeln!(
            out,
            "| {} | {} | {:.4} | {:.3e} | {:.3e} | {} | {} | {} |",
            r.metric_name,
            r.test,
            r.statistic,
            r.p_value,
            r.alpha_corrected,
            if r.passes_bonferroni { "yes" } else { "no" },
            conclusion_str(r.conclusion),
            r.n,
        );
    }
    Ok(out)
}

fn json_section(path: &Path) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let pretty = serde_json::to_string_pretty(&value)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    Ok(format!("```json\n{pretty}\n```\n"))
}

pub fn build_report(cfg: &RunConfig) -> Result<(), CliError> {
    let dir = &cfg.out_dir;
    let stat_path = dir.join("stat_reports.json");
    let results_path = dir.join("results.csv");
    if !stat_path.is_file() && !results_path.is_file() {
        return Err(CliError::data(format!(
            "nothing to report: neither {} nor {} exists (run `pairlens analyze` or `pairlens rank` first)",
            stat_path.display(),
            results_path.display()
        )));
    }

    let mut md = String::from("# Pair analysis report\n\n");
    let mut sections = Vec::new();

    for (title, path) in [
        ("Ingest summary", dir.join("ingest_stats.json")),
        ("Pairing summary", dir.join("pairing_stats.json")),
    ] {
        if path.is_file() {
            sections.push((title, json_section(&path)?));
        }
    }
    if stat_path.is_file() {
        sections.push(("Paired metric battery", stat_reports_section(&stat_path)?));
    }
    for (title, name) in [
        ("Earlier-post advantage by time window", "time_windows.csv"),
        ("Score gap by views-ratio interval", "vvr_intervals.csv"),
        ("Score by title-similarity bin (fixed)", "ld_bins.csv"),
        (
            "Score by title-similarity bin (quantile)",
            "ld_bins_quantile.csv",
        ),
        ("Ranker accuracy", "results.csv"),
        ("Similarity-threshold ablation", "ablation.csv"),
    ] {
        let path = dir.join(name);
        if path.is_file() {
            sections.push((title, csv_to_markdown(&path)?));
        }
    }

    for (title, body) in &sections {
        let _ = writeln!(md, "## {title}\n");
        md.push_str(body);
        md.push('\n');
    }

    let report_path = dir.join("report.md");
    std::fs::write(&report_path, &md)
        .map_err(|e| CliError::io(format!("write {}: {e}", report_path.display())))?;
    println!(
        "{}",
        serde_json::json!({
            "command": "report",
            "n_sections": sections.len(),
            "out_dir": dir,
            "artifacts": ["report.md"],
        })
    );
    Ok(())
}
