//! One function per subcommand. Every command is deterministic given
//! (inputs, config, seed) and writes its artifacts under `out_dir`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use pairlens_core::ingest::{
    filter_subreddits, join_posts_videos, parse_posts, parse_videos, write_subreddit_summaries,
    JoinedPost,
};
use pairlens_core::pairing::{
    apply_title_filters, build_exact_pairs, build_inverse_pairs, build_similar_pairs, diagnostics,
    geometric_edges, ld_bin_analysis, mix_datasets, time_window_analysis, validate_pairs,
    vvr_interval_analysis, LdBinMode, Pair, PairRow,
};
use pairlens_core::ranker::{
    baseline_random, baseline_time, baseline_video_views, make_split, model_accuracy, predict,
    train, train_margin_ranker, write_predictions_csv, write_results_csv, ResultRow, Winner,
};
use pairlens_core::stats::battery::{run_metric_battery, BatteryConfig};
use pairlens_core::synthgen::generate_world;
use pairlens_core::textmetrics::{
    compute_features, load_external_scores, write_features_csv, TitleFeatureVector, WordLists,
};

use crate::config::RunConfig;
use crate::CliError;

// ---------------------------------------------------------------- helpers

fn ensure_out_dir(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", cfg.out_dir.display())))
}

fn open_input(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::io(format!("cannot open {}: {e}", path.display())))
}

fn create_output(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), CliError> {
    let mut out = create_output(path)?;
    for item in items {
        let line = serde_json::to_string(item)
            .map_err(|e| CliError::data(format!("serialize for {}: {e}", path.display())))?;
        out.write_all(line.as_bytes())
            .and_then(|_| out.write_all(b"\n"))
            .map_err(|e| CliError::io(format!("write {}: {e}", path.display())))?;
    }
    out.flush()
        .map_err(|e| CliError::io(format!("flush {}: {e}", path.display())))
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let reader = open_input(path)?;
    let mut items = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CliError::io(format!("read {}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line)
            .map_err(|e| CliError::data(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        items.push(item);
    }
    Ok(items)
}

fn write_json_pretty<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::data(format!("serialize {}: {e}", path.display())))?;
    std::fs::write(path, text + "\n")
        .map_err(|e| CliError::io(format!("write {}: {e}", path.display())))
}

/// Input path resolution: explicit flag > config file > default under out_dir.
fn resolve_input(
    flag: &Option<PathBuf>,
    config_path: &Option<PathBuf>,
    cfg: &RunConfig,
    default_name: &str,
) -> PathBuf {
    flag.clone()
        .or_else(|| config_path.clone())
        .unwrap_or_else(|| cfg.out_dir.join(default_name))
}

fn load_joined(path: &Path) -> Result<Vec<JoinedPost>, CliError> {
    let posts: Vec<JoinedPost> = read_jsonl(path)?;
    if posts.is_empty() {
        return Err(CliError::data(format!("{}: no posts", path.display())));
    }
    Ok(posts)
}

fn load_pairs(pairs_path: &Path, posts: &[JoinedPost]) -> Result<Vec<Pair>, CliError> {
    let rows: Vec<PairRow> = read_jsonl(pairs_path)?;
    let by_id: BTreeMap<String, JoinedPost> =
        posts.iter().map(|p| (p.id.clone(), p.clone())).collect();
    rows.into_iter()
        .map(|row| {
            Pair::from_row(row, &by_id)
                .map_err(|e| CliError::data(format!("{}: {e}", pairs_path.display())))
        })
        .collect()
}

/// Features keyed by post id, the skipped-post count, and any warnings.
type FeatureLoad = (BTreeMap<String, TitleFeatureVector>, usize, Vec<String>);

/// Compute title features for every post, plus any external per-post scores.
/// Posts whose titles are degenerate (no tokens) are skipped; the count is
/// reported back.
fn features_for(
    posts: &[JoinedPost],
    cfg: &RunConfig,
    externals_flag: &Option<PathBuf>,
) -> Result<FeatureLoad, CliError> {
    let dir = cfg.check_lexicons()?;
    let lists = WordLists::load(dir).map_err(CliError::from_core)?;
    let mut features = BTreeMap::new();
    let mut skipped = 0usize;
    for p in posts {
        match compute_features(&p.title, &lists) {
            Ok(f) => {
                features.insert(p.id.clone(), f);
            }
            Err(_) => skipped += 1,
        }
    }
    if features.is_empty() {
        return Err(CliError::data("no post had a scorable title".into()));
    }
    let mut warnings = Vec::new();
    let externals = externals_flag.clone().or_else(|| cfg.externals.clone());
    if let Some(path) = externals {
        let known: BTreeSet<String> = features.keys().cloned().collect();
        let table = load_external_scores(&path, &known).map_err(CliError::from_core)?;
        warnings = table.warnings;
        for (post_id, scores) in table.scores {
            if let Some(f) = features.get_mut(&post_id) {
                f.external.extend(scores);
            }
        }
    }
    Ok((features, skipped, warnings))
}

fn print_summary<T: Serialize>(value: &T) {
    if let Ok(line) = serde_json::to_string(value) {
        println!("{line}");
    }
}

// --------------------------------------------------------------- commands

pub fn cmd_synth(cfg: &RunConfig) -> Result<(), CliError> {
    ensure_out_dir(cfg)?;
    let world = generate_world(&cfg.synth).map_err(CliError::from_core)?;
    let posts_path = cfg.out_dir.join("posts.jsonl");
    let videos_path = cfg.out_dir.join("videos.jsonl");
    write_jsonl(&posts_path, &world.posts)?;
    write_jsonl(&videos_path, &world.videos)?;
    write_json_pretty(&cfg.out_dir.join("ground_truth.json"), &world.ground_truth)?;
    print_summary(&serde_json::json!({
        "command": "synth",
        "posts": world.posts.len(),
        "videos": world.videos.len(),
        "out_dir": cfg.out_dir,
        "artifacts": ["posts.jsonl", "videos.jsonl", "ground_truth.json"],
    }));
    Ok(())
}

pub fn cmd_ingest(
    cfg: &RunConfig,
    posts_flag: &Option<PathBuf>,
    videos_flag: &Option<PathBuf>,
) -> Result<(), CliError> {
    let posts_path = resolve_input(posts_flag, &cfg.posts, cfg, "posts.jsonl");
    let videos_path = resolve_input(videos_flag, &cfg.videos, cfg, "videos.jsonl");
    ensure_out_dir(cfg)?;

    let (posts, post_stats) = parse_posts(open_input(&posts_path)?).map_err(CliError::from_core)?;
    let (catalog, video_stats) =
        parse_videos(open_input(&videos_path)?).map_err(CliError::from_core)?;
    let (joined, join_rate) = join_posts_videos(&posts, &catalog);
    if joined.is_empty() {
        return Err(CliError::data("no post joined to a video".into()));
    }
    let (_, summaries) = filter_subreddits(&joined, 1, None).map_err(CliError::from_core)?;

    write_jsonl(&cfg.out_dir.join("joined.jsonl"), &joined)?;
    let mut sub_out = create_output(&cfg.out_dir.join("subreddits.csv"))?;
    write_subreddit_summaries(&mut sub_out, &summaries).map_err(CliError::from_core)?;
    sub_out.flush().map_err(|e| CliError::io(e.to_string()))?;

    let stats = serde_json::json!({
        "posts_parsed": post_stats.parsed,
        "posts_skipped": post_stats.skipped,
        "posts_duplicates": post_stats.duplicates,
        "videos_parsed": video_stats.parsed,
        "videos_skipped": video_stats.skipped,
        "videos_duplicates": video_stats.duplicates,
        "joined": joined.len(),
        "join_rate": join_rate,
    });
    write_json_pretty(&cfg.out_dir.join("ingest_stats.json"), &stats)?;
    print_summary(&serde_json::json!({
        "command": "ingest",
        "joined": joined.len(),
        "join_rate": join_rate,
        "out_dir": cfg.out_dir,
        "artifacts": ["joined.jsonl", "subreddits.csv", "ingest_stats.json"],
    }));
    Ok(())
}

pub fn cmd_pair(cfg: &RunConfig, joined_flag: &Option<PathBuf>) -> Result<(), CliError> {
    let joined_path = resolve_input(joined_flag, &cfg.joined, cfg, "joined.jsonl");
    ensure_out_dir(cfg)?;
    let posts = load_joined(&joined_path)?;

    let exact = build_exact_pairs(&posts, &cfg.pairing);
    let similar = build_similar_pairs(&posts, &cfg.pairing);
    let inverse = build_inverse_pairs(&posts, &cfg.pairing);
    let mixed_raw = mix_datasets(&exact, &similar, &inverse);
    let mixed = apply_title_filters(&mixed_raw, &cfg.pairing);
    for (name, set) in [
        ("exact", &exact),
        ("similar", &similar),
        ("inverse", &inverse),
        ("mixed", &mixed),
    ] {
        validate_pairs(set, &cfg.pairing)
            .map_err(|e| CliError::data(format!("{name} pairs failed validation: {e}")))?;
    }

    let as_rows = |pairs: &[Pair]| pairs.iter().map(Pair::row).collect::<Vec<_>>();
    write_jsonl(&cfg.out_dir.join("exact.jsonl"), &as_rows(&exact))?;
    write_jsonl(&cfg.out_dir.join("similar.jsonl"), &as_rows(&similar))?;
    write_jsonl(&cfg.out_dir.join("inverse.jsonl"), &as_rows(&inverse))?;
    write_jsonl(&cfg.out_dir.join("mixed.jsonl"), &as_rows(&mixed))?;
    let stats = serde_json::json!({
        "n_posts": posts.len(),
        "n_exact": exact.len(),
        "n_similar": similar.len(),
        "n_inverse": inverse.len(),
        "n_mixed_before_filters": mixed_raw.len(),
        "n_mixed": mixed.len(),
    });
    write_json_pretty(&cfg.out_dir.join("pairing_stats.json"), &stats)?;
    print_summary(&serde_json::json!({
        "command": "pair",
        "n_exact": exact.len(),
        "n_similar": similar.len(),
        "n_inverse": inverse.len(),
        "n_mixed": mixed.len(),
        "out_dir": cfg.out_dir,
        "artifacts": ["exact.jsonl", "similar.jsonl", "inverse.jsonl", "mixed.jsonl", "pairing_stats.json"],
    }));
    Ok(())
}

pub fn cmd_features(
    cfg: &RunConfig,
    joined_flag: &Option<PathBuf>,
    externals_flag: &Option<PathBuf>,
) -> Result<(), CliError> {
    let joined_path = resolve_input(joined_flag, &cfg.joined, cfg, "joined.jsonl");
    ensure_out_dir(cfg)?;
    let posts = load_joined(&joined_path)?;
    let (features, skipped, warnings) = features_for(&posts, cfg, externals_flag)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let mut out = create_output(&cfg.out_dir.join("features.csv"))?;
    write_features_csv(&mut out, &features).map_err(CliError::from_core)?;
    out.flush().map_err(|e| CliError::io(e.to_string()))?;
    print_summary(&serde_json::json!({
        "command": "features",
        "n_posts": features.len(),
        "n_skipped_titles": skipped,
        "out_dir": cfg.out_dir,
        "artifacts": ["features.csv"],
    }));
    Ok(())
}

pub fn cmd_analyze(
    cfg: &RunConfig,
    joined_flag: &Option<PathBuf>,
    pairs_flag: &Option<PathBuf>,
    externals_flag: &Option<PathBuf>,
) -> Result<(), CliError> {
    let joined_path = resolve_input(joined_flag, &cfg.joined, cfg, "joined.jsonl");
    let pairs_path = resolve_input(pairs_flag, &cfg.pairs, cfg, "mixed.jsonl");
    ensure_out_dir(cfg)?;
    let posts = load_joined(&joined_path)?;
    let pairs = load_pairs(&pairs_path, &posts)?;
    if pairs.is_empty() {
        return Err(CliError::data(format!(
            "{}: no pairs",
            pairs_path.display()
        )));
    }
    let (features, _, warnings) = features_for(&posts, cfg, externals_flag)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }

    let battery_cfg = BatteryConfig {
        alpha: cfg.battery.alpha.unwrap_or(0.001),
        m_continuous: cfg.battery.m_continuous,
        m_binary: cfg.battery.m_binary,
    };
    let reports =
        run_metric_battery(&pairs, &features, &battery_cfg).map_err(CliError::from_core)?;
    write_json_pretty(&cfg.out_dir.join("stat_reports.json"), &reports)?;

    // earlier-post advantage over cumulative time windows
    let step = (cfg.pairing.time_window / 6).max(1);
    let windows: Vec<i64> = (1..=6).map(|k| k * step).collect();
    let tw_rows = time_window_analysis(&pairs, &windows);
    let mut tw_out = create_output(&cfg.out_dir.join("time_windows.csv"))?;
    diagnostics::write_time_windows_csv(&mut tw_out, &tw_rows).map_err(CliError::from_core)?;
    tw_out.flush().map_err(|e| CliError::io(e.to_string()))?;

    // score gap across geometric views-ratio intervals
    let edges = geometric_edges(1.0 / cfg.pairing.vvr_max, cfg.pairing.vvr_max, 8);
    let vvr_report = vvr_interval_analysis(&pairs, &edges).map_err(CliError::from_core)?;
    let mut vvr_out = create_output(&cfg.out_dir.join("vvr_intervals.csv"))?;
    diagnostics::write_vvr_intervals_csv(&mut vvr_out, &vvr_report).map_err(CliError::from_core)?;
    vvr_out.flush().map_err(|e| CliError::io(e.to_string()))?;

    let n_passing = reports.iter().filter(|r| r.passes_bonferroni).count();
    print_summary(&serde_json::json!({
        "command": "analyze",
        "n_pairs": pairs.len(),
        "n_reports": reports.len(),
        "n_passing_bonferroni": n_passing,
        "out_dir": cfg.out_dir,
        "artifacts": ["stat_reports.json", "time_windows.csv", "vvr_intervals.csv"],
    }));
    Ok(())
}

pub fn cmd_bins(cfg: &RunConfig, joined_flag: &Option<PathBuf>) -> Result<(), CliError> {
    let joined_path = resolve_input(joined_flag, &cfg.joined, cfg, "joined.jsonl");
    ensure_out_dir(cfg)?;
    let posts = load_joined(&joined_path)?;

    let fixed = ld_bin_analysis(&posts, LdBinMode::Fixed).map_err(CliError::from_core)?;
    let mut out = create_output(&cfg.out_dir.join("ld_bins.csv"))?;
    diagnostics::write_ld_bins_csv(&mut out, &fixed).map_err(CliError::from_core)?;
    out.flush().map_err(|e| CliError::io(e.to_string()))?;

    let quantile = ld_bin_analysis(&posts, LdBinMode::Quantile).map_err(CliError::from_core)?;
    let mut qout = create_output(&cfg.out_dir.join("ld_bins_quantile.csv"))?;
    diagnostics::write_ld_bins_csv(&mut qout, &quantile).map_err(CliError::from_core)?;
    qout.flush().map_err(|e| CliError::io(e.to_string()))?;

    print_summary(&serde_json::json!({
        "command": "bins",
        "n_posts": posts.len(),
        "out_dir": cfg.out_dir,
        "artifacts": ["ld_bins.csv", "ld_bins_quantile.csv"],
    }));
    Ok(())
}

pub fn cmd_rank(
    cfg: &RunConfig,
    joined_flag: &Option<PathBuf>,
    pairs_flag: &Option<PathBuf>,
    ablate: &Option<String>,
) -> Result<(), CliError> {
    let joined_path = resolve_input(joined_flag, &cfg.joined, cfg, "joined.jsonl");
    let pairs_path = resolve_input(pairs_flag, &cfg.pairs, cfg, "mixed.jsonl");
    ensure_out_dir(cfg)?;
    let posts = load_joined(&joined_path)?;
    let pairs = load_pairs(&pairs_path, &posts)?;
    let (features, _, _) = features_for(&posts, cfg, &None)?;

    let (train_pairs, test_pairs) = make_split(&pairs, &cfg.split).map_err(CliError::from_core)?;
    let outcome =
        train_margin_ranker(&train_pairs, &features, &cfg.ranker).map_err(CliError::from_core)?;
    write_json_pretty(&cfg.out_dir.join("model.json"), &outcome.model)?;

    let mut predictions: Vec<(String, Winner)> = Vec::with_capacity(test_pairs.len());
    for p in &test_pairs {
        let f1 = features.get(&p.post1.id).ok_or_else(|| {
            CliError::data(format!(
                "no features for post {} in pair {}",
                p.post1.id, p.pair_id
            ))
        })?;
        let f2 = features.get(&p.post2.id).ok_or_else(|| {
            CliError::data(format!(
                "no features for post {} in pair {}",
                p.post2.id, p.pair_id
            ))
        })?;
        predictions.push((p.pair_id.clone(), predict(&outcome.model, p, f1, f2)));
    }
    let mut pred_out = create_output(&cfg.out_dir.join("predictions.csv"))?;
    write_predictions_csv(&mut pred_out, &predictions).map_err(CliError::from_core)?;
    pred_out.flush().map_err(|e| CliError::io(e.to_string()))?;

    let mut rows = Vec::new();
    for (split_name, subset) in [("train", &train_pairs), ("test", &test_pairs)] {
        let entries: [(&str, pairlens_core::Result<f64>); 4] = [
            (
                "margin_ranker",
                model_accuracy(&outcome.model, subset, &features),
            ),
            ("baseline_random", baseline_random(subset, cfg.ranker.seed)),
            ("baseline_time", baseline_time(subset, cfg.ranker.tie_rule)),
            (
                "baseline_video_views",
                baseline_video_views(subset, cfg.ranker.tie_rule),
            ),
        ];
        for (method, acc) in entries {
            rows.push(ResultRow {
                split: split_name.to_string(),
                phase: "mixed".to_string(),
                method: method.to_string(),
                accuracy: acc.map_err(CliError::from_core)?,
                n: subset.len(),
            });
        }
    }
    let mut res_out = create_output(&cfg.out_dir.join("results.csv"))?;
    write_results_csv(&mut res_out, &rows).map_err(CliError::from_core)?;
    res_out.flush().map_err(|e| CliError::io(e.to_string()))?;

    let mut artifacts = vec!["model.json", "predictions.csv", "results.csv"];
    if let Some(grid_text) = ablate {
        let grid: Vec<u8> = grid_text
            .split(',')
            .map(|s| {
                s.trim().parse().map_err(|_| {
                    CliError::config(format!("bad ablation threshold {s:?}; expected 0-100"))
                })
            })
            .collect::<Result<_, _>>()?;
        let report = train::ablate_thresholds(
            &posts,
            &features,
            &cfg.pairing,
            &cfg.split,
            &cfg.ranker,
            &grid,
        )
        .map_err(CliError::from_core)?;
        let mut ab_out = create_output(&cfg.out_dir.join("ablation.csv"))?;
        train::write_ablation_csv(&mut ab_out, &report).map_err(CliError::from_core)?;
        ab_out.flush().map_err(|e| CliError::io(e.to_string()))?;
        artifacts.push("ablation.csv");
    }

    let accuracy_of = |split: &str| {
        rows.iter()
            .find(|r| r.split == split && r.method == "margin_ranker")
            .map(|r| r.accuracy)
    };
    print_summary(&serde_json::json!({
        "command": "rank",
        "n_train": train_pairs.len(),
        "n_test": test_pairs.len(),
        "n_epochs": outcome.epoch_loss.len(),
        "train_accuracy": accuracy_of("train"),
        "test_accuracy": accuracy_of("test"),
        "out_dir": cfg.out_dir,
        "artifacts": artifacts,
    }));
    Ok(())
}

pub fn cmd_report(cfg: &RunConfig) -> Result<(), CliError> {
    crate::report::build_report(cfg)
}
