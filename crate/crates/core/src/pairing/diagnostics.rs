//! Construction-time diagnostics: posting-order effects across time
//! windows, score differences across view-ratio intervals, and score
//! behavior across title-to-video similarity bins.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::JoinedPost;
use crate::stats::{spearman, welch_t_test};
use crate::textmetrics::normalized_ld;

use super::Pair;

/// One cumulative time-window row: how often the later post outscores the
/// earlier one among pairs with delta_t <= window_secs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeWindowRow {
    pub window_secs: i64,
    /// Pairs with delta_t <= window_secs (score ties and simultaneous posts included).
    pub n_pairs: usize,
    pub n_earlier_wins: usize,
    pub n_later_wins: usize,
    /// later wins / (later wins + earlier wins); absent when every pair is tied.
    pub later_win_ratio: Option<f64>,
}

/// Win rates of the later post over cumulative time windows. Windows are
/// evaluated independently (each counts all pairs with delta_t within it).
/// Score ties and pairs posted at the identical second are excluded from
/// the win counts but included in `n_pairs`.
pub fn time_window_analysis(pairs: &[Pair], windows: &[i64]) -> Vec<TimeWindowRow> {
    let mut rows = Vec::with_capacity(windows.len());
    for &window in windows {
        let mut n_pairs = 0usize;
        let mut earlier_wins = 0usize;
        let mut later_wins = 0usize;
        for p in pairs {
            if p.delta_t > window {
                continue;
            }
            n_pairs += 1;
            if p.post1.created_utc == p.post2.created_utc || p.post1.score == p.post2.score {
                continue;
            }
            let (earlier, later) = if p.post1.created_utc < p.post2.created_utc {
                (&p.post1, &p.post2)
            } else {
                (&p.post2, &p.post1)
            };
            if later.score > earlier.score {
                later_wins += 1;
            } else {
                earlier_wins += 1;
            }
        }
        let decided = earlier_wins + later_wins;
        rows.push(TimeWindowRow {
            window_secs: window,
            n_pairs,
            n_earlier_wins: earlier_wins,
            n_later_wins: later_wins,
            later_win_ratio: if decided > 0 {
                Some(later_wins as f64 / decided as f64)
            } else {
                None
            },
        });
    }
    rows
}

pub fn write_time_windows_csv<W: Write>(out: W, rows: &[TimeWindowRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "window_secs",
        "n_pairs",
        "n_earlier_wins",
        "n_later_wins",
        "later_win_ratio",
    ])?;
    for r in rows {
        w.write_record([
            r.window_secs.to_string(),
            r.n_pairs.to_string(),
            r.n_earlier_wins.to_string(),
            r.n_later_wins.to_string(),
            r.later_win_ratio.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One view-ratio interval [lo, hi): score-difference behavior of the
/// pairs whose vvr falls inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VvrIntervalRow {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub mean_score_diff: Option<f64>,
    pub n_post1_wins: usize,
    pub n_post2_wins: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VvrIntervalReport {
    pub rows: Vec<VvrIntervalRow>,
    /// Spearman correlation of vvr vs (score1 - score2) over all pairs;
    /// absent when fewer than 3 pairs fall inside the edges.
    pub spearman_vvr_score_diff: Option<f64>,
}

/// Log-spaced interval edges covering [lo, hi], e.g. lo=0.5, hi=2, n=2
/// gives [0.5, 1, 2].
pub fn geometric_edges(lo: f64, hi: f64, n_intervals: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n_intervals >= 1);
    let step = (hi / lo).powf(1.0 / n_intervals as f64);
    let mut edges: Vec<f64> = (0..=n_intervals)
        .map(|k| lo * step.powi(k as i32))
        .collect();
    // pin the outer edges exactly
    edges[0] = lo;
    edges[n_intervals] = hi;
    edges
}

/// Bucket pairs by vvr into the intervals defined by `edges` (the final
/// interval is closed on the right) and report per-interval score-diff
/// summaries plus the overall vvr/score-diff rank correlation. Pairs whose
/// vvr falls outside the edges are ignored. Empty intervals report n = 0
/// with no mean.
pub fn vvr_interval_analysis(pairs: &[Pair], edges: &[f64]) -> Result<VvrIntervalReport> {
    if edges.len() < 2 {
        return Err(Error::Config("need at least two interval edges".into()));
    }
    if edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(
            "interval edges must be strictly increasing".into(),
        ));
    }
    let n_intervals = edges.len() - 1;
    let mut diffs: Vec<Vec<f64>> = vec![Vec::new(); n_intervals];
    let mut wins: Vec<(usize, usize)> = vec![(0, 0); n_intervals];
    let mut vvr_all = Vec::new();
    let mut diff_all = Vec::new();
    for p in pairs {
        let k = match interval_index(p.vvr, edges) {
            Some(k) => k,
            None => continue,
        };
        let diff = (p.post1.score - p.post2.score) as f64;
        diffs[k].push(diff);
        if p.post1.score > p.post2.score {
            wins[k].0 += 1;
        } else if p.post2.score > p.post1.score {
            wins[k].1 += 1;
        }
        vvr_all.push(p.vvr);
        diff_all.push(diff);
    }
    let rows = (0..n_intervals)
        .map(|k| VvrIntervalRow {
            lo: edges[k],
            hi: edges[k + 1],
            n: diffs[k].len(),
            mean_score_diff: if diffs[k].is_empty() {
                None
            } else {
                Some(diffs[k].iter().sum::<f64>() / diffs[k].len() as f64)
            },
            n_post1_wins: wins[k].0,
            n_post2_wins: wins[k].1,
        })
        .collect();
    let spearman_vvr_score_diff = if vvr_all.len() >= 3 {
        spearman(&vvr_all, &diff_all).ok()
    } else {
        None
    };
    Ok(VvrIntervalReport {
        rows,
        spearman_vvr_score_diff,
    })
}

fn interval_index(v: f64, edges: &[f64]) -> Option<usize> {
    let last = edges.len() - 1;
    if !v.is_finite() || v < edges[0] || v > edges[last] {
        return None;
    }
    if v == edges[last] {
        return Some(last - 1); // final interval closed on the right
    }
    // edges are strictly increasing; find k with edges[k] <= v < edges[k+1]
    Some(edges.partition_point(|&e| e <= v) - 1)
}

pub fn write_vvr_intervals_csv<W: Write>(out: W, report: &VvrIntervalReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "lo",
        "hi",
        "n",
        "mean_score_diff",
        "n_post1_wins",
        "n_post2_wins",
        "spearman_vvr_score_diff",
    ])?;
    let overall = report
        .spearman_vvr_score_diff
        .map(|v| v.to_string())
        .unwrap_or_default();
    for (i, r) in report.rows.iter().enumerate() {
        w.write_record([
            r.lo.to_string(),
            r.hi.to_string(),
            r.n.to_string(),
            r.mean_score_diff.map(|v| v.to_string()).unwrap_or_default(),
            r.n_post1_wins.to_string(),
            r.n_post2_wins.to_string(),
            // the overall correlation is a dataset-level value; emit it on the first row only
            if i == 0 {
                overall.clone()
            } else {
                String::new()
            },
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Binning scheme for the title-to-video similarity analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LdBinMode {
    /// Twenty fixed-width bins: [0,5), [5,10), ..., [95,100].
    Fixed,
    /// Five equal-count bins by sorted similarity.
    Quantile,
}

/// One similarity bin with its score summary and the two-sample test
/// against the reference (final) bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdBinRow {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub mean_score: Option<f64>,
    /// log10 p of Welch's t vs the reference bin; absent for the reference
    /// bin itself and for bins with fewer than 2 posts.
    pub log10_p: Option<f64>,
}

/// Per-post analysis: bin posts by the similarity of their title to their
/// video's title and compare each bin's scores against the reference (the
/// final, most-copied bin) with Welch's t-test. When a comparison is
/// degenerate (identical scores everywhere), p = 1 so log10 p = 0.
pub fn ld_bin_analysis(posts: &[JoinedPost], mode: LdBinMode) -> Result<Vec<LdBinRow>> {
    if posts.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut scored: Vec<(u8, f64)> = posts
        .iter()
        .map(|p| (normalized_ld(&p.title, &p.video_title), p.score as f64))
        .collect();

    let bins: Vec<(f64, f64, Vec<f64>)> = match mode {
        LdBinMode::Fixed => {
            let mut bins: Vec<(f64, f64, Vec<f64>)> = (0..20)
                .map(|k| (5.0 * k as f64, 5.0 * (k + 1) as f64, Vec::new()))
                .collect();
            for &(ld, score) in &scored {
                let k = ((ld as usize) / 5).min(19); // ld=100 joins [95,100]
                bins[k].2.push(score);
            }
            bins
        }
        LdBinMode::Quantile => {
            scored.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
            let n = scored.len();
            let n_bins = 5usize;
            (0..n_bins)
                .map(|k| {
                    let start = k * n / n_bins;
                    let end = (k + 1) * n / n_bins;
                    let slice = &scored[start..end];
                    let lo = slice.first().map(|s| s.0 as f64).unwrap_or(0.0);
                    let hi = slice.last().map(|s| s.0 as f64).unwrap_or(0.0);
                    (lo, hi, slice.iter().map(|s| s.1).collect())
                })
                .collect()
        }
    };

    let reference = bins.last().map(|b| b.2.clone()).unwrap_or_default();
    let last = bins.len() - 1;
    let rows = bins
        .iter()
        .enumerate()
        .map(|(k, (lo, hi, scores))| {
            let mean_score = if scores.is_empty() {
                None
            } else {
                Some(scores.iter().sum::<f64>() / scores.len() as f64)
            };
            let log10_p = if k == last || scores.len() < 2 || reference.len() < 2 {
                None
            } else {
                match welch_t_test(scores, &reference) {
                    Ok(r) => Some(r.p_two_sided.max(f64::MIN_POSITIVE).log10()),
                    // zero variance on both sides: no detectable difference
                    Err(Error::Degenerate(_)) => Some(0.0),
                    Err(_) => None,
                }
            };
            LdBinRow {
                lo: *lo,
                hi: *hi,
                n: scores.len(),
                mean_score,
                log10_p,
            }
        })
        .collect();
    Ok(rows)
}

pub fn write_ld_bins_csv<W: Write>(out: W, rows: &[LdBinRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lo", "hi", "n", "mean_score", "log10_p"])?;
    for r in rows {
        w.write_record([
            r.lo.to_string(),
            r.hi.to_string(),
            r.n.to_string(),
            r.mean_score.map(|v| v.to_string()).unwrap_or_default(),
            r.log10_p.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
