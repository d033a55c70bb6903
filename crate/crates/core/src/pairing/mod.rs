//! Confound-controlled pair construction (exact / similar / inverse
//! phases), title filtering, the mixed dataset, and the timing/VVR/LD
//! diagnostic analyses.

pub mod builders;
pub mod diagnostics;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::JoinedPost;
use crate::textmetrics::normalized_ld;

pub use builders::{
    build_exact_pairs, build_inverse_pairs, build_similar_pairs, build_similar_pairs_mode,
};
pub use diagnostics::{
    geometric_edges, ld_bin_analysis, time_window_analysis, vvr_interval_analysis, LdBinMode,
    LdBinRow, TimeWindowRow, VvrIntervalReport, VvrIntervalRow,
};

/// Pairing phase: which confound-control recipe produced a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Exact,
    Similar,
    Inverse,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Phase::Exact => "exact",
            Phase::Similar => "similar",
            Phase::Inverse => "inverse",
        })
    }
}

impl std::str::FromStr for Phase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Phase::Exact),
            "similar" => Ok(Phase::Similar),
            "inverse" => Ok(Phase::Inverse),
            other => Err(Error::Invalid(format!("unknown phase {other:?}"))),
        }
    }
}

/// How post1/post2 are oriented within a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairOrdering {
    /// Seeded coin flip; used for construction-time diagnostics.
    Random,
    /// post1 is the strictly higher-scoring post.
    ByScore,
}

impl std::fmt::Display for PairOrdering {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PairOrdering::Random => "random",
            PairOrdering::ByScore => "by_score",
        })
    }
}

/// A matched pair of posts with its confound metrics. Owns copies of both
/// posts so downstream analyses need no side lookups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pair {
    pub pair_id: String,
    pub phase: Phase,
    pub post1: JoinedPost,
    pub post2: JoinedPost,
    /// |t1 - t2| in seconds.
    pub delta_t: i64,
    /// views(post1's video) / views(post2's video); exactly 1 for exact pairs.
    pub vvr: f64,
    /// Similarity of the two post titles.
    pub ld_pair: u8,
    /// Similarity of each post title to its own video title.
    pub ld1_video: u8,
    pub ld2_video: u8,
    pub ordering: PairOrdering,
}

/// Slim serialization row for pairs.jsonl.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub pair_id: String,
    pub phase: Phase,
    pub post1_id: String,
    pub post2_id: String,
    pub delta_t: i64,
    pub vvr: f64,
    pub ld_pair: u8,
    pub ld1_video: u8,
    pub ld2_video: u8,
    pub ordering: PairOrdering,
}

impl Pair {
    pub fn row(&self) -> PairRow {
        PairRow {
            pair_id: self.pair_id.clone(),
            phase: self.phase,
            post1_id: self.post1.id.clone(),
            post2_id: self.post2.id.clone(),
            delta_t: self.delta_t,
            vvr: self.vvr,
            ld_pair: self.ld_pair,
            ld1_video: self.ld1_video,
            ld2_video: self.ld2_video,
            ordering: self.ordering,
        }
    }

    /// Rebuild a full pair from a serialized row plus the post table.
    pub fn from_row(
        row: PairRow,
        posts: &std::collections::BTreeMap<String, JoinedPost>,
    ) -> Result<Pair> {
        let post1 = posts
            .get(&row.post1_id)
            .ok_or_else(|| {
                Error::Invalid(format!(
                    "unknown post {} in pair {}",
                    row.post1_id, row.pair_id
                ))
            })?
            .clone();
        let post2 = posts
            .get(&row.post2_id)
            .ok_or_else(|| {
                Error::Invalid(format!(
                    "unknown post {} in pair {}",
                    row.post2_id, row.pair_id
                ))
            })?
            .clone();
        Ok(Pair {
            pair_id: row.pair_id,
            phase: row.phase,
            post1,
            post2,
            delta_t: row.delta_t,
            vvr: row.vvr,
            ld_pair: row.ld_pair,
            ld1_video: row.ld1_video,
            ld2_video: row.ld2_video,
            ordering: row.ordering,
        })
    }
}

/// Match policy: one pair per post (greedy earliest-first) or every
/// eligible in-window combination (sensitivity analysis).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchPolicy {
    #[default]
    Greedy,
    Exhaustive,
}

/// All thresholds controlling pair construction and filtering.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PairingConfig {
    /// Maximum |t1 - t2| in seconds.
    pub time_window: i64,
    /// Maximum undirected views ratio for similar pairs.
    pub vvr_max: f64,
    /// Maximum title-to-title similarity (near-duplicates above are dropped).
    pub ld_pair_max: u8,
    /// Maximum title-to-video similarity (verbatim copies above are dropped).
    pub ld_video_max: u8,
    pub min_title_chars: usize,
    pub require_multiword: bool,
    /// Winner must have at least this multiple of the loser's score...
    pub score_ratio_min: f64,
    /// ...and at least this absolute margin.
    pub score_diff_min: i64,
    pub rng_seed: u64,
    pub match_policy: MatchPolicy,
}

impl Default for PairingConfig {
    fn default() -> Self {
        PairingConfig {
            time_window: 1800,
            vvr_max: 2.0,
            ld_pair_max: 70,
            ld_video_max: 95,
            min_title_chars: 5,
            require_multiword: true,
            score_ratio_min: 2.0,
            score_diff_min: 20,
            rng_seed: 0,
            match_policy: MatchPolicy::Greedy,
        }
    }
}

impl PairingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.time_window <= 0 {
            return Err(Error::Config("time_window must be positive".into()));
        }
        if self.vvr_max < 1.0 {
            return Err(Error::Config("vvr_max must be >= 1".into()));
        }
        if self.ld_pair_max > 100 || self.ld_video_max > 100 {
            return Err(Error::Config("LD thresholds must be within [0,100]".into()));
        }
        Ok(())
    }
}

fn title_passes(title: &str, cfg: &PairingConfig) -> bool {
    let trimmed = title.trim();
    trimmed.chars().count() >= cfg.min_title_chars
        && (!cfg.require_multiword || trimmed.split_whitespace().count() >= 2)
}

/// Keep pairs whose titles pass the length/word/similarity thresholds and
/// whose scores are decisive: max >= ratio * min and max - min >= margin.
/// Pure subset filter: idempotent and monotone.
pub fn apply_title_filters(pairs: &[Pair], cfg: &PairingConfig) -> Vec<Pair> {
    pairs
        .iter()
        .filter(|p| {
            let (hi, lo) = if p.post1.score >= p.post2.score {
                (p.post1.score, p.post2.score)
            } else {
                (p.post2.score, p.post1.score)
            };
            p.ld_pair <= cfg.ld_pair_max
                && p.ld1_video <= cfg.ld_video_max
                && p.ld2_video <= cfg.ld_video_max
                && title_passes(&p.post1.title, cfg)
                && title_passes(&p.post2.title, cfg)
                && hi as f64 >= cfg.score_ratio_min * lo as f64
                && hi - lo >= cfg.score_diff_min
        })
        .cloned()
        .collect()
}

/// Flip a pair so post1 is the strictly higher-scoring post, recomputing the
/// orientation-dependent fields.
fn reorder_by_score(mut p: Pair) -> Option<Pair> {
    if p.post1.score == p.post2.score {
        return None; // by_score ordering is undefined for ties
    }
    if p.post1.score < p.post2.score {
        std::mem::swap(&mut p.post1, &mut p.post2);
        std::mem::swap(&mut p.ld1_video, &mut p.ld2_video);
    }
    p.vvr = if p.phase == Phase::Exact {
        1.0
    } else {
        p.post1.video_views as f64 / p.post2.video_views as f64
    };
    p.ordering = PairOrdering::ByScore;
    p.pair_id = format!("{}:{}:{}", p.phase, p.post1.id, p.post2.id);
    Some(p)
}

/// Union of the three phases, deduplicated on the unordered post-id pair
/// with phase precedence exact > inverse > similar, re-ordered by score.
/// Equal-score pairs are dropped: they cannot satisfy by_score ordering
/// (and no downstream score filter would keep them).
pub fn mix_datasets(exact: &[Pair], similar: &[Pair], inverse: &[Pair]) -> Vec<Pair> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for p in exact.iter().chain(inverse).chain(similar) {
        let key = if p.post1.id <= p.post2.id {
            (p.post1.id.clone(), p.post2.id.clone())
        } else {
            (p.post2.id.clone(), p.post1.id.clone())
        };
        if !seen.insert(key) {
            continue;
        }
        if let Some(reordered) = reorder_by_score(p.clone()) {
            out.push(reordered);
        }
    }
    out
}

/// Independently re-derive every structural constraint of each pair from
/// the raw records; builders and this validator must agree on 100% of
/// emitted pairs.
pub fn validate_pairs(pairs: &[Pair], cfg: &PairingConfig) -> Result<()> {
    for p in pairs {
        let fail = |why: &str| Err(Error::Invalid(format!("pair {} violates {why}", p.pair_id)));
        if p.post1.subreddit != p.post2.subreddit {
            return fail("same-subreddit");
        }
        if p.post1.id == p.post2.id {
            return fail("distinct posts");
        }
        let delta = (p.post1.created_utc - p.post2.created_utc).abs();
        if p.delta_t != delta || p.delta_t < 0 || p.delta_t > cfg.time_window {
            return fail("time window");
        }
        if p.ld_pair != normalized_ld(&p.post1.title, &p.post2.title) {
            return fail("ld_pair consistency");
        }
        if p.ld1_video != normalized_ld(&p.post1.title, &p.post1.video_title)
            || p.ld2_video != normalized_ld(&p.post2.title, &p.post2.video_title)
        {
            return fail("ld_video consistency");
        }
        // NaN must fail too, so compare via partial_cmp rather than <=
        if p.vvr.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return fail("vvr > 0");
        }
        if p.ordering == PairOrdering::ByScore && p.post1.score <= p.post2.score {
            return fail("by_score ordering");
        }
        match p.phase {
            Phase::Exact => {
                if p.post1.video_id != p.post2.video_id {
                    return fail("exact: shared video");
                }
                if p.vvr != 1.0 {
                    return fail("exact: vvr == 1");
                }
            }
            Phase::Similar => {
                if p.post1.video_id == p.post2.video_id {
                    return fail("similar: distinct videos");
                }
                if p.post1.video_category != p.post2.video_category {
                    return fail("similar: same category");
                }
                if p.post1.video_views == 0 || p.post2.video_views == 0 {
                    return fail("similar: nonzero views");
                }
                let (v1, v2) = (p.post1.video_views as f64, p.post2.video_views as f64);
                if v1.max(v2) / v1.min(v2) > cfg.vvr_max {
                    return fail("similar: vvr bound");
                }
                if (p.vvr - v1 / v2).abs() > 1e-9 {
                    return fail("similar: vvr consistency");
                }
            }
            Phase::Inverse => {
                if p.ordering != PairOrdering::ByScore {
                    return fail("inverse: by_score ordering");
                }
                if p.post1.video_views == 0 || p.post2.video_views == 0 {
                    return fail("inverse: nonzero views");
                }
                if p.post1.video_views > p.post2.video_views {
                    return fail("inverse: winner video not more viewed");
                }
                let vvr = p.post1.video_views as f64 / p.post2.video_views as f64;
                if (p.vvr - vvr).abs() > 1e-9 || p.vvr > 1.0 {
                    return fail("inverse: vvr <= 1");
                }
            }
        }
    }
    Ok(())
}
