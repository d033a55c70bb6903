//! The pairwise ranking experiment: train/test splits, heuristic
//! baselines, a linear max-margin scorer over title-feature deltas, and
//! evaluation of externally produced predictions.
//!
//! All ranking operations expect pairs in by_score ordering, so post1 is
//! the true winner of every pair.

pub mod train;

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairing::Pair;
use crate::seed::{labeled_coin, labeled_rng};
use crate::textmetrics::TitleFeatureVector;

pub use train::{
    ablate_thresholds, model_accuracy, predict, run_rank_pipeline, train_margin_ranker,
    AblationReport, AblationRow, RankOutcome, TrainOutcome,
};

/// Deterministic resolution for exact scoring ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    /// The earlier-posted member wins (simultaneous posts fall back to post1).
    #[default]
    EarlierPost,
    /// post1 wins.
    Post1,
}

/// Predicted winner of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Post1,
    Post2,
}

impl std::fmt::Display for Winner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Winner::Post1 => "post1",
            Winner::Post2 => "post2",
        })
    }
}

impl std::str::FromStr for Winner {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "post1" => Ok(Winner::Post1),
            "post2" => Ok(Winner::Post2),
            other => Err(Error::Invalid(format!(
                "winner must be post1 or post2, got {other:?}"
            ))),
        }
    }
}

fn tie_break(pair: &Pair, rule: TieRule) -> Winner {
    match rule {
        TieRule::Post1 => Winner::Post1,
        TieRule::EarlierPost => {
            if pair.post2.created_utc < pair.post1.created_utc {
                Winner::Post2
            } else {
                Winner::Post1
            }
        }
    }
}

/// Split strategy for the ranking experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitStrategy {
    Date,
    PostId,
    VideoId,
}

impl std::fmt::Display for SplitStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SplitStrategy::Date => "date",
            SplitStrategy::PostId => "post_id",
            SplitStrategy::VideoId => "video_id",
        })
    }
}

/// How to divide pairs into train and test sets.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub strategy: SplitStrategy,
    /// Date strategy: epoch-seconds cutoff (default 2022-01-01 00:00 UTC).
    pub cutoff: i64,
    /// Id strategies: fraction of distinct ids sampled into the test side.
    pub test_frac: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            strategy: SplitStrategy::Date,
            cutoff: 1_640_995_200,
            test_frac: 0.05,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.test_frac > 0.0 && self.test_frac < 1.0) {
            return Err(Error::Config("test_frac must be in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Split pairs into disjoint train and test sets.
///
/// Date strategy: a pair is test iff both posts were created at or after
/// the cutoff, train iff both before; pairs straddling the cutoff are
/// dropped (no leakage). Id strategies: sample `test_frac` of the distinct
/// post (or video) ids; a pair is test iff either of its ids was sampled,
/// train iff neither was.
pub fn make_split(pairs: &[Pair], spec: &SplitSpec) -> Result<(Vec<Pair>, Vec<Pair>)> {
    spec.validate()?;
    let mut train = Vec::new();
    let mut test = Vec::new();
    match spec.strategy {
        SplitStrategy::Date => {
            for p in pairs {
                let in_test1 = p.post1.created_utc >= spec.cutoff;
                let in_test2 = p.post2.created_utc >= spec.cutoff;
                match (in_test1, in_test2) {
                    (true, true) => test.push(p.clone()),
                    (false, false) => train.push(p.clone()),
                    _ => {} // straddles the cutoff: dropped from both sets
                }
            }
        }
        SplitStrategy::PostId | SplitStrategy::VideoId => {
            let id_of = |post: &crate::ingest::JoinedPost| -> String {
                match spec.strategy {
                    SplitStrategy::PostId => post.id.clone(),
                    _ => post.video_id.clone(),
                }
            };
            let mut ids: Vec<String> = pairs
                .iter()
                .flat_map(|p| [id_of(&p.post1), id_of(&p.post2)])
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let k = ((ids.len() as f64 * spec.test_frac).round() as usize).clamp(1, ids.len());
            let mut rng = labeled_rng(spec.seed, &format!("split|{}", spec.strategy));
            ids.shuffle(&mut rng);
            let sampled: BTreeSet<String> = ids.into_iter().take(k).collect();
            for p in pairs {
                if sampled.contains(&id_of(&p.post1)) || sampled.contains(&id_of(&p.post2)) {
                    test.push(p.clone());
                } else {
                    train.push(p.clone());
                }
            }
        }
    }
    if train.is_empty() || test.is_empty() {
        return Err(Error::DegenerateSplit(format!(
            "strategy {} left {} train / {} test pairs",
            spec.strategy,
            train.len(),
            test.len()
        )));
    }
    Ok((train, test))
}

/// Fraction of pairs a fair per-pair coin gets right.
pub fn baseline_random(pairs: &[Pair], seed: u64) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let correct = pairs
        .iter()
        .filter(|p| {
            let guess = if labeled_coin(seed, &format!("baseline-random|{}", p.pair_id)) {
                Winner::Post1
            } else {
                Winner::Post2
            };
            guess == Winner::Post1
        })
        .count();
    Ok(correct as f64 / pairs.len() as f64)
}

/// Accuracy of predicting the earlier-posted member as the winner.
pub fn baseline_time(pairs: &[Pair], tie_rule: TieRule) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let correct = pairs
        .iter()
        .filter(|p| {
            let guess = if p.post1.created_utc < p.post2.created_utc {
                Winner::Post1
            } else if p.post2.created_utc < p.post1.created_utc {
                Winner::Post2
            } else {
                tie_break(p, tie_rule)
            };
            guess == Winner::Post1
        })
        .count();
    Ok(correct as f64 / pairs.len() as f64)
}

/// Accuracy of predicting the member whose video has more views.
pub fn baseline_video_views(pairs: &[Pair], tie_rule: TieRule) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let correct = pairs
        .iter()
        .filter(|p| {
            let guess = if p.post1.video_views > p.post2.video_views {
                Winner::Post1
            } else if p.post2.video_views > p.post1.video_views {
                Winner::Post2
            } else {
                tie_break(p, tie_rule)
            };
            guess == Winner::Post1
        })
        .count();
    Ok(correct as f64 / pairs.len() as f64)
}

/// Fitted linear max-margin scorer plus everything needed to apply it:
/// the feature-column manifest, train-set standardization vectors, and
/// the hyperparameters it was trained with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankerModel {
    /// Names of the retained feature columns (zero-variance columns are
    /// dropped at fit time).
    pub feature_names: Vec<String>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub margin: f64,
    pub feature_means: Vec<f64>,
    pub feature_sds: Vec<f64>,
    pub tie_rule: TieRule,
    pub seed: u64,
    pub lr: f64,
    pub epochs: usize,
    pub l2: f64,
}

/// Hyperparameters for `train_margin_ranker`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RankerHyper {
    pub margin: f64,
    pub lr: f64,
    pub epochs: usize,
    pub l2: f64,
    pub seed: u64,
    pub tie_rule: TieRule,
}

impl Default for RankerHyper {
    fn default() -> Self {
        RankerHyper {
            margin: 1.0,
            lr: 0.05,
            epochs: 100,
            l2: 1e-4,
            seed: 0,
            tie_rule: TieRule::default(),
        }
    }
}

/// The full feature-column manifest for a feature table: the fixed
/// continuous and binary columns plus the sorted union of external score
/// names.
pub fn feature_columns(features: &BTreeMap<String, TitleFeatureVector>) -> Vec<String> {
    let mut columns: Vec<String> = TitleFeatureVector::CONTINUOUS_NAMES
        .iter()
        .chain(TitleFeatureVector::BINARY_NAMES.iter())
        .map(|s| s.to_string())
        .collect();
    let mut external: BTreeSet<&String> = BTreeSet::new();
    for fv in features.values() {
        external.extend(fv.external.keys());
    }
    columns.extend(external.into_iter().cloned());
    columns
}

/// One post's raw (unstandardized) feature vector under a column manifest.
/// Binary flags map to 0/1; external columns missing for this post are 0.
pub fn post_vector(fv: &TitleFeatureVector, columns: &[String]) -> Vec<f64> {
    let continuous = fv.continuous_values();
    let binary = fv.binary_values();
    columns
        .iter()
        .map(|name| {
            if let Some(i) = TitleFeatureVector::CONTINUOUS_NAMES
                .iter()
                .position(|n| n == name)
            {
                continuous[i]
            } else if let Some(i) = TitleFeatureVector::BINARY_NAMES
                .iter()
                .position(|n| n == name)
            {
                if binary[i] {
                    1.0
                } else {
                    0.0
                }
            } else {
                fv.external.get(name).copied().unwrap_or(0.0)
            }
        })
        .collect()
}

/// Evaluation of an external prediction file against a pair set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalEval {
    /// Accuracy over the covered pairs.
    pub accuracy: f64,
    /// Covered pairs / total pairs.
    pub coverage: f64,
    pub n_covered: usize,
    pub n_total: usize,
    pub warnings: Vec<String>,
}

/// Score a `pair_id,winner` prediction file against pairs in by_score
/// ordering (post1 is the true winner). Unknown pair ids produce warnings
/// and are ignored; duplicate rows keep the first occurrence.
pub fn evaluate_external<R: Read>(pairs: &[Pair], reader: R) -> Result<ExternalEval> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut csv_reader = csv::Reader::from_reader(reader);
    let headers = csv_reader.headers()?.clone();
    if headers.len() < 2 || &headers[0] != "pair_id" || &headers[1] != "winner" {
        return Err(Error::Invalid(
            "predictions file must have header pair_id,winner".into(),
        ));
    }
    let known: BTreeSet<&str> = pairs.iter().map(|p| p.pair_id.as_str()).collect();
    let mut predictions: BTreeMap<String, Winner> = BTreeMap::new();
    let mut warnings = Vec::new();
    for record in csv_reader.records() {
        let record = record?;
        let pair_id = record.get(0).unwrap_or("").to_string();
        let winner: Winner = record.get(1).unwrap_or("").parse()?;
        if !known.contains(pair_id.as_str()) {
            warnings.push(format!("prediction for unknown pair {pair_id:?} ignored"));
            continue;
        }
        if predictions.contains_key(&pair_id) {
            warnings.push(format!("duplicate prediction for pair {pair_id:?} ignored"));
            continue;
        }
        predictions.insert(pair_id, winner);
    }
    let n_covered = predictions.len();
    let n_correct = pairs
        .iter()
        .filter(|p| predictions.get(&p.pair_id) == Some(&Winner::Post1))
        .count();
    Ok(ExternalEval {
        accuracy: if n_covered > 0 {
            n_correct as f64 / n_covered as f64
        } else {
            0.0
        },
        coverage: n_covered as f64 / pairs.len() as f64,
        n_covered,
        n_total: pairs.len(),
        warnings,
    })
}

pub fn write_predictions_csv<W: Write>(out: W, predictions: &[(String, Winner)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["pair_id", "winner"])?;
    for (pair_id, winner) in predictions {
        w.write_record([pair_id.as_str(), &winner.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// One accuracy result: (split strategy, pair phase/dataset, method).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub split: String,
    pub phase: String,
    pub method: String,
    pub accuracy: f64,
    pub n: usize,
}

pub fn write_results_csv<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["split", "phase", "method", "accuracy", "n"])?;
    for r in rows {
        w.write_record([
            r.split.as_str(),
            r.phase.as_str(),
            r.method.as_str(),
            &r.accuracy.to_string(),
            &r.n.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::ingest::{JoinedPost, PostType};
    use crate::pairing::{PairOrdering, Phase};

    pub fn post(id: &str, t: i64, score: i64, vid: &str, views: u64) -> JoinedPost {
        JoinedPost {
            id: id.into(),
            subreddit: "s".into(),
            title: format!("title {id}"),
            created_utc: t,
            score,
            video_id: vid.into(),
            post_type: PostType::Video,
            video_views: views,
            video_category: "Music".into(),
            video_title: "video".into(),
        }
    }

    /// A by_score pair: post1 wins.
    pub fn by_score_pair(id: usize, t1: i64, t2: i64, views1: u64, views2: u64) -> Pair {
        let p1 = post(&format!("w{id}"), t1, 100, &format!("vid_w{id:06}"), views1);
        let p2 = post(&format!("l{id}"), t2, 10, &format!("vid_l{id:06}"), views2);
        Pair {
            pair_id: format!("similar:w{id}:l{id}"),
            phase: Phase::Similar,
            delta_t: (t1 - t2).abs(),
            vvr: views1 as f64 / views2 as f64,
            ld_pair: 10,
            ld1_video: 10,
            ld2_video: 10,
            ordering: PairOrdering::ByScore,
            post1: p1,
            post2: p2,
        }
    }
}
