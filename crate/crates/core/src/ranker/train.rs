//! Max-margin training, prediction, the end-to-end ranking pipeline, and
//! the pair-similarity threshold ablation.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::JoinedPost;
use crate::pairing::{
    apply_title_filters, build_exact_pairs, build_inverse_pairs, build_similar_pairs, mix_datasets,
    Pair, PairingConfig,
};
use crate::seed::labeled_rng;
use crate::stats::pearson;
use crate::textmetrics::TitleFeatureVector;

use super::{
    feature_columns, make_split, post_vector, tie_break, RankerHyper, RankerModel, SplitSpec,
    Winner,
};

/// A fitted model together with its per-epoch objective trace
/// (mean hinge loss + L2 penalty, measured after each epoch).
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: RankerModel,
    pub epoch_loss: Vec<f64>,
}

fn standardized(raw: &[f64], means: &[f64], sds: &[f64]) -> Vec<f64> {
    raw.iter()
        .zip(means.iter().zip(sds))
        .map(|(x, (m, s))| (x - m) / s)
        .collect()
}

fn lookup<'a>(
    features: &'a BTreeMap<String, TitleFeatureVector>,
    id: &str,
) -> Result<&'a TitleFeatureVector> {
    features
        .get(id)
        .ok_or_else(|| Error::Invalid(format!("no features for post {id}")))
}

/// Fit a linear max-margin scorer on pairs in by_score ordering (post1 is
/// the winner). Features are standardized with train-set statistics;
/// zero-variance columns are dropped. Optimization is stochastic
/// subgradient descent on mean hinge loss max(0, m - (s(f1) - s(f2))) with
/// an L2 penalty, the step size decaying as lr/sqrt(epoch), and the pair
/// order reshuffled each epoch from the seed.
pub fn train_margin_ranker(
    train_pairs: &[Pair],
    features: &BTreeMap<String, TitleFeatureVector>,
    hyper: &RankerHyper,
) -> Result<TrainOutcome> {
    if train_pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    if hyper.margin < 0.0 || hyper.lr <= 0.0 || hyper.epochs == 0 || hyper.l2 < 0.0 {
        return Err(Error::Config(
            "margin >= 0, lr > 0, epochs >= 1, l2 >= 0 required".into(),
        ));
    }
    let all_columns = feature_columns(features);

    // raw per-post vectors, two per pair
    let mut raw: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(train_pairs.len());
    for p in train_pairs {
        let f1 = lookup(features, &p.post1.id)?;
        let f2 = lookup(features, &p.post2.id)?;
        raw.push((post_vector(f1, &all_columns), post_vector(f2, &all_columns)));
    }

    // train-set standardization over all 2n post vectors
    let n_posts = (2 * raw.len()) as f64;
    let dim = all_columns.len();
    let mut means = vec![0.0; dim];
    for (x1, x2) in &raw {
        for k in 0..dim {
            means[k] += x1[k] + x2[k];
        }
    }
    for m in &mut means {
        *m /= n_posts;
    }
    let mut vars = vec![0.0; dim];
    for (x1, x2) in &raw {
        for k in 0..dim {
            vars[k] += (x1[k] - means[k]).powi(2) + (x2[k] - means[k]).powi(2);
        }
    }
    // retain only columns with spread on the train set
    let kept: Vec<usize> = (0..dim).filter(|&k| vars[k] / n_posts > 0.0).collect();
    let feature_names: Vec<String> = kept.iter().map(|&k| all_columns[k].clone()).collect();
    let feature_means: Vec<f64> = kept.iter().map(|&k| means[k]).collect();
    let feature_sds: Vec<f64> = kept.iter().map(|&k| (vars[k] / n_posts).sqrt()).collect();

    // standardized per-pair difference vectors d = x1 - x2
    let deltas: Vec<Vec<f64>> = raw
        .iter()
        .map(|(x1, x2)| {
            kept.iter()
                .enumerate()
                .map(|(j, &k)| (x1[k] - x2[k]) / feature_sds[j])
                .collect()
        })
        .collect();

    let mut w = vec![0.0f64; kept.len()];
    let mut order: Vec<usize> = (0..deltas.len()).collect();
    let mut rng = labeled_rng(hyper.seed, "margin-ranker");
    let mut epoch_loss = Vec::with_capacity(hyper.epochs);
    for epoch in 1..=hyper.epochs {
        let lr_e = hyper.lr / (epoch as f64).sqrt();
        order.shuffle(&mut rng);
        for &i in &order {
            let d = &deltas[i];
            let score: f64 = w.iter().zip(d).map(|(wk, dk)| wk * dk).sum();
            if score < hyper.margin {
                for (wk, dk) in w.iter_mut().zip(d) {
                    *wk += lr_e * dk;
                }
            }
            if hyper.l2 > 0.0 {
                let decay = 1.0 - lr_e * hyper.l2;
                for wk in &mut w {
                    *wk *= decay;
                }
            }
        }
        let mut hinge_sum = 0.0;
        for d in &deltas {
            let score: f64 = w.iter().zip(d).map(|(wk, dk)| wk * dk).sum();
            hinge_sum += (hyper.margin - score).max(0.0);
        }
        let penalty = 0.5 * hyper.l2 * w.iter().map(|x| x * x).sum::<f64>();
        let loss = hinge_sum / deltas.len() as f64 + penalty;
        if !loss.is_finite() || w.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid(format!(
                "non-finite training state at epoch {epoch} (loss {loss}); reduce lr or check features"
            )));
        }
        epoch_loss.push(loss);
    }

    Ok(TrainOutcome {
        model: RankerModel {
            feature_names,
            weights: w,
            bias: 0.0,
            margin: hyper.margin,
            feature_means,
            feature_sds,
            tie_rule: hyper.tie_rule,
            seed: hyper.seed,
            lr: hyper.lr,
            epochs: hyper.epochs,
            l2: hyper.l2,
        },
        epoch_loss,
    })
}

fn model_score(model: &RankerModel, fv: &TitleFeatureVector) -> f64 {
    let raw = post_vector(fv, &model.feature_names);
    let x = standardized(&raw, &model.feature_means, &model.feature_sds);
    model.bias
        + model
            .weights
            .iter()
            .zip(&x)
            .map(|(w, v)| w * v)
            .sum::<f64>()
}

/// Predict the winner of one pair; exact score ties resolve by the model's
/// tie rule.
pub fn predict(
    model: &RankerModel,
    pair: &Pair,
    f1: &TitleFeatureVector,
    f2: &TitleFeatureVector,
) -> Winner {
    let s1 = model_score(model, f1);
    let s2 = model_score(model, f2);
    if s1 > s2 {
        Winner::Post1
    } else if s2 > s1 {
        Winner::Post2
    } else {
        tie_break(pair, model.tie_rule)
    }
}

/// Fraction of pairs whose predicted winner is post1 (the true winner
/// under by_score ordering).
pub fn model_accuracy(
    model: &RankerModel,
    pairs: &[Pair],
    features: &BTreeMap<String, TitleFeatureVector>,
) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut correct = 0usize;
    for p in pairs {
        let f1 = lookup(features, &p.post1.id)?;
        let f2 = lookup(features, &p.post2.id)?;
        if predict(model, p, f1, f2) == Winner::Post1 {
            correct += 1;
        }
    }
    Ok(correct as f64 / pairs.len() as f64)
}

/// Outcome of one full build-split-train-evaluate run.
#[derive(Debug, Clone)]
pub struct RankOutcome {
    pub model: RankerModel,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub n_train: usize,
    pub n_test: usize,
}

/// Build the mixed filtered pair set from posts, split it, train, and
/// report train/test accuracy.
pub fn run_rank_pipeline(
    posts: &[JoinedPost],
    features: &BTreeMap<String, TitleFeatureVector>,
    pairing_cfg: &PairingConfig,
    split: &SplitSpec,
    hyper: &RankerHyper,
) -> Result<RankOutcome> {
    let exact = build_exact_pairs(posts, pairing_cfg);
    let similar = build_similar_pairs(posts, pairing_cfg);
    let inverse = build_inverse_pairs(posts, pairing_cfg);
    let mixed = mix_datasets(&exact, &similar, &inverse);
    let filtered = apply_title_filters(&mixed, pairing_cfg);
    let (train, test) = make_split(&filtered, split)?;
    let outcome = train_margin_ranker(&train, features, hyper)?;
    let train_accuracy = model_accuracy(&outcome.model, &train, features)?;
    let test_accuracy = model_accuracy(&outcome.model, &test, features)?;
    Ok(RankOutcome {
        model: outcome.model,
        train_accuracy,
        test_accuracy,
        n_train: train.len(),
        n_test: test.len(),
    })
}

/// One grid point of the pair-similarity threshold ablation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub ld_pair_max: u8,
    pub test_accuracy: f64,
    pub n_train: usize,
    pub n_test: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub rows: Vec<AblationRow>,
    /// Pearson correlation of threshold vs test accuracy; absent for grids
    /// with fewer than two points or zero variance.
    pub pearson_threshold_accuracy: Option<f64>,
}

/// Rebuild pairs and retrain at each title-similarity threshold, reporting
/// test accuracy per threshold and the threshold-accuracy correlation.
pub fn ablate_thresholds(
    posts: &[JoinedPost],
    features: &BTreeMap<String, TitleFeatureVector>,
    base_cfg: &PairingConfig,
    split: &SplitSpec,
    hyper: &RankerHyper,
    ld_pair_grid: &[u8],
) -> Result<AblationReport> {
    if ld_pair_grid.is_empty() {
        return Err(Error::Config("ablation grid must not be empty".into()));
    }
    let mut rows = Vec::with_capacity(ld_pair_grid.len());
    for &threshold in ld_pair_grid {
        let cfg = PairingConfig {
            ld_pair_max: threshold,
            ..base_cfg.clone()
        };
        let outcome = run_rank_pipeline(posts, features, &cfg, split, hyper)?;
        rows.push(AblationRow {
            ld_pair_max: threshold,
            test_accuracy: outcome.test_accuracy,
            n_train: outcome.n_train,
            n_test: outcome.n_test,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.ld_pair_max as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.test_accuracy).collect();
    let pearson_threshold_accuracy = if rows.len() >= 2 {
        pearson(&xs, &ys).ok()
    } else {
        None
    };
    Ok(AblationReport {
        rows,
        pearson_threshold_accuracy,
    })
}

pub fn write_ablation_csv<W: std::io::Write>(out: W, report: &AblationReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "ld_pair_max",
        "test_accuracy",
        "n_train",
        "n_test",
        "pearson_threshold_accuracy",
    ])?;
    let overall = report
        .pearson_threshold_accuracy
        .map(|v| v.to_string())
        .unwrap_or_default();
    for (i, r) in report.rows.iter().enumerate() {
        w.write_record([
            r.ld_pair_max.to_string(),
            r.test_accuracy.to_string(),
            r.n_train.to_string(),
            r.n_test.to_string(),
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
