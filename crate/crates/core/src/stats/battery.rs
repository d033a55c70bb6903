//! The paired metric battery: every continuous metric goes through a paired
//! t-test and a Wilcoxon signed-rank test with rank-biserial effect size;
//! every binary flag goes through McNemar's test on discordant counts.
//! Bonferroni correction is applied per family.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::pairing::Pair;
use crate::stats::{
    bonferroni, mcnemar, paired_t_test, wilcoxon_signed_rank, Conclusion, Direction, StatReport,
    TestKind,
};
use crate::textmetrics::TitleFeatureVector;

/// Minimum absolute rank-biserial correlation for a directional conclusion.
pub const MIN_EFFECT_R_RB: f64 = 0.1;

/// Battery configuration: base alpha and optional overrides for the number
/// of tests m in each family (defaults to the family size actually tested).
#[derive(Debug, Clone)]
pub struct BatteryConfig {
    pub alpha: f64,
    pub m_continuous: Option<usize>,
    pub m_binary: Option<usize>,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            alpha: 0.001,
            m_continuous: None,
            m_binary: None,
        }
    }
}

fn skipped_report(
    metric: &str,
    test: TestKind,
    n: usize,
    alpha_corrected: f64,
    why: String,
) -> StatReport {
    StatReport {
        metric_name: metric.to_string(),
        test,
        statistic: 0.0,
        p_value: 1.0,
        direction: Direction::None,
        effect_size: None,
        n,
        passes_bonferroni: false,
        alpha_corrected,
        conclusion: Some(Conclusion::NoDifference),
        skipped: Some(why),
    }
}

/// Run the full paired protocol over `pairs`, reading each post's metrics
/// from `features`. Pairs are expected in by_score ordering (post1 = higher
/// score), so `direction: group1_larger` means "winners larger".
pub fn run_metric_battery(
    pairs: &[Pair],
    features: &BTreeMap<String, TitleFeatureVector>,
    config: &BatteryConfig,
) -> Result<Vec<StatReport>> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut feature_pairs = Vec::with_capacity(pairs.len());
    for p in pairs {
        let f1 = features
            .get(&p.post1.id)
            .ok_or_else(|| Error::Invalid(format!("no features for post {}", p.post1.id)))?;
        let f2 = features
            .get(&p.post2.id)
            .ok_or_else(|| Error::Invalid(format!("no features for post {}", p.post2.id)))?;
        feature_pairs.push((f1, f2));
    }

    // continuous family: fixed in-process metrics plus the union of
    // external score names present in the data
    let mut external_names: Vec<String> = Vec::new();
    for (f1, f2) in &feature_pairs {
        for name in f1.external.keys().chain(f2.external.keys()) {
            if !external_names.iter().any(|n| n == name) {
                external_names.push(name.clone());
            }
        }
    }
    external_names.sort();

    let continuous_count = TitleFeatureVector::CONTINUOUS_NAMES.len() + external_names.len();
    let m_cont = config.m_continuous.unwrap_or(continuous_count);
    let alpha_cont = bonferroni(config.alpha, m_cont);

    let mut reports = Vec::new();

    let mut run_continuous = |name: &str, diffs: &[(f64, f64)]| {
        let diffs: Vec<f64> = diffs.iter().map(|(a, b)| a - b).collect();
        let n = diffs.len();
        if n < 2 {
            reports.push(skipped_report(
                name,
                TestKind::PairedT,
                n,
                alpha_cont,
                "fewer than 2 paired observations".into(),
            ));
            reports.push(skipped_report(
                name,
                TestKind::Wilcoxon,
                n,
                alpha_cont,
                "fewer than 2 paired observations".into(),
            ));
            return;
        }
        let t_res = paired_t_test(&diffs);
        let w_res = wilcoxon_signed_rank(&diffs);
        let conclusion = match (&t_res, &w_res) {
            (Ok(t), Ok(w)) => {
                let t_dir = t.direction;
                let w_dir = if w.r_rb > 0.0 {
                    Direction::Group1Larger
                } else if w.r_rb < 0.0 {
                    Direction::Group1Smaller
                } else {
                    Direction::None
                };
                if t_dir != w_dir || w.r_rb.abs() < MIN_EFFECT_R_RB {
                    Conclusion::Inconclusive
                } else {
                    match t_dir {
                        Direction::Group1Larger => Conclusion::Group1Larger,
                        Direction::Group1Smaller => Conclusion::Group1Smaller,
                        Direction::None => Conclusion::NoDifference,
                    }
                }
            }
            _ => Conclusion::NoDifference,
        };
        match t_res {
            Ok(t) => reports.push(StatReport {
                metric_name: name.to_string(),
                test: TestKind::PairedT,
                statistic: t.t,
                p_value: t.p_two_sided,
                direction: t.direction,
                effect_size: None,
                n,
                passes_bonferroni: t.p_two_sided < alpha_cont,
                alpha_corrected: alpha_cont,
                conclusion: Some(conclusion),
                skipped: None,
            }),
            Err(e) => reports.push(skipped_report(
                name,
                TestKind::PairedT,
                n,
                alpha_cont,
                e.to_string(),
            )),
        }
        match w_res {
            Ok(w) => {
                let direction = if w.r_rb > 0.0 {
                    Direction::Group1Larger
                } else if w.r_rb < 0.0 {
                    Direction::Group1Smaller
                } else {
                    Direction::None
                };
                reports.push(StatReport {
                    metric_name: name.to_string(),
                    test: TestKind::Wilcoxon,
                    statistic: w.w,
                    p_value: w.p_two_sided,
                    direction,
                    effect_size: Some(w.r_rb.abs()),
                    n: w.n,
                    passes_bonferroni: w.p_two_sided < alpha_cont,
                    alpha_corrected: alpha_cont,
                    conclusion: Some(conclusion),
                    skipped: None,
                });
            }
            Err(e) => reports.push(skipped_report(
                name,
                TestKind::Wilcoxon,
                n,
                alpha_cont,
                e.to_string(),
            )),
        }
    };

    for (idx, name) in TitleFeatureVector::CONTINUOUS_NAMES.iter().enumerate() {
        let values: Vec<(f64, f64)> = feature_pairs
            .iter()
            .map(|(f1, f2)| (f1.continuous_values()[idx], f2.continuous_values()[idx]))
            .collect();
        run_continuous(name, &values);
    }
    for name in &external_names {
        let values: Vec<(f64, f64)> = feature_pairs
            .iter()
            .filter_map(
                |(f1, f2)| match (f1.external.get(name), f2.external.get(name)) {
                    (Some(a), Some(b)) => Some((*a, *b)),
                    _ => None,
                },
            )
            .collect();
        run_continuous(name, &values);
    }

    // binary family
    let m_bin = config
        .m_binary
        .unwrap_or(TitleFeatureVector::BINARY_NAMES.len());
    let alpha_bin = bonferroni(config.alpha, m_bin);
    for (idx, name) in TitleFeatureVector::BINARY_NAMES.iter().enumerate() {
        let mut b = 0u64;
        let mut c = 0u64;
        for (f1, f2) in &feature_pairs {
            let v1 = f1.binary_values()[idx];
            let v2 = f2.binary_values()[idx];
            match (v1, v2) {
                (true, false) => b += 1,
                (false, true) => c += 1,
                _ => {}
            }
        }
        let n = feature_pairs.len();
        let risk_diff = (b as f64 - c as f64) / n as f64;
        let direction = if b > c {
            Direction::Group1Larger
        } else if b < c {
            Direction::Group1Smaller
        } else {
            Direction::None
        };
        let conclusion = match direction {
            Direction::Group1Larger => Conclusion::Group1Larger,
            Direction::Group1Smaller => Conclusion::Group1Smaller,
            Direction::None => Conclusion::NoDifference,
        };
        match mcnemar(b, c) {
            Ok(m) => reports.push(StatReport {
                metric_name: name.to_string(),
                test: TestKind::Mcnemar,
                statistic: m.statistic,
                p_value: m.p_two_sided,
                direction,
                effect_size: Some(risk_diff),
                n,
                passes_bonferroni: m.p_two_sided < alpha_bin,
                alpha_corrected: alpha_bin,
                conclusion: Some(conclusion),
                skipped: None,
            }),
            Err(e) => reports.push(skipped_report(
                name,
                TestKind::Mcnemar,
                n,
                alpha_bin,
                e.to_string(),
            )),
        }
    }

    reports.sort_by(|a, b| a.metric_name.cmp(&b.metric_name).then(a.test.cmp(&b.test)));
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{JoinedPost, PostType};
    use crate::pairing::{Pair, PairOrdering, Phase};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn post(id: &str, score: i64) -> JoinedPost {
        JoinedPost {
            id: id.into(),
            subreddit: "s".into(),
            title: format!("title {id}"),
            created_utc: 100,
            score,
            video_id: "vid_aaaaaa1".into(),
            post_type: PostType::Video,
            video_views: 500,
            video_category: "Music".into(),
            video_title: "video".into(),
        }
    }

    fn pair(i: usize) -> Pair {
        let p1 = post(&format!("w{i}"), 100);
        let p2 = post(&format!("l{i}"), 10);
        Pair {
            pair_id: format!("exact:w{i}:l{i}"),
            phase: Phase::Exact,
            delta_t: 0,
            vvr: 1.0,
            ld_pair: 10,
            ld1_video: 10,
            ld2_video: 10,
            ordering: PairOrdering::ByScore,
            post1: p1,
            post2: p2,
        }
    }

    /// A feature vector with every continuous field set to `base` and every
    /// flag set to `flag`, except `words` and `excl_mark` which are planted.
    fn fv(base: f64, words: f64, flag: bool, excl: bool) -> TitleFeatureVector {
        TitleFeatureVector {
            chars: base as usize,
            words: words as usize,
            avg_word_len: base,
            avg_sent_len: base,
            ttr: base,
            cttr: base,
            mtld: base,
            ari: base,
            cli: base,
            fk_grade: base,
            fr_ease_reversed: base,
            gunning_fog: base,
            vader_pos: base,
            vader_neu: base,
            vader_neg: base,
            vader_compound: base,
            excl_mark: excl,
            question_mark: flag,
            quotation_mark: flag,
            numbers: flag,
            emoji: flag,
            uppercase: flag,
            repeated_chars: flag,
            pronouns: flag,
            interrogatives: flag,
            tentative: flag,
            certainty: flag,
            affiliation: flag,
            tb_subjectivity: flag,
            tb_polarity: flag,
            swn_polarity: flag,
            nrc_emotion: flag,
            external: BTreeMap::new(),
        }
    }

    /// 200 pairs; winners have systematically more words (+3 +/- noise) and
    /// exclamation marks far more often; all other metrics pure noise.
    fn planted_world() -> (Vec<Pair>, BTreeMap<String, TitleFeatureVector>) {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut pairs = Vec::new();
        let mut features = BTreeMap::new();
        for i in 0..200 {
            let p = pair(i);
            let base1: f64 = rng.gen_range(-1.0..1.0);
            let base2: f64 = rng.gen_range(-1.0..1.0);
            let w1 = 10.0 + 3.0 + rng.gen_range(-1.0..1.0f64).round();
            let w2 = 10.0 + rng.gen_range(-1.0..1.0f64).round();
            let f1 = fv(base1, w1, rng.gen_bool(0.5), rng.gen_bool(0.8));
            let f2 = fv(base2, w2, rng.gen_bool(0.5), rng.gen_bool(0.2));
            features.insert(p.post1.id.clone(), f1);
            features.insert(p.post2.id.clone(), f2);
            pairs.push(p);
        }
        (pairs, features)
    }

    #[test]
    fn battery_shape_and_order() {
        let (pairs, features) = planted_world();
        let reports = run_metric_battery(&pairs, &features, &BatteryConfig::default()).unwrap();
        // 16 continuous metrics x 2 tests + 16 binary x 1
        assert_eq!(reports.len(), 16 * 2 + 16);
        let mut keys: Vec<(String, TestKind)> = reports
            .iter()
            .map(|r| (r.metric_name.clone(), r.test))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        keys.dedup();
        assert_eq!(keys.len(), reports.len());
        // every continuous metric appears under both tests
        for name in TitleFeatureVector::CONTINUOUS_NAMES {
            assert_eq!(reports.iter().filter(|r| r.metric_name == name).count(), 2);
        }
        // bonferroni bookkeeping holds everywhere
        for r in &reports {
            assert!(
                (0.0..=1.0).contains(&r.p_value),
                "{}: p={}",
                r.metric_name,
                r.p_value
            );
            assert_eq!(r.passes_bonferroni, r.p_value < r.alpha_corrected);
        }
    }

    #[test]
    fn battery_flags_planted_effects_only() {
        let (pairs, features) = planted_world();
        let reports = run_metric_battery(&pairs, &features, &BatteryConfig::default()).unwrap();
        let words_t = reports
            .iter()
            .find(|r| r.metric_name == "words" && r.test == TestKind::PairedT)
            .unwrap();
        let words_w = reports
            .iter()
            .find(|r| r.metric_name == "words" && r.test == TestKind::Wilcoxon)
            .unwrap();
        assert!(words_t.passes_bonferroni);
        assert!(words_w.passes_bonferroni);
        assert_eq!(words_t.direction, Direction::Group1Larger);
        assert_eq!(words_t.conclusion, Some(Conclusion::Group1Larger));
        assert_eq!(words_w.conclusion, Some(Conclusion::Group1Larger));
        assert!(words_w.effect_size.unwrap() > MIN_EFFECT_R_RB);

        let excl = reports
            .iter()
            .find(|r| r.metric_name == "excl_mark")
            .unwrap();
        assert_eq!(excl.test, TestKind::Mcnemar);
        assert!(excl.passes_bonferroni);
        assert_eq!(excl.conclusion, Some(Conclusion::Group1Larger));
        // risk difference is positive and substantial
        assert!(excl.effect_size.unwrap() > 0.3);

        // noise metrics do not pass
        for name in ["ari", "cli", "vader_compound", "numbers", "emoji"] {
            for r in reports.iter().filter(|r| r.metric_name == name) {
                assert!(!r.passes_bonferroni, "{name} unexpectedly passed");
            }
        }
    }

    #[test]
    fn battery_degenerate_metrics_are_skipped_not_dropped() {
        // two pairs with identical features: zero diffs everywhere
        let pairs: Vec<Pair> = (0..2).map(pair).collect();
        let mut features = BTreeMap::new();
        for p in &pairs {
            features.insert(p.post1.id.clone(), fv(1.0, 5.0, false, false));
            features.insert(p.post2.id.clone(), fv(1.0, 5.0, false, false));
        }
        let reports = run_metric_battery(&pairs, &features, &BatteryConfig::default()).unwrap();
        assert_eq!(reports.len(), 48);
        for r in &reports {
            assert!(
                r.skipped.is_some(),
                "{} {:?} should be skipped",
                r.metric_name,
                r.test
            );
            assert_eq!(r.p_value, 1.0);
            assert_eq!(r.conclusion, Some(Conclusion::NoDifference));
            assert!(!r.passes_bonferroni);
        }
    }

    #[test]
    fn battery_external_scores_join_where_present() {
        let (pairs, mut features) = planted_world();
        // give the first 150 pairs an external score on both sides, with a
        // strong planted difference
        for (i, p) in pairs.iter().enumerate().take(150) {
            features
                .get_mut(&p.post1.id)
                .unwrap()
                .external
                .insert("bert_pos".into(), 0.8 + (i % 3) as f64 * 0.01);
            features
                .get_mut(&p.post2.id)
                .unwrap()
                .external
                .insert("bert_pos".into(), 0.2 + (i % 5) as f64 * 0.01);
        }
        // one post has it only on one side: that pair must not join
        features
            .get_mut(&pairs[150].post1.id)
            .unwrap()
            .external
            .insert("bert_pos".into(), 0.9);
        let reports = run_metric_battery(&pairs, &features, &BatteryConfig::default()).unwrap();
        assert_eq!(reports.len(), 17 * 2 + 16);
        let ext = reports
            .iter()
            .find(|r| r.metric_name == "bert_pos" && r.test == TestKind::PairedT)
            .unwrap();
        assert_eq!(ext.n, 150);
        assert!(ext.passes_bonferroni);
        // family size grew: alpha shrank accordingly
        assert!((ext.alpha_corrected - 0.001 / 17.0).abs() < 1e-15);
    }

    #[test]
    fn battery_m_override_and_errors() {
        let (pairs, features) = planted_world();
        let cfg = BatteryConfig {
            alpha: 0.01,
            m_continuous: Some(100),
            m_binary: Some(40),
        };
        let reports = run_metric_battery(&pairs, &features, &cfg).unwrap();
        let cont = reports
            .iter()
            .find(|r| r.test == TestKind::PairedT)
            .unwrap();
        assert!((cont.alpha_corrected - 0.0001).abs() < 1e-15);
        let bin = reports
            .iter()
            .find(|r| r.test == TestKind::Mcnemar)
            .unwrap();
        assert!((bin.alpha_corrected - 0.00025).abs() < 1e-15);

        assert!(matches!(
            run_metric_battery(&[], &features, &BatteryConfig::default()),
            Err(Error::EmptyInput)
        ));
        let missing = run_metric_battery(&pairs, &BTreeMap::new(), &BatteryConfig::default());
        assert!(matches!(missing, Err(Error::Invalid(_))));
    }
}
