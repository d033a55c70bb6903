//! Pair builders: greedy earliest-first matching inside candidate groups,
//! one builder per phase.

use std::collections::BTreeMap;

use crate::ingest::JoinedPost;
use crate::seed::labeled_coin;
use crate::textmetrics::normalized_ld;

use super::{MatchPolicy, Pair, PairOrdering, PairingConfig, Phase};

/// Match posts within one candidate group. Posts must already be sorted by
/// (created_utc, id). Greedy policy: walk forward in time; each unmatched
/// post pairs with the first eligible unmatched post inside the window, so
/// every post joins at most one pair. Exhaustive policy: emit every
/// eligible in-window combination.
fn match_group<'a>(
    posts: &[&'a JoinedPost],
    cfg: &PairingConfig,
    eligible: &dyn Fn(&JoinedPost, &JoinedPost) -> bool,
) -> Vec<(&'a JoinedPost, &'a JoinedPost)> {
    let mut pairs = Vec::new();
    match cfg.match_policy {
        MatchPolicy::Greedy => {
            let mut matched = vec![false; posts.len()];
            for i in 0..posts.len() {
                if matched[i] {
                    continue;
                }
                for j in i + 1..posts.len() {
                    if posts[j].created_utc - posts[i].created_utc > cfg.time_window {
                        break;
                    }
                    if !matched[j] && eligible(posts[i], posts[j]) {
                        matched[i] = true;
                        matched[j] = true;
                        pairs.push((posts[i], posts[j]));
                        break;
                    }
                }
            }
        }
        MatchPolicy::Exhaustive => {
            for i in 0..posts.len() {
                for j in i + 1..posts.len() {
                    if posts[j].created_utc - posts[i].created_utc > cfg.time_window {
                        break;
                    }
                    if eligible(posts[i], posts[j]) {
                        pairs.push((posts[i], posts[j]));
                    }
                }
            }
        }
    }
    pairs
}

/// Group posts by key and return groups in key order, each group sorted by
/// (created_utc, id). Deterministic regardless of input order.
fn grouped<K: Ord>(
    posts: &[JoinedPost],
    key: impl Fn(&JoinedPost) -> K,
) -> BTreeMap<K, Vec<&JoinedPost>> {
    let mut groups: BTreeMap<K, Vec<&JoinedPost>> = BTreeMap::new();
    for p in posts {
        groups.entry(key(p)).or_default().push(p);
    }
    for group in groups.values_mut() {
        group.sort_by(|a, b| (a.created_utc, &a.id).cmp(&(b.created_utc, &b.id)));
    }
    groups
}

/// Assemble a pair from two matched posts. `earlier` precedes `later` in
/// time. Random ordering draws its coin from the pair's identity (subreddit
/// plus sorted post ids), so orientation is independent of build order.
fn assemble(
    earlier: &JoinedPost,
    later: &JoinedPost,
    phase: Phase,
    ordering: PairOrdering,
    cfg: &PairingConfig,
) -> Pair {
    let (post1, post2) = match ordering {
        PairOrdering::Random => {
            let (lo, hi) = if earlier.id <= later.id {
                (&earlier.id, &later.id)
            } else {
                (&later.id, &earlier.id)
            };
            let label = format!("{}|{}|{}", earlier.subreddit, lo, hi);
            if labeled_coin(cfg.rng_seed, &label) {
                (later, earlier)
            } else {
                (earlier, later)
            }
        }
        PairOrdering::ByScore => {
            if earlier.score >= later.score {
                (earlier, later)
            } else {
                (later, earlier)
            }
        }
    };
    let vvr = match phase {
        Phase::Exact => 1.0,
        _ => post1.video_views as f64 / post2.video_views as f64,
    };
    Pair {
        pair_id: format!("{phase}:{}:{}", post1.id, post2.id),
        phase,
        delta_t: (post1.created_utc - post2.created_utc).abs(),
        vvr,
        ld_pair: normalized_ld(&post1.title, &post2.title),
        ld1_video: normalized_ld(&post1.title, &post1.video_title),
        ld2_video: normalized_ld(&post2.title, &post2.video_title),
        ordering,
        post1: post1.clone(),
        post2: post2.clone(),
    }
}

/// Exact phase: same subreddit, same video, posted within the window.
/// Ordering is random.
pub fn build_exact_pairs(posts: &[JoinedPost], cfg: &PairingConfig) -> Vec<Pair> {
    let mut out = Vec::new();
    for (_, group) in grouped(posts, |p| (p.subreddit.clone(), p.video_id.clone())) {
        for (a, b) in match_group(&group, cfg, &|_, _| true) {
            out.push(assemble(a, b, Phase::Exact, PairOrdering::Random, cfg));
        }
    }
    out
}

/// Similar phase: same subreddit and video category, different videos with
/// comparable view counts (undirected ratio within vvr_max; zero-view
/// videos excluded), posted within the window. Ordering is random.
///
/// With `same_video = true` the different-video requirement is inverted:
/// partners must share a video. That mode exists purely to cross-validate
/// the matcher — it must reproduce `build_exact_pairs` pair for pair — so
/// its output is labeled with the exact phase.
pub fn build_similar_pairs_mode(
    posts: &[JoinedPost],
    cfg: &PairingConfig,
    same_video: bool,
) -> Vec<Pair> {
    let mut out = Vec::new();
    let eligible = |a: &JoinedPost, b: &JoinedPost| -> bool {
        if same_video {
            return a.video_id == b.video_id;
        }
        if a.video_id == b.video_id || a.video_views == 0 || b.video_views == 0 {
            return false;
        }
        let (v1, v2) = (a.video_views as f64, b.video_views as f64);
        v1.max(v2) / v1.min(v2) <= cfg.vvr_max
    };
    let phase = if same_video {
        Phase::Exact
    } else {
        Phase::Similar
    };
    for (_, group) in grouped(posts, |p| (p.subreddit.clone(), p.video_category.clone())) {
        for (a, b) in match_group(&group, cfg, &eligible) {
            out.push(assemble(a, b, phase, PairOrdering::Random, cfg));
        }
    }
    out
}

pub fn build_similar_pairs(posts: &[JoinedPost], cfg: &PairingConfig) -> Vec<Pair> {
    build_similar_pairs_mode(posts, cfg, false)
}

/// Inverse phase: same subreddit, strictly different scores, and the
/// higher-scoring post's video has at most as many views as the other's
/// (zero-view videos excluded). Ordering is by_score, so vvr <= 1.
pub fn build_inverse_pairs(posts: &[JoinedPost], cfg: &PairingConfig) -> Vec<Pair> {
    let mut out = Vec::new();
    let eligible = |a: &JoinedPost, b: &JoinedPost| -> bool {
        if a.score == b.score || a.video_views == 0 || b.video_views == 0 {
            return false;
        }
        let (winner, loser) = if a.score > b.score { (a, b) } else { (b, a) };
        winner.video_views <= loser.video_views
    };
    for (_, group) in grouped(posts, |p| p.subreddit.clone()) {
        for (a, b) in match_group(&group, cfg, &eligible) {
            out.push(assemble(a, b, Phase::Inverse, PairOrdering::ByScore, cfg));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::PostType;
    use crate::pairing::validate_pairs;

    fn post(id: &str, sub: &str, t: i64, score: i64, vid: &str, views: u64) -> JoinedPost {
        JoinedPost {
            id: id.into(),
            subreddit: sub.into(),
            title: format!("a decent title for {id}"),
            created_utc: t,
            score,
            video_id: vid.into(),
            post_type: PostType::Video,
            video_views: views,
            video_category: "Music".into(),
            video_title: format!("video title of {vid}"),
        }
    }

    fn cat(mut p: JoinedPost, category: &str) -> JoinedPost {
        p.video_category = category.into();
        p
    }

    #[test]
    fn exact_three_posts_in_window_give_one_pair() {
        let cfg = PairingConfig::default();
        let posts = vec![
            post("a", "s", 100, 10, "vid_aaaaaa1", 500),
            post("b", "s", 200, 50, "vid_aaaaaa1", 500),
            post("c", "s", 300, 90, "vid_aaaaaa1", 500),
        ];
        let pairs = build_exact_pairs(&posts, &cfg);
        assert_eq!(pairs.len(), 1);
        let ids: Vec<&str> = vec![&pairs[0].post1.id, &pairs[0].post2.id]
            .into_iter()
            .map(String::as_str)
            .collect();
        assert!(ids.contains(&"a") && ids.contains(&"b")); // earliest two matched
        assert_eq!(pairs[0].vvr, 1.0);
        assert_eq!(pairs[0].delta_t, 100);
        validate_pairs(&pairs, &cfg).unwrap();
    }

    #[test]
    fn exact_respects_window_subreddit_and_video() {
        let cfg = PairingConfig::default();
        let posts = vec![
            post("a", "s", 0, 10, "vid_aaaaaa1", 500),
            post("b", "s", 1801, 50, "vid_aaaaaa1", 500), // outside window
            post("c", "other", 0, 50, "vid_aaaaaa1", 500), // other subreddit
            post("d", "s", 10, 50, "vid_bbbbbb1", 500),   // other video
        ];
        assert!(build_exact_pairs(&posts, &cfg).is_empty());
        let posts2 = vec![
            post("a", "s", 0, 10, "vid_aaaaaa1", 500),
            post("b", "s", 1800, 50, "vid_aaaaaa1", 500), // boundary: inclusive
        ];
        assert_eq!(build_exact_pairs(&posts2, &cfg).len(), 1);
    }

    #[test]
    fn exact_greedy_pairs_disjoint_posts() {
        let cfg = PairingConfig::default();
        let posts: Vec<JoinedPost> = (0..6)
            .map(|i| post(&format!("p{i}"), "s", i * 60, 10 + i, "vid_aaaaaa1", 500))
            .collect();
        let pairs = build_exact_pairs(&posts, &cfg);
        assert_eq!(pairs.len(), 3);
        let mut seen = std::collections::BTreeSet::new();
        for p in &pairs {
            assert!(seen.insert(p.post1.id.clone()));
            assert!(seen.insert(p.post2.id.clone()));
        }
    }

    #[test]
    fn exhaustive_policy_emits_all_combinations() {
        let cfg = PairingConfig {
            match_policy: MatchPolicy::Exhaustive,
            ..Default::default()
        };
        let posts: Vec<JoinedPost> = (0..4)
            .map(|i| post(&format!("p{i}"), "s", i * 60, 10 + i, "vid_aaaaaa1", 500))
            .collect();
        // all 6 combinations are within the 1800s window
        assert_eq!(build_exact_pairs(&posts, &cfg).len(), 6);
    }

    #[test]
    fn similar_requires_category_views_and_distinct_video() {
        let cfg = PairingConfig::default();
        let posts = vec![
            cat(post("a", "s", 0, 10, "vid_aaaaaa1", 1000), "Music"),
            cat(post("b", "s", 100, 50, "vid_bbbbbb1", 1500), "Music"), // ok: ratio 1.5
            cat(post("c", "s", 200, 50, "vid_cccccc1", 5000), "Music"), // ratio too big vs a/b
            cat(post("d", "s", 300, 50, "vid_dddddd1", 1000), "Gaming"), // other category
            cat(post("e", "s", 400, 50, "vid_eeeeee1", 0), "Music"),    // zero views
        ];
        let pairs = build_similar_pairs(&posts, &cfg);
        assert_eq!(pairs.len(), 1);
        let p = &pairs[0];
        let ids = [p.post1.id.as_str(), p.post2.id.as_str()];
        assert!(ids.contains(&"a") && ids.contains(&"b"));
        assert_eq!(p.phase, Phase::Similar);
        // vvr matches orientation
        let want = p.post1.video_views as f64 / p.post2.video_views as f64;
        assert!((p.vvr - want).abs() < 1e-12);
        validate_pairs(&pairs, &cfg).unwrap();
    }

    #[test]
    fn similar_same_video_mode_reproduces_exact_builder() {
        let cfg = PairingConfig {
            rng_seed: 7,
            ..Default::default()
        };
        // interleaved posts across several videos and subreddits
        let mut posts = Vec::new();
        let vids = ["vid_aaaaaa1", "vid_bbbbbb1", "vid_cccccc1"];
        for i in 0..30 {
            posts.push(post(
                &format!("p{i:02}"),
                if i % 2 == 0 { "s1" } else { "s2" },
                (i as i64) * 157,
                10 + i as i64,
                vids[i % 3],
                500 + 10 * i as u64,
            ));
        }
        let mut exact = build_exact_pairs(&posts, &cfg);
        let mut forced = build_similar_pairs_mode(&posts, &cfg, true);
        assert!(!exact.is_empty());
        // group iteration order differs between the builders, so compare as sets
        exact.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));
        forced.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));
        assert_eq!(exact, forced);
    }

    #[test]
    fn inverse_orients_by_score_with_vvr_at_most_one() {
        let cfg = PairingConfig::default();
        let posts = vec![
            post("lowviews", "s", 0, 90, "vid_aaaaaa1", 100),
            post("highviews", "s", 60, 10, "vid_bbbbbb1", 10_000),
        ];
        let pairs = build_inverse_pairs(&posts, &cfg);
        assert_eq!(pairs.len(), 1);
        let p = &pairs[0];
        assert_eq!(p.post1.id, "lowviews");
        assert_eq!(p.ordering, PairOrdering::ByScore);
        assert!((p.vvr - 0.01).abs() < 1e-12);
        validate_pairs(&pairs, &cfg).unwrap();
    }

    #[test]
    fn inverse_rejects_wrong_direction_and_ties() {
        let cfg = PairingConfig::default();
        // higher score on the more-viewed video: not an inverse pair
        let posts = vec![
            post("a", "s", 0, 90, "vid_aaaaaa1", 10_000),
            post("b", "s", 60, 10, "vid_bbbbbb1", 100),
        ];
        assert!(build_inverse_pairs(&posts, &cfg).is_empty());
        // score tie ineligible
        let ties = vec![
            post("a", "s", 0, 50, "vid_aaaaaa1", 100),
            post("b", "s", 60, 50, "vid_bbbbbb1", 10_000),
        ];
        assert!(build_inverse_pairs(&ties, &cfg).is_empty());
        // equal views both ways is fine (<=)
        let eq = vec![
            post("a", "s", 0, 90, "vid_aaaaaa1", 500),
            post("b", "s", 60, 10, "vid_bbbbbb1", 500),
        ];
        let pairs = build_inverse_pairs(&eq, &cfg);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].vvr, 1.0);
    }

    #[test]
    fn builders_are_input_order_invariant() {
        let cfg = PairingConfig {
            rng_seed: 42,
            ..Default::default()
        };
        let mut posts: Vec<JoinedPost> = (0..40)
            .map(|i| {
                post(
                    &format!("p{i:02}"),
                    if i % 3 == 0 { "s1" } else { "s2" },
                    (i as i64) * 301,
                    (i as i64 * 37) % 100,
                    if i % 4 == 0 {
                        "vid_aaaaaa1"
                    } else {
                        "vid_bbbbbb1"
                    },
                    400 + (i as u64 * 53) % 300,
                )
            })
            .collect();
        let forward = build_exact_pairs(&posts, &cfg);
        let fwd_sim = build_similar_pairs(&posts, &cfg);
        let fwd_inv = build_inverse_pairs(&posts, &cfg);
        posts.reverse();
        assert_eq!(build_exact_pairs(&posts, &cfg), forward);
        assert_eq!(build_similar_pairs(&posts, &cfg), fwd_sim);
        assert_eq!(build_inverse_pairs(&posts, &cfg), fwd_inv);
    }

    #[test]
    fn random_ordering_is_seeded_and_balanced() {
        let cfg_a = PairingConfig {
            rng_seed: 1,
            ..Default::default()
        };
        let cfg_b = PairingConfig {
            rng_seed: 2,
            ..Default::default()
        };
        let posts: Vec<JoinedPost> = (0..400)
            .map(|i| {
                post(
                    &format!("p{i:03}"),
                    &format!("s{}", i / 2), // one pair per subreddit
                    (i as i64 % 2) * 60,
                    if i % 2 == 0 { 10 } else { 90 },
                    "vid_aaaaaa1",
                    500,
                )
            })
            .collect();
        let run1 = build_exact_pairs(&posts, &cfg_a);
        let run2 = build_exact_pairs(&posts, &cfg_a);
        assert_eq!(run1, run2); // same seed -> identical
        assert_eq!(run1.len(), 200);

        let flipped = |pairs: &[Pair]| {
            pairs
                .iter()
                .filter(|p| p.post1.created_utc > p.post2.created_utc)
                .count()
        };
        let f1 = flipped(&run1);
        // coin is fair-ish: not all one way
        assert!(f1 > 60 && f1 < 140, "flips {f1}");
        // a different seed flips a different subset
        let run3 = build_exact_pairs(&posts, &cfg_b);
        assert_ne!(run1, run3);
    }
}
