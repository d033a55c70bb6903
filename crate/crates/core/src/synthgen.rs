//! Synthetic world generator: subreddits, videos, and posts drawn from a
//! parameterized engagement model with planted, known effects, so the
//! whole pipeline can be validated end to end against ground truth.
//!
//! Engagement model per post:
//!
//! ```text
//! log score = base + views_weight * ln(views) + exposure + title effects
//!             + subreddit offset + Gaussian noise
//! score     = max(0, round(exp(log score)))
//! ```
//!
//! Posts are laid out as two-post clusters (sharing a subreddit and a tight
//! time window, so the pair builders can find them) plus singletons. A
//! configurable fraction of posts copy their video's title verbatim; copy
//! posts receive no title-effect contribution.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{PostRecord, PostType, VideoRecord};

/// Weight keys accepted in `title_effect_weights`.
pub const TITLE_EFFECT_KEYS: [&str; 6] = [
    "words",
    "positive_sentiment",
    "negative_sentiment",
    "uppercase",
    "numbers",
    "exclaim",
];

const CATEGORIES: [&str; 8] = [
    "Music",
    "Gaming",
    "Sports",
    "News",
    "Comedy",
    "Education",
    "Film",
    "Tech",
];

const NEUTRAL_WORDS: [&str; 48] = [
    "river", "window", "garden", "mountain", "street", "coffee", "morning", "signal", "paper",
    "bridge", "engine", "harbor", "market", "silver", "stone", "forest", "cloud", "winter",
    "summer", "village", "camera", "journey", "station", "library", "museum", "kitchen", "bicycle",
    "island", "valley", "desert", "meadow", "lantern", "compass", "anchor", "ladder", "bottle",
    "candle", "mirror", "pocket", "ribbon", "saddle", "theater", "tunnel", "wagon", "whistle",
    "workshop", "yard", "zeppelin",
];

const POSITIVE_WORDS: [&str; 6] = ["amazing", "great", "love", "wonderful", "best", "happy"];
const NEGATIVE_WORDS: [&str; 6] = ["terrible", "awful", "hate", "worst", "sad", "horrible"];
const NUMBER_TOKENS: [&str; 8] = ["2019", "2020", "2021", "2022", "10", "7", "100", "3"];

/// All parameters of the generative world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_subreddits: usize,
    pub posts_per_subreddit: usize,
    /// Power-law exponent of video view counts.
    pub views_alpha: f64,
    /// Power-law exponent of subreddit user counts.
    pub subreddit_size_alpha: f64,
    /// Exposure decay halflife in seconds; earlier cluster members get a
    /// larger exposure term.
    pub exposure_halflife: f64,
    pub exposure_weight: f64,
    /// Named planted effects added to log score per title knob (see
    /// [`TITLE_EFFECT_KEYS`]). Empty map = null world.
    pub title_effect_weights: BTreeMap<String, f64>,
    /// Fraction of posts whose title is the video title verbatim.
    pub copy_title_fraction: f64,
    /// Log-score penalty applied to copy posts.
    pub copy_title_penalty: f64,
    /// Fraction of clusters whose two titles are near-duplicates of each
    /// other (one word changed): signal-free pairs above the usual
    /// pair-similarity threshold.
    pub near_dup_fraction: f64,
    /// Fraction of posts arranged into two-post same-window clusters.
    pub cluster_fraction: f64,
    /// Fraction of clusters sharing one video (the rest pair two same-
    /// category videos with comparable views).
    pub exact_cluster_fraction: f64,
    /// Intercept of the log-score model.
    pub base_log_score: f64,
    /// Coefficient of ln(views).
    pub views_weight: f64,
    /// Coefficient of ln(subreddit users / 1000).
    pub subreddit_offset_weight: f64,
    pub noise_sd: f64,
    /// Posting-time span (epoch seconds).
    pub time_start: i64,
    pub time_end: i64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            n_subreddits: 25,
            posts_per_subreddit: 400,
            views_alpha: 1.11,
            subreddit_size_alpha: 1.84,
            exposure_halflife: 1800.0,
            exposure_weight: 0.25,
            title_effect_weights: BTreeMap::new(),
            copy_title_fraction: 0.21,
            copy_title_penalty: 0.0,
            near_dup_fraction: 0.15,
            cluster_fraction: 0.8,
            exact_cluster_fraction: 0.5,
            base_log_score: 4.0,
            views_weight: 0.35,
            subreddit_offset_weight: 0.3,
            noise_sd: 1.1,
            time_start: 1_546_300_800, // 2019-01-01
            time_end: 1_672_444_800,   // 2022-12-31
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let fractions = [
            ("copy_title_fraction", self.copy_title_fraction),
            ("near_dup_fraction", self.near_dup_fraction),
            ("cluster_fraction", self.cluster_fraction),
            ("exact_cluster_fraction", self.exact_cluster_fraction),
        ];
        for (name, value) in fractions {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Config(format!(
                    "{name} must be in [0, 1], got {value}"
                )));
            }
        }
        if self.views_alpha <= 1.0 || self.subreddit_size_alpha <= 1.0 {
            return Err(Error::Config("power-law alphas must be > 1".into()));
        }
        if self.n_subreddits == 0 || self.posts_per_subreddit == 0 {
            return Err(Error::Config(
                "world must contain subreddits and posts".into(),
            ));
        }
        if self.exposure_halflife <= 0.0 || self.noise_sd < 0.0 {
            return Err(Error::Config(
                "exposure_halflife must be > 0 and noise_sd >= 0".into(),
            ));
        }
        if self.time_start <= 0 || self.time_end <= self.time_start + 7200 {
            return Err(Error::Config(
                "time span must be positive and at least two hours".into(),
            ));
        }
        for key in self.title_effect_weights.keys() {
            if !TITLE_EFFECT_KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "unknown title effect {key:?}; known: {}",
                    TITLE_EFFECT_KEYS.join(", ")
                )));
            }
        }
        Ok(())
    }
}

/// Everything planted into a generated world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub config: SynthConfig,
    pub n_posts: usize,
    pub n_videos: usize,
    pub n_clusters: usize,
    pub n_exact_clusters: usize,
    pub n_similar_clusters: usize,
    pub n_near_dup_clusters: usize,
    pub n_copy_posts: usize,
    pub subreddit_users: BTreeMap<String, u64>,
    pub subreddit_offsets: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthWorld {
    pub posts: Vec<PostRecord>,
    pub videos: Vec<VideoRecord>,
    pub ground_truth: GroundTruth,
}

/// One draw from a Pareto distribution with the given exponent and lower
/// bound, capped to keep the heavy tail finite.
pub fn sample_power_law<R: Rng>(rng: &mut R, alpha: f64, x_min: f64, cap: f64) -> f64 {
    let u: f64 = rng.gen_range(0.0..1.0);
    (x_min * (1.0 - u).powf(-1.0 / (alpha - 1.0))).min(cap)
}

fn sample_normal<R: Rng>(rng: &mut R, sd: f64) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos() * sd
}

/// Title knobs the generator controls and can plant effects on. `words` is
/// the total whitespace-token count (number token included), matching what
/// the feature extractor reports.
#[derive(Debug, Clone, Copy, Default)]
struct TitleKnobs {
    words: usize,
    positive: usize,
    negative: usize,
    uppercase: bool,
    number: bool,
    exclaim: bool,
}

fn draw_knobs<R: Rng>(rng: &mut R) -> TitleKnobs {
    TitleKnobs {
        words: rng.gen_range(5..=12),
        positive: rng.gen_range(0..=2),
        negative: rng.gen_range(0..=1),
        uppercase: rng.gen_bool(0.15),
        number: rng.gen_bool(0.3),
        exclaim: rng.gen_bool(0.2),
    }
}

fn render_title<R: Rng>(rng: &mut R, knobs: &TitleKnobs) -> String {
    let n_core = knobs.words - knobs.number as usize;
    let n_pos = knobs.positive.min(n_core);
    let n_neg = knobs.negative.min(n_core - n_pos);
    let mut words: Vec<String> = Vec::with_capacity(n_core + 1);
    for _ in 0..n_pos {
        words.push(POSITIVE_WORDS[rng.gen_range(0..POSITIVE_WORDS.len())].to_string());
    }
    for _ in 0..n_neg {
        words.push(NEGATIVE_WORDS[rng.gen_range(0..NEGATIVE_WORDS.len())].to_string());
    }
    while words.len() < n_core {
        words.push(NEUTRAL_WORDS[rng.gen_range(0..NEUTRAL_WORDS.len())].to_string());
    }
    // deterministic Fisher-Yates shuffle of word order
    for i in (1..words.len()).rev() {
        words.swap(i, rng.gen_range(0..=i));
    }
    if knobs.uppercase {
        let i = rng.gen_range(0..words.len());
        words[i] = words[i].to_uppercase();
    }
    if knobs.number {
        let token = NUMBER_TOKENS[rng.gen_range(0..NUMBER_TOKENS.len())].to_string();
        let i = rng.gen_range(0..=words.len());
        words.insert(i, token);
    }
    let mut title = words.join(" ");
    if knobs.exclaim {
        title.push('!');
    }
    title
}

/// Replace one lowercase neutral word with a different neutral word: a
/// near-duplicate with identical knob counts (uppercase words are left
/// alone so the uppercase knob is preserved).
fn mutate_title<R: Rng>(rng: &mut R, title: &str) -> String {
    let mut words: Vec<String> = title.split(' ').map(|w| w.to_string()).collect();
    let neutral_positions: Vec<usize> = words
        .iter()
        .enumerate()
        .filter(|(_, w)| NEUTRAL_WORDS.contains(&w.trim_end_matches('!')))
        .map(|(i, _)| i)
        .collect();
    if neutral_positions.is_empty() {
        return title.to_string();
    }
    let i = neutral_positions[rng.gen_range(0..neutral_positions.len())];
    let had_exclaim = words[i].ends_with('!');
    let mut replacement;
    loop {
        replacement = NEUTRAL_WORDS[rng.gen_range(0..NEUTRAL_WORDS.len())].to_string();
        if !words[i]
            .trim_end_matches('!')
            .eq_ignore_ascii_case(&replacement)
        {
            break;
        }
    }
    if had_exclaim {
        replacement.push('!');
    }
    words[i] = replacement;
    words.join(" ")
}

/// The knob counts of a pure-neutral title (used for copy posts and video
/// titles, whose words all come from the neutral pool).
fn neutral_knobs(title: &str) -> TitleKnobs {
    TitleKnobs {
        words: title.split_whitespace().count(),
        ..TitleKnobs::default()
    }
}

fn title_effect(knobs: &TitleKnobs, weights: &BTreeMap<String, f64>) -> f64 {
    let mut sum = 0.0;
    for (key, w) in weights {
        sum += w * match key.as_str() {
            "words" => knobs.words as f64,
            "positive_sentiment" => knobs.positive as f64,
            "negative_sentiment" => knobs.negative as f64,
            "uppercase" => knobs.uppercase as u8 as f64,
            "numbers" => knobs.number as u8 as f64,
            "exclaim" => knobs.exclaim as u8 as f64,
            _ => 0.0,
        };
    }
    sum
}

struct WorldBuilder<'a> {
    cfg: &'a SynthConfig,
    rng: ChaCha8Rng,
    posts: Vec<PostRecord>,
    videos: Vec<VideoRecord>,
    n_copy_posts: usize,
    video_counter: usize,
    post_counter: usize,
}

impl<'a> WorldBuilder<'a> {
    fn new_video(&mut self, category: &str) -> VideoRecord {
        let views = sample_power_law(&mut self.rng, self.cfg.views_alpha, 100.0, 1e15);
        let knobs = TitleKnobs {
            words: self.rng.gen_range(4..=9),
            ..TitleKnobs::default()
        };
        let title = render_title(&mut self.rng, &knobs);
        let video = VideoRecord {
            video_id: format!("v{:010}", self.video_counter),
            title,
            views: views.round() as u64,
            category: category.to_string(),
            tags: Vec::new(),
        };
        self.video_counter += 1;
        self.videos.push(video.clone());
        video
    }

    /// Draw a partner video in the same category whose views land within a
    /// factor of two of the anchor video's views.
    fn partner_video(&mut self, anchor: &VideoRecord) -> VideoRecord {
        let v1 = anchor.views;
        let lo = (v1.div_ceil(2)).max(100);
        let hi = v1.saturating_mul(2).max(lo + 1);
        let views = self.rng.gen_range(lo..=hi);
        let knobs = TitleKnobs {
            words: self.rng.gen_range(4..=9),
            ..TitleKnobs::default()
        };
        let title = render_title(&mut self.rng, &knobs);
        let video = VideoRecord {
            video_id: format!("v{:010}", self.video_counter),
            title,
            views,
            category: anchor.category.clone(),
            tags: Vec::new(),
        };
        self.video_counter += 1;
        self.videos.push(video.clone());
        video
    }

    /// Generate one post: title (copy or grammar or forced), knobs, score.
    #[allow(clippy::too_many_arguments)]
    fn new_post(
        &mut self,
        subreddit: &str,
        offset: f64,
        video: &VideoRecord,
        created_utc: i64,
        exposure_age: f64,
        forced_title: Option<(String, TitleKnobs)>,
    ) -> PostRecord {
        let is_copy = forced_title.is_none() && self.rng.gen_bool(self.cfg.copy_title_fraction);
        let (title, knobs) = match forced_title {
            Some((t, k)) => (t, k),
            None if is_copy => (video.title.clone(), neutral_knobs(&video.title)),
            None => {
                let knobs = draw_knobs(&mut self.rng);
                (render_title(&mut self.rng, &knobs), knobs)
            }
        };
        if is_copy {
            self.n_copy_posts += 1;
        }
        let exposure =
            self.cfg.exposure_weight * (-exposure_age / self.cfg.exposure_halflife).exp();
        let effects = if is_copy {
            -self.cfg.copy_title_penalty
        } else {
            title_effect(&knobs, &self.cfg.title_effect_weights)
        };
        let log_score = self.cfg.base_log_score
            + self.cfg.views_weight * (video.views as f64).ln()
            + exposure
            + effects
            + offset
            + sample_normal(&mut self.rng, self.cfg.noise_sd);
        let score = log_score.exp().round().clamp(0.0, 1e12) as i64;
        let post = PostRecord {
            id: format!("t3_{:08x}", self.post_counter),
            subreddit: subreddit.to_string(),
            title,
            created_utc,
            score,
            video_id: Some(video.video_id.clone()),
            post_type: PostType::Video,
        };
        self.post_counter += 1;
        self.posts.push(post.clone());
        post
    }
}

/// Generate a complete world: posts, videos, and the planted ground truth.
/// The same config (seed included) always yields a byte-identical world.
pub fn generate_world(cfg: &SynthConfig) -> Result<SynthWorld> {
    cfg.validate()?;
    let mut builder = WorldBuilder {
        cfg,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        posts: Vec::new(),
        videos: Vec::new(),
        n_copy_posts: 0,
        video_counter: 0,
        post_counter: 0,
    };
    let mut subreddit_users = BTreeMap::new();
    let mut subreddit_offsets = BTreeMap::new();
    let mut n_clusters = 0usize;
    let mut n_exact = 0usize;
    let mut n_near_dup = 0usize;

    let cluster_posts_per_sub = {
        let raw = (cfg.posts_per_subreddit as f64 * cfg.cluster_fraction).round() as usize;
        raw - (raw % 2)
    };
    let clusters_per_sub = cluster_posts_per_sub / 2;
    let singles_per_sub = cfg.posts_per_subreddit - cluster_posts_per_sub;

    for s in 0..cfg.n_subreddits {
        let name = format!("sub{s:03}");
        let users = sample_power_law(&mut builder.rng, cfg.subreddit_size_alpha, 1000.0, 1e12)
            .round() as u64;
        let offset = cfg.subreddit_offset_weight * ((users as f64).ln() - 1000f64.ln());
        subreddit_users.insert(name.clone(), users);
        subreddit_offsets.insert(name.clone(), offset);

        for _ in 0..clusters_per_sub {
            n_clusters += 1;
            let t1 = builder.rng.gen_range(cfg.time_start..cfg.time_end - 3600);
            let dt = builder.rng.gen_range(30..=1620i64);
            let t2 = t1 + dt;
            let near_dup = builder.rng.gen_bool(cfg.near_dup_fraction);
            let exact = near_dup || builder.rng.gen_bool(cfg.exact_cluster_fraction);
            if near_dup {
                n_near_dup += 1;
            }
            if exact {
                n_exact += 1;
            }
            let category = CATEGORIES[builder.rng.gen_range(0..CATEGORIES.len())];
            let video1 = builder.new_video(category);
            let video2 = if exact {
                video1.clone()
            } else {
                builder.partner_video(&video1)
            };
            let anchor = builder.new_post(&name, offset, &video1, t1, 0.0, None);
            let forced = if near_dup {
                // the partner reuses the anchor's title with one word swapped,
                // so both sides carry identical knob counts: no planted signal
                let mutated = mutate_title(&mut builder.rng, &anchor.title);
                Some((mutated.clone(), draw_knobs_like(&mutated)))
            } else {
                None
            };
            builder.new_post(&name, offset, &video2, t2, dt as f64, forced);
        }
        for _ in 0..singles_per_sub {
            let t = builder.rng.gen_range(cfg.time_start..cfg.time_end);
            let category = CATEGORIES[builder.rng.gen_range(0..CATEGORIES.len())];
            let video = builder.new_video(category);
            builder.new_post(&name, offset, &video, t, 0.0, None);
        }
    }

    let ground_truth = GroundTruth {
        config: cfg.clone(),
        n_posts: builder.posts.len(),
        n_videos: builder.videos.len(),
        n_clusters,
        n_exact_clusters: n_exact,
        n_similar_clusters: n_clusters - n_exact,
        n_near_dup_clusters: n_near_dup,
        n_copy_posts: builder.n_copy_posts,
        subreddit_users,
        subreddit_offsets,
    };
    Ok(SynthWorld {
        posts: builder.posts,
        videos: builder.videos,
        ground_truth,
    })
}

/// Reconstruct the knob counts of a grammar title (used for near-duplicate
/// partners, whose counts must match their anchor).
fn draw_knobs_like(title: &str) -> TitleKnobs {
    let body = title.trim_end_matches('!');
    let tokens: Vec<&str> = body.split_whitespace().collect();
    TitleKnobs {
        words: tokens.len(),
        positive: tokens
            .iter()
            .filter(|w| POSITIVE_WORDS.contains(&w.to_lowercase().as_str()))
            .count(),
        negative: tokens
            .iter()
            .filter(|w| NEGATIVE_WORDS.contains(&w.to_lowercase().as_str()))
            .count(),
        uppercase: tokens
            .iter()
            .any(|w| w.len() >= 3 && w.chars().all(|c| c.is_ascii_uppercase())),
        number: tokens.iter().any(|w| NUMBER_TOKENS.contains(w)),
        exclaim: title.ends_with('!'),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{is_valid_video_id, join_posts_videos, VideoCatalog};
    use crate::stats::powerlaw_fit;

    #[test]
    fn same_seed_gives_identical_world() {
        let cfg = SynthConfig {
            n_subreddits: 4,
            posts_per_subreddit: 50,
            ..Default::default()
        };
        let w1 = generate_world(&cfg).unwrap();
        let w2 = generate_world(&cfg).unwrap();
        assert_eq!(w1, w2);
        let w3 = generate_world(&SynthConfig { seed: 1, ..cfg }).unwrap();
        assert_ne!(w1.posts, w3.posts);
    }

    #[test]
    fn config_validation_rejects_bad_values() {
        let ok = SynthConfig::default();
        ok.validate().unwrap();
        assert!(SynthConfig {
            views_alpha: 1.0,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(SynthConfig {
            subreddit_size_alpha: 0.9,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(SynthConfig {
            copy_title_fraction: 1.2,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(SynthConfig {
            cluster_fraction: -0.1,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(SynthConfig {
            n_subreddits: 0,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(SynthConfig {
            exposure_halflife: 0.0,
            ..ok.clone()
        }
        .validate()
        .is_err());
        let mut bad_key = ok.clone();
        bad_key
            .title_effect_weights
            .insert("fancy_metric".into(), 1.0);
        let err = bad_key.validate().unwrap_err();
        assert!(err.to_string().contains("fancy_metric"));
        let mut good_key = ok;
        good_key.title_effect_weights.insert("words".into(), 0.1);
        good_key.validate().unwrap();
    }

    #[test]
    fn world_satisfies_ingest_schemas() {
        let cfg = SynthConfig {
            n_subreddits: 5,
            posts_per_subreddit: 80,
            ..Default::default()
        };
        let world = generate_world(&cfg).unwrap();
        assert_eq!(world.posts.len(), 400);
        assert_eq!(world.ground_truth.n_posts, 400);
        // unique, valid ids; positive timestamps; all videos resolvable
        let mut ids = std::collections::BTreeSet::new();
        for p in &world.posts {
            assert!(ids.insert(p.id.clone()), "duplicate post id {}", p.id);
            assert!(p.created_utc > 0);
            assert!(is_valid_video_id(p.video_id.as_deref().unwrap()));
        }
        let mut vids = std::collections::BTreeSet::new();
        for v in &world.videos {
            assert!(vids.insert(v.video_id.clone()));
            assert!(v.views >= 100);
            assert!(is_valid_video_id(&v.video_id));
            assert!(CATEGORIES.contains(&v.category.as_str()));
        }
        let catalog: VideoCatalog = world
            .videos
            .iter()
            .map(|v| (v.video_id.clone(), v.clone()))
            .collect();
        let (joined, rate) = join_posts_videos(&world.posts, &catalog);
        assert_eq!(joined.len(), world.posts.len());
        assert_eq!(rate, 1.0);
    }

    #[test]
    fn copy_posts_match_video_titles() {
        let cfg = SynthConfig {
            n_subreddits: 10,
            posts_per_subreddit: 200,
            ..Default::default()
        };
        let world = generate_world(&cfg).unwrap();
        let catalog: BTreeMap<String, &VideoRecord> = world
            .videos
            .iter()
            .map(|v| (v.video_id.clone(), v))
            .collect();
        let copies = world
            .posts
            .iter()
            .filter(|p| catalog[p.video_id.as_ref().unwrap()].title == p.title)
            .count();
        assert_eq!(copies, world.ground_truth.n_copy_posts);
        // fraction near the configured 0.21 (binomial noise at n=2000)
        let fraction = copies as f64 / world.posts.len() as f64;
        assert!((fraction - 0.21).abs() < 0.03, "copy fraction {fraction}");
    }

    #[test]
    fn power_law_sampler_recovers_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (alpha, x_min) in [(1.11, 100.0), (1.84, 1000.0)] {
            let samples: Vec<f64> = (0..20_000)
                .map(|_| sample_power_law(&mut rng, alpha, x_min, 1e15))
                .collect();
            let fit = powerlaw_fit(&samples, x_min).unwrap();
            assert!(
                (fit.alpha - alpha).abs() < 4.0 * fit.sigma + 0.005,
                "alpha {alpha}: fit {} +/- {}",
                fit.alpha,
                fit.sigma
            );
        }
    }

    #[test]
    fn titles_respect_knobs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let knobs = draw_knobs(&mut rng);
            let title = render_title(&mut rng, &knobs);
            let tokens: Vec<&str> = title.trim_end_matches('!').split(' ').collect();
            assert_eq!(tokens.len(), knobs.words, "title {title:?}");
            assert_eq!(title.ends_with('!'), knobs.exclaim);
            let pos = tokens
                .iter()
                .filter(|w| POSITIVE_WORDS.contains(&w.to_lowercase().as_str()))
                .count();
            assert!(pos >= knobs.positive, "positive words dropped in {title:?}");
            if knobs.number {
                assert!(tokens.iter().any(|w| NUMBER_TOKENS.contains(w)));
            }
        }
    }

    #[test]
    fn mutate_changes_exactly_one_word() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let knobs = draw_knobs(&mut rng);
            let title = render_title(&mut rng, &knobs);
            let mutated = mutate_title(&mut rng, &title);
            let a: Vec<&str> = title.split(' ').collect();
            let b: Vec<&str> = mutated.split(' ').collect();
            assert_eq!(a.len(), b.len());
            let diffs = a.iter().zip(&b).filter(|(x, y)| x != y).count();
            assert!(diffs <= 1, "{title:?} -> {mutated:?}");
            assert_eq!(title.ends_with('!'), mutated.ends_with('!'));
        }
    }

    #[test]
    fn near_dup_partners_share_knob_counts() {
        let mut cfg = SynthConfig {
            n_subreddits: 6,
            posts_per_subreddit: 100,
            near_dup_fraction: 1.0,
            copy_title_fraction: 0.0,
            cluster_fraction: 1.0,
            ..Default::default()
        };
        cfg.title_effect_weights.insert("words".into(), 0.1);
        let world = generate_world(&cfg).unwrap();
        // consecutive cluster posts: anchors at even indices
        for pair in world.posts.chunks(2) {
            let [a, b] = pair else { panic!("odd cluster") };
            let ka = draw_knobs_like(&a.title);
            let kb = draw_knobs_like(&b.title);
            assert_eq!(ka.words, kb.words, "{} vs {}", a.title, b.title);
            assert_eq!(ka.positive, kb.positive);
            assert_eq!(ka.negative, kb.negative);
            assert_eq!(ka.exclaim, kb.exclaim);
            // high title-to-title similarity
            let ld = crate::textmetrics::normalized_ld(&a.title, &b.title);
            assert!(
                ld > 70,
                "near-dup pair only {ld} similar: {} / {}",
                a.title,
                b.title
            );
        }
    }

    #[test]
    fn exposure_gives_earlier_posts_an_edge() {
        let cfg = SynthConfig {
            n_subreddits: 20,
            posts_per_subreddit: 200,
            cluster_fraction: 1.0,
            near_dup_fraction: 0.0,
            copy_title_fraction: 0.0,
            exposure_weight: 1.5,
            exposure_halflife: 600.0,
            noise_sd: 0.5,
            ..Default::default()
        };
        let world = generate_world(&cfg).unwrap();
        let mut earlier_wins = 0usize;
        let mut later_wins = 0usize;
        for pair in world.posts.chunks(2) {
            let [a, b] = pair else { panic!("odd cluster") };
            // generator emits the earlier post first in each cluster
            assert!(a.created_utc < b.created_utc);
            if a.score > b.score {
                earlier_wins += 1;
            } else if b.score > a.score {
                later_wins += 1;
            }
        }
        let total = earlier_wins + later_wins;
        let ratio = earlier_wins as f64 / total as f64;
        assert!(ratio > 0.6, "earlier-post win ratio {ratio}");
    }

    #[test]
    fn planted_word_effect_moves_scores() {
        let mut cfg = SynthConfig {
            n_subreddits: 10,
            posts_per_subreddit: 400,
            copy_title_fraction: 0.0,
            near_dup_fraction: 0.0,
            noise_sd: 0.3,
            ..Default::default()
        };
        cfg.title_effect_weights.insert("words".into(), 0.2);
        let world = generate_world(&cfg).unwrap();
        // within each subreddit, long titles should outscore short ones
        let mut long_scores = Vec::new();
        let mut short_scores = Vec::new();
        for p in &world.posts {
            let words = p.title.split_whitespace().count();
            let log_score = (p.score.max(1) as f64).ln();
            if words >= 11 {
                long_scores.push(log_score);
            } else if words <= 7 {
                short_scores.push(log_score);
            }
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        assert!(
            mean(&long_scores) > mean(&short_scores) + 0.4,
            "long {} vs short {}",
            mean(&long_scores),
            mean(&short_scores)
        );
    }

    #[test]
    fn ground_truth_serializes_completely() {
        let cfg = SynthConfig {
            n_subreddits: 3,
            posts_per_subreddit: 40,
            ..Default::default()
        };
        let world = generate_world(&cfg).unwrap();
        let json = serde_json::to_string_pretty(&world.ground_truth).unwrap();
        for key in [
            "config",
            "n_posts",
            "n_videos",
            "n_clusters",
            "n_copy_posts",
            "subreddit_offsets",
            "title_effect_weights",
            "views_alpha",
        ] {
            assert!(json.contains(key), "ground truth missing {key}");
        }
        let back: GroundTruth = serde_json::from_str(&json).unwrap();
        assert_eq!(back, world.ground_truth);
    }
}
