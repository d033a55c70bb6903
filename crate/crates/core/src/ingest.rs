//! JSONL ingestion: posts, video catalogs, the post-video join, and
//! subreddit-level filtering with summary statistics.

use std::collections::{BTreeMap, HashSet};
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PostType {
    #[default]
    Video,
    Text,
}

impl std::fmt::Display for PostType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PostType::Video => "video",
            PostType::Text => "text",
        })
    }
}

/// One submission. `video_id` is absent when neither a usable `video_id`
/// field nor a direct watch URL was present; such posts cannot join.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostRecord {
    pub id: String,
    pub subreddit: String,
    pub title: String,
    /// Epoch seconds, UTC.
    pub created_utc: i64,
    pub score: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub video_id: Option<String>,
    #[serde(default)]
    pub post_type: PostType,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoRecord {
    pub video_id: String,
    pub title: String,
    pub views: u64,
    pub category: String,
    #[serde(default)]
    pub tags: Vec<String>,
}

/// A post joined with its video's metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JoinedPost {
    pub id: String,
    pub subreddit: String,
    pub title: String,
    pub created_utc: i64,
    pub score: i64,
    pub video_id: String,
    #[serde(default)]
    pub post_type: PostType,
    pub video_views: u64,
    pub video_category: String,
    pub video_title: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubredditSummary {
    pub subreddit: String,
    /// Accepted as optional input only; never computed here.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_users: Option<u64>,
    pub n_posts: usize,
    pub mean_score: f64,
    pub median_score: f64,
}

/// Exactly 11 characters from [A-Za-z0-9_-].
pub fn is_valid_video_id(s: &str) -> bool {
    s.len() == 11
        && s.bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

/// Pull an 11-character video ID out of a direct watch URL. Channel,
/// playlist, and profile links (and anything malformed) return `None`.
pub fn extract_video_id(url: &str) -> Option<String> {
    let rest = url
        .strip_prefix("https://")
        .or_else(|| url.strip_prefix("http://"))
        .unwrap_or(url);
    let (host, path_query) = rest.split_once('/')?;
    let host = host.to_lowercase();
    let candidate = match host.as_str() {
        "www.youtube.com" | "youtube.com" | "m.youtube.com" => {
            let (path, query) = match path_query.split_once('?') {
                Some((p, q)) => (p, q),
                None => (path_query, ""),
            };
            if path != "watch" {
                return None;
            }
            query
                .split('&')
                .find_map(|kv| kv.strip_prefix("v="))?
                .to_string()
        }
        "youtu.be" => path_query.split(['?', '&', '/']).next()?.to_string(),
        _ => return None,
    };
    is_valid_video_id(&candidate).then_some(candidate)
}

/// Raw wire format for a post line: accepts `video_id` directly or derives
/// it from `url`.
#[derive(Deserialize)]
struct RawPost {
    id: String,
    subreddit: String,
    title: String,
    created_utc: i64,
    score: i64,
    #[serde(default)]
    url: Option<String>,
    #[serde(default)]
    video_id: Option<String>,
    #[serde(default)]
    post_type: PostType,
}

#[derive(Debug, Default)]
pub struct ParseStats {
    pub parsed: usize,
    pub skipped: usize,
    pub duplicates: usize,
}

/// Parse a posts.jsonl stream. Malformed lines are skipped and counted;
/// duplicate post ids keep the first occurrence.
pub fn parse_posts<R: BufRead>(reader: R) -> Result<(Vec<PostRecord>, ParseStats)> {
    let mut posts = Vec::new();
    let mut stats = ParseStats::default();
    let mut seen: HashSet<String> = HashSet::new();
    for line in reader.lines() {
        let line = line?; // stream I/O failure aborts
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawPost = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(_) => {
                stats.skipped += 1;
                continue;
            }
        };
        if raw.id.is_empty() || raw.created_utc <= 0 {
            stats.skipped += 1;
            continue;
        }
        if !seen.insert(raw.id.clone()) {
            stats.duplicates += 1;
            continue;
        }
        let video_id = raw
            .video_id
            .filter(|v| is_valid_video_id(v))
            .or_else(|| raw.url.as_deref().and_then(extract_video_id));
        posts.push(PostRecord {
            id: raw.id,
            subreddit: raw.subreddit,
            title: raw.title,
            created_utc: raw.created_utc,
            score: raw.score,
            video_id,
            post_type: raw.post_type,
        });
        stats.parsed += 1;
    }
    Ok((posts, stats))
}

pub type VideoCatalog = BTreeMap<String, VideoRecord>;

/// Parse a videos.jsonl stream into a catalog. Duplicate video ids keep the
/// record with the larger view count.
pub fn parse_videos<R: BufRead>(reader: R) -> Result<(VideoCatalog, ParseStats)> {
    let mut catalog = VideoCatalog::new();
    let mut stats = ParseStats::default();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: VideoRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(_) => {
                stats.skipped += 1;
                continue;
            }
        };
        if rec.video_id.is_empty() {
            stats.skipped += 1;
            continue;
        }
        stats.parsed += 1;
        match catalog.get(&rec.video_id) {
            Some(existing) => {
                stats.duplicates += 1;
                if rec.views > existing.views {
                    catalog.insert(rec.video_id.clone(), rec);
                }
            }
            None => {
                catalog.insert(rec.video_id.clone(), rec);
            }
        }
    }
    Ok((catalog, stats))
}

/// Join posts against the catalog, dropping posts whose video is unknown.
/// Returns the joined posts and the join rate (joined / input).
pub fn join_posts_videos(posts: &[PostRecord], catalog: &VideoCatalog) -> (Vec<JoinedPost>, f64) {
    let mut joined = Vec::new();
    for p in posts {
        let Some(vid) = &p.video_id else { continue };
        let Some(video) = catalog.get(vid) else {
            continue;
        };
        joined.push(JoinedPost {
            id: p.id.clone(),
            subreddit: p.subreddit.clone(),
            title: p.title.clone(),
            created_utc: p.created_utc,
            score: p.score,
            video_id: vid.clone(),
            post_type: p.post_type,
            video_views: video.views,
            video_category: video.category.clone(),
            video_title: video.title.clone(),
        });
    }
    let rate = if posts.is_empty() {
        0.0
    } else {
        joined.len() as f64 / posts.len() as f64
    };
    (joined, rate)
}

fn median(sorted: &[i64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
    }
}

/// Keep only posts from subreddits with at least `min_posts` valid posts
/// (non-empty title), optionally restricted to the `top_k` largest such
/// subreddits. Returns the retained posts and per-subreddit summaries
/// (sorted by post count, then name).
pub fn filter_subreddits(
    posts: &[JoinedPost],
    min_posts: usize,
    top_k: Option<usize>,
) -> Result<(Vec<JoinedPost>, Vec<SubredditSummary>)> {
    if min_posts < 1 {
        return Err(Error::Config("min_posts must be >= 1".into()));
    }
    let valid: Vec<&JoinedPost> = posts
        .iter()
        .filter(|p| !p.title.trim().is_empty())
        .collect();
    let mut by_sub: BTreeMap<&str, Vec<&JoinedPost>> = BTreeMap::new();
    for p in &valid {
        by_sub.entry(p.subreddit.as_str()).or_default().push(p);
    }
    let mut eligible: Vec<(&str, usize)> = by_sub
        .iter()
        .filter(|(_, v)| v.len() >= min_posts)
        .map(|(s, v)| (*s, v.len()))
        .collect();
    eligible.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    if let Some(k) = top_k {
        eligible.truncate(k);
    }

    let mut summaries = Vec::with_capacity(eligible.len());
    for (sub, n) in &eligible {
        let members = &by_sub[sub];
        let mut scores: Vec<i64> = members.iter().map(|p| p.score).collect();
        scores.sort_unstable();
        summaries.push(SubredditSummary {
            subreddit: sub.to_string(),
            n_users: None,
            n_posts: *n,
            mean_score: scores.iter().sum::<i64>() as f64 / *n as f64,
            median_score: median(&scores),
        });
    }
    let keep: HashSet<&str> = eligible.iter().map(|(s, _)| *s).collect();
    let retained: Vec<JoinedPost> = valid
        .into_iter()
        .filter(|p| keep.contains(p.subreddit.as_str()))
        .cloned()
        .collect();
    Ok((retained, summaries))
}

/// Write the subreddits.csv summary table.
pub fn write_subreddit_summaries<W: std::io::Write>(
    out: W,
    summaries: &[SubredditSummary],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["subreddit", "n_posts", "mean_score", "median_score"])?;
    for s in summaries {
        w.write_record([
            s.subreddit.as_str(),
            &s.n_posts.to_string(),
            &format!("{}", s.mean_score),
            &format!("{}", s.median_score),
        ])?;
    }
    w.flush()?;
    Ok(())
}
