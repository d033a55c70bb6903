//! Run configuration: defaults, overridden by a JSON config file,
//! overridden by command-line flags (flags > file > defaults).

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use pairlens_core::pairing::PairingConfig;
use pairlens_core::ranker::{RankerHyper, SplitSpec, SplitStrategy};
use pairlens_core::synthgen::SynthConfig;
use pairlens_core::textmetrics::LEXICON_FILES;

use crate::CliError;

/// Flags shared by every subcommand. Paths given here override the config
/// file, which overrides built-in defaults.
#[derive(Debug, Clone, Args, Default)]
pub struct CommonArgs {
    /// JSON config file; see README for the schema.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Root seed; forces the pairing, split, ranker, and synth seeds.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory for all artifacts.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Pairing: maximum seconds between the two posts of a pair.
    #[arg(long, global = true)]
    pub time_window: Option<i64>,
    /// Pairing: maximum video-views ratio for Similar pairs.
    #[arg(long, global = true)]
    pub vvr_max: Option<f64>,
    /// Filter: maximum title-to-title similarity within a pair.
    #[arg(long, global = true)]
    pub ld_pair_max: Option<u8>,
    /// Filter: maximum post-title-to-video-title similarity.
    #[arg(long, global = true)]
    pub ld_video_max: Option<u8>,
    /// Split strategy: date, post_id, or video_id.
    #[arg(long, global = true)]
    pub split: Option<String>,
    /// Ranker: hinge margin.
    #[arg(long, global = true)]
    pub margin: Option<f64>,
}

/// Shape of the JSON config file. Every field is optional; module blocks
/// use the same field names as the library types.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub posts: Option<PathBuf>,
    pub videos: Option<PathBuf>,
    pub joined: Option<PathBuf>,
    pub pairs: Option<PathBuf>,
    pub externals: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub lexicon_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub pairing: Option<PairingConfig>,
    pub split: Option<SplitSpec>,
    pub ranker: Option<RankerHyper>,
    pub synth: Option<SynthConfig>,
    pub battery: Option<BatterySection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatterySection {
    pub alpha: Option<f64>,
    pub m_continuous: Option<usize>,
    pub m_binary: Option<usize>,
}

/// Fully resolved configuration a command runs with.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub posts: Option<PathBuf>,
    pub videos: Option<PathBuf>,
    pub joined: Option<PathBuf>,
    pub pairs: Option<PathBuf>,
    pub externals: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub lexicon_dir: PathBuf,
    pub pairing: PairingConfig,
    pub split: SplitSpec,
    pub ranker: RankerHyper,
    pub synth: SynthConfig,
    pub battery: BatterySection,
}

fn parse_split(s: &str) -> Result<SplitStrategy, CliError> {
    match s {
        "date" => Ok(SplitStrategy::Date),
        "post_id" => Ok(SplitStrategy::PostId),
        "video_id" => Ok(SplitStrategy::VideoId),
        other => Err(CliError::config(format!(
            "unknown split strategy {other:?}; expected date, post_id, or video_id"
        ))),
    }
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<RunConfig, CliError> {
        let file: FileConfig = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::config(format!("cannot read config {}: {e}", path.display()))
                })?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::config(format!("bad config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };

        let mut pairing = file.pairing.unwrap_or_default();
        let mut split = file.split.unwrap_or_default();
        let mut ranker = file.ranker.unwrap_or_default();
        let mut synth = file.synth.unwrap_or_default();

        // a root seed (file-level, then flag) forces every module seed
        if let Some(seed) = file.seed {
            pairing.rng_seed = seed;
            split.seed = seed;
            ranker.seed = seed;
            synth.seed = seed;
        }
        if let Some(seed) = args.seed {
            pairing.rng_seed = seed;
            split.seed = seed;
            ranker.seed = seed;
            synth.seed = seed;
        }
        if let Some(w) = args.time_window {
            pairing.time_window = w;
        }
        if let Some(v) = args.vvr_max {
            pairing.vvr_max = v;
        }
        if let Some(v) = args.ld_pair_max {
            pairing.ld_pair_max = v;
        }
        if let Some(v) = args.ld_video_max {
            pairing.ld_video_max = v;
        }
        if let Some(s) = &args.split {
            split.strategy = parse_split(s)?;
        }
        if let Some(m) = args.margin {
            ranker.margin = m;
        }

        // lexicons: env var > config file > ./lexicons
        let lexicon_dir = std::env::var_os("PAIRLENS_LEXICON_DIR")
            .map(PathBuf::from)
            .or(file.lexicon_dir)
            .unwrap_or_else(|| PathBuf::from("lexicons"));

        let out_dir = args
            .out_dir
            .clone()
            .or(file.out_dir)
            .unwrap_or_else(|| PathBuf::from("out"));

        pairing.validate().map_err(CliError::from_core_config)?;
        split.validate().map_err(CliError::from_core_config)?;
        synth.validate().map_err(CliError::from_core_config)?;

        Ok(RunConfig {
            posts: file.posts,
            videos: file.videos,
            joined: file.joined,
            pairs: file.pairs,
            externals: file.externals,
            out_dir,
            lexicon_dir,
            pairing,
            split,
            ranker,
            synth,
            battery: file.battery.unwrap_or_default(),
        })
    }

    /// Verify the lexicon directory holds all twelve lists.
    pub fn check_lexicons(&self) -> Result<&Path, CliError> {
        let dir = self.lexicon_dir.as_path();
        let missing: Vec<&str> = LEXICON_FILES
            .iter()
            .filter(|f| !dir.join(f).is_file())
            .copied()
            .collect();
        if missing.is_empty() {
            Ok(dir)
        } else {
            Err(CliError {
                code: "LEXICON_MISSING",
                message: format!(
                    "lexicon directory {} is missing: {} (set PAIRLENS_LEXICON_DIR or lexicon_dir)",
                    dir.display(),
                    missing.join(", ")
                ),
                exit: 2,
            })
        }
    }
}
