//! pairlens: title-rewrite engagement analysis pipeline.
//!
//! Eight subcommands cover the full workflow: generate or ingest data, build
//! confound-controlled pairs, extract title features, run the paired
//! statistical battery with diagnostics, and train/evaluate the pairwise
//! ranker. Every command is deterministic for a fixed (inputs, config, seed)
//! triple. Errors are emitted as one JSON object on stderr; exit code 2 means
//! the configuration was rejected, 1 means a runtime failure.

mod commands;
mod config;
mod report;

use clap::{Parser, Subcommand};
use std::path::PathBuf;

use config::{CommonArgs, RunConfig};

/// CLI-level error: a stable machine-readable code, a human message, and the
/// process exit status.
#[derive(Debug)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
    pub exit: i32,
}

impl CliError {
    pub fn config(message: String) -> CliError {
        CliError {
            code: "CONFIG_INVALID",
            message,
            exit: 2,
        }
    }

    pub fn io(message: String) -> CliError {
        CliError {
            code: "IO_ERROR",
            message,
            exit: 1,
        }
    }

    pub fn data(message: String) -> CliError {
        CliError {
            code: "DATA_INVALID",
            message,
            exit: 1,
        }
    }

    /// Library errors raised while validating configuration reject the run.
    pub fn from_core_config(err: pairlens_core::Error) -> CliError {
        CliError::config(err.to_string())
    }

    /// Library errors raised mid-pipeline: bad config stays exit 2, I/O maps
    /// to IO_ERROR, everything else means the data could not be processed.
    pub fn from_core(err: pairlens_core::Error) -> CliError {
        match err {
            pairlens_core::Error::Config(_) => CliError::config(err.to_string()),
            pairlens_core::Error::Io(_) => CliError::io(err.to_string()),
            _ => CliError::data(err.to_string()),
        }
    }

    fn to_json(&self) -> String {
        serde_json::json!({ "code": self.code, "message": self.message }).to_string()
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "pairlens",
    version,
    about = "Paired analysis of post-title rewrites and engagement",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic post/video world with known ground truth.
    Synth,
    /// Parse raw posts and videos, join them, and summarize subreddits.
    Ingest {
        /// Posts JSONL (default: <out_dir>/posts.jsonl).
        #[arg(long)]
        posts: Option<PathBuf>,
        /// Videos JSONL (default: <out_dir>/videos.jsonl).
        #[arg(long)]
        videos: Option<PathBuf>,
    },
    /// Build exact/similar/inverse pairs and the filtered mixed set.
    Pair {
        /// Joined posts JSONL (default: <out_dir>/joined.jsonl).
        #[arg(long)]
        joined: Option<PathBuf>,
    },
    /// Extract per-title feature vectors (plus optional external scores).
    Features {
        /// Joined posts JSONL (default: <out_dir>/joined.jsonl).
        #[arg(long)]
        joined: Option<PathBuf>,
        /// CSV of external per-post scores to merge (post_id,name,...).
        #[arg(long)]
        externals: Option<PathBuf>,
    },
    /// Run the paired statistical battery and confound diagnostics.
    Analyze {
        /// Joined posts JSONL (default: <out_dir>/joined.jsonl).
        #[arg(long)]
        joined: Option<PathBuf>,
        /// Pairs JSONL (default: <out_dir>/mixed.jsonl).
        #[arg(long)]
        pairs: Option<PathBuf>,
        /// CSV of external per-post scores to include in the battery.
        #[arg(long)]
        externals: Option<PathBuf>,
    },
    /// Bin posts by title-to-video similarity and compare mean scores.
    Bins {
        /// Joined posts JSONL (default: <out_dir>/joined.jsonl).
        #[arg(long)]
        joined: Option<PathBuf>,
    },
    /// Train the pairwise margin ranker and score it against baselines.
    Rank {
        /// Joined posts JSONL (default: <out_dir>/joined.jsonl).
        #[arg(long)]
        joined: Option<PathBuf>,
        /// Pairs JSONL (default: <out_dir>/mixed.jsonl).
        #[arg(long)]
        pairs: Option<PathBuf>,
        /// Comma-separated ld_pair_max grid for the threshold ablation,
        /// e.g. "60,70,80,90,95".
        #[arg(long)]
        ablate: Option<String>,
    },
    /// Aggregate analysis and ranking artifacts into a markdown report.
    Report,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&cli.common)?;
    match &cli.command {
        Command::Synth => commands::cmd_synth(&cfg),
        Command::Ingest { posts, videos } => commands::cmd_ingest(&cfg, posts, videos),
        Command::Pair { joined } => commands::cmd_pair(&cfg, joined),
        Command::Features { joined, externals } => commands::cmd_features(&cfg, joined, externals),
        Command::Analyze {
            joined,
            pairs,
            externals,
        } => commands::cmd_analyze(&cfg, joined, pairs, externals),
        Command::Bins { joined } => commands::cmd_bins(&cfg, joined),
        Command::Rank {
            joined,
            pairs,
            ablate,
        } => commands::cmd_rank(&cfg, joined, pairs, ablate),
        Command::Report => commands::cmd_report(&cfg),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("{}", err.to_json());
        std::process::exit(err.exit);
    }
}
