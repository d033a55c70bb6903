//! Core library for studying how post-title rewrites of video titles
//! relate to engagement: ingestion and joining of post/video dumps, title
//! feature extraction, confound-controlled pair construction, the paired
//! statistical protocol, a pairwise ranking experiment, and a synthetic
//! world generator with planted effects for end-to-end validation.

pub mod error;
pub mod ingest;
pub mod pairing;
pub mod ranker;
pub mod seed;
pub mod stats;
pub mod synthgen;
pub mod textmetrics;

pub use error::{Error, Result};
