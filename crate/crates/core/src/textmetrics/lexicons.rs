//! Lexicon loading. Every list-based metric reads from editable TSV files
//! (`token<TAB>value`, one entry per line, `#` comments allowed) in a single
//! lexicon directory, so results are config-dependent by design.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

/// All word lists used by the stylistic, sentiment, and VADER metrics.
/// Keys are lowercased at load time; lookups must lowercase first.
#[derive(Debug, Clone, Default)]
pub struct WordLists {
    /// token -> valence (reals, signed).
    pub vader_valence: BTreeMap<String, f64>,
    /// token -> booster scalar (+ for intensifiers, - for dampeners).
    pub boosters: BTreeMap<String, f64>,
    /// negation tokens (value ignored).
    pub negations: BTreeMap<String, f64>,
    pub pronouns: BTreeMap<String, f64>,
    pub interrogatives: BTreeMap<String, f64>,
    pub tentative: BTreeMap<String, f64>,
    pub certainty: BTreeMap<String, f64>,
    pub affiliation: BTreeMap<String, f64>,
    /// token -> subjectivity in [0,1].
    pub tb_subjectivity: BTreeMap<String, f64>,
    /// token -> polarity in [-1,1].
    pub tb_polarity: BTreeMap<String, f64>,
    /// token -> positive-minus-negative score.
    pub swn_polarity: BTreeMap<String, f64>,
    /// token -> 1 if the token carries any tagged emotion.
    pub nrc_emotion: BTreeMap<String, f64>,
}

/// File names expected inside the lexicon directory.
pub const LEXICON_FILES: [&str; 12] = [
    "vader_valence.tsv",
    "boosters.tsv",
    "negations.tsv",
    "pronouns.tsv",
    "interrogatives.tsv",
    "tentative.tsv",
    "certainty.tsv",
    "affiliation.tsv",
    "tb_subjectivity.tsv",
    "tb_polarity.tsv",
    "swn_polarity.tsv",
    "nrc_emotion.tsv",
];

fn load_tsv(path: &Path) -> Result<BTreeMap<String, f64>> {
    let content = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("missing lexicon file {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (token, value) = line.split_once('\t').ok_or_else(|| {
            Error::Config(format!(
                "{}:{}: expected token<TAB>value",
                path.display(),
                lineno + 1
            ))
        })?;
        let value: f64 = value.trim().parse().map_err(|_| {
            Error::Config(format!(
                "{}:{}: bad value {value:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        map.insert(token.trim().to_lowercase(), value);
    }
    Ok(map)
}

impl WordLists {
    /// Load every lexicon file from `dir`. Missing or malformed files are
    /// configuration errors.
    pub fn load(dir: &Path) -> Result<WordLists> {
        Ok(WordLists {
            vader_valence: load_tsv(&dir.join("vader_valence.tsv"))?,
            boosters: load_tsv(&dir.join("boosters.tsv"))?,
            negations: load_tsv(&dir.join("negations.tsv"))?,
            pronouns: load_tsv(&dir.join("pronouns.tsv"))?,
            interrogatives: load_tsv(&dir.join("interrogatives.tsv"))?,
            tentative: load_tsv(&dir.join("tentative.tsv"))?,
            certainty: load_tsv(&dir.join("certainty.tsv"))?,
            affiliation: load_tsv(&dir.join("affiliation.tsv"))?,
            tb_subjectivity: load_tsv(&dir.join("tb_subjectivity.tsv"))?,
            tb_polarity: load_tsv(&dir.join("tb_polarity.tsv"))?,
            swn_polarity: load_tsv(&dir.join("swn_polarity.tsv"))?,
            nrc_emotion: load_tsv(&dir.join("nrc_emotion.tsv"))?,
        })
    }
}
