//! Title feature extraction: structural, lexical-diversity, readability,
//! sentiment, and stylistic metrics, plus normalized Levenshtein similarity
//! and an adapter for externally computed scores.

pub mod external;
pub mod ld;
pub mod lexical;
pub mod lexicons;
pub mod readability;
pub mod structural;
pub mod stylistic;
pub mod tokenize;
pub mod vader;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub use external::{load_external_scores, ExternalScoreTable};
pub use ld::normalized_ld;
pub use lexical::{lexical_diversity, LexicalDiversity};
pub use lexicons::{WordLists, LEXICON_FILES};
pub use readability::{readability, Readability};
pub use structural::{structural, Structural};
pub use stylistic::{lexicon_sentiment_binary, stylistic_flags, SentimentFlags, StylisticFlags};
pub use vader::{vader_scores, VaderScores};

/// Every metric computed for one title: 16 continuous columns, 16 binary
/// flags, and any externally supplied continuous scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TitleFeatureVector {
    pub chars: usize,
    pub words: usize,
    pub avg_word_len: f64,
    pub avg_sent_len: f64,
    pub ttr: f64,
    pub cttr: f64,
    pub mtld: f64,
    pub ari: f64,
    pub cli: f64,
    pub fk_grade: f64,
    pub fr_ease_reversed: f64,
    pub gunning_fog: f64,
    pub vader_pos: f64,
    pub vader_neu: f64,
    pub vader_neg: f64,
    pub vader_compound: f64,
    pub excl_mark: bool,
    pub question_mark: bool,
    pub quotation_mark: bool,
    pub numbers: bool,
    pub emoji: bool,
    pub uppercase: bool,
    pub repeated_chars: bool,
    pub pronouns: bool,
    pub interrogatives: bool,
    pub tentative: bool,
    pub certainty: bool,
    pub affiliation: bool,
    pub tb_subjectivity: bool,
    pub tb_polarity: bool,
    pub swn_polarity: bool,
    pub nrc_emotion: bool,
    /// Externally supplied continuous scores, keyed by score name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub external: BTreeMap<String, f64>,
}

impl TitleFeatureVector {
    /// Continuous metric names, in the documented fixed column order.
    pub const CONTINUOUS_NAMES: [&'static str; 16] = [
        "chars",
        "words",
        "avg_word_len",
        "avg_sent_len",
        "ttr",
        "cttr",
        "mtld",
        "ari",
        "cli",
        "fk_grade",
        "fr_ease_reversed",
        "gunning_fog",
        "vader_pos",
        "vader_neu",
        "vader_neg",
        "vader_compound",
    ];

    /// Binary flag names, in the documented fixed column order.
    pub const BINARY_NAMES: [&'static str; 16] = [
        "excl_mark",
        "question_mark",
        "quotation_mark",
        "numbers",
        "emoji",
        "uppercase",
        "repeated_chars",
        "pronouns",
        "interrogatives",
        "tentative",
        "certainty",
        "affiliation",
        "tb_subjectivity",
        "tb_polarity",
        "swn_polarity",
        "nrc_emotion",
    ];

    /// Continuous values aligned with [`Self::CONTINUOUS_NAMES`].
    pub fn continuous_values(&self) -> [f64; 16] {
        [
            self.chars as f64,
            self.words as f64,
            self.avg_word_len,
            self.avg_sent_len,
            self.ttr,
            self.cttr,
            self.mtld,
            self.ari,
            self.cli,
            self.fk_grade,
            self.fr_ease_reversed,
            self.gunning_fog,
            self.vader_pos,
            self.vader_neu,
            self.vader_neg,
            self.vader_compound,
        ]
    }

    /// Binary values aligned with [`Self::BINARY_NAMES`].
    pub fn binary_values(&self) -> [bool; 16] {
        [
            self.excl_mark,
            self.question_mark,
            self.quotation_mark,
            self.numbers,
            self.emoji,
            self.uppercase,
            self.repeated_chars,
            self.pronouns,
            self.interrogatives,
            self.tentative,
            self.certainty,
            self.affiliation,
            self.tb_subjectivity,
            self.tb_polarity,
            self.swn_polarity,
            self.nrc_emotion,
        ]
    }
}

/// Compute the full in-process feature vector for one title.
pub fn compute_features(title: &str, lists: &WordLists) -> Result<TitleFeatureVector> {
    let s = structural(title)?;
    let ld = lexical_diversity(title)?;
    let r = readability(title)?;
    let v = vader_scores(title, lists);
    let flags = stylistic_flags(title, lists);
    let sent = lexicon_sentiment_binary(title, lists);
    Ok(TitleFeatureVector {
        chars: s.chars,
        words: s.words,
        avg_word_len: s.avg_word_len,
        avg_sent_len: s.avg_sent_len,
        ttr: ld.ttr,
        cttr: ld.cttr,
        mtld: ld.mtld,
        ari: r.ari,
        cli: r.cli,
        fk_grade: r.fk_grade,
        fr_ease_reversed: r.fr_ease_reversed,
        gunning_fog: r.gunning_fog,
        vader_pos: v.pos,
        vader_neu: v.neu,
        vader_neg: v.neg,
        vader_compound: v.compound,
        excl_mark: flags.excl_mark,
        question_mark: flags.question_mark,
        quotation_mark: flags.quotation_mark,
        numbers: flags.numbers,
        emoji: flags.emoji,
        uppercase: flags.uppercase,
        repeated_chars: flags.repeated_chars,
        pronouns: flags.pronouns,
        interrogatives: flags.interrogatives,
        tentative: flags.tentative,
        certainty: flags.certainty,
        affiliation: flags.affiliation,
        tb_subjectivity: sent.tb_subjectivity,
        tb_polarity: sent.tb_polarity,
        swn_polarity: sent.swn_polarity,
        nrc_emotion: sent.nrc_emotion,
        external: BTreeMap::new(),
    })
}

/// Write `post_id` plus every metric column, in the documented fixed order,
/// one row per post. External score columns (sorted by name, union over all
/// rows) follow the binary flags; posts missing a score leave the cell empty.
pub fn write_features_csv<W: std::io::Write>(
    out: W,
    features: &BTreeMap<String, TitleFeatureVector>,
) -> Result<()> {
    let mut external_names: Vec<&str> = Vec::new();
    for f in features.values() {
        for name in f.external.keys() {
            if !external_names.contains(&name.as_str()) {
                external_names.push(name);
            }
        }
    }
    external_names.sort_unstable();

    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = vec!["post_id"];
    header.extend(TitleFeatureVector::CONTINUOUS_NAMES);
    header.extend(TitleFeatureVector::BINARY_NAMES);
    header.extend(external_names.iter());
    w.write_record(&header)?;
    for (post_id, f) in features {
        let mut row: Vec<String> = Vec::with_capacity(header.len());
        row.push(post_id.clone());
        row.push(f.chars.to_string());
        row.push(f.words.to_string());
        for v in &f.continuous_values()[2..] {
            row.push(format!("{v}"));
        }
        for b in f.binary_values() {
            row.push(if b { "1" } else { "0" }.to_string());
        }
        for name in &external_names {
            row.push(
                f.external
                    .get(*name)
                    .map(|v| format!("{v}"))
                    .unwrap_or_default(),
            );
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Read back a CSV produced by [`write_features_csv`].
pub fn read_features_csv<R: std::io::Read>(
    input: R,
) -> Result<BTreeMap<String, TitleFeatureVector>> {
    use crate::error::Error;
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let expected: Vec<&str> = std::iter::once("post_id")
        .chain(TitleFeatureVector::CONTINUOUS_NAMES)
        .chain(TitleFeatureVector::BINARY_NAMES)
        .collect();
    if headers.len() < expected.len()
        || headers
            .iter()
            .take(expected.len())
            .ne(expected.iter().copied())
    {
        return Err(Error::Invalid("unexpected features.csv header".into()));
    }
    let external_names: Vec<String> = headers
        .iter()
        .skip(expected.len())
        .map(str::to_string)
        .collect();
    let mut out = BTreeMap::new();
    for record in r.records() {
        let record = record?;
        let get = |i: usize| -> Result<&str> {
            record
                .get(i)
                .ok_or_else(|| Error::Invalid("short features.csv row".into()))
        };
        let parse_f = |i: usize| -> Result<f64> {
            get(i)?
                .parse()
                .map_err(|_| Error::Invalid(format!("bad number in column {i}")))
        };
        let parse_b = |i: usize| -> Result<bool> {
            match get(i)? {
                "1" => Ok(true),
                "0" => Ok(false),
                other => Err(Error::Invalid(format!("bad flag {other:?} in column {i}"))),
            }
        };
        let post_id = get(0)?.to_string();
        let mut external = BTreeMap::new();
        for (k, name) in external_names.iter().enumerate() {
            let cell = get(expected.len() + k)?;
            if !cell.is_empty() {
                external.insert(
                    name.clone(),
                    cell.parse()
                        .map_err(|_| Error::Invalid(format!("bad score {cell:?}")))?,
                );
            }
        }
        let f = TitleFeatureVector {
            chars: parse_f(1)? as usize,
            words: parse_f(2)? as usize,
            avg_word_len: parse_f(3)?,
            avg_sent_len: parse_f(4)?,
            ttr: parse_f(5)?,
            cttr: parse_f(6)?,
            mtld: parse_f(7)?,
            ari: parse_f(8)?,
            cli: parse_f(9)?,
            fk_grade: parse_f(10)?,
            fr_ease_reversed: parse_f(11)?,
            gunning_fog: parse_f(12)?,
            vader_pos: parse_f(13)?,
            vader_neu: parse_f(14)?,
            vader_neg: parse_f(15)?,
            vader_compound: parse_f(16)?,
            excl_mark: parse_b(17)?,
            question_mark: parse_b(18)?,
            quotation_mark: parse_b(19)?,
            numbers: parse_b(20)?,
            emoji: parse_b(21)?,
            uppercase: parse_b(22)?,
            repeated_chars: parse_b(23)?,
            pronouns: parse_b(24)?,
            interrogatives: parse_b(25)?,
            tentative: parse_b(26)?,
            certainty: parse_b(27)?,
            affiliation: parse_b(28)?,
            tb_subjectivity: parse_b(29)?,
            tb_polarity: parse_b(30)?,
            swn_polarity: parse_b(31)?,
            nrc_emotion: parse_b(32)?,
            external,
        };
        out.insert(post_id, f);
    }
    Ok(out)
}
