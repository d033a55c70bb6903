//! Adapter for externally computed per-post scores (e.g. transformer
//! sentiment/emotion probabilities produced out of process). Scores join the
//! continuous metric family by name.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::{Error, Result};

/// post_id -> (score name -> value), plus human-readable warnings for rows
/// that were dropped because their id is not in the dataset.
pub struct ExternalScoreTable {
    pub scores: BTreeMap<String, BTreeMap<String, f64>>,
    pub warnings: Vec<String>,
}

/// Load a `post_id,<score_name>...` CSV. Duplicate post ids are an error;
/// ids absent from `known_ids` are dropped with a warning.
pub fn load_external_scores(
    path: &Path,
    known_ids: &BTreeSet<String>,
) -> Result<ExternalScoreTable> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.is_empty() || headers.get(0) != Some("post_id") {
        return Err(Error::Invalid(format!(
            "{}: first column must be post_id",
            path.display()
        )));
    }
    let score_names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    if score_names.is_empty() {
        return Err(Error::Invalid(format!(
            "{}: no score columns",
            path.display()
        )));
    }
    let mut scores: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    let mut warnings = Vec::new();
    for record in reader.records() {
        let record = record?;
        let post_id = record
            .get(0)
            .ok_or_else(|| Error::Invalid("missing post_id field".into()))?
            .to_string();
        if !known_ids.contains(&post_id) {
            warnings.push(format!("external score for unknown post {post_id} dropped"));
            continue;
        }
        if scores.contains_key(&post_id) {
            return Err(Error::Invalid(format!(
                "duplicate post_id {post_id} in external scores"
            )));
        }
        let mut row = BTreeMap::new();
        for (name, raw) in score_names.iter().zip(record.iter().skip(1)) {
            let value: f64 = raw
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("bad score {raw:?} for post {post_id}")))?;
            if !value.is_finite() {
                return Err(Error::Invalid(format!(
                    "non-finite score for post {post_id}"
                )));
            }
            row.insert(name.clone(), value);
        }
        scores.insert(post_id, row);
    }
    Ok(ExternalScoreTable { scores, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn known(ids: &[&str]) -> BTreeSet<String> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_known_rows() {
        let f = write_csv("post_id,bert_pos,bert_neg\np1,0.9,0.1\np2,0.2,0.8\n");
        let t = load_external_scores(f.path(), &known(&["p1", "p2"])).unwrap();
        assert_eq!(t.scores.len(), 2);
        assert_eq!(t.scores["p1"]["bert_pos"], 0.9);
        assert!(t.warnings.is_empty());
    }

    #[test]
    fn duplicate_id_errors() {
        let f = write_csv("post_id,s\np1,0.5\np1,0.6\n");
        assert!(load_external_scores(f.path(), &known(&["p1"])).is_err());
    }

    #[test]
    fn unknown_id_warns_and_drops() {
        let f = write_csv("post_id,s\np1,0.5\nghost,0.6\n");
        let t = load_external_scores(f.path(), &known(&["p1"])).unwrap();
        assert_eq!(t.scores.len(), 1);
        assert_eq!(t.warnings.len(), 1);
        assert!(t.warnings[0].contains("ghost"));
    }

    #[test]
    fn non_finite_errors() {
        let f = write_csv("post_id,s\np1,NaN\n");
        assert!(load_external_scores(f.path(), &known(&["p1"])).is_err());
    }
}
