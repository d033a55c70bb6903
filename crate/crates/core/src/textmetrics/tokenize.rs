//! Shared tokenization helpers for the lexical metrics and word-class flags.

/// Lowercased word tokens: whitespace-split, leading/trailing
/// non-alphanumeric characters stripped, internal apostrophes kept.
/// Tokens that strip to nothing are dropped.
pub fn lexical_tokens(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|raw| {
            let t = raw.trim_matches(|c: char| !c.is_alphanumeric());
            if t.is_empty() {
                None
            } else {
                Some(t.to_lowercase())
            }
        })
        .collect()
}

/// Sentence count: split on runs of `.`, `!`, `?`; segments containing any
/// non-whitespace count. A title with no terminator is one sentence.
pub fn sentence_count(text: &str) -> usize {
    let n = text
        .split(['.', '!', '?'])
        .filter(|seg| seg.chars().any(|c| !c.is_whitespace()))
        .count();
    n.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_edges_keeps_internal_apostrophes() {
        assert_eq!(lexical_tokens("Don't stop!"), vec!["don't", "stop"]);
        assert_eq!(
            lexical_tokens("(cool) 'quoted' thing..."),
            vec!["cool", "quoted", "thing"]
        );
        assert_eq!(lexical_tokens("A    b\tC"), vec!["a", "b", "c"]);
        assert!(lexical_tokens("!!! ...").is_empty());
    }

    #[test]
    fn counts_sentences() {
        assert_eq!(sentence_count("One. Two two."), 2);
        assert_eq!(sentence_count("no terminator"), 1);
        assert_eq!(sentence_count("what?! really?"), 2);
        assert_eq!(sentence_count("..."), 1);
    }
}
