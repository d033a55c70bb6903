//! Structural title metrics: character/word counts and average lengths.

use crate::error::{Error, Result};
use crate::textmetrics::tokenize::sentence_count;

#[derive(Debug, Clone, PartialEq)]
pub struct Structural {
    /// Non-whitespace characters.
    pub chars: usize,
    /// Whitespace-delimited tokens.
    pub words: usize,
    /// Alphabetic characters per word.
    pub avg_word_len: f64,
    /// Words per sentence.
    pub avg_sent_len: f64,
}

pub fn structural(title: &str) -> Result<Structural> {
    let trimmed = title.trim();
    if trimmed.is_empty() {
        return Err(Error::EmptyInput);
    }
    let words = trimmed.split_whitespace().count();
    let chars = trimmed.chars().filter(|c| !c.is_whitespace()).count();
    let alpha = trimmed.chars().filter(|c| c.is_alphabetic()).count();
    let sentences = sentence_count(trimmed);
    Ok(Structural {
        chars,
        words,
        avg_word_len: alpha as f64 / words as f64,
        avg_sent_len: words as f64 / sentences as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_counts() {
        let s = structural("Hi there").unwrap();
        assert_eq!(s.chars, 7);
        assert_eq!(s.words, 2);
        assert_eq!(s.avg_word_len, 3.5);
        assert_eq!(s.avg_sent_len, 2.0);

        let s = structural("One. Two two.").unwrap();
        assert_eq!(s.avg_sent_len, 1.5);

        let s = structural("A").unwrap();
        assert_eq!(s.words, 1);
        assert_eq!(s.avg_sent_len, 1.0);
    }

    #[test]
    fn empty_errors() {
        assert!(matches!(structural("   "), Err(Error::EmptyInput)));
        assert!(matches!(structural(""), Err(Error::EmptyInput)));
    }
}
