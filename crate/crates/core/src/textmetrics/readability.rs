//! Readability formulas over titles.
//!
//! Flesch Reading Ease is stored negated (`fr_ease_reversed`) so that every
//! readability column reads "higher = more complex". Syllables use the
//! vowel-group heuristic: count maximal runs of a/e/i/o/u/y in the word's
//! alphabetic characters, subtract one for a silent trailing `e`, floor at 1.

use crate::error::{Error, Result};
use crate::textmetrics::tokenize::sentence_count;

#[derive(Debug, Clone, PartialEq)]
pub struct Readability {
    /// Automated Readability Index.
    pub ari: f64,
    /// Coleman-Liau Index.
    pub cli: f64,
    /// Flesch-Kincaid grade level.
    pub fk_grade: f64,
    /// Negated Flesch Reading Ease.
    pub fr_ease_reversed: f64,
    /// Gunning Fog index.
    pub gunning_fog: f64,
}

/// Heuristic syllable count for one whitespace token.
pub fn syllables(word: &str) -> usize {
    let letters: String = word
        .chars()
        .filter(|c| c.is_alphabetic())
        .flat_map(|c| c.to_lowercase())
        .collect();
    if letters.is_empty() {
        return 1;
    }
    let is_vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
    let mut count = 0usize;
    let mut prev_vowel = false;
    for c in letters.chars() {
        let v = is_vowel(c);
        if v && !prev_vowel {
            count += 1;
        }
        prev_vowel = v;
    }
    if letters.ends_with('e') {
        count = count.saturating_sub(1);
    }
    count.max(1)
}

pub fn readability(title: &str) -> Result<Readability> {
    let trimmed = title.trim();
    let words: Vec<&str> = trimmed.split_whitespace().collect();
    if words.is_empty() {
        return Err(Error::EmptyInput);
    }
    let w = words.len() as f64;
    let s = sentence_count(trimmed) as f64;
    let alnum = trimmed.chars().filter(|c| c.is_alphanumeric()).count() as f64;
    let letters = trimmed.chars().filter(|c| c.is_alphabetic()).count() as f64;
    let syl: usize = words.iter().map(|t| syllables(t)).sum();
    let y = syl as f64;
    let complex_words = words.iter().filter(|t| syllables(t) >= 3).count() as f64;

    let ari = 4.71 * (alnum / w) + 0.5 * (w / s) - 21.43;
    // letters and sentences per 100 words
    let cli = 0.0588 * (letters / w * 100.0) - 0.296 * (s / w * 100.0) - 15.8;
    let fk_grade = 0.39 * (w / s) + 11.8 * (y / w) - 15.59;
    let fr_ease = 206.835 - 1.015 * (w / s) - 84.6 * (y / w);
    let gunning_fog = 0.4 * ((w / s) + 100.0 * (complex_words / w));

    Ok(Readability {
        ari,
        cli,
        fk_grade,
        fr_ease_reversed: -fr_ease,
        gunning_fog,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(got: f64, want: f64) {
        assert!((got - want).abs() < 1e-9, "got {got}, want {want}");
    }

    #[test]
    fn syllable_heuristic() {
        assert_eq!(syllables("cat"), 1);
        assert_eq!(syllables("cake"), 1); // silent trailing e
        assert_eq!(syllables("be"), 1); // floor at 1
        assert_eq!(syllables("happy"), 2);
        assert_eq!(syllables("beautiful"), 3); // eau-i-u -> runs: eau, i, u
        assert_eq!(syllables("2024"), 1); // no letters
        assert_eq!(syllables("rhythm"), 1); // single y run
    }

    #[test]
    fn ari_plug_in() {
        // "This is a test": W=4, S=1, C=11
        let r = readability("This is a test").unwrap();
        close(r.ari, 4.71 * (11.0 / 4.0) + 0.5 * 4.0 - 21.43);
        close(r.ari, -6.4775);
    }

    #[test]
    fn fk_single_monosyllable() {
        let r = readability("cat").unwrap();
        close(r.fk_grade, 0.39 + 11.8 - 15.59);
        close(r.fk_grade, -3.4);
    }

    #[test]
    fn fog_reduces_without_complex_words() {
        let r = readability("one two. three four").unwrap();
        // no >=3-syllable words: fog = 0.4 * (W/S)
        close(r.gunning_fog, 0.4 * (4.0 / 2.0));
    }

    #[test]
    fn fr_ease_is_negated() {
        let r = readability("simple words here").unwrap();
        let w = 3.0;
        let y = (syllables("simple") + syllables("words") + syllables("here")) as f64;
        let ease = 206.835 - 1.015 * w - 84.6 * (y / w);
        close(r.fr_ease_reversed, -ease);
    }

    #[test]
    fn empty_errors() {
        assert!(readability("  ").is_err());
    }
}
