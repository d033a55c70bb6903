//! Binary stylistic flags and lexicon-membership sentiment flags.

use crate::textmetrics::lexicons::WordLists;
use crate::textmetrics::tokenize::lexical_tokens;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StylisticFlags {
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
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SentimentFlags {
    pub tb_subjectivity: bool,
    pub tb_polarity: bool,
    pub swn_polarity: bool,
    pub nrc_emotion: bool,
}

fn is_emoji(c: char) -> bool {
    matches!(c as u32, 0x1F300..=0x1FAFF | 0x2600..=0x27BF | 0xFE0F)
}

/// A token counts as "uppercase" when, after stripping surrounding
/// punctuation, it has at least 3 characters, all uppercase letters.
fn is_uppercase_token(raw: &str) -> bool {
    let t = raw.trim_matches(|c: char| !c.is_alphanumeric());
    t.chars().count() >= 3 && t.chars().all(|c| c.is_alphabetic() && c.is_uppercase())
}

/// Same alphabetic character at least 3 times in a row (case-insensitive),
/// e.g. "sooooo good".
fn has_repeated_chars(token: &str) -> bool {
    let mut prev = None;
    let mut run = 0usize;
    for c in token.chars().flat_map(|c| c.to_lowercase()) {
        if c.is_alphabetic() && Some(c) == prev {
            run += 1;
            if run >= 3 {
                return true;
            }
        } else {
            run = 1;
        }
        prev = Some(c);
    }
    false
}

fn has_nonzero_hit(tokens: &[String], lexicon: &std::collections::BTreeMap<String, f64>) -> bool {
    tokens
        .iter()
        .any(|t| lexicon.get(t).is_some_and(|v| *v != 0.0))
}

pub fn stylistic_flags(title: &str, lists: &WordLists) -> StylisticFlags {
    let raw_tokens: Vec<&str> = title.split_whitespace().collect();
    let tokens = lexical_tokens(title);
    let has_open_single = raw_tokens.iter().any(|t| t.starts_with('\''));
    let has_close_single = raw_tokens.iter().any(|t| t.ends_with('\''));
    StylisticFlags {
        excl_mark: title.contains('!'),
        question_mark: title.contains('?'),
        quotation_mark: title.contains('"')
            || title.contains('\u{201C}')
            || title.contains('\u{201D}')
            || (has_open_single && has_close_single),
        numbers: title.chars().any(|c| c.is_ascii_digit()),
        emoji: title.chars().any(is_emoji),
        uppercase: raw_tokens.iter().any(|t| is_uppercase_token(t)),
        repeated_chars: raw_tokens.iter().any(|t| has_repeated_chars(t)),
        pronouns: tokens.iter().any(|t| lists.pronouns.contains_key(t)),
        interrogatives: tokens.iter().any(|t| lists.interrogatives.contains_key(t)),
        tentative: tokens.iter().any(|t| lists.tentative.contains_key(t)),
        certainty: tokens.iter().any(|t| lists.certainty.contains_key(t)),
        affiliation: tokens.iter().any(|t| lists.affiliation.contains_key(t)),
    }
}

/// One flag per sentiment lexicon: set iff any token matches with a nonzero
/// score, regardless of sign or intensity.
pub fn lexicon_sentiment_binary(title: &str, lists: &WordLists) -> SentimentFlags {
    let tokens = lexical_tokens(title);
    SentimentFlags {
        tb_subjectivity: has_nonzero_hit(&tokens, &lists.tb_subjectivity),
        tb_polarity: has_nonzero_hit(&tokens, &lists.tb_polarity),
        swn_polarity: has_nonzero_hit(&tokens, &lists.swn_polarity),
        nrc_emotion: has_nonzero_hit(&tokens, &lists.nrc_emotion),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lists() -> WordLists {
        let mut l = WordLists::default();
        l.pronouns.insert("you".into(), 1.0);
        l.interrogatives.insert("how".into(), 1.0);
        l.tentative.insert("maybe".into(), 1.0);
        l.certainty.insert("always".into(), 1.0);
        l.affiliation.insert("friend".into(), 1.0);
        l.tb_polarity.insert("happy".into(), 0.8);
        l.nrc_emotion.insert("terrified".into(), 1.0);
        l.swn_polarity.insert("neutralish".into(), 0.0);
        l
    }

    #[test]
    fn punctuation_and_case_flags() {
        let f = stylistic_flags("WOW this is GREAT!", &lists());
        assert!(f.excl_mark);
        assert!(f.uppercase);
        assert!(!f.question_mark);

        let f = stylistic_flags("sooooo good", &lists());
        assert!(f.repeated_chars);
        assert!(!f.uppercase); // "sooooo" not uppercase

        let f = stylistic_flags("calm title here", &lists());
        assert_eq!(f, StylisticFlags::default());
    }

    #[test]
    fn uppercase_needs_three_letters() {
        assert!(stylistic_flags("OK GO NOW", &lists()).uppercase); // NOW
        assert!(!stylistic_flags("OK GO", &lists()).uppercase); // both len 2
        assert!(stylistic_flags("GREAT!", &lists()).uppercase); // punctuation stripped
        assert!(!stylistic_flags("R2D2 again", &lists()).uppercase); // digits break it
    }

    #[test]
    fn repeated_chars_ignores_digits() {
        assert!(!stylistic_flags("year 2000 recap", &lists()).repeated_chars);
        assert!(stylistic_flags("AAAH what", &lists()).repeated_chars);
    }

    #[test]
    fn numbers_emoji_quotes() {
        let f = stylistic_flags("top 10 plays", &lists());
        assert!(f.numbers);
        let f = stylistic_flags("so cool \u{1F600}", &lists());
        assert!(f.emoji);
        let f = stylistic_flags("he said \"never\"", &lists());
        assert!(f.quotation_mark);
        let f = stylistic_flags("the 'best' one", &lists());
        assert!(f.quotation_mark);
        // internal apostrophe is not a quote pair
        let f = stylistic_flags("don't stop", &lists());
        assert!(!f.quotation_mark);
    }

    #[test]
    fn word_class_membership_is_case_insensitive() {
        let f = stylistic_flags("How could YOU do this, friend? Maybe ALWAYS.", &lists());
        assert!(f.pronouns && f.interrogatives && f.tentative && f.certainty && f.affiliation);
    }

    #[test]
    fn sentiment_flags_need_nonzero_scores() {
        let s = lexicon_sentiment_binary("happy days", &lists());
        assert!(s.tb_polarity);
        assert!(!s.tb_subjectivity);
        let s = lexicon_sentiment_binary("terrified scream", &lists());
        assert!(s.nrc_emotion);
        // zero-scored entry does not count as a hit
        let s = lexicon_sentiment_binary("neutralish word", &lists());
        assert!(!s.swn_polarity);
        let s = lexicon_sentiment_binary("nothing here", &lists());
        assert_eq!(s, SentimentFlags::default());
    }
}
