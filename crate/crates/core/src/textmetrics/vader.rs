//! Rule-based valence scoring over a lexicon, following the classic VADER
//! mechanics for the rule subset that matters on short titles: negation,
//! booster words, all-caps emphasis, and trailing exclamation amplification.
//! Idiom handling and clause-level ("but") reweighting are deliberately out
//! of scope; parity with the full reference algorithm is pinned by an
//! offline-generated oracle fixture in the test suite.

use crate::textmetrics::lexicons::WordLists;

/// Empirically derived emphasis constants from the reference method.
const N_SCALAR: f64 = -0.74;
const C_INCR: f64 = 0.733;
const EP_INCR: f64 = 0.292;
/// Distance decay for boosters two and three tokens back.
const DECAY_1: f64 = 0.95;
const DECAY_2: f64 = 0.9;

/// ASCII punctuation set used for token stripping (mirrors
/// `string.punctuation`).
const PUNCT: &[char] = &[
    '!', '"', '#', '$', '%', '&', '\'', '(', ')', '*', '+', ',', '-', '.', '/', ':', ';', '<', '=',
    '>', '?', '@', '[', '\\', ']', '^', '_', '`', '{', '|', '}', '~',
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VaderScores {
    pub pos: f64,
    pub neu: f64,
    pub neg: f64,
    pub compound: f64,
}

/// Whitespace tokens with surrounding punctuation stripped, unless the
/// stripped form is 2 characters or fewer (emoticons survive intact).
fn words_and_emoticons(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| {
            let stripped = w.trim_matches(|c| PUNCT.contains(&c));
            if stripped.chars().count() <= 2 {
                w.to_string()
            } else {
                stripped.to_string()
            }
        })
        .collect()
}

/// True for tokens with at least one cased character and no lowercase ones
/// (Python's `str.isupper`).
fn is_upper_token(t: &str) -> bool {
    let mut has_cased = false;
    for c in t.chars() {
        if c.is_lowercase() {
            return false;
        }
        if c.is_uppercase() {
            has_cased = true;
        }
    }
    has_cased
}

/// Mixed-case check: some but not all tokens are all-caps.
fn allcap_differential(tokens: &[String]) -> bool {
    let caps = tokens.iter().filter(|t| is_upper_token(t)).count();
    caps > 0 && caps < tokens.len()
}

fn negated(token: &str, lists: &WordLists) -> bool {
    let lower = token.to_lowercase();
    lists.negations.contains_key(&lower) || lower.contains("n't")
}

/// Booster contribution of `word` toward a target token of valence
/// `valence`, including the all-caps bump on the booster itself.
fn scalar_inc_dec(word: &str, valence: f64, is_cap_diff: bool, lists: &WordLists) -> f64 {
    let lower = word.to_lowercase();
    let Some(&base) = lists.boosters.get(&lower) else {
        return 0.0;
    };
    let mut scalar = base;
    if valence < 0.0 {
        scalar = -scalar;
    }
    if is_upper_token(word) && is_cap_diff {
        if valence > 0.0 {
            scalar += C_INCR;
        } else {
            scalar -= C_INCR;
        }
    }
    scalar
}

/// Count of consecutive `!` at the end of the title, capped at 3.
fn trailing_exclamations(text: &str) -> usize {
    text.trim_end()
        .chars()
        .rev()
        .take_while(|c| *c == '!')
        .count()
        .min(3)
}

fn normalize(score: f64) -> f64 {
    (score / (score * score + 15.0).sqrt()).clamp(-1.0, 1.0)
}

pub fn vader_scores(title: &str, lists: &WordLists) -> VaderScores {
    let tokens = words_and_emoticons(title);
    if tokens.is_empty() {
        return VaderScores {
            pos: 0.0,
            neu: 0.0,
            neg: 0.0,
            compound: 0.0,
        };
    }
    let is_cap_diff = allcap_differential(&tokens);

    let mut sentiments: Vec<f64> = Vec::with_capacity(tokens.len());
    for (i, token) in tokens.iter().enumerate() {
        let lower = token.to_lowercase();
        // booster words carry no valence of their own
        if lists.boosters.contains_key(&lower) {
            sentiments.push(0.0);
            continue;
        }
        let Some(&base) = lists.vader_valence.get(&lower) else {
            sentiments.push(0.0);
            continue;
        };
        let mut valence = base;
        if is_upper_token(token) && is_cap_diff {
            if valence > 0.0 {
                valence += C_INCR;
            } else {
                valence -= C_INCR;
            }
        }
        // look back up to three tokens for boosters and negations; a
        // preceding token that is itself in the valence lexicon is skipped
        for back in 0..3usize {
            if i <= back {
                break;
            }
            let prev = &tokens[i - (back + 1)];
            if lists.vader_valence.contains_key(&prev.to_lowercase()) {
                continue;
            }
            let mut s = scalar_inc_dec(prev, valence, is_cap_diff, lists);
            if back == 1 {
                s *= DECAY_1;
            } else if back == 2 {
                s *= DECAY_2;
            }
            valence += s;
            if negated(prev, lists) {
                valence *= N_SCALAR;
            }
        }
        sentiments.push(valence);
    }

    let ep_amplifier = trailing_exclamations(title) as f64 * EP_INCR;
    let mut sum_s: f64 = sentiments.iter().sum();
    if sum_s > 0.0 {
        sum_s += ep_amplifier;
    } else if sum_s < 0.0 {
        sum_s -= ep_amplifier;
    }
    let compound = normalize(sum_s);

    // proportions: positive scores weighted +1, negative -1, to keep
    // neutral counts comparable
    let mut pos_sum = 0.0;
    let mut neg_sum = 0.0;
    let mut neu_count = 0.0;
    for &v in &sentiments {
        if v > 0.0 {
            pos_sum += v + 1.0;
        } else if v < 0.0 {
            neg_sum += v - 1.0;
        } else {
            neu_count += 1.0;
        }
    }
    if pos_sum > neg_sum.abs() {
        pos_sum += ep_amplifier;
    } else if pos_sum < neg_sum.abs() {
        neg_sum -= ep_amplifier;
    }
    let total = pos_sum + neg_sum.abs() + neu_count;
    if total == 0.0 {
        return VaderScores {
            pos: 0.0,
            neu: 0.0,
            neg: 0.0,
            compound,
        };
    }
    VaderScores {
        pos: (pos_sum / total).abs(),
        neu: (neu_count / total).abs(),
        neg: (neg_sum / total).abs(),
        compound,
    }
}
