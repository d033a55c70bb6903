//! Normalized Levenshtein similarity.
//!
//! `normalized_ld` reports round(100 * (La + Lb - D2) / (La + Lb)) where D2
//! is the edit distance with insertions/deletions costing 1 and
//! substitutions costing 2. Under that weighting D2 = La + Lb - 2*LCS, so
//! the similarity is equivalently 200*LCS / (La + Lb); we compute the LCS
//! with a two-row DP and leave the full distance matrix to the tests.

/// Longest common subsequence length over Unicode scalar values.
fn lcs_len(a: &[char], b: &[char]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut prev = vec![0usize; short.len() + 1];
    let mut cur = vec![0usize; short.len() + 1];
    for &cl in long {
        for (j, &cs) in short.iter().enumerate() {
            cur[j + 1] = if cl == cs {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}

/// Similarity of two strings on a 0-100 scale; 100 means identical
/// (two empty strings included), 0 means nothing in common.
pub fn normalized_ld(a: &str, b: &str) -> u8 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let len_sum = a.len() + b.len();
    if len_sum == 0 {
        return 100;
    }
    let lcs = lcs_len(&a, &b);
    (100.0 * (2 * lcs) as f64 / len_sum as f64).round() as u8
}
