//! Longest-common-subsequence ratio: a character-level lexical similarity
//! in `[0, 1]`.

use rayon::prelude::*;

use crate::corpus::{ParallelCorpus, Sentence};
use crate::error::{ForgeError, Result};

use super::SimilarityMatrix;

/// LCS length over code points, bottom-up with two rolling rows.
pub fn lcs_len(a: &[char], b: &[char]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut prev = vec![0usize; short.len() + 1];
    let mut curr = vec![0usize; short.len() + 1];
    for &cl in long {
        for (j, &cs) in short.iter().enumerate() {
            curr[j + 1] = if cl == cs {
                prev[j] + 1
            } else {
                prev[j + 1].max(curr[j])
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[short.len()]
}

/// `LCS(a, b) / max(|a|, |b|)`, with 1.0 when both strings are empty and
/// 0.0 when exactly one is.
pub fn lcsr(a: &Sentence, b: &Sentence) -> f64 {
    let ac: Vec<char> = a.as_str().chars().collect();
    let bc: Vec<char> = b.as_str().chars().collect();
    match (ac.is_empty(), bc.is_empty()) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        (false, false) => lcs_len(&ac, &bc) as f64 / ac.len().max(bc.len()) as f64,
    }
}

/// Mean LCSR over the aligned lines of two sentence lists.
pub fn mean_lcsr(a: &[Sentence], b: &[Sentence]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(ForgeError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(ForgeError::EmptyCorpus);
    }
    // Parallel map, fixed-order reduction.
    let scores: Vec<f64> = a
        .par_iter()
        .zip(b.par_iter())
        .map(|(x, y)| lcsr(x, y))
        .collect();
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// Pairwise mean-LCSR matrix over the source sides of the given corpora,
/// labelled by corpus name. In aligned mode all corpora must have equal
/// line counts; otherwise each pair compares up to the shorter corpus.
pub fn similarity_matrix(corpora: &[ParallelCorpus], aligned: bool) -> Result<SimilarityMatrix> {
    if corpora.iter().any(|c| c.is_empty()) {
        return Err(ForgeError::EmptyCorpus);
    }
    if aligned {
        for pair in corpora.windows(2) {
            if pair[0].len() != pair[1].len() {
                return Err(ForgeError::LengthMismatch {
                    left: pair[0].len(),
                    right: pair[1].len(),
                });
            }
        }
    }
    let n = corpora.len();
    let mut values = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        values[i][i] = 1.0;
        for j in i + 1..n {
            let len = corpora[i].len().min(corpora[j].len());
            let mean = mean_lcsr(&corpora[i].source()[..len], &corpora[j].source()[..len])?;
            values[i][j] = mean;
            values[j][i] = mean;
        }
    }
    SimilarityMatrix::new(corpora.iter().map(|c| c.name().to_string()).collect(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(text: &str) -> Sentence {
        Sentence::new(text).unwrap()
    }

    #[test]
    fn identical_strings_score_one() {
        assert_eq!(lcsr(&s("abc"), &s("abc")), 1.0);
    }

    #[test]
    fn disjoint_strings_score_zero() {
        assert_eq!(lcsr(&s("abc"), &s("xyz")), 0.0);
    }

    #[test]
    fn cognate_pair_matches_hand_computation() {
        // LCS("lagta", "laagata") = "lagta", length 5; longer string is 7.
        let value = lcsr(&s("lagta"), &s("laagata"));
        assert!((value - 5.0 / 7.0).abs() < 1e-12, "value {value}");
    }

    #[test]
    fn empty_string_conventions() {
        assert_eq!(lcsr(&s(""), &s("")), 1.0);
        assert_eq!(lcsr(&s(""), &s("a")), 0.0);
        assert_eq!(lcsr(&s("a"), &s("")), 0.0);
    }

    #[test]
    fn self_similarity_matrix_is_all_ones() {
        let c = ParallelCorpus::monolingual("x", vec![s("ab"), s("cd")]);
        let m = similarity_matrix(&[c.clone(), c], true).unwrap();
        assert_eq!(m.values, vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn matrix_matches_hand_computed_means() {
        let a = ParallelCorpus::monolingual("a", vec![s("abc"), s("abcd"), s("xy")]);
        let b = ParallelCorpus::monolingual("b", vec![s("abc"), s("abed"), s("uv")]);
        let m = similarity_matrix(&[a, b], true).unwrap();
        // Per line: 1.0, LCS("abcd","abed")=3 -> 3/4, 0.0; mean = 7/12.
        let expected = (1.0 + 0.75 + 0.0) / 3.0;
        assert!((m.values[0][1] - expected).abs() < 1e-12);
        assert_eq!(m.values[0][1], m.values[1][0]);
    }

    #[test]
    fn aligned_mode_rejects_mismatched_lengths() {
        let a = ParallelCorpus::monolingual("a", vec![s("ab")]);
        let b = ParallelCorpus::monolingual("b", vec![s("ab"), s("cd")]);
        assert!(similarity_matrix(&[a.clone(), b.clone()], true).is_err());
        assert!(similarity_matrix(&[a, b], false).is_ok());
    }

    proptest! {
        #[test]
        fn lcsr_is_symmetric_and_bounded(a in "[a-e]{0,12}", b in "[a-e]{0,12}") {
            let x = s(&a);
            let y = s(&b);
            let xy = lcsr(&x, &y);
            prop_assert!((0.0..=1.0).contains(&xy));
            prop_assert_eq!(xy, lcsr(&y, &x));
            prop_assert_eq!(lcsr(&x, &x), 1.0);
        }

        #[test]
        fn deleting_k_chars_obeys_edit_bound(text in "[a-d]{2,14}", k in 1usize..4) {
            let x = s(&text);
            let n = x.char_len();
            let k = k.min(n);
            let kept: String = text.chars().skip(k).collect();
            let y = s(&kept);
            prop_assert!(lcsr(&x, &y) >= 1.0 - k as f64 / n as f64 - 1e-12);
        }
    }
}
