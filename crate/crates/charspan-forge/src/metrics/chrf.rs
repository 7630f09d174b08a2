//! chrF: character n-gram F-score.
//!
//! For each order `n` the matched count is the multiset intersection of the
//! hypothesis and reference n-grams over whitespace-stripped characters.
//! The corpus score micro-averages counts over all sentences before the
//! F-beta computation, then averages over orders; with effective ordering,
//! orders where neither side has any n-grams are excluded from the average.
//! Word-order n-grams (over whitespace tokens, chrF++ style) participate in
//! the same average when `word_order > 0`.

use std::collections::HashMap;

use crate::corpus::Sentence;
use crate::error::{ForgeError, Result};

use super::ScoreReport;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChrfParams {
    pub char_order: usize,
    pub word_order: usize,
    pub beta: f64,
    pub effective_order: bool,
}

impl Default for ChrfParams {
    fn default() -> Self {
        ChrfParams {
            char_order: 6,
            word_order: 0,
            beta: 2.0,
            effective_order: true,
        }
    }
}

impl ChrfParams {
    fn validate(&self) -> Result<()> {
        if self.char_order == 0 {
            return Err(ForgeError::InvalidConfig("char_order must be >= 1".into()));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(ForgeError::InvalidConfig("beta must be positive".into()));
        }
        Ok(())
    }

    pub fn signature(&self) -> String {
        format!(
            "chrf|eff:{}|nc:{}|nw:{}|space:no|beta:{}",
            if self.effective_order { "yes" } else { "no" },
            self.char_order,
            self.word_order,
            self.beta
        )
    }
}

/// Matched/total n-gram counts at one order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct OrderStats {
    pub matched: u64,
    pub hyp_total: u64,
    pub ref_total: u64,
}

impl OrderStats {
    fn add(&mut self, other: &OrderStats) {
        self.matched += other.matched;
        self.hyp_total += other.hyp_total;
        self.ref_total += other.ref_total;
    }
}

fn ngram_counts<T: Clone + Eq + std::hash::Hash>(items: &[T], n: usize) -> HashMap<Vec<T>, u64> {
    let mut counts = HashMap::new();
    if n > 0 && items.len() >= n {
        for window in items.windows(n) {
            *counts.entry(window.to_vec()).or_insert(0) += 1;
        }
    }
    counts
}

fn order_stats<T: Clone + Eq + std::hash::Hash>(hyp: &[T], reference: &[T], n: usize) -> OrderStats {
    let hyp_counts = ngram_counts(hyp, n);
    let ref_counts = ngram_counts(reference, n);
    let hyp_total = hyp_counts.values().sum();
    let ref_total = ref_counts.values().sum();
    let matched = hyp_counts
        .iter()
        .map(|(gram, &hc)| hc.min(ref_counts.get(gram).copied().unwrap_or(0)))
        .sum();
    OrderStats {
        matched,
        hyp_total,
        ref_total,
    }
}

/// One slot per char order followed by one per word order.
pub(crate) fn sentence_stats(
    hyp: &Sentence,
    reference: &Sentence,
    params: &ChrfParams,
) -> Vec<OrderStats> {
    let hyp_chars: Vec<char> = hyp.as_str().chars().filter(|c| !c.is_whitespace()).collect();
    let ref_chars: Vec<char> = reference
        .as_str()
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    let mut stats = Vec::with_capacity(params.char_order + params.word_order);
    for n in 1..=params.char_order {
        stats.push(order_stats(&hyp_chars, &ref_chars, n));
    }
    if params.word_order > 0 {
        let hyp_words: Vec<&str> = hyp.as_str().split_whitespace().collect();
        let ref_words: Vec<&str> = reference.as_str().split_whitespace().collect();
        for n in 1..=params.word_order {
            stats.push(order_stats(&hyp_words, &ref_words, n));
        }
    }
    stats
}

/// F-beta averaged over orders, on a 0–1 scale.
pub(crate) fn fscore(stats: &[OrderStats], beta: f64, effective_order: bool) -> f64 {
    let beta2 = beta * beta;
    let mut sum = 0.0;
    let mut included = 0usize;
    for s in stats {
        if effective_order && s.hyp_total == 0 && s.ref_total == 0 {
            continue;
        }
        included += 1;
        if s.matched == 0 {
            continue; // contributes 0
        }
        let precision = s.matched as f64 / s.hyp_total as f64;
        let recall = s.matched as f64 / s.ref_total as f64;
        sum += (1.0 + beta2) * precision * recall / (beta2 * precision + recall);
    }
    if included == 0 {
        0.0
    } else {
        sum / included as f64
    }
}

/// Corpus chrF over aligned hypothesis/reference lists. Scores are on the
/// conventional 0–100 scale.
pub fn chrf(hyp: &[Sentence], reference: &[Sentence], params: &ChrfParams) -> Result<ScoreReport> {
    params.validate()?;
    if hyp.len() != reference.len() {
        return Err(ForgeError::LengthMismatch {
            left: hyp.len(),
            right: reference.len(),
        });
    }
    if hyp.is_empty() {
        return Err(ForgeError::EmptyCorpus);
    }

    let order_slots = params.char_order + params.word_order;
    let mut corpus = vec![OrderStats::default(); order_slots];
    let mut sentence_scores = Vec::with_capacity(hyp.len());
    for (h, r) in hyp.iter().zip(reference) {
        let stats = sentence_stats(h, r, params);
        for (acc, s) in corpus.iter_mut().zip(&stats) {
            acc.add(s);
        }
        sentence_scores.push(100.0 * fscore(&stats, params.beta, params.effective_order));
    }
    let corpus_score = 100.0 * fscore(&corpus, params.beta, params.effective_order);

    Ok(ScoreReport {
        metric: "chrf".into(),
        signature: params.signature(),
        corpus_score,
        sentence_scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Sentence {
        Sentence::new(text).unwrap()
    }

    #[test]
    fn identical_corpus_scores_100() {
        let lines = vec![s("cat")];
        let report = chrf(&lines, &lines, &ChrfParams::default()).unwrap();
        assert_eq!(report.corpus_score, 100.0);
        assert_eq!(report.sentence_scores, vec![100.0]);
    }

    #[test]
    fn disjoint_strings_score_zero() {
        let report = chrf(&[s("abcdef")], &[s("uvwxyz")], &ChrfParams::default()).unwrap();
        assert_eq!(report.corpus_score, 0.0);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(chrf(&[s("a")], &[s("a"), s("b")], &ChrfParams::default()).is_err());
        assert!(chrf(&[], &[], &ChrfParams::default()).is_err());
    }

    #[test]
    fn whitespace_is_excluded() {
        // With spaces stripped both sides are "ab", so the score is perfect.
        let report = chrf(&[s("a b")], &[s("ab")], &ChrfParams::default()).unwrap();
        assert_eq!(report.corpus_score, 100.0);
    }

    #[test]
    fn signature_reflects_parameters() {
        let params = ChrfParams::default();
        assert_eq!(params.signature(), "chrf|eff:yes|nc:6|nw:0|space:no|beta:2");
    }

    #[test]
    fn word_order_participates() {
        let params = ChrfParams {
            word_order: 2,
            ..ChrfParams::default()
        };
        let perfect = chrf(&[s("x y z")], &[s("x y z")], &params).unwrap();
        assert_eq!(perfect.corpus_score, 100.0);
        let partial = chrf(&[s("x y q")], &[s("x y z")], &params).unwrap();
        assert!(partial.corpus_score > 0.0 && partial.corpus_score < 100.0);
    }

    #[test]
    fn permutation_equivariance() {
        let hyp = vec![s("abc"), s("defg"), s("hij")];
        let reference = vec![s("abd"), s("defh"), s("hxj")];
        let base = chrf(&hyp, &reference, &ChrfParams::default()).unwrap();
        let hyp_p = vec![hyp[2].clone(), hyp[0].clone(), hyp[1].clone()];
        let ref_p = vec![reference[2].clone(), reference[0].clone(), reference[1].clone()];
        let permuted = chrf(&hyp_p, &ref_p, &ChrfParams::default()).unwrap();
        assert!((base.corpus_score - permuted.corpus_score).abs() < 1e-12);
    }
}
