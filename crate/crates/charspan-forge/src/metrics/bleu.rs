//! Corpus BLEU over 1–4-gram precisions with brevity penalty and
//! exponential smoothing for zero-match orders.
//!
//! Tokenization is a documented approximation of the mteval-13a scheme:
//! whitespace is normalized, every character that is neither alphanumeric
//! nor whitespace becomes its own token, and the result splits on
//! whitespace. The signature marks it `tok:13a-approx`.

use std::collections::HashMap;

use crate::corpus::Sentence;
use crate::error::{ForgeError, Result};

use super::ScoreReport;

const MAX_ORDER: usize = 4;

pub(crate) fn signature() -> String {
    "bleu|nrefs:1|tok:13a-approx|smooth:exp|maxn:4".to_string()
}

/// Detaches punctuation and splits on whitespace.
pub fn tokenize_13a_approx(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_whitespace() {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
        } else if c.is_alphanumeric() {
            current.push(c);
        } else {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            tokens.push(c.to_string());
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct BleuStats {
    pub correct: [u64; MAX_ORDER],
    pub total: [u64; MAX_ORDER],
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl BleuStats {
    pub(crate) fn add(&mut self, other: &BleuStats) {
        for n in 0..MAX_ORDER {
            self.correct[n] += other.correct[n];
            self.total[n] += other.total[n];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }
}

pub(crate) fn sentence_stats(hyp: &Sentence, reference: &Sentence) -> BleuStats {
    let hyp_tokens = tokenize_13a_approx(hyp.as_str());
    let ref_tokens = tokenize_13a_approx(reference.as_str());
    let mut stats = BleuStats {
        hyp_len: hyp_tokens.len() as u64,
        ref_len: ref_tokens.len() as u64,
        ..BleuStats::default()
    };
    for n in 1..=MAX_ORDER {
        if hyp_tokens.len() < n {
            break;
        }
        let mut ref_counts: HashMap<&[String], u64> = HashMap::new();
        for window in ref_tokens.windows(n) {
            *ref_counts.entry(window).or_insert(0) += 1;
        }
        let mut hyp_counts: HashMap<&[String], u64> = HashMap::new();
        for window in hyp_tokens.windows(n) {
            *hyp_counts.entry(window).or_insert(0) += 1;
        }
        stats.total[n - 1] = hyp_counts.values().sum();
        stats.correct[n - 1] = hyp_counts
            .iter()
            .map(|(gram, &hc)| hc.min(ref_counts.get(gram).copied().unwrap_or(0)))
            .sum();
    }
    stats
}

/// BLEU on the 0–100 scale. Zero-match orders take the mteval exponential
/// smoothing `1 / (2^k * total)`; an order with no hypothesis n-grams at
/// all yields 0.
pub(crate) fn score(stats: &BleuStats) -> f64 {
    if stats.hyp_len == 0 {
        return 0.0;
    }
    let mut smooth = 1.0f64;
    let mut log_sum = 0.0f64;
    for n in 0..MAX_ORDER {
        let precision = if stats.total[n] == 0 {
            0.0
        } else if stats.correct[n] == 0 {
            smooth *= 2.0;
            1.0 / (smooth * stats.total[n] as f64)
        } else {
            stats.correct[n] as f64 / stats.total[n] as f64
        };
        if precision == 0.0 {
            return 0.0;
        }
        log_sum += precision.ln();
    }
    let brevity_penalty = if stats.hyp_len < stats.ref_len {
        (1.0 - stats.ref_len as f64 / stats.hyp_len as f64).exp()
    } else {
        1.0
    };
    100.0 * brevity_penalty * (log_sum / MAX_ORDER as f64).exp()
}

/// Corpus BLEU over aligned hypothesis/reference lists.
pub fn bleu(hyp: &[Sentence], reference: &[Sentence]) -> Result<ScoreReport> {
    if hyp.len() != reference.len() {
        return Err(ForgeError::LengthMismatch {
            left: hyp.len(),
            right: reference.len(),
        });
    }
    if hyp.is_empty() {
        return Err(ForgeError::EmptyCorpus);
    }
    let mut corpus = BleuStats::default();
    let mut sentence_scores = Vec::with_capacity(hyp.len());
    for (h, r) in hyp.iter().zip(reference) {
        let stats = sentence_stats(h, r);
        corpus.add(&stats);
        sentence_scores.push(score(&stats));
    }
    Ok(ScoreReport {
        metric: "bleu".into(),
        signature: signature(),
        corpus_score: score(&corpus),
        sentence_scores,
    })
}
