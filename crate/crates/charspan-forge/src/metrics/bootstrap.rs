//! Paired bootstrap resampling: compares two systems against one reference
//! by resampling sentence indices with replacement.

use rand::Rng;
use rayon::prelude::*;

use crate::corpus::Sentence;
use crate::error::{ForgeError, Result};
use crate::seed::SeedSpec;

use super::bleu::{self, BleuStats};
use super::chrf::{self, ChrfParams, OrderStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BootstrapMetric {
    Chrf,
    Bleu,
}

impl BootstrapMetric {
    pub fn as_str(&self) -> &'static str {
        match self {
            BootstrapMetric::Chrf => "chrf",
            BootstrapMetric::Bleu => "bleu",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapOutcome {
    /// `(wins_b + 1) / (resamples + 1)` where `wins_b` counts resamples in
    /// which system B scored at least as high as system A.
    pub p_value: f64,
    /// Full-corpus score of system A.
    pub score_a: f64,
    /// Full-corpus score of system B.
    pub score_b: f64,
    pub resamples: usize,
    pub metric: String,
}

/// Runs the paired bootstrap. Every resample draws `n` sentence indices
/// with replacement from its own derived substream, recomputes both corpus
/// scores over the drawn statistics, and counts how often B >= A.
pub fn paired_bootstrap(
    hyp_a: &[Sentence],
    hyp_b: &[Sentence],
    reference: &[Sentence],
    metric: BootstrapMetric,
    resamples: usize,
    seed: &SeedSpec,
) -> Result<BootstrapOutcome> {
    if hyp_a.len() != reference.len() {
        return Err(ForgeError::LengthMismatch {
            left: hyp_a.len(),
            right: reference.len(),
        });
    }
    if hyp_b.len() != reference.len() {
        return Err(ForgeError::LengthMismatch {
            left: hyp_b.len(),
            right: reference.len(),
        });
    }
    if reference.is_empty() {
        return Err(ForgeError::EmptyCorpus);
    }
    if resamples == 0 {
        return Err(ForgeError::InvalidConfig("resamples must be >= 1".into()));
    }

    let n = reference.len();
    let (score_a, score_b, wins_b) = match metric {
        BootstrapMetric::Chrf => {
            let params = ChrfParams::default();
            let stats_a: Vec<Vec<OrderStats>> = hyp_a
                .iter()
                .zip(reference)
                .map(|(h, r)| chrf::sentence_stats(h, r, &params))
                .collect();
            let stats_b: Vec<Vec<OrderStats>> = hyp_b
                .iter()
                .zip(reference)
                .map(|(h, r)| chrf::sentence_stats(h, r, &params))
                .collect();
            let order_slots = params.char_order + params.word_order;
            let aggregate = |stats: &[Vec<OrderStats>], indices: &[usize]| -> f64 {
                let mut acc = vec![OrderStats::default(); order_slots];
                for &i in indices {
                    for (slot, s) in acc.iter_mut().zip(&stats[i]) {
                        slot.matched += s.matched;
                        slot.hyp_total += s.hyp_total;
                        slot.ref_total += s.ref_total;
                    }
                }
                100.0 * chrf::fscore(&acc, params.beta, params.effective_order)
            };
            let all: Vec<usize> = (0..n).collect();
            let score_a = aggregate(&stats_a, &all);
            let score_b = aggregate(&stats_b, &all);
            let wins = count_wins(n, resamples, seed, |indices| {
                (aggregate(&stats_a, indices), aggregate(&stats_b, indices))
            });
            (score_a, score_b, wins)
        }
        BootstrapMetric::Bleu => {
            let stats_a: Vec<BleuStats> = hyp_a
                .iter()
                .zip(reference)
                .map(|(h, r)| bleu::sentence_stats(h, r))
                .collect();
            let stats_b: Vec<BleuStats> = hyp_b
                .iter()
                .zip(reference)
                .map(|(h, r)| bleu::sentence_stats(h, r))
                .collect();
            let aggregate = |stats: &[BleuStats], indices: &[usize]| -> f64 {
                let mut acc = BleuStats::default();
                for &i in indices {
                    acc.add(&stats[i]);
                }
                bleu::score(&acc)
            };
            let all: Vec<usize> = (0..n).collect();
            let score_a = aggregate(&stats_a, &all);
            let score_b = aggregate(&stats_b, &all);
            let wins = count_wins(n, resamples, seed, |indices| {
                (aggregate(&stats_a, indices), aggregate(&stats_b, indices))
            });
            (score_a, score_b, wins)
        }
    };

    Ok(BootstrapOutcome {
        p_value: (wins_b as f64 + 1.0) / (resamples as f64 + 1.0),
        score_a,
        score_b,
        resamples,
        metric: metric.as_str().to_string(),
    })
}

fn count_wins<F>(n: usize, resamples: usize, seed: &SeedSpec, score_pair: F) -> usize
where
    F: Fn(&[usize]) -> (f64, f64) + Sync,
{
    (0..resamples)
        .into_par_iter()
        .map(|k| {
            let mut rng = seed.rng_for(k as u64);
            let indices: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let (a, b) = score_pair(&indices);
            usize::from(b >= a)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Sentence {
        Sentence::new(text).unwrap()
    }

    fn seed() -> SeedSpec {
        SeedSpec::new(31, "bootstrap")
    }

    #[test]
    fn self_comparison_is_never_significant() {
        let hyp: Vec<Sentence> = (0..40).map(|i| s(&format!("sentence number {i}"))).collect();
        let reference: Vec<Sentence> =
            (0..40).map(|i| s(&format!("reference line {i}"))).collect();
        for metric in [BootstrapMetric::Chrf, BootstrapMetric::Bleu] {
            let out = paired_bootstrap(&hyp, &hyp, &reference, metric, 200, &seed()).unwrap();
            assert!(out.p_value >= 0.9, "p = {}", out.p_value);
            assert_eq!(out.score_a, out.score_b);
        }
    }

    #[test]
    fn perfect_vs_disjoint_is_significant() {
        let reference: Vec<Sentence> = (0..50)
            .map(|i| s(&format!("the reference sentence number {i} here")))
            .collect();
        let disjoint: Vec<Sentence> = (0..50).map(|_| s("zzz qqq xxx www vvv")).collect();
        let out = paired_bootstrap(
            &reference,
            &disjoint,
            &reference,
            BootstrapMetric::Chrf,
            1000,
            &seed(),
        )
        .unwrap();
        assert!(out.p_value <= 0.01, "p = {}", out.p_value);
        assert_eq!(out.score_a, 100.0);
    }

    #[test]
    fn single_resample_p_is_half_or_one() {
        let reference = vec![s("a b c"), s("d e f")];
        let better = reference.clone();
        let worse = vec![s("x y z"), s("p q r")];
        let p_win = paired_bootstrap(&better, &worse, &reference, BootstrapMetric::Chrf, 1, &seed())
            .unwrap()
            .p_value;
        assert_eq!(p_win, 0.5);
        let p_tie = paired_bootstrap(&better, &better, &reference, BootstrapMetric::Chrf, 1, &seed())
            .unwrap()
            .p_value;
        assert_eq!(p_tie, 1.0);
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let reference = vec![s("a")];
        assert!(paired_bootstrap(
            &[s("a"), s("b")],
            &[s("a")],
            &reference,
            BootstrapMetric::Bleu,
            10,
            &seed()
        )
        .is_err());
    }
}
