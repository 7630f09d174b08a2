//! Token-granularity baselines: SwitchOut-style replacement and token
//! dropout, at word or subword level.
//!
//! Both operate on the source side only and leave the target side byte
//! identical. Tokens are maximal runs of non-whitespace; at subword level
//! the input is expected to be already-segmented text, which tokenizes the
//! same way. Original separators are preserved, so a rate of 0 is the
//! identity.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{ParallelCorpus, Sentence};
use crate::error::{ForgeError, Result};
use crate::seed::SeedSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenLevel {
    #[default]
    Word,
    Subword,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenStrategy {
    SwitchOut,
    Dropout,
}

#[derive(Debug, Clone)]
pub struct TokenAugmentConfig {
    /// Per-token probability of being replaced (switchout) or deleted
    /// (dropout).
    pub rate: f64,
    pub level: TokenLevel,
    pub strategy: TokenStrategy,
    /// Replacement pool; required (non-empty) for switchout.
    pub vocab: Vec<String>,
    pub seed: SeedSpec,
    /// Dropout never leaves a sentence with fewer tokens than this.
    pub min_tokens_kept: usize,
}

impl TokenAugmentConfig {
    pub fn switchout(rate: f64, level: TokenLevel, vocab: Vec<String>, seed: SeedSpec) -> Self {
        TokenAugmentConfig {
            rate,
            level,
            strategy: TokenStrategy::SwitchOut,
            vocab,
            seed,
            min_tokens_kept: 1,
        }
    }

    pub fn dropout(rate: f64, level: TokenLevel, seed: SeedSpec) -> Self {
        TokenAugmentConfig {
            rate,
            level,
            strategy: TokenStrategy::Dropout,
            vocab: Vec::new(),
            seed,
            min_tokens_kept: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rate) || !self.rate.is_finite() {
            return Err(ForgeError::InvalidConfig(format!(
                "token rate must lie in [0, 1] (got {})",
                self.rate
            )));
        }
        if self.strategy == TokenStrategy::SwitchOut && self.vocab.is_empty() {
            return Err(ForgeError::InvalidConfig(
                "switchout requires a non-empty vocabulary".into(),
            ));
        }
        Ok(())
    }
}

/// Byte ranges of the non-whitespace token runs in `text`.
fn token_ranges(text: &str) -> Vec<(usize, usize)> {
    let mut ranges = Vec::new();
    let mut start: Option<usize> = None;
    for (idx, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                ranges.push((s, idx));
            }
        } else if start.is_none() {
            start = Some(idx);
        }
    }
    if let Some(s) = start {
        ranges.push((s, text.len()));
    }
    ranges
}

fn switchout_sentence(s: &Sentence, ordinal: usize, cfg: &TokenAugmentConfig) -> Result<Sentence> {
    let mut rng = cfg.seed.rng_for(ordinal as u64);
    let text = s.as_str();
    let mut out = String::with_capacity(text.len());
    let mut cursor = 0;
    for (start, end) in token_ranges(text) {
        out.push_str(&text[cursor..start]);
        if rng.random_bool(cfg.rate) {
            out.push_str(&cfg.vocab[rng.random_range(0..cfg.vocab.len())]);
        } else {
            out.push_str(&text[start..end]);
        }
        cursor = end;
    }
    out.push_str(&text[cursor..]);
    Sentence::new(out)
}

fn dropout_sentence(s: &Sentence, ordinal: usize, cfg: &TokenAugmentConfig) -> Result<Sentence> {
    let mut rng = cfg.seed.rng_for(ordinal as u64);
    let text = s.as_str();
    let ranges = token_ranges(text);
    if ranges.is_empty() || ranges.len() <= cfg.min_tokens_kept {
        return Ok(s.clone());
    }
    let mut drop: Vec<bool> = (0..ranges.len()).map(|_| rng.random_bool(cfg.rate)).collect();
    let mut kept = drop.iter().filter(|&&d| !d).count();
    // Keep the floor by retaining the rightmost dropped candidates.
    for d in drop.iter_mut().rev() {
        if kept >= cfg.min_tokens_kept {
            break;
        }
        if *d {
            *d = false;
            kept += 1;
        }
    }

    // Rebuild: each kept token carries the separator that originally
    // followed it, except the last kept token, which takes the original
    // trailing whitespace instead.
    let kept_indices: Vec<usize> = (0..ranges.len()).filter(|&i| !drop[i]).collect();
    let mut out = String::with_capacity(text.len());
    out.push_str(&text[..ranges[0].0]);
    for (pos, &i) in kept_indices.iter().enumerate() {
        let (start, end) = ranges[i];
        out.push_str(&text[start..end]);
        if pos + 1 < kept_indices.len() {
            out.push_str(&text[end..ranges[i + 1].0]);
        }
    }
    out.push_str(&text[ranges[ranges.len() - 1].1..]);
    Sentence::new(out)
}

fn map_source(
    corpus: &ParallelCorpus,
    cfg: &TokenAugmentConfig,
    f: fn(&Sentence, usize, &TokenAugmentConfig) -> Result<Sentence>,
) -> Result<ParallelCorpus> {
    cfg.validate()?;
    let mapped: Vec<Sentence> = corpus
        .source()
        .par_iter()
        .enumerate()
        .map(|(i, s)| f(s, i, cfg))
        .collect::<Result<_>>()?;
    corpus.with_source(mapped)
}

/// Replaces each source token independently with probability `cfg.rate` by a
/// token drawn uniformly from `cfg.vocab`. Token counts are preserved
/// exactly.
pub fn switchout(corpus: &ParallelCorpus, cfg: &TokenAugmentConfig) -> Result<ParallelCorpus> {
    if cfg.vocab.is_empty() {
        return Err(ForgeError::InvalidConfig(
            "switchout requires a non-empty vocabulary".into(),
        ));
    }
    map_source(corpus, cfg, switchout_sentence)
}

/// Deletes each source token independently with probability `cfg.rate`,
/// never dropping a sentence below `cfg.min_tokens_kept` tokens.
pub fn token_dropout(corpus: &ParallelCorpus, cfg: &TokenAugmentConfig) -> Result<ParallelCorpus> {
    map_source(corpus, cfg, dropout_sentence)
}

/// Dispatches on `cfg.strategy`.
pub fn augment_tokens(corpus: &ParallelCorpus, cfg: &TokenAugmentConfig) -> Result<ParallelCorpus> {
    match cfg.strategy {
        TokenStrategy::SwitchOut => switchout(corpus, cfg),
        TokenStrategy::Dropout => token_dropout(corpus, cfg),
    }
}
