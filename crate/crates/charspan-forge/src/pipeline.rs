//! Manifest-driven pipeline: ingest a parallel corpus, optionally script
//! convert, noise the source, learn or load a subword vocabulary, and emit
//! training-ready files with full audit statistics.
//!
//! A run writes, under `output_dir`:
//!
//! | file | when |
//! |---|---|
//! | `train.src` | always — the (noised) source corpus |
//! | `train.tgt` | when the input has a target side (byte-identical to it) |
//! | `clean.src` | `keep_clean: true` — the pre-noise source |
//! | `bpe.merges`, `bpe.vocab` | always |
//! | `train.bpe.src` | `dropout_epochs == 1` |
//! | `train.bpe.ep<K>.src` | one per epoch when `dropout_epochs > 1` |
//! | `train.bpe.tgt` | when the input has a target side |
//! | `plan.trace` | when `noise` is `charspan` or `unigram` |
//! | `stats.json` | always |
//! | `manifest.echo.json` | always — the manifest with resolved defaults |
//!
//! All artifacts are written to a temporary sibling directory first and the
//! directory is renamed into place only when every stage succeeded, so an
//! interrupted run never leaves a half-written tree. Everything descends
//! deterministically from `master_seed`, independent of worker thread
//! count.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alphabet::CandidateAlphabet;
use crate::bpe::{learn_bpe, BpeModel};
use crate::corpus::{CharUnit, ParallelCorpus, Sentence};
use crate::error::{ForgeError, Result};
use crate::metrics::{mean_lcsr, SimilarityMatrix};
use crate::noise::{
    apply_events_in, charspan_augment, default_min_sentence_len, unigram_char_noise, NoiseConfig,
    NoiseMode, NoiseOp, OpWeights, OverlapPolicy, SentencePlan, SpanPayload,
};
use crate::script::{convert_corpus, ConversionReport, Script};
use crate::seed::SeedSpec;
use crate::token_augment::{augment_tokens, TokenAugmentConfig, TokenLevel, TokenStrategy};

pub const FILE_TRAIN_SRC: &str = "train.src";
pub const FILE_TRAIN_TGT: &str = "train.tgt";
pub const FILE_CLEAN_SRC: &str = "clean.src";
pub const FILE_MERGES: &str = "bpe.merges";
pub const FILE_VOCAB: &str = "bpe.vocab";
pub const FILE_SEG_SRC: &str = "train.bpe.src";
pub const FILE_SEG_TGT: &str = "train.bpe.tgt";
pub const FILE_TRACE: &str = "plan.trace";
pub const FILE_STATS: &str = "stats.json";
pub const FILE_ECHO: &str = "manifest.echo.json";

/// Noise stream label: the noising stage draws from
/// `SeedSpec::new(master_seed, LABEL_NOISE)`.
pub const LABEL_NOISE: &str = "noise";
/// Segmentation stream label: epoch `k` draws from
/// `SeedSpec::new(master_seed, LABEL_SEGMENT).derived("ep<k>")`. Running the
/// stages manually through the library with these labels reproduces a
/// pipeline run's artifacts byte for byte.
pub const LABEL_SEGMENT: &str = "segment";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub source: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<PathBuf>,
}

/// The `noise` manifest field: `"none"`, or one augmenter keyed by kind,
/// e.g. `{"charspan": {...}}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    #[default]
    None,
    Charspan(CharNoiseSpec),
    Unigram(CharNoiseSpec),
    Switchout(TokenAugmentSpec),
    TokenDropout(TokenAugmentSpec),
}

impl NoiseKind {
    pub fn is_none(&self) -> bool {
        matches!(self, NoiseKind::None)
    }

    /// True for the span and unigram character noisers, which produce plan
    /// traces.
    pub fn is_char_level(&self) -> bool {
        matches!(self, NoiseKind::Charspan(_) | NoiseKind::Unigram(_))
    }
}

/// Alphabet reference: a built-in name or `{"file": "path"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphabetSpec {
    Named(String),
    File { file: PathBuf },
}

impl AlphabetSpec {
    fn resolve(&self) -> Result<CandidateAlphabet> {
        match self {
            AlphabetSpec::Named(name) => CandidateAlphabet::resolve(name),
            AlphabetSpec::File { file } => CandidateAlphabet::from_file(file),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharNoiseSpec {
    #[serde(default = "defaults::percent_min")]
    pub percent_min: f64,
    #[serde(default = "defaults::percent_max")]
    pub percent_max: f64,
    #[serde(default = "defaults::max_span")]
    pub max_span: usize,
    /// Operation weights; when omitted, charspan uses delete/replace at 0.5
    /// each and unigram uses all three at 1/3.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operations: Option<OpWeights>,
    pub alphabet: AlphabetSpec,
    #[serde(default)]
    pub mode: NoiseMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_sentence_len: Option<usize>,
    #[serde(default)]
    pub overlap: OverlapPolicy,
    #[serde(default)]
    pub payload: SpanPayload,
}

impl CharNoiseSpec {
    fn to_config(&self, unigram: bool, seed: SeedSpec, unit: CharUnit) -> Result<NoiseConfig> {
        let max_span = if unigram { 1 } else { self.max_span };
        let weights = self.operations.unwrap_or(if unigram {
            OpWeights::uniform_all()
        } else {
            OpWeights::delete_replace()
        });
        let cfg = NoiseConfig {
            percent_min: self.percent_min,
            percent_max: self.percent_max,
            max_span,
            weights,
            alphabet: self.alphabet.resolve()?,
            mode: self.mode,
            min_sentence_len: self
                .min_sentence_len
                .unwrap_or_else(|| default_min_sentence_len(max_span)),
            overlap: self.overlap,
            payload: self.payload,
            char_unit: unit,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolved(&self, unigram: bool) -> CharNoiseSpec {
        let max_span = if unigram { 1 } else { self.max_span };
        CharNoiseSpec {
            max_span,
            operations: Some(self.operations.unwrap_or(if unigram {
                OpWeights::uniform_all()
            } else {
                OpWeights::delete_replace()
            })),
            min_sentence_len: Some(
                self.min_sentence_len
                    .unwrap_or_else(|| default_min_sentence_len(max_span)),
            ),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenAugmentSpec {
    #[serde(default = "defaults::token_rate")]
    pub rate: f64,
    #[serde(default)]
    pub level: TokenLevel,
    /// Replacement pool, one token per line; required for switchout.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocab_file: Option<PathBuf>,
    #[serde(default = "defaults::min_tokens_kept")]
    pub min_tokens_kept: usize,
}

impl TokenAugmentSpec {
    fn to_config(&self, strategy: TokenStrategy, seed: SeedSpec) -> Result<TokenAugmentConfig> {
        let vocab = match (&self.vocab_file, strategy) {
            (Some(path), _) => crate::corpus::read_sentences(path)?
                .into_iter()
                .map(Sentence::into_string)
                .filter(|t| !t.is_empty())
                .collect(),
            (None, TokenStrategy::SwitchOut) => {
                return Err(ForgeError::InvalidConfig(
                    "switchout noise requires `vocab_file`".into(),
                ))
            }
            (None, TokenStrategy::Dropout) => Vec::new(),
        };
        let cfg = TokenAugmentConfig {
            rate: self.rate,
            level: self.level,
            strategy,
            vocab,
            seed,
            min_tokens_kept: self.min_tokens_kept,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Where the subword vocabulary comes from: learned on the noised corpus,
/// learned on the clean corpus, or loaded from an external merges file.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VocabSource {
    Noisy,
    #[default]
    Clean,
    External(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptConversion {
    pub from: Script,
    pub to: Script,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineManifest {
    pub input: InputSpec,
    #[serde(default)]
    pub noise: NoiseKind,
    #[serde(default)]
    pub vocab_source: VocabSource,
    #[serde(default = "defaults::vocab_size")]
    pub vocab_size: usize,
    #[serde(default = "defaults::min_pair_freq")]
    pub min_pair_freq: u64,
    #[serde(default)]
    pub segmentation_dropout: f64,
    #[serde(default = "defaults::dropout_epochs")]
    pub dropout_epochs: usize,
    #[serde(default)]
    pub keep_clean: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script_conversion: Option<ScriptConversion>,
    /// Apply NFC normalization to both sides before any processing.
    #[serde(default)]
    pub nfc: bool,
    #[serde(default)]
    pub char_unit: CharUnit,
    pub output_dir: PathBuf,
    pub master_seed: u64,
}

mod defaults {
    pub fn percent_min() -> f64 {
        9.0
    }
    pub fn percent_max() -> f64 {
        11.0
    }
    pub fn max_span() -> usize {
        3
    }
    pub fn token_rate() -> f64 {
        0.1
    }
    pub fn min_tokens_kept() -> usize {
        1
    }
    pub fn vocab_size() -> usize {
        16_000
    }
    pub fn min_pair_freq() -> u64 {
        2
    }
    pub fn dropout_epochs() -> usize {
        1
    }
}

impl PipelineManifest {
    /// Parses a JSON manifest; unknown keys are errors.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ForgeError::io(path, e))?;
        let manifest: PipelineManifest = serde_json::from_str(&text)
            .map_err(|e| ForgeError::InvalidConfig(format!("{}: {e}", path.display())))?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<()> {
        if matches!(self.vocab_source, VocabSource::Noisy) && self.noise.is_none() {
            return Err(ForgeError::InvalidConfig(
                "vocab_source=noisy requires noise to be configured".into(),
            ));
        }
        if self.dropout_epochs < 1 {
            return Err(ForgeError::InvalidConfig("dropout_epochs must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.segmentation_dropout) || !self.segmentation_dropout.is_finite()
        {
            return Err(ForgeError::InvalidConfig(format!(
                "segmentation_dropout must lie in [0, 1] (got {})",
                self.segmentation_dropout
            )));
        }
        if self.vocab_size == 0 {
            return Err(ForgeError::InvalidConfig("vocab_size must be >= 1".into()));
        }
        // Build the noise configuration eagerly so bad settings surface
        // before any corpus work starts.
        self.noise_config()?;
        Ok(())
    }

    fn seed(&self, label: &str) -> SeedSpec {
        SeedSpec::new(self.master_seed, label)
    }

    fn noise_config(&self) -> Result<Option<ResolvedNoise>> {
        let seed = self.seed(LABEL_NOISE);
        match &self.noise {
            NoiseKind::None => Ok(None),
            NoiseKind::Charspan(spec) => Ok(Some(ResolvedNoise::Char {
                cfg: spec.to_config(false, seed, self.char_unit)?,
                unigram: false,
            })),
            NoiseKind::Unigram(spec) => Ok(Some(ResolvedNoise::Char {
                cfg: spec.to_config(true, seed, self.char_unit)?,
                unigram: true,
            })),
            NoiseKind::Switchout(spec) => Ok(Some(ResolvedNoise::Token(
                spec.to_config(TokenStrategy::SwitchOut, seed)?,
            ))),
            NoiseKind::TokenDropout(spec) => Ok(Some(ResolvedNoise::Token(
                spec.to_config(TokenStrategy::Dropout, seed)?,
            ))),
        }
    }

    /// The manifest with every optional knob filled in, as echoed to
    /// `manifest.echo.json`.
    pub fn resolved(&self) -> PipelineManifest {
        let noise = match &self.noise {
            NoiseKind::Charspan(spec) => NoiseKind::Charspan(spec.resolved(false)),
            NoiseKind::Unigram(spec) => NoiseKind::Unigram(spec.resolved(true)),
            other => other.clone(),
        };
        PipelineManifest {
            noise,
            ..self.clone()
        }
    }
}

enum ResolvedNoise {
    Char { cfg: NoiseConfig, unigram: bool },
    Token(TokenAugmentConfig),
}

/// Per-run audit numbers for character-level noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationReport {
    pub sentences_processed: usize,
    pub sentences_skipped_short: usize,
    /// Source-side character units before noising.
    pub total_chars: u64,
    /// Units removed or rewritten: the span lengths of delete and replace
    /// events.
    pub affected_chars: u64,
    pub events_delete: u64,
    pub events_replace: u64,
    pub events_insert: u64,
    /// Realized span-length histogram; index `k` counts events of length
    /// `k + 1`.
    pub span_size_counts: Vec<u64>,
    /// `100 * affected_chars / total_chars`.
    pub realized_mean_percent: f64,
    /// Mean per-line LCSR between the original and noised source.
    pub corpus_lcsr: f64,
}

/// Computes the audit report, first checking that the plans actually turn
/// `original` into `noised`.
pub fn stats(
    original: &ParallelCorpus,
    noised: &ParallelCorpus,
    plans: &[SentencePlan],
    unit: CharUnit,
) -> Result<AugmentationReport> {
    if original.len() != noised.len() {
        return Err(ForgeError::LengthMismatch {
            left: original.len(),
            right: noised.len(),
        });
    }
    if plans.len() != original.len() {
        return Err(ForgeError::InconsistentTrace(format!(
            "{} plans for a corpus of {} sentences",
            plans.len(),
            original.len()
        )));
    }

    let replayed: Vec<Sentence> = original
        .source()
        .par_iter()
        .zip(plans.par_iter())
        .map(|(s, plan)| apply_events_in(s, &plan.events, unit))
        .collect::<Result<_>>()
        .map_err(|e| ForgeError::InconsistentTrace(e.to_string()))?;
    for (i, (replay, actual)) in replayed.iter().zip(noised.source()).enumerate() {
        if replay != actual {
            return Err(ForgeError::InconsistentTrace(format!(
                "replaying the plan for sentence {i} does not reproduce the noised corpus"
            )));
        }
    }

    let mut report = AugmentationReport {
        sentences_processed: 0,
        sentences_skipped_short: 0,
        total_chars: 0,
        affected_chars: 0,
        events_delete: 0,
        events_replace: 0,
        events_insert: 0,
        span_size_counts: Vec::new(),
        realized_mean_percent: 0.0,
        corpus_lcsr: 1.0,
    };
    for (sentence, plan) in original.source().iter().zip(plans) {
        report.total_chars += sentence.len_in(unit) as u64;
        if plan.skipped_short {
            report.sentences_skipped_short += 1;
        } else {
            report.sentences_processed += 1;
        }
        for event in &plan.events {
            match event.op {
                NoiseOp::Delete => report.events_delete += 1,
                NoiseOp::Replace => report.events_replace += 1,
                NoiseOp::Insert => report.events_insert += 1,
            }
            if event.op != NoiseOp::Insert {
                report.affected_chars += event.span_len as u64;
            }
            if report.span_size_counts.len() < event.span_len {
                report.span_size_counts.resize(event.span_len, 0);
            }
            report.span_size_counts[event.span_len - 1] += 1;
        }
    }
    if report.total_chars > 0 {
        report.realized_mean_percent =
            100.0 * report.affected_chars as f64 / report.total_chars as f64;
    }
    if !original.is_empty() {
        report.corpus_lcsr = mean_lcsr(original.source(), noised.source())?;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub sentences: usize,
    pub source_chars: u64,
    pub target_chars: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptConversionStats {
    pub from: Script,
    pub to: Script,
    #[serde(flatten)]
    pub report: ConversionReport,
}

/// Contents of `stats.json`. Field order is fixed, so identical runs emit
/// identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub corpus: CorpusStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script_conversion: Option<ScriptConversionStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub augmentation: Option<AugmentationReport>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    /// Artifact file names, in the order they were written.
    pub artifacts: Vec<String>,
    pub stats: RunStats,
}

#[derive(Serialize)]
struct ManifestEcho<'a> {
    version: &'a str,
    manifest: PipelineManifest,
}

/// Runs a manifest end to end. `threads` bounds the rayon pool used for
/// per-sentence work; `None` uses the global default. Output is identical
/// for any thread count.
pub fn run_manifest(manifest: &PipelineManifest, threads: Option<usize>) -> Result<RunSummary> {
    match threads {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| ForgeError::Internal(format!("thread pool: {e}")))?;
            pool.install(|| run_inner(manifest))
        }
        _ => run_inner(manifest),
    }
}

fn run_inner(manifest: &PipelineManifest) -> Result<RunSummary> {
    manifest.validate()?;
    let out_dir = &manifest.output_dir;
    if out_dir.exists() {
        return Err(ForgeError::InvalidConfig(format!(
            "output directory {} already exists",
            out_dir.display()
        )));
    }
    let parent = match out_dir.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&parent).map_err(|e| ForgeError::io(&parent, e))?;
    let staging = tempfile::Builder::new()
        .prefix(".charspan-forge.")
        .tempdir_in(&parent)
        .map_err(|e| ForgeError::io(&parent, e))?;

    let mut artifacts: Vec<String> = Vec::new();

    // load
    let corpus = ParallelCorpus::load(&manifest.input.source, manifest.input.target.as_deref())
        .map_err(ForgeError::stage("load"))?;
    let corpus = if manifest.nfc { corpus.nfc() } else { corpus };

    // convert-script
    let (clean, conversion_stats) = match &manifest.script_conversion {
        Some(sc) => {
            let (converted, report) = convert_corpus(&corpus, sc.from, sc.to)
                .map_err(ForgeError::stage("convert-script"))?;
            (
                converted,
                Some(ScriptConversionStats {
                    from: sc.from,
                    to: sc.to,
                    report,
                }),
            )
        }
        None => (corpus, None),
    };

    // augment
    let resolved_noise = manifest.noise_config().map_err(ForgeError::stage("augment"))?;
    let (noised, plans): (ParallelCorpus, Option<Vec<SentencePlan>>) = match &resolved_noise {
        None => (clean.clone(), None),
        Some(ResolvedNoise::Char { cfg, unigram }) => {
            let (noised, plans) = if *unigram {
                unigram_char_noise(&clean, cfg)
            } else {
                charspan_augment(&clean, cfg)
            }
            .map_err(ForgeError::stage("augment"))?;
            (noised, Some(plans))
        }
        Some(ResolvedNoise::Token(cfg)) => (
            augment_tokens(&clean, cfg).map_err(ForgeError::stage("augment"))?,
            None,
        ),
    };

    // stats for char-level noise
    let augmentation = match &plans {
        Some(plans) => Some(
            stats(&clean, &noised, plans, manifest.char_unit)
                .map_err(ForgeError::stage("stats"))?,
        ),
        None => None,
    };

    // learn-vocab
    let model = match &manifest.vocab_source {
        VocabSource::Noisy => learn_bpe(&noised, manifest.vocab_size, manifest.min_pair_freq)
            .map_err(ForgeError::stage("learn-vocab"))?,
        VocabSource::Clean => learn_bpe(&clean, manifest.vocab_size, manifest.min_pair_freq)
            .map_err(ForgeError::stage("learn-vocab"))?,
        VocabSource::External(path) => {
            let mut model = BpeModel::load_merges(path).map_err(ForgeError::stage("learn-vocab"))?;
            model.recount(&noised);
            model
        }
    };

    // segment
    let segment_corpus = |sentences: &[Sentence], epoch: Option<usize>| -> Result<Vec<String>> {
        let dropout = manifest.segmentation_dropout;
        match epoch {
            Some(k) if dropout > 0.0 => {
                let seed = SeedSpec::new(manifest.master_seed, LABEL_SEGMENT)
                    .derived(&format!("ep{k}"));
                sentences
                    .par_iter()
                    .enumerate()
                    .map(|(i, s)| {
                        model
                            .segment_stochastic(s, dropout, seed.seed_for(i as u64))
                            .map(|seg| seg.tokens.join(" "))
                    })
                    .collect()
            }
            _ => Ok(sentences
                .par_iter()
                .map(|s| model.segment(s).tokens.join(" "))
                .collect()),
        }
    };
    let mut segmented_sources: Vec<(String, Vec<String>)> = Vec::new();
    if manifest.dropout_epochs == 1 {
        let lines = segment_corpus(noised.source(), Some(1)).map_err(ForgeError::stage("segment"))?;
        segmented_sources.push((FILE_SEG_SRC.to_string(), lines));
    } else {
        for k in 1..=manifest.dropout_epochs {
            let lines =
                segment_corpus(noised.source(), Some(k)).map_err(ForgeError::stage("segment"))?;
            segmented_sources.push((format!("train.bpe.ep{k}.src"), lines));
        }
    }
    let segmented_target: Option<Vec<String>> = if noised.has_target() {
        Some(segment_corpus(noised.target(), None).map_err(ForgeError::stage("segment"))?)
    } else {
        None
    };

    let run_stats = RunStats {
        corpus: CorpusStats {
            sentences: clean.len(),
            source_chars: clean
                .source()
                .iter()
                .map(|s| s.len_in(manifest.char_unit) as u64)
                .sum(),
            target_chars: clean
                .target()
                .iter()
                .map(|s| s.len_in(manifest.char_unit) as u64)
                .sum(),
        },
        script_conversion: conversion_stats,
        augmentation,
    };

    // write
    let write_all = || -> Result<Vec<String>> {
        let mut written = Vec::new();
        let mut emit = |name: &str| {
            written.push(name.to_string());
            staging.path().join(name)
        };

        crate::corpus::write_sentences(&emit(FILE_TRAIN_SRC), noised.source())?;
        if noised.has_target() {
            crate::corpus::write_sentences(&emit(FILE_TRAIN_TGT), noised.target())?;
        }
        if manifest.keep_clean {
            crate::corpus::write_sentences(&emit(FILE_CLEAN_SRC), clean.source())?;
        }
        model.save(&emit(FILE_MERGES), &emit(FILE_VOCAB))?;
        for (name, lines) in &segmented_sources {
            write_lines(&emit(name), lines)?;
        }
        if let Some(lines) = &segmented_target {
            write_lines(&emit(FILE_SEG_TGT), lines)?;
        }
        if let Some(plans) = &plans {
            crate::noise::write_trace_file(&emit(FILE_TRACE), plans)?;
        }
        write_json(&emit(FILE_STATS), &run_stats)?;
        let echo = ManifestEcho {
            version: env!("CARGO_PKG_VERSION"),
            manifest: manifest.resolved(),
        };
        write_json(&emit(FILE_ECHO), &echo)?;
        Ok(written)
    };
    artifacts.extend(write_all().map_err(ForgeError::stage("write"))?);

    // promote
    let staged_path = staging.keep();
    std::fs::rename(&staged_path, out_dir).map_err(|e| {
        let _ = std::fs::remove_dir_all(&staged_path);
        ForgeError::io(out_dir, e)
    })?;

    Ok(RunSummary {
        output_dir: out_dir.clone(),
        artifacts,
        stats: run_stats,
    })
}

fn write_lines(path: &Path, lines: &[String]) -> Result<()> {
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for line in lines {
        out.push_str(line);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| ForgeError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| ForgeError::Internal(format!("serialize {}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| ForgeError::io(path, e))
}

/// Writes a similarity matrix as TSV, plus an optional self-contained SVG
/// heatmap.
///
/// The SVG colour ramp interpolates linearly from white at 0.0 to
/// `#08306b` at 1.0; each cell is a `<rect class="cell">` with its value
/// printed to two decimals.
pub fn emit_heatmap(
    matrix: &SimilarityMatrix,
    tsv_path: &Path,
    svg_path: Option<&Path>,
) -> Result<()> {
    std::fs::write(tsv_path, matrix.to_tsv()).map_err(|e| ForgeError::io(tsv_path, e))?;
    if let Some(svg_path) = svg_path {
        std::fs::write(svg_path, heatmap_svg(matrix)).map_err(|e| ForgeError::io(svg_path, e))?;
    }
    Ok(())
}

fn ramp_color(v: f64) -> String {
    let v = v.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * v).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(255.0, 8.0), lerp(255.0, 48.0), lerp(255.0, 107.0))
}

/// Renders an n-by-n heatmap with row/column labels and numeric cell
/// labels.
pub fn heatmap_svg(matrix: &SimilarityMatrix) -> String {
    const CELL: usize = 72;
    const MARGIN: usize = 96;
    let n = matrix.len();
    let size = MARGIN + n * CELL + 8;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" \
         font-family=\"sans-serif\" font-size=\"13\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{size}\" height=\"{size}\" fill=\"white\"/>\n"
    ));
    for (j, label) in matrix.labels.iter().enumerate() {
        let x = MARGIN + j * CELL + CELL / 2;
        svg.push_str(&format!(
            "  <text x=\"{x}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            MARGIN - 10,
            xml_escape(label)
        ));
    }
    for (i, label) in matrix.labels.iter().enumerate() {
        let y = MARGIN + i * CELL + CELL / 2 + 5;
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{y}\" text-anchor=\"end\">{}</text>\n",
            MARGIN - 10,
            xml_escape(label)
        ));
    }
    for (i, row) in matrix.values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let x = MARGIN + j * CELL;
            let y = MARGIN + i * CELL;
            svg.push_str(&format!(
                "  <rect class=\"cell\" x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" \
                 fill=\"{}\" stroke=\"#333\"/>\n",
                ramp_color(v)
            ));
            let text_fill = if v > 0.6 { "#ffffff" } else { "#1a1a1a" };
            svg.push_str(&format!(
                "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"{text_fill}\">{v:.2}</text>\n",
                x + CELL / 2,
                y + CELL / 2 + 5,
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::write_sentences;
    use tempfile::tempdir;

    fn s(text: &str) -> Sentence {
        Sentence::new(text).unwrap()
    }

    fn write_corpus(dir: &Path, n: usize) -> (PathBuf, PathBuf) {
        let src = dir.join("in.src");
        let tgt = dir.join("in.tgt");
        let source: Vec<Sentence> = (0..n)
            .map(|i| s(&format!("source sentence number {i} with some extra words")))
            .collect();
        let target: Vec<Sentence> = (0..n)
            .map(|i| s(&format!("target sentence number {i} kept verbatim")))
            .collect();
        write_sentences(&src, &source).unwrap();
        write_sentences(&tgt, &target).unwrap();
        (src, tgt)
    }

    fn minimal_manifest(dir: &Path) -> PipelineManifest {
        let (src, tgt) = write_corpus(dir, 20);
        PipelineManifest {
            input: InputSpec {
                source: src,
                target: Some(tgt),
            },
            noise: NoiseKind::None,
            vocab_source: VocabSource::Clean,
            vocab_size: 80,
            min_pair_freq: 1,
            segmentation_dropout: 0.0,
            dropout_epochs: 1,
            keep_clean: false,
            script_conversion: None,
            nfc: false,
            char_unit: CharUnit::CodePoint,
            output_dir: dir.join("out"),
            master_seed: 7,
        }
    }

    #[test]
    fn minimal_run_emits_documented_artifacts() {
        let dir = tempdir().unwrap();
        let manifest = minimal_manifest(dir.path());
        let summary = run_manifest(&manifest, None).unwrap();
        let mut names: Vec<String> = std::fs::read_dir(&manifest.output_dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        let mut expected = vec![
            FILE_TRAIN_SRC,
            FILE_TRAIN_TGT,
            FILE_MERGES,
            FILE_VOCAB,
            FILE_SEG_SRC,
            FILE_SEG_TGT,
            FILE_STATS,
            FILE_ECHO,
        ];
        expected.sort_unstable();
        assert_eq!(names, expected);
        assert_eq!(summary.stats.corpus.sentences, 20);
    }

    #[test]
    fn noisy_vocab_without_noise_fails_before_any_work() {
        let dir = tempdir().unwrap();
        let mut manifest = minimal_manifest(dir.path());
        manifest.vocab_source = VocabSource::Noisy;
        let err = run_manifest(&manifest, None).unwrap_err();
        assert!(matches!(err, ForgeError::InvalidConfig(_)), "{err}");
        assert!(!manifest.output_dir.exists());
    }

    #[test]
    fn existing_output_dir_is_rejected() {
        let dir = tempdir().unwrap();
        let manifest = minimal_manifest(dir.path());
        std::fs::create_dir_all(&manifest.output_dir).unwrap();
        assert!(run_manifest(&manifest, None).is_err());
    }

    #[test]
    fn unknown_manifest_keys_are_errors() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("m.json");
        std::fs::write(
            &path,
            r#"{"input": {"source": "x"}, "output_dir": "y", "master_seed": 1, "bogus": 2}"#,
        )
        .unwrap();
        let err = PipelineManifest::from_file(&path).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn noise_field_accepts_none_keyword_and_tagged_specs() {
        let json = r#"{
            "input": {"source": "a", "target": "b"},
            "noise": "none",
            "output_dir": "o",
            "master_seed": 3
        }"#;
        let manifest: PipelineManifest = serde_json::from_str(json).unwrap();
        assert!(manifest.noise.is_none());

        let json = r#"{
            "input": {"source": "a"},
            "noise": {"charspan": {"alphabet": "latin-basic"}},
            "output_dir": "o",
            "master_seed": 3
        }"#;
        let manifest: PipelineManifest = serde_json::from_str(json).unwrap();
        assert!(manifest.noise.is_char_level());
        match &manifest.noise {
            NoiseKind::Charspan(spec) => {
                assert_eq!(spec.percent_min, 9.0);
                assert_eq!(spec.percent_max, 11.0);
                assert_eq!(spec.max_span, 3);
            }
            other => panic!("unexpected noise kind: {other:?}"),
        }
    }

    #[test]
    fn stats_on_identity_plans() {
        let corpus = ParallelCorpus::monolingual("t", vec![s("abcdef"), s("ghijkl")]);
        let plans: Vec<SentencePlan> = crate::noise::plans_from_events(vec![], 2).unwrap();
        let report = stats(&corpus, &corpus, &plans, CharUnit::CodePoint).unwrap();
        assert_eq!(report.affected_chars, 0);
        assert_eq!(report.corpus_lcsr, 1.0);
        assert_eq!(report.realized_mean_percent, 0.0);
    }

    #[test]
    fn stats_single_delete_event_arithmetic() {
        use crate::noise::{NoiseEvent, NoiseOp};
        let original = ParallelCorpus::monolingual(
            "t",
            vec![s("abcdefghijklmnopqrstuvwxyz0123")], // 30 chars
        );
        let event = NoiseEvent {
            ordinal: 0,
            start: 5,
            span_len: 3,
            sampled_span: 3,
            op: NoiseOp::Delete,
            replacement: None,
        };
        let noised_sentence = apply_events_in(&original.source()[0], std::slice::from_ref(&event), CharUnit::CodePoint).unwrap();
        let noised = ParallelCorpus::monolingual("t", vec![noised_sentence]);
        let plans = crate::noise::plans_from_events(vec![event], 1).unwrap();
        let report = stats(&original, &noised, &plans, CharUnit::CodePoint).unwrap();
        assert_eq!(report.affected_chars, 3);
        assert!((report.realized_mean_percent - 10.0).abs() < 1e-12);
        assert_eq!(report.span_size_counts, vec![0, 0, 1]);
    }

    #[test]
    fn stats_rejects_inconsistent_plans() {
        let original = ParallelCorpus::monolingual("t", vec![s("abcdef")]);
        let noised = ParallelCorpus::monolingual("t", vec![s("abc")]);
        let plans = crate::noise::plans_from_events(vec![], 1).unwrap();
        assert!(matches!(
            stats(&original, &noised, &plans, CharUnit::CodePoint),
            Err(ForgeError::InconsistentTrace(_))
        ));
    }

    #[test]
    fn heatmap_svg_has_one_rect_per_cell() {
        let m = SimilarityMatrix::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![1.0, 0.5, 0.2],
                vec![0.5, 1.0, 0.4],
                vec![0.2, 0.4, 1.0],
            ],
        )
        .unwrap();
        let svg = heatmap_svg(&m);
        assert_eq!(svg.matches("class=\"cell\"").count(), 9);
        assert!(svg.contains("0.50"));
    }

    #[test]
    fn heatmap_tsv_roundtrip_via_files() {
        let dir = tempdir().unwrap();
        let m = SimilarityMatrix::new(
            vec!["x".into(), "y".into()],
            vec![vec![1.0, 0.25], vec![0.25, 1.0]],
        )
        .unwrap();
        let tsv = dir.path().join("m.tsv");
        let svg = dir.path().join("m.svg");
        emit_heatmap(&m, &tsv, Some(&svg)).unwrap();
        let reloaded = SimilarityMatrix::from_tsv(&std::fs::read_to_string(&tsv).unwrap()).unwrap();
        assert_eq!(reloaded, m);
        assert!(svg.exists());
    }
}
