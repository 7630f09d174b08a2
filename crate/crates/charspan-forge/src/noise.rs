//! Character-span noise: a pure planner that samples edit events and a pure
//! applier that realizes them.
//!
//! Two planning modes exist because they have genuinely different semantics:
//!
//! * **Budget** (default): each sentence samples its own noise percentage
//!   from `[percent_min, percent_max]`, then spans with sizes uniform in
//!   `{1..max_span}` are placed at uniformly chosen non-overlapping sites
//!   until the character budget `round(percent/100 * len)` is exhausted; the
//!   final span is clipped to the remaining budget.
//! * **Literal**: the noise percentage is sampled once per corpus, the site
//!   count per sentence is fixed at `max_span * floor(percent / max_span)`,
//!   eligible sites exclude `ceil(max_span/2)` indices at the sentence edges,
//!   and each span extends symmetrically around its site by
//!   `floor((size-1)/2)` on both sides. That centering arithmetic collapses
//!   even sizes (a sampled size of 2 realizes a 1-character extent) and is
//!   kept as-is; budget mode realizes the sampled size directly.
//!
//! All randomness comes from per-sentence substreams (see [`crate::seed`]),
//! so planning is independent of processing order and thread count. Within a
//! sentence stream the draw order is fixed and documented on [`plan_noise`].

use std::borrow::Cow;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alphabet::CandidateAlphabet;
use crate::corpus::{split_units, CharUnit, ParallelCorpus, Sentence};
use crate::error::{ForgeError, Result};
use crate::seed::SeedSpec;

/// Edit operation of a noise event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseOp {
    Delete,
    Replace,
    Insert,
}

impl NoiseOp {
    pub fn as_str(&self) -> &'static str {
        match self {
            NoiseOp::Delete => "delete",
            NoiseOp::Replace => "replace",
            NoiseOp::Insert => "insert",
        }
    }

    pub fn parse(s: &str) -> Option<NoiseOp> {
        match s {
            "delete" => Some(NoiseOp::Delete),
            "replace" => Some(NoiseOp::Replace),
            "insert" => Some(NoiseOp::Insert),
            _ => None,
        }
    }
}

impl fmt::Display for NoiseOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Relative weights of the noising operations. Weights must be non-negative
/// and sum to 1; operations with weight 0 are disabled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpWeights {
    #[serde(default)]
    pub delete: f64,
    #[serde(default)]
    pub replace: f64,
    #[serde(default)]
    pub insert: f64,
}

impl OpWeights {
    /// Span deletion and span replacement with equal probability.
    pub fn delete_replace() -> Self {
        OpWeights {
            delete: 0.5,
            replace: 0.5,
            insert: 0.0,
        }
    }

    /// All three operations with equal probability.
    pub fn uniform_all() -> Self {
        OpWeights {
            delete: 1.0 / 3.0,
            replace: 1.0 / 3.0,
            insert: 1.0 / 3.0,
        }
    }

    fn validate(&self) -> Result<()> {
        let ws = [self.delete, self.replace, self.insert];
        if ws.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(ForgeError::InvalidConfig(
                "operation weights must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = ws.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ForgeError::InvalidConfig(format!(
                "operation weights must sum to 1 (got {sum})"
            )));
        }
        if ws.iter().all(|w| *w == 0.0) {
            return Err(ForgeError::InvalidConfig(
                "at least one operation must have positive weight".into(),
            ));
        }
        Ok(())
    }

    /// Samples an operation; cumulative order is delete, replace, insert.
    fn sample(&self, rng: &mut ChaCha8Rng) -> NoiseOp {
        let u: f64 = rng.random();
        if u < self.delete {
            NoiseOp::Delete
        } else if u < self.delete + self.replace {
            NoiseOp::Replace
        } else {
            NoiseOp::Insert
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    #[default]
    Budget,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverlapPolicy {
    #[default]
    Forbid,
    Allow,
}

/// What replaces (or is inserted into) a span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanPayload {
    /// A single random alphabet character, whatever the span size.
    #[default]
    SingleChar,
    /// As many random alphabet characters as the realized span length.
    MatchSpanLength,
}

/// Full parameterization of the noise planner.
#[derive(Debug, Clone)]
pub struct NoiseConfig {
    /// Lower bound of the noise percentage range.
    pub percent_min: f64,
    /// Upper bound of the noise percentage range.
    pub percent_max: f64,
    /// Largest sampled span size.
    pub max_span: usize,
    pub weights: OpWeights,
    pub alphabet: CandidateAlphabet,
    pub mode: NoiseMode,
    /// Sentences shorter than this (in units) pass through unchanged.
    pub min_sentence_len: usize,
    pub overlap: OverlapPolicy,
    pub payload: SpanPayload,
    /// Unit in which positions and lengths are measured. Note that with
    /// `Grapheme` units the payload characters are still single code points,
    /// so an inserted combining mark may merge into a neighbouring cluster.
    pub char_unit: CharUnit,
    pub seed: SeedSpec,
}

/// `2 * ceil(max_span / 2) + 1`: the shortest sentence with a non-empty
/// literal-mode eligible set, used as the default pass-through threshold.
pub fn default_min_sentence_len(max_span: usize) -> usize {
    2 * max_span.div_ceil(2) + 1
}

impl NoiseConfig {
    /// Span noise defaults: 9–11% budget, spans 1–3, delete/replace at equal
    /// probability.
    pub fn charspan(alphabet: CandidateAlphabet, seed: SeedSpec) -> Self {
        NoiseConfig {
            percent_min: 9.0,
            percent_max: 11.0,
            max_span: 3,
            weights: OpWeights::delete_replace(),
            alphabet,
            mode: NoiseMode::Budget,
            min_sentence_len: default_min_sentence_len(3),
            overlap: OverlapPolicy::Forbid,
            payload: SpanPayload::SingleChar,
            char_unit: CharUnit::CodePoint,
            seed,
        }
    }

    /// Single-character noise defaults: 9–11% budget, insert/delete/replace
    /// at equal probability, spans fixed at one character.
    pub fn unigram(alphabet: CandidateAlphabet, seed: SeedSpec) -> Self {
        NoiseConfig {
            percent_min: 9.0,
            percent_max: 11.0,
            max_span: 1,
            weights: OpWeights::uniform_all(),
            alphabet,
            mode: NoiseMode::Budget,
            min_sentence_len: default_min_sentence_len(1),
            overlap: OverlapPolicy::Forbid,
            payload: SpanPayload::SingleChar,
            char_unit: CharUnit::CodePoint,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.percent_min.is_finite() || !self.percent_max.is_finite() {
            return Err(ForgeError::InvalidConfig(
                "noise percentages must be finite".into(),
            ));
        }
        if self.percent_min < 0.0 || self.percent_max > 100.0 || self.percent_min > self.percent_max
        {
            return Err(ForgeError::InvalidConfig(format!(
                "noise percentage range must satisfy 0 <= min <= max <= 100 (got [{}, {}])",
                self.percent_min, self.percent_max
            )));
        }
        if self.max_span < 1 {
            return Err(ForgeError::InvalidConfig("max_span must be >= 1".into()));
        }
        self.weights.validate()?;
        if self.mode == NoiseMode::Literal && self.weights.insert > 0.0 {
            return Err(ForgeError::InvalidConfig(
                "literal mode supports delete and replace only".into(),
            ));
        }
        if self.alphabet.is_empty() && (self.weights.replace > 0.0 || self.weights.insert > 0.0) {
            return Err(ForgeError::InvalidConfig(
                "replace/insert operations require a non-empty alphabet".into(),
            ));
        }
        Ok(())
    }

    /// Stream used for corpus-level draws in literal mode.
    fn corpus_stream(&self) -> SeedSpec {
        self.seed.derived("corpus")
    }
}

/// One planned edit, expressed in unit indices of the original sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiseEvent {
    pub ordinal: usize,
    /// 0-based start index in the original sentence.
    pub start: usize,
    /// Realized extent. Deletes and replaces remove exactly this many units;
    /// inserts always carry 1.
    pub span_len: usize,
    /// The span size sampled before budget clipping (and before literal-mode
    /// centering). Event statistics on sampled sizes use this field.
    pub sampled_span: usize,
    pub op: NoiseOp,
    /// Present iff `op` is replace or insert. A single character, except
    /// under [`SpanPayload::MatchSpanLength`].
    pub replacement: Option<String>,
}

impl NoiseEvent {
    /// Units of the original sentence reserved by this event.
    fn occupied_len(&self) -> usize {
        match self.op {
            NoiseOp::Insert => 1,
            _ => self.span_len,
        }
    }
}

/// The complete, reproducible trace of planning one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct SentencePlan {
    pub ordinal: usize,
    /// The sampled noise percentage for this sentence (corpus-wide in
    /// literal mode).
    pub percent: f64,
    /// Literal mode only: `floor(percent / max_span)`.
    pub alpha: Option<usize>,
    /// Literal mode only: requested site count `max_span * alpha`.
    pub site_count: Option<usize>,
    /// Selected site indices, in draw order.
    pub sites: Vec<usize>,
    /// True when the sentence was below `min_sentence_len` and passed
    /// through unchanged.
    pub skipped_short: bool,
    /// Events sorted by start; extents are pairwise disjoint under
    /// [`OverlapPolicy::Forbid`].
    pub events: Vec<NoiseEvent>,
}

impl SentencePlan {
    fn empty(ordinal: usize, percent: f64, skipped_short: bool) -> Self {
        SentencePlan {
            ordinal,
            percent,
            alpha: None,
            site_count: None,
            sites: Vec::new(),
            skipped_short,
            events: Vec::new(),
        }
    }

    /// Units removed or rewritten: the span lengths of delete and replace
    /// events.
    pub fn affected_units(&self) -> usize {
        self.events
            .iter()
            .filter(|e| e.op != NoiseOp::Insert)
            .map(|e| e.span_len)
            .sum()
    }
}

fn sample_percent(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

fn sample_payload(
    rng: &mut ChaCha8Rng,
    alphabet: &CandidateAlphabet,
    payload: SpanPayload,
    span_len: usize,
) -> String {
    let n = match payload {
        SpanPayload::SingleChar => 1,
        SpanPayload::MatchSpanLength => span_len.max(1),
    };
    let chars = alphabet.chars();
    (0..n)
        .map(|_| chars[rng.random_range(0..chars.len())])
        .collect()
}

/// Plans noise for one sentence.
///
/// Draw order within the sentence substream, fixed for reproducibility:
///
/// * budget mode: percentage first, then per attempt the span size, the
///   operation, the payload characters (replace/insert only), and finally
///   the site, chosen uniformly among the starts where the span fits without
///   touching an already-reserved unit. Attempts are capped at 10x the
///   character budget; if sites run out the plan simply carries fewer
///   events.
/// * literal mode: the sites are drawn first (a partial Fisher–Yates pass
///   over the eligible indices, without replacement), then each site in draw
///   order samples its span size, operation, and payload. Under
///   [`OverlapPolicy::Forbid`] a site whose extent would touch an earlier
///   accepted extent produces no event.
pub fn plan_noise(s: &Sentence, ordinal: usize, cfg: &NoiseConfig) -> Result<SentencePlan> {
    cfg.validate()?;
    let units = split_units(s.as_str(), cfg.char_unit);
    match cfg.mode {
        NoiseMode::Budget => Ok(plan_budget(units.len(), ordinal, cfg)),
        NoiseMode::Literal => Ok(plan_literal(units.len(), ordinal, cfg)),
    }
}

fn plan_budget(len: usize, ordinal: usize, cfg: &NoiseConfig) -> SentencePlan {
    let mut rng = cfg.seed.rng_for(ordinal as u64);
    let percent = sample_percent(&mut rng, cfg.percent_min, cfg.percent_max);
    if len < cfg.min_sentence_len {
        return SentencePlan::empty(ordinal, percent, true);
    }
    let budget = (percent / 100.0 * len as f64).round() as usize;
    let mut plan = SentencePlan::empty(ordinal, percent, false);
    if budget == 0 {
        return plan;
    }

    let mut occupied = vec![false; len];
    let mut remaining = budget;
    let mut free_positions = len;
    let max_attempts = budget.saturating_mul(10);
    let mut attempts = 0;

    while remaining > 0 && attempts < max_attempts && free_positions > 0 {
        attempts += 1;
        let sampled_span = rng.random_range(1..=cfg.max_span);
        let op = cfg.weights.sample(&mut rng);
        // Clip to the remaining budget; inserts always touch one position.
        let span_len = match op {
            NoiseOp::Insert => 1,
            _ => sampled_span.min(remaining),
        };
        let replacement = match op {
            NoiseOp::Delete => None,
            _ => Some(sample_payload(&mut rng, &cfg.alphabet, cfg.payload, span_len)),
        };
        let starts = free_starts(&occupied, span_len);
        if starts.is_empty() {
            continue;
        }
        let start = starts[rng.random_range(0..starts.len())];
        for slot in &mut occupied[start..start + span_len] {
            *slot = true;
        }
        free_positions -= span_len;
        remaining -= span_len;
        plan.sites.push(start);
        plan.events.push(NoiseEvent {
            ordinal,
            start,
            span_len,
            sampled_span,
            op,
            replacement,
        });
    }

    plan.events.sort_by_key(|e| e.start);
    plan
}

/// Starts where a span of `len` units fits entirely on unreserved positions.
fn free_starts(occupied: &[bool], len: usize) -> Vec<usize> {
    if len == 0 || len > occupied.len() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut used_in_window = occupied[..len].iter().filter(|&&o| o).count();
    if used_in_window == 0 {
        out.push(0);
    }
    for start in 1..=occupied.len() - len {
        used_in_window -= usize::from(occupied[start - 1]);
        used_in_window += usize::from(occupied[start + len - 1]);
        if used_in_window == 0 {
            out.push(start);
        }
    }
    out
}

fn plan_literal(len: usize, ordinal: usize, cfg: &NoiseConfig) -> SentencePlan {
    // Line-level corpus draw: the same percentage for every sentence.
    let mut corpus_rng = cfg.corpus_stream().rng_for(0);
    let percent = sample_percent(&mut corpus_rng, cfg.percent_min, cfg.percent_max);
    let alpha = (percent / cfg.max_span as f64) as usize;
    let requested = cfg.max_span * alpha;

    if len < cfg.min_sentence_len {
        let mut plan = SentencePlan::empty(ordinal, percent, true);
        plan.alpha = Some(alpha);
        plan.site_count = Some(requested);
        return plan;
    }

    let mut plan = SentencePlan::empty(ordinal, percent, false);
    plan.alpha = Some(alpha);
    plan.site_count = Some(requested);

    let margin = cfg.max_span.div_ceil(2);
    if len < 2 * margin || requested == 0 {
        return plan;
    }
    // Eligible site indices, leaving `margin` positions at each edge.
    let mut eligible: Vec<usize> = (margin..=len - margin).collect();
    let take = requested.min(eligible.len());

    let mut rng = cfg.seed.rng_for(ordinal as u64);
    // Partial Fisher-Yates: the first `take` slots become the drawn sites.
    for i in 0..take {
        let j = rng.random_range(i..eligible.len());
        eligible.swap(i, j);
    }
    plan.sites = eligible[..take].to_vec();

    let mut occupied = vec![false; len];
    for &site in &plan.sites {
        let sampled_span = rng.random_range(1..=cfg.max_span);
        let op = cfg.weights.sample(&mut rng);
        // Symmetric extent around the site; even sizes lose one unit.
        let half = (sampled_span - 1) / 2;
        let start = site - half;
        let span_len = 2 * half + 1;
        let replacement = match op {
            NoiseOp::Delete => None,
            _ => Some(sample_payload(&mut rng, &cfg.alphabet, cfg.payload, span_len)),
        };
        if cfg.overlap == OverlapPolicy::Forbid
            && occupied[start..start + span_len].iter().any(|&o| o)
        {
            continue;
        }
        for slot in &mut occupied[start..start + span_len] {
            *slot = true;
        }
        plan.events.push(NoiseEvent {
            ordinal,
            start,
            span_len,
            sampled_span,
            op,
            replacement,
        });
    }

    plan.events.sort_by_key(|e| e.start);
    plan
}

/// Applies events to a sentence, measuring positions in code points.
pub fn apply_events(s: &Sentence, events: &[NoiseEvent]) -> Result<Sentence> {
    apply_events_in(s, events, CharUnit::CodePoint)
}

/// Applies events to a sentence in the given unit.
///
/// Events must be sorted by start and non-overlapping (an insert reserves
/// its start position). Deletes remove their extent; replaces remove the
/// extent and put the payload at its start; inserts put the payload at the
/// start without removing anything. Application runs right to left so that
/// earlier indices stay valid.
pub fn apply_events_in(s: &Sentence, events: &[NoiseEvent], unit: CharUnit) -> Result<Sentence> {
    let mut units: Vec<Cow<'_, str>> = split_units(s.as_str(), unit)
        .into_iter()
        .map(Cow::Borrowed)
        .collect();
    let len = units.len();

    let mut prev_end: Option<usize> = None;
    for event in events {
        match event.op {
            NoiseOp::Insert => {
                if event.start > len {
                    return Err(ForgeError::InvalidEvent(format!(
                        "insert at {} is out of bounds for length {len}",
                        event.start
                    )));
                }
                if event.replacement.as_deref().is_none_or(str::is_empty) {
                    return Err(ForgeError::InvalidEvent(
                        "insert event is missing a replacement character".into(),
                    ));
                }
            }
            NoiseOp::Delete | NoiseOp::Replace => {
                if event.span_len == 0 || event.start + event.span_len > len {
                    return Err(ForgeError::InvalidEvent(format!(
                        "{} span [{}, {}) is out of bounds for length {len}",
                        event.op,
                        event.start,
                        event.start + event.span_len
                    )));
                }
                match event.op {
                    NoiseOp::Replace
                        if event.replacement.as_deref().is_none_or(str::is_empty) =>
                    {
                        return Err(ForgeError::InvalidEvent(
                            "replace event is missing a replacement character".into(),
                        ));
                    }
                    NoiseOp::Delete if event.replacement.is_some() => {
                        return Err(ForgeError::InvalidEvent(
                            "delete event carries a replacement character".into(),
                        ));
                    }
                    _ => {}
                }
            }
        }
        if let Some(end) = prev_end {
            if event.start < end {
                return Err(ForgeError::InvalidEvent(format!(
                    "event at {} overlaps the previous event ending at {end}",
                    event.start
                )));
            }
        }
        prev_end = Some(event.start + event.occupied_len());
    }

    for event in events.iter().rev() {
        match event.op {
            NoiseOp::Delete => {
                units.drain(event.start..event.start + event.span_len);
            }
            NoiseOp::Replace => {
                units.drain(event.start..event.start + event.span_len);
                units.insert(
                    event.start,
                    Cow::Owned(event.replacement.clone().expect("validated")),
                );
            }
            NoiseOp::Insert => {
                units.insert(
                    event.start,
                    Cow::Owned(event.replacement.clone().expect("validated")),
                );
            }
        }
    }

    Sentence::new(units.concat())
}

fn augment_corpus(
    corpus: &ParallelCorpus,
    cfg: &NoiseConfig,
) -> Result<(ParallelCorpus, Vec<SentencePlan>)> {
    cfg.validate()?;
    let plans: Vec<SentencePlan> = corpus
        .source()
        .par_iter()
        .enumerate()
        .map(|(i, s)| plan_noise(s, i, cfg))
        .collect::<Result<_>>()?;
    let noised: Vec<Sentence> = corpus
        .source()
        .par_iter()
        .zip(plans.par_iter())
        .map(|(s, plan)| apply_events_in(s, &plan.events, cfg.char_unit))
        .collect::<Result<_>>()?;
    Ok((corpus.with_source(noised)?, plans))
}

/// Replaces the source side with span-noised sentences; the target side is
/// untouched. Returns the full plan trace for auditing.
pub fn charspan_augment(
    corpus: &ParallelCorpus,
    cfg: &NoiseConfig,
) -> Result<(ParallelCorpus, Vec<SentencePlan>)> {
    augment_corpus(corpus, cfg)
}

/// The single-character noise baseline: every event touches exactly one
/// unit, and inserts add one alphabet character.
pub fn unigram_char_noise(
    corpus: &ParallelCorpus,
    cfg: &NoiseConfig,
) -> Result<(ParallelCorpus, Vec<SentencePlan>)> {
    let mut cfg = cfg.clone();
    cfg.max_span = 1;
    augment_corpus(corpus, &cfg)
}

/// Writes a plan trace: one tab-separated record per event with columns
/// `sentence_ordinal`, `start`, `span_len`, `op`, `replacement` (empty for
/// deletes).
pub fn write_trace<W: Write>(mut w: W, plans: &[SentencePlan]) -> std::io::Result<()> {
    for plan in plans {
        for e in &plan.events {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}",
                e.ordinal,
                e.start,
                e.span_len,
                e.op,
                e.replacement.as_deref().unwrap_or("")
            )?;
        }
    }
    Ok(())
}

pub fn write_trace_file(path: &Path, plans: &[SentencePlan]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| ForgeError::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_trace(&mut w, plans).map_err(|e| ForgeError::io(path, e))?;
    w.flush().map_err(|e| ForgeError::io(path, e))
}

/// Reads a plan trace back as a flat event list.
pub fn read_trace_file(path: &Path) -> Result<Vec<NoiseEvent>> {
    let file = std::fs::File::open(path).map_err(|e| ForgeError::io(path, e))?;
    let reader = std::io::BufReader::new(file);
    let mut events = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| ForgeError::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(ForgeError::MalformedLine {
                path: path.to_path_buf(),
                line: idx + 1,
                message: format!("expected 5 tab-separated fields, found {}", fields.len()),
            });
        }
        let parse_num = |s: &str, what: &str| {
            s.parse::<usize>().map_err(|_| ForgeError::MalformedLine {
                path: path.to_path_buf(),
                line: idx + 1,
                message: format!("invalid {what} `{s}`"),
            })
        };
        let ordinal = parse_num(fields[0], "sentence ordinal")?;
        let start = parse_num(fields[1], "start index")?;
        let span_len = parse_num(fields[2], "span length")?;
        let op = NoiseOp::parse(fields[3]).ok_or_else(|| ForgeError::MalformedLine {
            path: path.to_path_buf(),
            line: idx + 1,
            message: format!("unknown operation `{}`", fields[3]),
        })?;
        let replacement = if fields[4].is_empty() {
            None
        } else {
            Some(fields[4].to_string())
        };
        events.push(NoiseEvent {
            ordinal,
            start,
            span_len,
            sampled_span: span_len,
            op,
            replacement,
        });
    }
    Ok(events)
}

/// Groups a flat event list into per-sentence plans for a corpus of
/// `corpus_len` sentences. Percentages and skip flags are not recorded in
/// trace files, so they come back zeroed.
pub fn plans_from_events(events: Vec<NoiseEvent>, corpus_len: usize) -> Result<Vec<SentencePlan>> {
    let mut plans: Vec<SentencePlan> = (0..corpus_len)
        .map(|i| SentencePlan::empty(i, 0.0, false))
        .collect();
    for event in events {
        if event.ordinal >= corpus_len {
            return Err(ForgeError::InconsistentTrace(format!(
                "event references sentence {} but the corpus has {corpus_len} lines",
                event.ordinal
            )));
        }
        plans[event.ordinal].events.push(event);
    }
    for plan in &mut plans {
        plan.events.sort_by_key(|e| e.start);
    }
    Ok(plans)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sentence(text: &str) -> Sentence {
        Sentence::new(text).unwrap()
    }

    fn test_config() -> NoiseConfig {
        NoiseConfig::charspan(CandidateAlphabet::latin_basic(), SeedSpec::new(11, "noise"))
    }

    fn delete(start: usize, span_len: usize) -> NoiseEvent {
        NoiseEvent {
            ordinal: 0,
            start,
            span_len,
            sampled_span: span_len,
            op: NoiseOp::Delete,
            replacement: None,
        }
    }

    fn replace(start: usize, span_len: usize, with: &str) -> NoiseEvent {
        NoiseEvent {
            ordinal: 0,
            start,
            span_len,
            sampled_span: span_len,
            op: NoiseOp::Replace,
            replacement: Some(with.to_string()),
        }
    }

    #[test]
    fn apply_delete_span() {
        let out = apply_events(&sentence("abcdefgh"), &[delete(2, 3)]).unwrap();
        assert_eq!(out.as_str(), "abfgh");
    }

    #[test]
    fn apply_replace_collapses_span_to_one_char() {
        let out = apply_events(&sentence("abcdefgh"), &[replace(2, 3, "x")]).unwrap();
        assert_eq!(out.as_str(), "abxfgh");
    }

    #[test]
    fn apply_empty_events_is_identity() {
        let s = sentence("whatever text");
        assert_eq!(apply_events(&s, &[]).unwrap(), s);
    }

    #[test]
    fn apply_insert() {
        let mut e = delete(1, 1);
        e.op = NoiseOp::Insert;
        e.replacement = Some("x".into());
        let out = apply_events(&sentence("abc"), &[e]).unwrap();
        assert_eq!(out.as_str(), "axbc");
    }

    #[test]
    fn apply_multiple_events_right_to_left() {
        let out = apply_events(&sentence("abcdefgh"), &[delete(0, 2), replace(4, 2, "x")]).unwrap();
        assert_eq!(out.as_str(), "cdxgh");
    }

    #[test]
    fn apply_rejects_out_of_bounds() {
        assert!(apply_events(&sentence("abc"), &[delete(2, 2)]).is_err());
    }

    #[test]
    fn apply_rejects_overlap() {
        assert!(apply_events(&sentence("abcdef"), &[delete(0, 3), delete(2, 2)]).is_err());
    }

    #[test]
    fn apply_rejects_missing_replacement() {
        let mut e = delete(0, 2);
        e.op = NoiseOp::Replace;
        assert!(apply_events(&sentence("abc"), &[e]).is_err());
    }

    #[test]
    fn zero_budget_plans_no_events() {
        let mut cfg = test_config();
        cfg.percent_min = 0.0;
        cfg.percent_max = 0.0;
        let plan = plan_noise(&sentence("a reasonably long sentence"), 0, &cfg).unwrap();
        assert!(plan.events.is_empty());
        assert!(!plan.skipped_short);
    }

    #[test]
    fn short_sentences_pass_through() {
        let cfg = test_config();
        let plan = plan_noise(&sentence("hiya"), 3, &cfg).unwrap();
        assert!(plan.skipped_short);
        assert!(plan.events.is_empty());
    }

    #[test]
    fn budget_mode_exhausts_budget_exactly() {
        let mut cfg = test_config();
        cfg.percent_min = 10.0;
        cfg.percent_max = 10.0;
        let text: String = std::iter::repeat_n('a', 100).collect();
        for ordinal in 0..50 {
            let plan = plan_noise(&sentence(&text), ordinal, &cfg).unwrap();
            let total: usize = plan.events.iter().map(|e| e.span_len).sum();
            assert_eq!(total, 10, "ordinal {ordinal}");
        }
    }

    #[test]
    fn literal_mode_alpha_and_site_count() {
        let mut cfg = test_config();
        cfg.mode = NoiseMode::Literal;
        cfg.percent_min = 10.5;
        cfg.percent_max = 10.5;
        let text: String = std::iter::repeat_n('x', 80).collect();
        let plan = plan_noise(&sentence(&text), 0, &cfg).unwrap();
        assert_eq!(plan.alpha, Some(3));
        assert_eq!(plan.site_count, Some(9));
        assert_eq!(plan.sites.len(), 9);
    }

    #[test]
    fn literal_mode_even_span_realizes_one_unit() {
        let mut cfg = test_config();
        cfg.mode = NoiseMode::Literal;
        cfg.max_span = 2;
        cfg.percent_min = 10.0;
        cfg.percent_max = 10.0;
        let text: String = std::iter::repeat_n('x', 60).collect();
        let plan = plan_noise(&sentence(&text), 0, &cfg).unwrap();
        assert!(!plan.events.is_empty());
        for e in &plan.events {
            assert_eq!(e.span_len, 1, "sampled {}", e.sampled_span);
        }
    }

    #[test]
    fn literal_mode_rejects_insert() {
        let mut cfg = test_config();
        cfg.mode = NoiseMode::Literal;
        cfg.weights = OpWeights::uniform_all();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn plans_are_deterministic() {
        let cfg = test_config();
        let s = sentence("the quick brown fox jumps over the lazy dog");
        let a = plan_noise(&s, 7, &cfg).unwrap();
        let b = plan_noise(&s, 7, &cfg).unwrap();
        assert_eq!(a, b);
        let c = plan_noise(&s, 8, &cfg).unwrap();
        assert_ne!(a.events, c.events);
    }

    #[test]
    fn unigram_spans_are_single_units() {
        let cfg = NoiseConfig::unigram(CandidateAlphabet::latin_basic(), SeedSpec::new(5, "u"));
        let corpus = ParallelCorpus::monolingual(
            "t",
            vec![sentence("a somewhat longer testing sentence for noise")],
        );
        let (_, plans) = unigram_char_noise(&corpus, &cfg).unwrap();
        assert!(!plans[0].events.is_empty());
        for e in &plans[0].events {
            assert_eq!(e.span_len, 1);
            assert_eq!(e.sampled_span, 1);
        }
    }

    #[test]
    fn unigram_forced_replace_matches_hand_application() {
        let out = apply_events(&sentence("abc"), &[replace(1, 1, "x")]).unwrap();
        assert_eq!(out.as_str(), "axc");
    }

    #[test]
    fn insertion_only_never_shrinks_sentences() {
        let mut cfg = NoiseConfig::unigram(CandidateAlphabet::latin_basic(), SeedSpec::new(5, "u"));
        cfg.weights = OpWeights {
            delete: 0.0,
            replace: 0.0,
            insert: 1.0,
        };
        let lines: Vec<Sentence> = (0..50)
            .map(|i| sentence(&format!("sentence number {i} padded out to some length")))
            .collect();
        let corpus = ParallelCorpus::monolingual("t", lines);
        let (noised, _) = unigram_char_noise(&corpus, &cfg).unwrap();
        for (orig, new) in corpus.source().iter().zip(noised.source()) {
            assert!(new.char_len() >= orig.char_len());
        }
    }

    #[test]
    fn zero_percent_is_identity_corpus_wide() {
        let mut cfg = test_config();
        cfg.percent_min = 0.0;
        cfg.percent_max = 0.0;
        let corpus = ParallelCorpus::monolingual(
            "t",
            vec![sentence("alpha beta gamma"), sentence("delta epsilon zeta")],
        );
        let (noised, plans) = charspan_augment(&corpus, &cfg).unwrap();
        assert_eq!(noised, corpus);
        assert!(plans.iter().all(|p| p.events.is_empty()));
    }

    #[test]
    fn augment_leaves_target_untouched() {
        let cfg = test_config();
        let corpus = ParallelCorpus::new(
            "t",
            vec![sentence("source text that is long enough to noise")],
            vec![sentence("target text stays exactly the same")],
        )
        .unwrap();
        let (noised, _) = charspan_augment(&corpus, &cfg).unwrap();
        assert_eq!(noised.target(), corpus.target());
        assert_ne!(noised.source(), corpus.source());
    }

    #[test]
    fn trace_roundtrip() {
        let cfg = test_config();
        let corpus = ParallelCorpus::monolingual(
            "t",
            vec![
                sentence("the first sentence of the trace test"),
                sentence("and a second one to give more events"),
            ],
        );
        let (_, plans) = charspan_augment(&corpus, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plan.trace");
        write_trace_file(&path, &plans).unwrap();
        let events = read_trace_file(&path).unwrap();
        let expected: Vec<&NoiseEvent> = plans.iter().flat_map(|p| p.events.iter()).collect();
        assert_eq!(events.len(), expected.len());
        for (read, orig) in events.iter().zip(expected) {
            assert_eq!((read.ordinal, read.start, read.span_len), (orig.ordinal, orig.start, orig.span_len));
            assert_eq!(read.op, orig.op);
            assert_eq!(read.replacement, orig.replacement);
        }
        let grouped = plans_from_events(events, corpus.len()).unwrap();
        assert_eq!(grouped.len(), 2);
        assert_eq!(grouped[0].events.len(), plans[0].events.len());
    }

    #[test]
    fn grapheme_mode_respects_cluster_boundaries() {
        let mut cfg = test_config();
        cfg.char_unit = CharUnit::Grapheme;
        cfg.percent_min = 20.0;
        cfg.percent_max = 20.0;
        cfg.weights = OpWeights {
            delete: 1.0,
            replace: 0.0,
            insert: 0.0,
        };
        // Devanagari text where several letters carry combining matras.
        let s = sentence("\u{0915}\u{093F}\u{0924}\u{093E}\u{092C} \u{0932}\u{093F}\u{0916}\u{0928}\u{093E} \u{0915}\u{093F}\u{0924}\u{093E}\u{092C}");
        let plan = plan_noise(&s, 0, &cfg).unwrap();
        let out = apply_events_in(&s, &plan.events, CharUnit::Grapheme).unwrap();
        // Deletion removes whole clusters, so no orphaned combining marks: a
        // matra never starts the string or follows a space.
        let chars: Vec<char> = out.as_str().chars().collect();
        for (i, &c) in chars.iter().enumerate() {
            let is_matra = ('\u{093E}'..='\u{094C}').contains(&c);
            if is_matra {
                assert!(i > 0 && chars[i - 1] != ' ', "orphaned matra in {out}");
            }
        }
    }
}
