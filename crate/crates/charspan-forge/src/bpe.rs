//! Byte-pair encoding: vocabulary learning, deterministic and stochastic
//! segmentation, and the inverse desegmentation.
//!
//! Learning starts from the corpus character inventory and repeatedly merges
//! the most frequent adjacent symbol pair, with ties broken by lexicographic
//! order of `(left, right)` so the merge list is identical across platforms.
//! Pairs never span whitespace.
//!
//! On-disk formats:
//!
//! * merges file — first line `#charspan-forge bpe v1`, then one merge per
//!   line as `left<SPACE>right`, in learning order;
//! * vocab file — `token<TAB>count` lines, by descending count, ties in
//!   lexicographic token order.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{ParallelCorpus, Sentence};
use crate::error::{ForgeError, Result};

pub const MERGES_HEADER: &str = "#charspan-forge bpe v1";

/// Marker appended to every non-final subword of a word.
pub const DEFAULT_MARKER: &str = "@@";

/// An ordered merge list plus the token vocabulary it induces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpeModel {
    merges: Vec<(String, String)>,
    vocab: BTreeMap<String, u64>,
    continuation_marker: String,
    specials: Vec<String>,
}

/// The subword tokens of one sentence, with enough context to invert them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    pub tokens: Vec<String>,
    pub source: Sentence,
    pub marker: String,
}

impl Segmentation {
    /// Strips continuation markers and rejoins words with single spaces.
    pub fn desegment(&self) -> Result<Sentence> {
        let text = desegment_tokens(
            self.tokens.iter().map(String::as_str),
            &self.marker,
        )?;
        Sentence::new(text)
    }
}

fn word_counts(corpus: &ParallelCorpus) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for side in [corpus.source(), corpus.target()] {
        for sentence in side {
            for word in sentence.as_str().split_whitespace() {
                *counts.entry(word.to_string()).or_insert(0) += 1;
            }
        }
    }
    counts
}

fn adjacent_pairs(symbols: &[String]) -> impl Iterator<Item = (String, String)> + '_ {
    symbols
        .windows(2)
        .map(|w| (w[0].clone(), w[1].clone()))
}

/// Merges all non-overlapping occurrences of `(left, right)`, scanning left
/// to right.
fn merge_in_word(symbols: &mut Vec<String>, left: &str, right: &str) {
    let mut i = 0;
    while i + 1 < symbols.len() {
        if symbols[i] == left && symbols[i + 1] == right {
            let joined = format!("{}{}", symbols[i], symbols[i + 1]);
            symbols[i] = joined;
            symbols.remove(i + 1);
        } else {
            i += 1;
        }
    }
}

/// Learns a BPE vocabulary over the source and target sides jointly.
///
/// `vocab_size` counts the initial character inventory plus one token per
/// merge; learning stops early when no pair reaches `min_pair_freq`.
pub fn learn_bpe(corpus: &ParallelCorpus, vocab_size: usize, min_pair_freq: u64) -> Result<BpeModel> {
    if min_pair_freq < 1 {
        return Err(ForgeError::InvalidConfig("min_pair_freq must be >= 1".into()));
    }
    let counts = word_counts(corpus);
    let mut words: Vec<(Vec<String>, u64)> = counts
        .into_iter()
        .map(|(word, count)| (word.chars().map(String::from).collect(), count))
        .collect();

    let inventory: HashSet<String> = words
        .iter()
        .flat_map(|(syms, _)| syms.iter().cloned())
        .collect();
    let inventory_size = inventory.len();
    if vocab_size < inventory_size {
        return Err(ForgeError::InvalidConfig(format!(
            "vocab_size {vocab_size} is smaller than the character inventory ({inventory_size})"
        )));
    }
    let merge_budget = vocab_size - inventory_size;

    let mut pair_counts: HashMap<(String, String), u64> = HashMap::new();
    let mut pair_words: HashMap<(String, String), HashSet<usize>> = HashMap::new();
    for (idx, (symbols, count)) in words.iter().enumerate() {
        for pair in adjacent_pairs(symbols) {
            *pair_counts.entry(pair.clone()).or_insert(0) += count;
            pair_words.entry(pair).or_default().insert(idx);
        }
    }

    let mut merges = Vec::with_capacity(merge_budget.min(1 << 16));
    for _ in 0..merge_budget {
        // Highest count wins; equal counts go to the lexicographically
        // smallest pair. The scan order of the map cannot change the result.
        let best = pair_counts
            .iter()
            .filter(|(_, &c)| c >= min_pair_freq)
            .max_by(|(pa, ca), (pb, cb)| ca.cmp(cb).then_with(|| pb.cmp(pa)))
            .map(|(pair, _)| pair.clone());
        let Some(pair) = best else { break };

        let affected: Vec<usize> = pair_words
            .get(&pair)
            .map(|set| set.iter().copied().collect())
            .unwrap_or_default();
        for idx in affected {
            let count = words[idx].1;
            for old in adjacent_pairs(&words[idx].0) {
                if let Some(c) = pair_counts.get_mut(&old) {
                    *c -= count;
                    if *c == 0 {
                        pair_counts.remove(&old);
                    }
                }
                if let Some(set) = pair_words.get_mut(&old) {
                    set.remove(&idx);
                }
            }
            merge_in_word(&mut words[idx].0, &pair.0, &pair.1);
            for new in adjacent_pairs(&words[idx].0) {
                *pair_counts.entry(new.clone()).or_insert(0) += count;
                pair_words.entry(new).or_default().insert(idx);
            }
        }
        merges.push(pair);
    }

    // Token counts over the fully merged corpus; characters and merge
    // products that were swallowed entirely stay listed with count 0.
    let mut vocab: BTreeMap<String, u64> = BTreeMap::new();
    for (symbols, count) in &words {
        for sym in symbols {
            *vocab.entry(sym.clone()).or_insert(0) += count;
        }
    }
    for sym in inventory {
        vocab.entry(sym).or_insert(0);
    }
    for (l, r) in &merges {
        vocab.entry(format!("{l}{r}")).or_insert(0);
    }

    Ok(BpeModel {
        merges,
        vocab,
        continuation_marker: DEFAULT_MARKER.to_string(),
        specials: Vec::new(),
    })
}

impl BpeModel {
    /// Builds a model directly from a merge list; the vocabulary lists the
    /// merge products with count 0.
    pub fn from_merges(merges: Vec<(String, String)>) -> Self {
        let mut vocab = BTreeMap::new();
        for (l, r) in &merges {
            vocab.entry(format!("{l}{r}")).or_insert(0);
        }
        BpeModel {
            merges,
            vocab,
            continuation_marker: DEFAULT_MARKER.to_string(),
            specials: Vec::new(),
        }
    }

    pub fn with_marker(mut self, marker: impl Into<String>) -> Self {
        self.continuation_marker = marker.into();
        self
    }

    pub fn with_specials(mut self, specials: Vec<String>) -> Self {
        self.specials = specials;
        self
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn vocab(&self) -> &BTreeMap<String, u64> {
        &self.vocab
    }

    pub fn marker(&self) -> &str {
        &self.continuation_marker
    }

    pub fn specials(&self) -> &[String] {
        &self.specials
    }

    /// Deterministic greedy segmentation (dropout 0).
    pub fn segment(&self, s: &Sentence) -> Segmentation {
        self.segment_impl(s, 0.0, None)
    }

    /// Stochastic segmentation: each merge application is skipped
    /// independently with probability `dropout`. The seed should come from
    /// [`crate::seed::derive_seed`] so corpora segment reproducibly.
    pub fn segment_stochastic(&self, s: &Sentence, dropout: f64, seed: u64) -> Result<Segmentation> {
        if !(0.0..=1.0).contains(&dropout) || !dropout.is_finite() {
            return Err(ForgeError::InvalidConfig(format!(
                "segmentation dropout must lie in [0, 1] (got {dropout})"
            )));
        }
        Ok(self.segment_impl(s, dropout, Some(ChaCha8Rng::seed_from_u64(seed))))
    }

    fn segment_impl(&self, s: &Sentence, dropout: f64, mut rng: Option<ChaCha8Rng>) -> Segmentation {
        let mut tokens = Vec::new();
        for word in s.as_str().split_whitespace() {
            let mut symbols: Vec<String> = word.chars().map(String::from).collect();
            for (left, right) in &self.merges {
                let mut i = 0;
                while i + 1 < symbols.len() {
                    if symbols[i] == *left && symbols[i + 1] == *right {
                        let skip = match rng.as_mut() {
                            Some(r) if dropout > 0.0 => r.random_bool(dropout),
                            _ => false,
                        };
                        if skip {
                            i += 1;
                            continue;
                        }
                        let joined = format!("{}{}", symbols[i], symbols[i + 1]);
                        symbols[i] = joined;
                        symbols.remove(i + 1);
                    } else {
                        i += 1;
                    }
                }
            }
            let last = symbols.len().saturating_sub(1);
            for (i, sym) in symbols.into_iter().enumerate() {
                if i < last {
                    tokens.push(format!("{sym}{}", self.continuation_marker));
                } else {
                    tokens.push(sym);
                }
            }
        }
        Segmentation {
            tokens,
            source: s.clone(),
            marker: self.continuation_marker.clone(),
        }
    }

    /// Recomputes the vocabulary counts against a corpus, e.g. after loading
    /// a bare merges file.
    pub fn recount(&mut self, corpus: &ParallelCorpus) {
        let mut vocab: BTreeMap<String, u64> = BTreeMap::new();
        for (word, count) in word_counts(corpus) {
            let mut symbols: Vec<String> = word.chars().map(String::from).collect();
            for (left, right) in &self.merges {
                merge_in_word(&mut symbols, left, right);
            }
            for sym in symbols {
                *vocab.entry(sym).or_insert(0) += count;
            }
        }
        for (l, r) in &self.merges {
            vocab.entry(format!("{l}{r}")).or_insert(0);
        }
        self.vocab = vocab;
    }

    /// Writes the merges and vocab files.
    pub fn save(&self, merges_path: &Path, vocab_path: &Path) -> Result<()> {
        let mut merges_out = String::with_capacity(16 + self.merges.len() * 8);
        merges_out.push_str(MERGES_HEADER);
        merges_out.push('\n');
        for (l, r) in &self.merges {
            merges_out.push_str(l);
            merges_out.push(' ');
            merges_out.push_str(r);
            merges_out.push('\n');
        }
        write_file(merges_path, merges_out.as_bytes())?;

        let mut entries: Vec<(&String, &u64)> = self.vocab.iter().collect();
        entries.sort_by(|(ta, ca), (tb, cb)| cb.cmp(ca).then_with(|| ta.cmp(tb)));
        let mut vocab_out = String::new();
        for (token, count) in entries {
            vocab_out.push_str(token);
            vocab_out.push('\t');
            vocab_out.push_str(&count.to_string());
            vocab_out.push('\n');
        }
        write_file(vocab_path, vocab_out.as_bytes())
    }

    /// Loads a model from its merges and vocab files.
    pub fn load(merges_path: &Path, vocab_path: &Path) -> Result<Self> {
        let mut model = BpeModel::load_merges(merges_path)?;
        let text =
            std::fs::read_to_string(vocab_path).map_err(|e| ForgeError::io(vocab_path, e))?;
        let mut vocab = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (token, count) = line.split_once('\t').ok_or_else(|| ForgeError::MalformedLine {
                path: vocab_path.to_path_buf(),
                line: idx + 1,
                message: "expected `token<TAB>count`".into(),
            })?;
            let count: u64 = count.parse().map_err(|_| ForgeError::MalformedLine {
                path: vocab_path.to_path_buf(),
                line: idx + 1,
                message: format!("invalid count `{count}`"),
            })?;
            vocab.insert(token.to_string(), count);
        }
        model.vocab = vocab;
        Ok(model)
    }

    /// Loads just a merges file; the vocabulary holds the merge products
    /// with count 0. Sufficient for segmentation.
    pub fn load_merges(merges_path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(merges_path).map_err(|e| ForgeError::io(merges_path, e))?;
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, line)) if line.trim_end() == MERGES_HEADER => {}
            _ => {
                return Err(ForgeError::MissingHeader {
                    path: merges_path.to_path_buf(),
                    expected: MERGES_HEADER.to_string(),
                })
            }
        }
        let mut merges = Vec::new();
        for (idx, line) in lines {
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(' ');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(l), Some(r), None) if !l.is_empty() && !r.is_empty() => {
                    merges.push((l.to_string(), r.to_string()));
                }
                _ => {
                    return Err(ForgeError::MalformedLine {
                        path: merges_path.to_path_buf(),
                        line: idx + 1,
                        message: "expected `left<SPACE>right`".into(),
                    })
                }
            }
        }
        Ok(BpeModel::from_merges(merges))
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| ForgeError::io(path, e))?;
    f.write_all(bytes).map_err(|e| ForgeError::io(path, e))
}

/// Inverse of segmentation: strips continuation markers and joins words
/// with single spaces. Errors when the final token still carries the
/// marker.
pub fn desegment_tokens<'a, I>(tokens: I, marker: &str) -> Result<String>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut words: Vec<String> = Vec::new();
    let mut current = String::new();
    let mut open = false;
    for token in tokens {
        match token.strip_suffix(marker) {
            Some(head) if !marker.is_empty() => {
                current.push_str(head);
                open = true;
            }
            _ => {
                current.push_str(token);
                words.push(std::mem::take(&mut current));
                open = false;
            }
        }
    }
    if open {
        return Err(ForgeError::MalformedSegmentation(
            "continuation marker on the final token of a word".into(),
        ));
    }
    Ok(words.join(" "))
}
