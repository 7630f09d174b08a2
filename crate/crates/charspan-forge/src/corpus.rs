//! Sentences, parallel corpora, and corpus file I/O.
//!
//! Corpus files are UTF-8 with LF line endings, one sentence per line. The
//! writer always emits LF regardless of platform, so writing and reloading a
//! corpus reproduces it byte for byte.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;
use unicode_segmentation::UnicodeSegmentation;

use crate::error::{ForgeError, Result};

/// The unit in which character positions and lengths are measured.
///
/// `CodePoint` (the default) counts Unicode scalar values. `Grapheme` counts
/// extended grapheme clusters, which keeps combining marks attached to their
/// base character when spans are deleted or replaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CharUnit {
    #[default]
    CodePoint,
    Grapheme,
}

/// Splits `text` into its character units.
pub fn split_units(text: &str, unit: CharUnit) -> Vec<&str> {
    match unit {
        CharUnit::CodePoint => text
            .char_indices()
            .map(|(i, c)| &text[i..i + c.len_utf8()])
            .collect(),
        CharUnit::Grapheme => text.graphemes(true).collect(),
    }
}

/// One line of a corpus. Contains no line-break characters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Sentence(String);

impl Sentence {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.contains(['\n', '\r']) {
            return Err(ForgeError::InvalidConfig(
                "sentence contains a line-break character".into(),
            ));
        }
        Ok(Sentence(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    /// Character length in code points.
    pub fn char_len(&self) -> usize {
        self.0.chars().count()
    }

    /// Character length in the given unit.
    pub fn len_in(&self, unit: CharUnit) -> usize {
        match unit {
            CharUnit::CodePoint => self.char_len(),
            CharUnit::Grapheme => self.0.graphemes(true).count(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// NFC-normalized copy.
    pub fn nfc(&self) -> Sentence {
        Sentence(self.0.nfc().collect())
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Sentence {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Sentence {
    type Error = ForgeError;
    fn try_from(value: String) -> Result<Self> {
        Sentence::new(value)
    }
}

impl From<Sentence> for String {
    fn from(value: Sentence) -> String {
        value.0
    }
}

/// Character length of a sentence in code points.
pub fn char_length(s: &Sentence) -> usize {
    s.char_len()
}

/// An aligned pair of sentence lists. Monolingual corpora have an empty
/// target list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelCorpus {
    name: String,
    source: Vec<Sentence>,
    target: Vec<Sentence>,
}

impl ParallelCorpus {
    pub fn new(
        name: impl Into<String>,
        source: Vec<Sentence>,
        target: Vec<Sentence>,
    ) -> Result<Self> {
        if !target.is_empty() && target.len() != source.len() {
            return Err(ForgeError::LineCountMismatch {
                source_lines: source.len(),
                target_lines: target.len(),
            });
        }
        Ok(ParallelCorpus {
            name: name.into(),
            source,
            target,
        })
    }

    pub fn monolingual(name: impl Into<String>, source: Vec<Sentence>) -> Self {
        ParallelCorpus {
            name: name.into(),
            source,
            target: Vec::new(),
        }
    }

    /// Loads a corpus from one or two one-sentence-per-line files.
    ///
    /// A trailing newline does not create an empty final sentence. Invalid
    /// UTF-8 is reported with its line number; when both paths are given the
    /// files must have equal line counts.
    pub fn load(source_path: &Path, target_path: Option<&Path>) -> Result<Self> {
        let source = read_sentences(source_path)?;
        let target = match target_path {
            Some(p) => read_sentences(p)?,
            None => Vec::new(),
        };
        if target_path.is_some() && target.len() != source.len() {
            return Err(ForgeError::LineCountMismatch {
                source_lines: source.len(),
                target_lines: target.len(),
            });
        }
        let name = source_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "corpus".to_string());
        Ok(ParallelCorpus {
            name,
            source,
            target,
        })
    }

    /// Writes the corpus back to disk (LF line endings, final newline).
    pub fn save(&self, source_path: &Path, target_path: Option<&Path>) -> Result<()> {
        write_sentences(source_path, &self.source)?;
        if let Some(p) = target_path {
            write_sentences(p, &self.target)?;
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    pub fn source(&self) -> &[Sentence] {
        &self.source
    }

    pub fn target(&self) -> &[Sentence] {
        &self.target
    }

    pub fn has_target(&self) -> bool {
        !self.target.is_empty()
    }

    /// Replaces the source side, keeping the target untouched.
    pub fn with_source(&self, source: Vec<Sentence>) -> Result<Self> {
        ParallelCorpus::new(self.name.clone(), source, self.target.clone())
    }

    /// NFC-normalizes both sides.
    pub fn nfc(&self) -> Self {
        ParallelCorpus {
            name: self.name.clone(),
            source: self.source.iter().map(Sentence::nfc).collect(),
            target: self.target.iter().map(Sentence::nfc).collect(),
        }
    }
}

/// Reads a one-sentence-per-line UTF-8 file.
pub fn read_sentences(path: &Path) -> Result<Vec<Sentence>> {
    let bytes = fs::read(path).map_err(|e| ForgeError::io(path, e))?;
    let mut out = Vec::new();
    // Split on LF ourselves so decode errors can name the offending line.
    // A final newline terminates the last sentence instead of opening an
    // empty one.
    let mut rest: &[u8] = &bytes;
    let mut line_no = 0usize;
    while !rest.is_empty() {
        line_no += 1;
        let (line, tail) = match rest.iter().position(|&b| b == b'\n') {
            Some(pos) => (&rest[..pos], &rest[pos + 1..]),
            None => (rest, &[][..]),
        };
        let line = std::str::from_utf8(line).map_err(|_| ForgeError::InvalidUtf8 {
            path: path.to_path_buf(),
            line: line_no,
        })?;
        // Tolerate CRLF input; bare CR inside a line is rejected below.
        let line = line.strip_suffix('\r').unwrap_or(line);
        let sentence =
            Sentence::new(line).map_err(|_| ForgeError::LineBreakInSentence { line: line_no })?;
        out.push(sentence);
        rest = tail;
    }
    Ok(out)
}

/// Writes sentences one per line with LF endings and a final newline.
pub fn write_sentences(path: &Path, sentences: &[Sentence]) -> Result<()> {
    let mut buf = Vec::with_capacity(sentences.iter().map(|s| s.as_str().len() + 1).sum());
    for s in sentences {
        buf.extend_from_slice(s.as_str().as_bytes());
        buf.push(b'\n');
    }
    let mut file = fs::File::create(path).map_err(|e| ForgeError::io(path, e))?;
    file.write_all(&buf).map_err(|e| ForgeError::io(path, e))?;
    Ok(())
}
