//! Candidate alphabets: the character sets replacement and insertion
//! characters are drawn from.
//!
//! The built-in alphabets contain letters only — no digits or punctuation.
//! Custom alphabets load from a file with one character per line.

use std::path::Path;

use crate::error::{ForgeError, Result};

/// Inventory shipped with the crate; see `data/devanagari_basic.txt`.
const DEVANAGARI_BASIC: &str = include_str!("../data/devanagari_basic.txt");

/// An ordered, duplicate-free set of candidate characters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateAlphabet {
    id: String,
    chars: Vec<char>,
}

impl CandidateAlphabet {
    /// ASCII letters `a`–`z` and `A`–`Z`.
    pub fn latin_basic() -> Self {
        let chars = ('a'..='z').chain('A'..='Z').collect();
        CandidateAlphabet {
            id: "latin-basic".into(),
            chars,
        }
    }

    /// Devanagari independent vowels, consonants, and dependent vowel signs
    /// (matras), as listed in the shipped data file.
    pub fn devanagari_basic() -> Self {
        let chars: Vec<char> = DEVANAGARI_BASIC
            .lines()
            .filter(|l| !l.is_empty())
            .map(|l| l.chars().next().expect("non-empty line"))
            .collect();
        debug_assert!(!chars.is_empty());
        CandidateAlphabet {
            id: "devanagari-basic".into(),
            chars,
        }
    }

    /// Builds a custom alphabet, rejecting duplicates and empties.
    pub fn custom(id: impl Into<String>, chars: Vec<char>) -> Result<Self> {
        let id = id.into();
        if chars.is_empty() {
            return Err(ForgeError::InvalidConfig(format!(
                "alphabet `{id}` is empty"
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for &c in &chars {
            if !seen.insert(c) {
                return Err(ForgeError::InvalidConfig(format!(
                    "alphabet `{id}` contains duplicate character `{c}`"
                )));
            }
        }
        Ok(CandidateAlphabet { id, chars })
    }

    /// Loads a custom alphabet from a one-character-per-line file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ForgeError::io(path, e))?;
        let mut chars = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.is_empty() {
                continue;
            }
            let mut it = line.chars();
            let c = it.next().expect("non-empty line");
            if it.next().is_some() {
                return Err(ForgeError::MalformedLine {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    message: "expected exactly one character".into(),
                });
            }
            chars.push(c);
        }
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".to_string());
        CandidateAlphabet::custom(id, chars)
    }

    /// Resolves a name: `latin-basic`, `devanagari-basic`, or a file path.
    pub fn resolve(name: &str) -> Result<Self> {
        match name {
            "latin-basic" => Ok(CandidateAlphabet::latin_basic()),
            "devanagari-basic" => Ok(CandidateAlphabet::devanagari_basic()),
            other => {
                let path = Path::new(other);
                if path.exists() {
                    CandidateAlphabet::from_file(path)
                } else {
                    Err(ForgeError::InvalidConfig(format!(
                        "unknown alphabet `{other}` (expected latin-basic, devanagari-basic, or a file path)"
                    )))
                }
            }
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn contains(&self, c: char) -> bool {
        self.chars.contains(&c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn latin_basic_has_52_letters() {
        let a = CandidateAlphabet::latin_basic();
        assert_eq!(a.len(), 52);
        assert!(a.chars().iter().all(|c| c.is_ascii_alphabetic()));
    }

    #[test]
    fn devanagari_basic_is_letters_and_marks_only() {
        let a = CandidateAlphabet::devanagari_basic();
        assert_eq!(a.len(), 65);
        for &c in a.chars() {
            let cp = c as u32;
            assert!((0x0900..=0x097F).contains(&cp), "out of block: {cp:#x}");
            // No digits (U+0966..U+096F) and no danda (U+0964, U+0965).
            assert!(!(0x0964..=0x096F).contains(&cp), "digit/punct: {cp:#x}");
        }
        assert!(a.contains('\u{0915}'));
    }

    #[test]
    fn custom_rejects_duplicates() {
        assert!(CandidateAlphabet::custom("x", vec!['a', 'b', 'a']).is_err());
        assert!(CandidateAlphabet::custom("x", vec![]).is_err());
    }

    #[test]
    fn file_loader_rejects_multichar_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("alpha.txt");
        std::fs::write(&path, "a\nbc\n").unwrap();
        assert!(CandidateAlphabet::from_file(&path).is_err());
        std::fs::write(&path, "a\nb\n\nc\n").unwrap();
        let a = CandidateAlphabet::from_file(&path).unwrap();
        assert_eq!(a.chars(), &['a', 'b', 'c']);
    }
}
