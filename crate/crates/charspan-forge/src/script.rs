//! Script conversion between Brahmic scripts by Unicode block offset.
//!
//! The supported scripts occupy 128-code-point Unicode blocks in which
//! corresponding letters sit at the same relative offset. Conversion maps
//! each character inside the source block to `target_base + offset`;
//! everything else (spaces, digits, Latin text, punctuation) passes through
//! unchanged. Offsets whose image is an unassigned code point in the target
//! block also pass through, and are counted in the conversion report.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{ParallelCorpus, Sentence};
use crate::error::{ForgeError, Result};

const BLOCK_SIZE: u32 = 0x80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Script {
    Devanagari,
    Bengali,
    Gurmukhi,
    Gujarati,
    Oriya,
    Tamil,
    Telugu,
    Malayalam,
}

/// Per-block assigned-code-point bitmaps (Unicode 13.0), low 64 offsets
/// first.
const ASSIGNED: [(Script, u32, [u64; 2]); 8] = [
    (Script::Devanagari, 0x0900, [0xFFFFFFFFFFFFFFFF, 0xFFFFFFFFFFFFFFFF]),
    (Script::Bengali, 0x0980, [0xF3C5FDFFFFF99FEF, 0x7FFFFFCFB080799F]),
    (Script::Gurmukhi, 0x0A00, [0xD36DFDFFFFF987EE, 0x007FFFC05E023987]),
    (Script::Gujarati, 0x0A80, [0xF3EDFDFFFFFBBFEE, 0xFE03FFCF00013BBF]),
    (Script::Oriya, 0x0B00, [0xF3EDFDFFFFF99FEE, 0x00FFFFCFB0E0399F]),
    (Script::Tamil, 0x0B80, [0xC3FFC718D63DC7EC, 0x07FFFFC000813DC7]),
    (Script::Telugu, 0x0C00, [0xE3FFFDFFFFFDDFFF, 0xFF80FFCF07603DDF]),
    (Script::Malayalam, 0x0D00, [0xFFFFFFFFFFFDDFFF, 0xFFFFFFCFFFF0FDDF]),
];

impl Script {
    pub const ALL: [Script; 8] = [
        Script::Devanagari,
        Script::Bengali,
        Script::Gurmukhi,
        Script::Gujarati,
        Script::Oriya,
        Script::Tamil,
        Script::Telugu,
        Script::Malayalam,
    ];

    pub fn parse(name: &str) -> Result<Script> {
        match name.to_ascii_lowercase().as_str() {
            "devanagari" => Ok(Script::Devanagari),
            "bengali" => Ok(Script::Bengali),
            "gurmukhi" => Ok(Script::Gurmukhi),
            "gujarati" => Ok(Script::Gujarati),
            "oriya" => Ok(Script::Oriya),
            "tamil" => Ok(Script::Tamil),
            "telugu" => Ok(Script::Telugu),
            "malayalam" => Ok(Script::Malayalam),
            other => Err(ForgeError::UnsupportedScript(other.to_string())),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Script::Devanagari => "devanagari",
            Script::Bengali => "bengali",
            Script::Gurmukhi => "gurmukhi",
            Script::Gujarati => "gujarati",
            Script::Oriya => "oriya",
            Script::Tamil => "tamil",
            Script::Telugu => "telugu",
            Script::Malayalam => "malayalam",
        }
    }

    /// First code point of this script's Unicode block.
    pub fn block_base(&self) -> u32 {
        ASSIGNED
            .iter()
            .find(|(s, _, _)| s == self)
            .map(|(_, base, _)| *base)
            .expect("every script has a block entry")
    }

    pub fn contains(&self, c: char) -> bool {
        let cp = c as u32;
        let base = self.block_base();
        (base..base + BLOCK_SIZE).contains(&cp)
    }

    /// Whether the code point at `offset` within this block is assigned.
    pub fn is_assigned(&self, offset: u32) -> bool {
        debug_assert!(offset < BLOCK_SIZE);
        let bits = ASSIGNED
            .iter()
            .find(|(s, _, _)| s == self)
            .map(|(_, _, bits)| bits)
            .expect("every script has a block entry");
        if offset < 64 {
            bits[0] >> offset & 1 == 1
        } else {
            bits[1] >> (offset - 64) & 1 == 1
        }
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Counts of what conversion did to each character.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConversionReport {
    /// Characters mapped into the target block.
    pub converted: u64,
    /// In-block characters whose image is unassigned in the target block;
    /// passed through unchanged.
    pub passthrough_unassigned: u64,
    /// Characters outside the source block; passed through unchanged.
    pub out_of_block: u64,
}

impl ConversionReport {
    pub fn merge(&mut self, other: &ConversionReport) {
        self.converted += other.converted;
        self.passthrough_unassigned += other.passthrough_unassigned;
        self.out_of_block += other.out_of_block;
    }
}

/// Converts one sentence, counting passthroughs. Converting a script to
/// itself is the identity.
pub fn convert(s: &Sentence, from: Script, to: Script) -> (Sentence, ConversionReport) {
    let mut report = ConversionReport::default();
    let from_base = from.block_base();
    let to_base = to.block_base();
    let out: String = s
        .as_str()
        .chars()
        .map(|c| {
            let cp = c as u32;
            if !from.contains(c) {
                report.out_of_block += 1;
                return c;
            }
            let offset = cp - from_base;
            if to.is_assigned(offset) {
                report.converted += 1;
                char::from_u32(to_base + offset).expect("Indic blocks are valid scalar values")
            } else {
                report.passthrough_unassigned += 1;
                c
            }
        })
        .collect();
    (Sentence::new(out).expect("conversion cannot introduce line breaks"), report)
}

/// Converts the source side of a corpus, keeping the target untouched.
pub fn convert_corpus(
    corpus: &ParallelCorpus,
    from: Script,
    to: Script,
) -> Result<(ParallelCorpus, ConversionReport)> {
    let converted: Vec<(Sentence, ConversionReport)> = corpus
        .source()
        .par_iter()
        .map(|s| convert(s, from, to))
        .collect();
    let mut report = ConversionReport::default();
    let mut sentences = Vec::with_capacity(converted.len());
    for (sentence, r) in converted {
        report.merge(&r);
        sentences.push(sentence);
    }
    Ok((corpus.with_source(sentences)?, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Sentence {
        Sentence::new(text).unwrap()
    }

    #[test]
    fn devanagari_ka_maps_to_bengali_ka() {
        let (out, report) = convert(&s("\u{0915}"), Script::Devanagari, Script::Bengali);
        assert_eq!(out.as_str(), "\u{0995}");
        assert_eq!(report.converted, 1);
    }

    #[test]
    fn same_script_is_identity() {
        let text = s("\u{0915}\u{093E} abc");
        let (out, _) = convert(&text, Script::Devanagari, Script::Devanagari);
        assert_eq!(out, text);
    }

    #[test]
    fn out_of_block_text_passes_through() {
        let text = s("abc 123");
        let (out, report) = convert(&text, Script::Devanagari, Script::Bengali);
        assert_eq!(out, text);
        assert_eq!(report.out_of_block, 7);
        assert_eq!(report.converted, 0);
    }

    #[test]
    fn unassigned_images_pass_through_and_are_counted() {
        // U+0931 RRA exists in Devanagari; its Bengali image U+09B1 is
        // unassigned.
        let (out, report) = convert(&s("\u{0931}"), Script::Devanagari, Script::Bengali);
        assert_eq!(out.as_str(), "\u{0931}");
        assert_eq!(report.passthrough_unassigned, 1);
    }

    #[test]
    fn length_is_preserved() {
        let text = s("\u{0915}\u{0916} abc \u{0931}");
        for to in Script::ALL {
            let (out, _) = convert(&text, Script::Devanagari, to);
            assert_eq!(out.char_len(), text.char_len());
        }
    }

    #[test]
    fn roundtrip_is_identity_for_mutually_assigned_chars() {
        for offset in 0..0x80u32 {
            if !Script::Devanagari.is_assigned(offset) || !Script::Bengali.is_assigned(offset) {
                continue;
            }
            let c = char::from_u32(Script::Devanagari.block_base() + offset).unwrap();
            let original = s(&c.to_string());
            let (there, _) = convert(&original, Script::Devanagari, Script::Bengali);
            let (back, _) = convert(&there, Script::Bengali, Script::Devanagari);
            assert_eq!(back, original, "offset {offset:#x}");
        }
    }

    #[test]
    fn parse_rejects_unknown_scripts() {
        assert!(Script::parse("latin").is_err());
        assert_eq!(Script::parse("Devanagari").unwrap(), Script::Devanagari);
    }

    #[test]
    fn text_without_source_block_chars_is_unchanged() {
        let text = s("\u{0995}\u{0996} plain");
        // Converting from Devanagari leaves the Bengali text alone.
        let (out, _) = convert(&text, Script::Devanagari, Script::Tamil);
        assert_eq!(out, text);
    }
}
