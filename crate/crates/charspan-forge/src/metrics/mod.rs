//! Evaluation metrics: chrF, BLEU, LCSR lexical similarity, paired bootstrap
//! significance, and cosine aggregation over externally exported sentence
//! vectors.

mod bleu;
mod bootstrap;
mod chrf;
mod cosine;
mod lcsr;

pub use bleu::{bleu, tokenize_13a_approx};
pub use bootstrap::{paired_bootstrap, BootstrapMetric, BootstrapOutcome};
pub use chrf::{chrf, ChrfParams};
pub use cosine::{cosine_report, cosine_report_from_vectors, read_vectors};
pub use lcsr::{lcs_len, lcsr, mean_lcsr, similarity_matrix};

use std::io::Write;
use std::path::Path;

use crate::error::{ForgeError, Result};

/// A corpus- and sentence-level metric result together with the canonical
/// parameter signature that fully determines how it was computed.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub metric: String,
    pub signature: String,
    /// 0–100 for chrF/BLEU, 0–1 for LCSR and cosine.
    pub corpus_score: f64,
    pub sentence_scores: Vec<f64>,
}

impl ScoreReport {
    /// Writes the record file: a `metric<TAB>signature<TAB>corpus_score`
    /// line, followed by one `index<TAB>score` line per sentence when
    /// requested.
    pub fn write_file(&self, path: &Path, include_sentences: bool) -> Result<()> {
        let mut out = String::new();
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            self.metric, self.signature, self.corpus_score
        ));
        if include_sentences {
            for (i, score) in self.sentence_scores.iter().enumerate() {
                out.push_str(&format!("{i}\t{score}\n"));
            }
        }
        let mut f = std::fs::File::create(path).map_err(|e| ForgeError::io(path, e))?;
        f.write_all(out.as_bytes()).map_err(|e| ForgeError::io(path, e))
    }
}

/// A symmetric matrix of pairwise corpus similarities with a unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl SimilarityMatrix {
    pub fn new(labels: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if values.len() != n || values.iter().any(|row| row.len() != n) {
            return Err(ForgeError::InvalidConfig(format!(
                "similarity matrix must be {n}x{n} to match its labels"
            )));
        }
        Ok(SimilarityMatrix { labels, values })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// TSV with a header row of labels; each data row starts with its label.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push('\t');
        out.push_str(&self.labels.join("\t"));
        out.push('\n');
        for (label, row) in self.labels.iter().zip(&self.values) {
            out.push_str(label);
            for v in row {
                out.push('\t');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| ForgeError::InvalidConfig("empty similarity TSV".into()))?;
        let labels: Vec<String> = header.split('\t').skip(1).map(String::from).collect();
        let mut values = Vec::new();
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let _row_label = fields.next();
            let row: Vec<f64> = fields
                .map(|f| {
                    f.parse::<f64>().map_err(|_| {
                        ForgeError::InvalidConfig(format!("invalid matrix value `{f}`"))
                    })
                })
                .collect::<Result<_>>()?;
            values.push(row);
        }
        SimilarityMatrix::new(labels, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_tsv_roundtrip() {
        let m = SimilarityMatrix::new(
            vec!["hi".into(), "bho".into()],
            vec![vec![1.0, 0.54], vec![0.54, 1.0]],
        )
        .unwrap();
        let reloaded = SimilarityMatrix::from_tsv(&m.to_tsv()).unwrap();
        assert_eq!(reloaded, m);
    }

    #[test]
    fn matrix_shape_is_validated() {
        assert!(SimilarityMatrix::new(vec!["a".into()], vec![vec![1.0, 2.0]]).is_err());
    }
}
