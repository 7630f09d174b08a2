//! Cosine similarity over externally exported sentence vectors.
//!
//! Vector files hold one vector per line as tab-separated decimal floats.
//! The two files must have equal line counts and dimensions, and no zero
//! vectors.

use std::path::Path;

use crate::error::{ForgeError, Result};

use super::ScoreReport;

/// Reads a vector file, checking dimensional consistency as it goes.
pub fn read_vectors(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path).map_err(|e| ForgeError::io(path, e))?;
    let mut vectors: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let vector: Vec<f64> = line
            .split('\t')
            .map(|f| {
                f.trim().parse::<f64>().map_err(|_| ForgeError::MalformedLine {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    message: format!("invalid float `{f}`"),
                })
            })
            .collect::<Result<_>>()?;
        if let Some(first) = vectors.first() {
            if vector.len() != first.len() {
                return Err(ForgeError::DimensionMismatch {
                    line: idx + 1,
                    expected: first.len(),
                    found: vector.len(),
                });
            }
        }
        vectors.push(vector);
    }
    Ok(vectors)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Per-line cosine similarities and their arithmetic mean.
pub fn cosine_report_from_vectors(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<ScoreReport> {
    if a.len() != b.len() {
        return Err(ForgeError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(ForgeError::EmptyCorpus);
    }
    let dim = a[0].len();
    let mut sentence_scores = Vec::with_capacity(a.len());
    for (i, (u, v)) in a.iter().zip(b).enumerate() {
        if u.len() != v.len() {
            return Err(ForgeError::DimensionMismatch {
                line: i + 1,
                expected: u.len(),
                found: v.len(),
            });
        }
        let (nu, nv) = (norm(u), norm(v));
        if nu == 0.0 || nv == 0.0 {
            return Err(ForgeError::ZeroVector { line: i + 1 });
        }
        let dot: f64 = u.iter().zip(v).map(|(x, y)| x * y).sum();
        sentence_scores.push(dot / (nu * nv));
    }
    let corpus_score = sentence_scores.iter().sum::<f64>() / sentence_scores.len() as f64;
    Ok(ScoreReport {
        metric: "cosine".into(),
        signature: format!("cosine|dim:{dim}"),
        corpus_score,
        sentence_scores,
    })
}

/// Reads two vector files and reports their per-line cosine similarities.
pub fn cosine_report(path_a: &Path, path_b: &Path) -> Result<ScoreReport> {
    let a = read_vectors(path_a)?;
    let b = read_vectors(path_b)?;
    if !a.is_empty() && !b.is_empty() && a[0].len() != b[0].len() {
        return Err(ForgeError::DimensionMismatch {
            line: 1,
            expected: a[0].len(),
            found: b[0].len(),
        });
    }
    cosine_report_from_vectors(&a, &b)
}
