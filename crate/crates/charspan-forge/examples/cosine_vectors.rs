//! Cosine similarity over sentence vectors exported by an external encoder
//! (one tab-separated vector per line).
//!
//! ```bash
//! cargo run -p charspan-forge --example cosine_vectors
//! ```

use charspan_forge::metrics::cosine_report;

fn main() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    let a = dir.path().join("hrl.tsv");
    let b = dir.path().join("elrl.tsv");
    // Three 4-dimensional sentence representations per language.
    std::fs::write(&a, "0.9\t0.1\t0.0\t0.2\n0.5\t0.5\t0.1\t0.0\n0.0\t0.2\t0.8\t0.1\n")?;
    std::fs::write(&b, "0.8\t0.2\t0.1\t0.2\n0.4\t0.6\t0.2\t0.0\n0.1\t0.1\t0.9\t0.2\n")?;

    let report = cosine_report(&a, &b)?;
    println!("mean cosine = {:.4}   [{}]", report.corpus_score, report.signature);
    for (i, score) in report.sentence_scores.iter().enumerate() {
        println!("  pair {i}: {score:.4}");
    }
    Ok(())
}
