//! LCSR lexical similarity: cognate pairs, pairwise corpus matrices, and
//! the SVG heatmap.
//!
//! ```bash
//! cargo run -p charspan-forge --example lexical_similarity
//! ```

use charspan_forge::corpus::{ParallelCorpus, Sentence};
use charspan_forge::metrics::{lcsr, similarity_matrix};
use charspan_forge::pipeline::emit_heatmap;

fn main() -> anyhow::Result<()> {
    // A cognate pair: the same word in two closely related languages.
    let a = Sentence::new("lagta")?;
    let b = Sentence::new("laagata")?;
    println!("lcsr(\"{a}\", \"{b}\") = {:.6}", lcsr(&a, &b));

    let make = |name: &str, lines: [&str; 3]| -> anyhow::Result<ParallelCorpus> {
        Ok(ParallelCorpus::monolingual(
            name,
            lines
                .iter()
                .map(|l| Sentence::new(*l))
                .collect::<Result<_, _>>()?,
        ))
    };
    let high = make("high", ["wasser trinken", "brot essen", "haus bauen"])?;
    let close = make("close", ["water drinken", "brood eten", "huis bouwen"])?;
    let far = make("far", ["mizu nomu", "pan taberu", "ie tateru"])?;

    let matrix = similarity_matrix(&[high, close, far], true)?;
    print!("{}", matrix.to_tsv());

    let dir = tempfile::tempdir()?;
    let tsv = dir.path().join("similarity.tsv");
    let svg = dir.path().join("similarity.svg");
    emit_heatmap(&matrix, &tsv, Some(&svg))?;
    println!("heatmap written to {}", svg.display());
    Ok(())
}
