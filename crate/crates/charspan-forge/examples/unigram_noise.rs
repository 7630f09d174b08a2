//! The single-character noise baseline: insert, delete, and replace one
//! character at a time, same 9-11% budget.
//!
//! ```bash
//! cargo run -p charspan-forge --example unigram_noise
//! ```

use charspan_forge::alphabet::CandidateAlphabet;
use charspan_forge::corpus::{ParallelCorpus, Sentence};
use charspan_forge::noise::{unigram_char_noise, NoiseConfig};
use charspan_forge::seed::SeedSpec;

fn main() -> anyhow::Result<()> {
    let corpus = ParallelCorpus::monolingual(
        "demo",
        vec![
            Sentence::new("single character edits model small lexical drift")?,
            Sentence::new("span edits model larger divergence between languages")?,
        ],
    );

    let cfg = NoiseConfig::unigram(CandidateAlphabet::latin_basic(), SeedSpec::new(7, "noise"));
    let (noised, plans) = unigram_char_noise(&corpus, &cfg)?;

    for (original, (new, plan)) in corpus
        .source()
        .iter()
        .zip(noised.source().iter().zip(&plans))
    {
        println!("original: {original}");
        println!("noised:   {new}");
        let ops: Vec<String> = plan
            .events
            .iter()
            .map(|e| format!("{}@{}", e.op, e.start))
            .collect();
        println!("events:   {}", ops.join(" "));
        println!();
    }
    Ok(())
}
