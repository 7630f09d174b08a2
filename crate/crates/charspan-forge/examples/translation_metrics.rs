//! Score a hypothesis corpus against a reference with chrF and BLEU.
//!
//! ```bash
//! cargo run -p charspan-forge --example translation_metrics
//! ```

use charspan_forge::corpus::Sentence;
use charspan_forge::metrics::{bleu, chrf, ChrfParams};

fn main() -> anyhow::Result<()> {
    let hypothesis: Vec<Sentence> = [
        "the cat sat on the mat",
        "a quick brown fox jumped over a dog",
        "rain falls mostly on the plain",
    ]
    .iter()
    .map(|s| Sentence::new(*s))
    .collect::<Result<_, _>>()?;
    let reference: Vec<Sentence> = [
        "the cat sat on the mat",
        "the quick brown fox jumps over the lazy dog",
        "the rain in spain falls mainly on the plain",
    ]
    .iter()
    .map(|s| Sentence::new(*s))
    .collect::<Result<_, _>>()?;

    let chrf_report = chrf(&hypothesis, &reference, &ChrfParams::default())?;
    println!("chrf  = {:.4}   [{}]", chrf_report.corpus_score, chrf_report.signature);
    for (i, score) in chrf_report.sentence_scores.iter().enumerate() {
        println!("  sentence {i}: {score:.4}");
    }

    let bleu_report = bleu(&hypothesis, &reference)?;
    println!("bleu  = {:.4}   [{}]", bleu_report.corpus_score, bleu_report.signature);
    Ok(())
}
