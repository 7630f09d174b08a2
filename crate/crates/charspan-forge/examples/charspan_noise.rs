//! Span noise on a small corpus: plan events, apply them, and inspect the
//! audit trail.
//!
//! ```bash
//! cargo run -p charspan-forge --example charspan_noise
//! ```

use charspan_forge::alphabet::CandidateAlphabet;
use charspan_forge::corpus::{ParallelCorpus, Sentence};
use charspan_forge::noise::{charspan_augment, NoiseConfig};
use charspan_forge::seed::SeedSpec;

fn main() -> anyhow::Result<()> {
    let source = [
        "cross lingual transfer from a related language",
        "cognates often look like spelling variations",
        "robust models tolerate character level divergence",
    ];
    let corpus = ParallelCorpus::monolingual(
        "demo",
        source
            .iter()
            .map(|s| Sentence::new(*s))
            .collect::<Result<_, _>>()?,
    );

    // Defaults: 9-11% character budget, spans of 1-3, delete/replace at
    // equal probability.
    let cfg = NoiseConfig::charspan(CandidateAlphabet::latin_basic(), SeedSpec::new(42, "noise"));
    let (noised, plans) = charspan_augment(&corpus, &cfg)?;

    for (original, (new, plan)) in corpus
        .source()
        .iter()
        .zip(noised.source().iter().zip(&plans))
    {
        println!("original: {original}");
        println!("noised:   {new}");
        println!(
            "          percent={:.2} affected={} events={}",
            plan.percent,
            plan.affected_units(),
            plan.events.len()
        );
        for event in &plan.events {
            println!(
                "          {} at {} len {} (sampled {}){}",
                event.op,
                event.start,
                event.span_len,
                event.sampled_span,
                event
                    .replacement
                    .as_deref()
                    .map(|r| format!(" -> {r}"))
                    .unwrap_or_default()
            );
        }
        println!();
    }
    Ok(())
}
