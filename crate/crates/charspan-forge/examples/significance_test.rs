//! Paired bootstrap resampling: is system A significantly better than
//! system B?
//!
//! ```bash
//! cargo run -p charspan-forge --example significance_test
//! ```

use charspan_forge::corpus::Sentence;
use charspan_forge::metrics::{paired_bootstrap, BootstrapMetric};
use charspan_forge::seed::SeedSpec;

fn main() -> anyhow::Result<()> {
    let reference: Vec<Sentence> = (0..100)
        .map(|i| Sentence::new(format!("reference sentence number {i} with common words")))
        .collect::<Result<_, _>>()?;

    // System A gets most sentences right; system B garbles half of them.
    let system_a: Vec<Sentence> = (0..100)
        .map(|i| {
            let text = if i % 10 == 0 {
                format!("reference sentence numbered {i} with common words")
            } else {
                format!("reference sentence number {i} with common words")
            };
            Sentence::new(text)
        })
        .collect::<Result<_, _>>()?;
    let system_b: Vec<Sentence> = (0..100)
        .map(|i| {
            let text = if i % 2 == 0 {
                format!("sentence {i} words common")
            } else {
                format!("reference sentence number {i} with common words")
            };
            Sentence::new(text)
        })
        .collect::<Result<_, _>>()?;

    let seed = SeedSpec::new(99, "bootstrap");
    for metric in [BootstrapMetric::Chrf, BootstrapMetric::Bleu] {
        let outcome = paired_bootstrap(&system_a, &system_b, &reference, metric, 1000, &seed)?;
        println!(
            "{}: A={:.2} B={:.2} p={:.6} ({}significant at 0.05)",
            outcome.metric,
            outcome.score_a,
            outcome.score_b,
            outcome.p_value,
            if outcome.p_value < 0.05 { "" } else { "not " }
        );
    }
    Ok(())
}
