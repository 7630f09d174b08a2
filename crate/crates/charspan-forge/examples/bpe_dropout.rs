//! BPE-dropout: sampling different segmentations of the same text by
//! skipping merge applications at random.
//!
//! ```bash
//! cargo run -p charspan-forge --example bpe_dropout
//! ```

use charspan_forge::bpe::learn_bpe;
use charspan_forge::corpus::{ParallelCorpus, Sentence};
use charspan_forge::seed::SeedSpec;

fn main() -> anyhow::Result<()> {
    let corpus = ParallelCorpus::monolingual(
        "demo",
        vec![Sentence::new(
            "segmentation segmentation segmentation variation variation",
        )?],
    );
    let model = learn_bpe(&corpus, 30, 1)?;
    let probe = Sentence::new("segmentation variation")?;

    println!("deterministic: {:?}", model.segment(&probe).tokens);
    let seed = SeedSpec::new(2024, "segment");
    for sample in 0..4 {
        let seg = model.segment_stochastic(&probe, 0.3, seed.seed_for(sample))?;
        println!("dropout 0.3 #{sample}: {:?}", seg.tokens);
        assert_eq!(seg.desegment()?, probe);
    }
    println!("dropout 1.0:   {:?}", model.segment_stochastic(&probe, 1.0, 0)?.tokens);
    Ok(())
}
