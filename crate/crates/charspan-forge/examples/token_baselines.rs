//! Token-level augmentation baselines: SwitchOut-style replacement and
//! token dropout.
//!
//! ```bash
//! cargo run -p charspan-forge --example token_baselines
//! ```

use charspan_forge::corpus::{ParallelCorpus, Sentence};
use charspan_forge::seed::SeedSpec;
use charspan_forge::token_augment::{switchout, token_dropout, TokenAugmentConfig, TokenLevel};

fn main() -> anyhow::Result<()> {
    let corpus = ParallelCorpus::monolingual(
        "demo",
        vec![
            Sentence::new("the model sees a perturbed copy of every sentence")?,
            Sentence::new("token level noise is a classical regularizer")?,
        ],
    );

    let vocab: Vec<String> = ["cat", "dog", "tree", "river"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let switch_cfg = TokenAugmentConfig::switchout(
        0.3,
        TokenLevel::Word,
        vocab,
        SeedSpec::new(13, "switchout"),
    );
    let switched = switchout(&corpus, &switch_cfg)?;

    let drop_cfg = TokenAugmentConfig::dropout(0.3, TokenLevel::Word, SeedSpec::new(13, "dropout"));
    let dropped = token_dropout(&corpus, &drop_cfg)?;

    for i in 0..corpus.len() {
        println!("original:  {}", corpus.source()[i]);
        println!("switchout: {}", switched.source()[i]);
        println!("dropout:   {}", dropped.source()[i]);
        println!();
    }
    Ok(())
}
