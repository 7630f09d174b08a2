//! Learn a BPE vocabulary, segment, desegment, and round-trip the model
//! through its merges and vocab files.
//!
//! ```bash
//! cargo run -p charspan-forge --example bpe_basics
//! ```

use charspan_forge::bpe::{learn_bpe, BpeModel};
use charspan_forge::corpus::{ParallelCorpus, Sentence};

fn main() -> anyhow::Result<()> {
    let corpus = ParallelCorpus::monolingual(
        "demo",
        vec![
            Sentence::new("low lower lowest slow slower slowest")?,
            Sentence::new("new newer newest few fewer fewest")?,
        ],
    );
    let model = learn_bpe(&corpus, 40, 1)?;
    println!("learned {} merges; first five:", model.merges().len());
    for (left, right) in model.merges().iter().take(5) {
        println!("  {left} + {right}");
    }

    let probe = Sentence::new("slowest newcomer")?;
    let segmentation = model.segment(&probe);
    println!("\nsegment(\"{probe}\") = {:?}", segmentation.tokens);
    println!("desegment -> \"{}\"", segmentation.desegment()?);

    let dir = tempfile::tempdir()?;
    let merges_path = dir.path().join("demo.merges");
    let vocab_path = dir.path().join("demo.vocab");
    model.save(&merges_path, &vocab_path)?;
    let reloaded = BpeModel::load(&merges_path, &vocab_path)?;
    assert_eq!(reloaded, model);
    println!("\nmodel round-trips through {:?}", merges_path.file_name().unwrap());
    Ok(())
}
