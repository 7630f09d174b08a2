//! A complete manifest-driven pipeline run: noise, vocabulary, segmented
//! training files, and audit statistics.
//!
//! ```bash
//! cargo run -p charspan-forge --example pipeline_run
//! ```

use charspan_forge::corpus::{write_sentences, Sentence};
use charspan_forge::pipeline::{run_manifest, PipelineManifest};

fn main() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    let src = dir.path().join("train.hi");
    let tgt = dir.path().join("train.en");
    let source: Vec<Sentence> = (0..50)
        .map(|i| Sentence::new(format!("high resource source sentence number {i}")))
        .collect::<Result<_, _>>()?;
    let target: Vec<Sentence> = (0..50)
        .map(|i| Sentence::new(format!("english target sentence number {i}")))
        .collect::<Result<_, _>>()?;
    write_sentences(&src, &source)?;
    write_sentences(&tgt, &target)?;

    let manifest_json = format!(
        r#"{{
  "input": {{"source": {:?}, "target": {:?}}},
  "noise": {{"charspan": {{"alphabet": "latin-basic"}}}},
  "vocab_source": "noisy",
  "vocab_size": 120,
  "min_pair_freq": 1,
  "segmentation_dropout": 0.1,
  "dropout_epochs": 2,
  "keep_clean": true,
  "output_dir": {:?},
  "master_seed": 20240601
}}"#,
        src.display().to_string(),
        tgt.display().to_string(),
        dir.path().join("prepared").display().to_string()
    );
    let manifest_path = dir.path().join("manifest.json");
    std::fs::write(&manifest_path, &manifest_json)?;

    let manifest = PipelineManifest::from_file(&manifest_path)?;
    let summary = run_manifest(&manifest, Some(4))?;

    println!("artifacts under {}:", summary.output_dir.display());
    for artifact in &summary.artifacts {
        println!("  {artifact}");
    }
    if let Some(augmentation) = &summary.stats.augmentation {
        println!(
            "\nnoised {} sentences, {:.2}% of characters affected, corpus LCSR {:.4}",
            augmentation.sentences_processed,
            augmentation.realized_mean_percent,
            augmentation.corpus_lcsr
        );
    }
    Ok(())
}
