//! Pipeline invariants beyond the acceptance criteria: composability with
//! the library API, keep_clean isolation, target integrity, and the less
//! common manifest shapes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use charspan_forge::alphabet::CandidateAlphabet;
use charspan_forge::bpe::learn_bpe;
use charspan_forge::corpus::{write_sentences, ParallelCorpus, Sentence};
use charspan_forge::noise::{charspan_augment, NoiseConfig};
use charspan_forge::pipeline::{
    run_manifest, PipelineManifest, FILE_MERGES, FILE_SEG_SRC, FILE_TRAIN_SRC, LABEL_NOISE,
};
use charspan_forge::seed::SeedSpec;

fn sentence(text: &str) -> Sentence {
    Sentence::new(text).unwrap()
}

fn write_demo_corpus(dir: &Path) -> (PathBuf, PathBuf) {
    let src = dir.join("demo.src");
    let tgt = dir.join("demo.tgt");
    let source: Vec<Sentence> = (0..60)
        .map(|i| sentence(&format!("supervised training needs robust sentence {i}")))
        .collect();
    let target: Vec<Sentence> = (0..60)
        .map(|i| sentence(&format!("the corresponding target line {i}")))
        .collect();
    write_sentences(&src, &source).unwrap();
    write_sentences(&tgt, &target).unwrap();
    (src, tgt)
}

fn manifest_from(json: &str) -> PipelineManifest {
    serde_json::from_str(json).unwrap()
}

fn tree_bytes(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut map = BTreeMap::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry.unwrap();
        if entry.file_type().is_file() {
            let rel = entry
                .path()
                .strip_prefix(root)
                .unwrap()
                .to_string_lossy()
                .into_owned();
            map.insert(rel, std::fs::read(entry.path()).unwrap());
        }
    }
    map
}

#[test]
fn manual_stages_match_run_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let (src, tgt) = write_demo_corpus(dir.path());
    let out = dir.path().join("out");
    let master_seed = 555u64;
    let manifest = manifest_from(&format!(
        r#"{{
  "input": {{"source": {:?}, "target": {:?}}},
  "noise": {{"charspan": {{"alphabet": "latin-basic"}}}},
  "vocab_source": "noisy",
  "vocab_size": 90,
  "min_pair_freq": 1,
  "output_dir": {:?},
  "master_seed": {master_seed}
}}"#,
        src.display().to_string(),
        tgt.display().to_string(),
        out.display().to_string()
    ));
    run_manifest(&manifest, None).unwrap();
    let tree = tree_bytes(&out);

    // The same stages by hand, using the documented stream labels.
    let corpus = ParallelCorpus::load(&src, Some(&tgt)).unwrap();
    let cfg = NoiseConfig::charspan(
        CandidateAlphabet::latin_basic(),
        SeedSpec::new(master_seed, LABEL_NOISE),
    );
    let (noised, _plans) = charspan_augment(&corpus, &cfg).unwrap();
    let model = learn_bpe(&noised, 90, 1).unwrap();

    let manual_src = dir.path().join("manual.src");
    write_sentences(&manual_src, noised.source()).unwrap();
    assert_eq!(std::fs::read(&manual_src).unwrap(), tree[FILE_TRAIN_SRC]);

    let manual_merges = dir.path().join("manual.merges");
    let manual_vocab = dir.path().join("manual.vocab");
    model.save(&manual_merges, &manual_vocab).unwrap();
    assert_eq!(std::fs::read(&manual_merges).unwrap(), tree[FILE_MERGES]);

    // Deterministic segmentation (dropout 0) is seed-free.
    let segmented: String = noised
        .source()
        .iter()
        .map(|s| model.segment(s).tokens.join(" ") + "\n")
        .collect();
    assert_eq!(segmented.into_bytes(), tree[FILE_SEG_SRC]);
}

#[test]
fn keep_clean_adds_one_file_and_changes_nothing_else() {
    let dir = tempfile::tempdir().unwrap();
    let (src, tgt) = write_demo_corpus(dir.path());
    let base = |keep: bool, out: &Path| {
        manifest_from(&format!(
            r#"{{
  "input": {{"source": {:?}, "target": {:?}}},
  "noise": {{"unigram": {{"alphabet": "latin-basic"}}}},
  "vocab_size": 90,
  "min_pair_freq": 1,
  "keep_clean": {keep},
  "output_dir": {:?},
  "master_seed": 1
}}"#,
            src.display().to_string(),
            tgt.display().to_string(),
            out.display().to_string()
        ))
    };
    let out_plain = dir.path().join("plain");
    let out_keep = dir.path().join("keep");
    run_manifest(&base(false, &out_plain), None).unwrap();
    run_manifest(&base(true, &out_keep), None).unwrap();

    let mut tree_plain = tree_bytes(&out_plain);
    let mut tree_keep = tree_bytes(&out_keep);
    let clean = tree_keep.remove("clean.src").expect("clean.src present");
    assert_eq!(clean, std::fs::read(&src).unwrap());
    // The echo records the keep_clean flag itself; everything else is
    // byte-identical.
    tree_plain.remove("manifest.echo.json");
    tree_keep.remove("manifest.echo.json");
    assert_eq!(tree_plain, tree_keep);
}

#[test]
fn target_bytes_survive_every_noise_kind() {
    let dir = tempfile::tempdir().unwrap();
    let (src, tgt) = write_demo_corpus(dir.path());
    let vocab_file = dir.path().join("switch.vocab");
    std::fs::write(&vocab_file, "alpha\nbeta\ngamma\n").unwrap();
    let target_bytes = std::fs::read(&tgt).unwrap();

    let noise_variants = [
        r#""none""#.to_string(),
        r#"{"charspan": {"alphabet": "latin-basic"}}"#.to_string(),
        r#"{"unigram": {"alphabet": "latin-basic"}}"#.to_string(),
        format!(r#"{{"switchout": {{"vocab_file": {:?}}}}}"#, vocab_file.display().to_string()),
        r#"{"token_dropout": {"rate": 0.2}}"#.to_string(),
    ];
    for (i, noise) in noise_variants.iter().enumerate() {
        let out = dir.path().join(format!("out{i}"));
        let manifest = manifest_from(&format!(
            r#"{{
  "input": {{"source": {:?}, "target": {:?}}},
  "noise": {noise},
  "vocab_size": 90,
  "min_pair_freq": 1,
  "output_dir": {:?},
  "master_seed": 5
}}"#,
            src.display().to_string(),
            tgt.display().to_string(),
            out.display().to_string()
        ));
        run_manifest(&manifest, None).unwrap();
        assert_eq!(
            std::fs::read(out.join("train.tgt")).unwrap(),
            target_bytes,
            "noise variant {i} touched the target side"
        );
    }
}

#[test]
fn monolingual_manifest_omits_target_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let (src, _) = write_demo_corpus(dir.path());
    let out = dir.path().join("mono");
    let manifest = manifest_from(&format!(
        r#"{{
  "input": {{"source": {:?}}},
  "noise": {{"charspan": {{"alphabet": "latin-basic"}}}},
  "vocab_size": 80,
  "min_pair_freq": 1,
  "output_dir": {:?},
  "master_seed": 2
}}"#,
        src.display().to_string(),
        out.display().to_string()
    ));
    run_manifest(&manifest, None).unwrap();
    let names: Vec<String> = tree_bytes(&out).into_keys().collect();
    assert_eq!(
        names,
        vec![
            "bpe.merges",
            "bpe.vocab",
            "manifest.echo.json",
            "plan.trace",
            "stats.json",
            "train.bpe.src",
            "train.src",
        ]
    );
}

#[test]
fn external_vocab_source_reuses_merges() {
    let dir = tempfile::tempdir().unwrap();
    let (src, tgt) = write_demo_corpus(dir.path());

    // First learn a vocabulary in one run.
    let out_learn = dir.path().join("learn");
    let manifest = manifest_from(&format!(
        r#"{{
  "input": {{"source": {:?}, "target": {:?}}},
  "vocab_size": 90,
  "min_pair_freq": 1,
  "output_dir": {:?},
  "master_seed": 3
}}"#,
        src.display().to_string(),
        tgt.display().to_string(),
        out_learn.display().to_string()
    ));
    run_manifest(&manifest, None).unwrap();
    let merges_path = out_learn.join("bpe.merges");

    // Then consume it as an external vocabulary.
    let out_ext = dir.path().join("ext");
    let manifest = manifest_from(&format!(
        r#"{{
  "input": {{"source": {:?}, "target": {:?}}},
  "noise": {{"charspan": {{"alphabet": "latin-basic"}}}},
  "vocab_source": {{"external": {:?}}},
  "output_dir": {:?},
  "master_seed": 3
}}"#,
        src.display().to_string(),
        tgt.display().to_string(),
        merges_path.display().to_string(),
        out_ext.display().to_string()
    ));
    run_manifest(&manifest, None).unwrap();
    assert_eq!(
        std::fs::read(&merges_path).unwrap(),
        std::fs::read(out_ext.join("bpe.merges")).unwrap()
    );
}

#[test]
fn script_conversion_and_nfc_flags_flow_through() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("deva.src");
    // Decomposed "ka + nukta" becomes precomposed U+0958 under NFC... which
    // NFC actually normalizes the other way: U+0958 is excluded from
    // composition, so NFC(U+0958) = U+0915 U+093C. Use that direction.
    std::fs::write(&src, "\u{0958}\u{0915} \u{0916}\u{0917}\n").unwrap();
    let out = dir.path().join("conv");
    let manifest = manifest_from(&format!(
        r#"{{
  "input": {{"source": {:?}}},
  "nfc": true,
  "script_conversion": {{"from": "devanagari", "to": "bengali"}},
  "vocab_size": 30,
  "min_pair_freq": 1,
  "output_dir": {:?},
  "master_seed": 4
}}"#,
        src.display().to_string(),
        out.display().to_string()
    ));
    run_manifest(&manifest, None).unwrap();
    let converted = std::fs::read_to_string(out.join("train.src")).unwrap();
    // NFC decomposes U+0958 to U+0915 U+093C; block conversion then maps
    // both (Bengali has KA and NUKTA at the same offsets).
    assert_eq!(converted, "\u{0995}\u{09BC}\u{0995} \u{0996}\u{0997}\n");
    let stats: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats["script_conversion"]["converted"], 5);
}

#[test]
fn multi_epoch_dropout_emits_distinct_segmentations() {
    let dir = tempfile::tempdir().unwrap();
    let (src, tgt) = write_demo_corpus(dir.path());
    let out = dir.path().join("epochs");
    let manifest = manifest_from(&format!(
        r#"{{
  "input": {{"source": {:?}, "target": {:?}}},
  "vocab_size": 90,
  "min_pair_freq": 1,
  "segmentation_dropout": 0.3,
  "dropout_epochs": 3,
  "output_dir": {:?},
  "master_seed": 6
}}"#,
        src.display().to_string(),
        tgt.display().to_string(),
        out.display().to_string()
    ));
    run_manifest(&manifest, None).unwrap();
    let ep1 = std::fs::read_to_string(out.join("train.bpe.ep1.src")).unwrap();
    let ep2 = std::fs::read_to_string(out.join("train.bpe.ep2.src")).unwrap();
    let ep3 = std::fs::read_to_string(out.join("train.bpe.ep3.src")).unwrap();
    assert_ne!(ep1, ep2);
    assert_ne!(ep2, ep3);
    // Every epoch still desegments back to the same source.
    let source = std::fs::read_to_string(out.join("train.src")).unwrap();
    for epoch in [&ep1, &ep2, &ep3] {
        let restored: String = epoch
            .lines()
            .map(|line| {
                charspan_forge::bpe::desegment_tokens(line.split_whitespace(), "@@").unwrap() + "\n"
            })
            .collect();
        assert_eq!(restored, source);
    }
}
