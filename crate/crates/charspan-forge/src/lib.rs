//! Character-span noise augmentation and subword pipelines for low-resource
//! machine translation data preparation.
//!
//! The crate turns a high-resource parallel corpus into noise-augmented,
//! BPE-segmented, training-ready files, and ships the evaluation tooling to
//! audit and compare the results:
//!
//! * [`noise`] — span noise (deletion / single-character replacement of 1–N
//!   character spans within a percentage budget) and the single-character
//!   baseline, as a pure event planner plus a pure applier;
//! * [`token_augment`] — SwitchOut-style token replacement and token
//!   dropout baselines;
//! * [`bpe`] — from-scratch BPE learning, deterministic and dropout
//!   segmentation, and desegmentation;
//! * [`metrics`] — chrF, BLEU, LCSR lexical similarity, paired bootstrap
//!   significance, and cosine aggregation over exported sentence vectors;
//! * [`script`] — Brahmic script conversion by Unicode block offset;
//! * [`pipeline`] — the manifest-driven end-to-end runner behind the
//!   `charspan-forge run` command.
//!
//! Every randomized step draws from substreams derived with [`seed`], so
//! results are byte-identical across runs and worker-thread counts.
//!
//! ```
//! use charspan_forge::alphabet::CandidateAlphabet;
//! use charspan_forge::corpus::{ParallelCorpus, Sentence};
//! use charspan_forge::noise::{charspan_augment, NoiseConfig};
//! use charspan_forge::seed::SeedSpec;
//!
//! let corpus = ParallelCorpus::monolingual(
//!     "demo",
//!     vec![Sentence::new("cross lingual transfer needs robust models").unwrap()],
//! );
//! let cfg = NoiseConfig::charspan(CandidateAlphabet::latin_basic(), SeedSpec::new(42, "noise"));
//! let (noised, plans) = charspan_augment(&corpus, &cfg).unwrap();
//! assert_eq!(noised.len(), 1);
//! assert!(!plans[0].events.is_empty());
//! ```

pub mod alphabet;
pub mod bpe;
pub mod corpus;
pub mod error;
pub mod metrics;
pub mod noise;
pub mod pipeline;
pub mod script;
pub mod seed;
pub mod token_augment;

pub use alphabet::CandidateAlphabet;
pub use corpus::{CharUnit, ParallelCorpus, Sentence};
pub use error::{ForgeError, Result};
pub use seed::{derive_seed, SeedSpec};
