//! Command-line front end. All logic lives in the library; this binary only
//! parses arguments, wires configs, and prints results.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use charspan_forge::alphabet::CandidateAlphabet;
use charspan_forge::bpe::{desegment_tokens, learn_bpe, BpeModel, DEFAULT_MARKER};
use charspan_forge::corpus::{read_sentences, write_sentences, CharUnit, ParallelCorpus, Sentence};
use charspan_forge::error::{ForgeError, Result};
use charspan_forge::metrics::{
    bleu, chrf, cosine_report, lcsr, mean_lcsr, paired_bootstrap, similarity_matrix,
    BootstrapMetric, ChrfParams, ScoreReport,
};
use charspan_forge::noise::{
    charspan_augment, default_min_sentence_len, plans_from_events, read_trace_file,
    unigram_char_noise, write_trace_file, NoiseConfig, NoiseMode, OpWeights, OverlapPolicy,
    SpanPayload,
};
use charspan_forge::pipeline::{emit_heatmap, run_manifest, stats, PipelineManifest};
use charspan_forge::script::{convert_corpus, Script};
use charspan_forge::seed::SeedSpec;
use charspan_forge::token_augment::{
    augment_tokens, TokenAugmentConfig, TokenLevel, TokenStrategy,
};

#[derive(Parser)]
#[command(
    name = "charspan-forge",
    version,
    about = "Character-span noise, BPE subword pipelines, and MT evaluation metrics"
)]
struct Cli {
    /// Master seed for randomized subcommands (`run` uses the manifest's
    /// own master_seed instead).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for per-sentence work (0 = automatic). Results do not
    /// depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Suppress informational output on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Charspan,
    Unigram,
    Switchout,
    TokenDropout,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Budget,
    Literal,
}

#[derive(Clone, Copy, ValueEnum)]
enum OverlapArg {
    Forbid,
    Allow,
}

#[derive(Clone, Copy, ValueEnum)]
enum PayloadArg {
    SingleChar,
    MatchSpanLength,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Word,
    Subword,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Chrf,
    Bleu,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Codepoint,
    Grapheme,
}

impl From<UnitArg> for CharUnit {
    fn from(u: UnitArg) -> Self {
        match u {
            UnitArg::Codepoint => CharUnit::CodePoint,
            UnitArg::Grapheme => CharUnit::Grapheme,
        }
    }
}

fn parse_weights(text: &str) -> std::result::Result<OpWeights, String> {
    let mut weights = OpWeights {
        delete: 0.0,
        replace: 0.0,
        insert: 0.0,
    };
    for part in text.split(',') {
        let (op, value) = part
            .split_once('=')
            .ok_or_else(|| format!("expected `op=weight`, got `{part}`"))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| format!("invalid weight `{value}`"))?;
        match op.trim() {
            "delete" => weights.delete = value,
            "replace" => weights.replace = value,
            "insert" => weights.insert = value,
            other => return Err(format!("unknown operation `{other}`")),
        }
    }
    Ok(weights)
}

#[derive(Args)]
struct ReportArgs {
    /// Write a metric record file (metric, signature, corpus score).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Include per-sentence scores in the record file.
    #[arg(long)]
    sentence_scores: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Noise the source side of a corpus.
    Augment {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        tgt: Option<PathBuf>,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        out_src: PathBuf,
        /// Where to copy the (untouched) target side.
        #[arg(long)]
        out_tgt: Option<PathBuf>,
        #[arg(long, default_value_t = 9.0)]
        percent_min: f64,
        #[arg(long, default_value_t = 11.0)]
        percent_max: f64,
        #[arg(long, default_value_t = 3)]
        max_span: usize,
        /// Operation weights, e.g. `delete=0.5,replace=0.5`.
        #[arg(long, value_parser = parse_weights)]
        ops: Option<OpWeights>,
        /// `latin-basic`, `devanagari-basic`, or a one-character-per-line
        /// file.
        #[arg(long, default_value = "latin-basic")]
        alphabet: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Budget)]
        mode: ModeArg,
        #[arg(long)]
        min_sentence_len: Option<usize>,
        #[arg(long, value_enum, default_value_t = OverlapArg::Forbid)]
        overlap: OverlapArg,
        #[arg(long, value_enum, default_value_t = PayloadArg::SingleChar)]
        payload: PayloadArg,
        #[arg(long, value_enum, default_value_t = UnitArg::Codepoint)]
        unit: UnitArg,
        /// Token replacement/deletion rate for switchout and token-dropout.
        #[arg(long, default_value_t = 0.1)]
        rate: f64,
        #[arg(long, value_enum, default_value_t = LevelArg::Word)]
        level: LevelArg,
        /// Replacement vocabulary (one token per line); required for
        /// switchout.
        #[arg(long)]
        vocab: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        min_tokens_kept: usize,
        /// Write the plan trace (char-level methods only).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the augmentation report as JSON (char-level methods only).
        #[arg(long)]
        stats: Option<PathBuf>,
    },

    /// Learn a BPE vocabulary from a corpus.
    LearnBpe {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        tgt: Option<PathBuf>,
        #[arg(long, default_value_t = 16_000)]
        vocab_size: usize,
        #[arg(long, default_value_t = 2)]
        min_pair_freq: u64,
        #[arg(long)]
        merges: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
    },

    /// Segment a corpus with a learned merges file.
    ApplyBpe {
        #[arg(long)]
        merges: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// BPE-dropout probability; each merge application is skipped
        /// independently with this probability.
        #[arg(long, default_value_t = 0.0)]
        dropout: f64,
    },

    /// Undo segmentation: strip continuation markers and rejoin words.
    Desegment {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value = DEFAULT_MARKER)]
        marker: String,
    },

    /// chrF between a hypothesis corpus and a reference corpus.
    Chrf {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long, default_value_t = 6)]
        char_order: usize,
        #[arg(long, default_value_t = 0)]
        word_order: usize,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        /// Include n-gram orders that are empty on both sides in the
        /// average.
        #[arg(long)]
        no_effective_order: bool,
        #[command(flatten)]
        report: ReportArgs,
    },

    /// BLEU between a hypothesis corpus and a reference corpus.
    Bleu {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[command(flatten)]
        report: ReportArgs,
    },

    /// Mean longest-common-subsequence ratio over aligned lines.
    Lcsr {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[command(flatten)]
        report: ReportArgs,
    },

    /// Pairwise LCSR similarity matrix over several corpora.
    Simmatrix {
        /// Two or more corpus files.
        #[arg(long = "corpus", num_args = 1.., required = true)]
        corpora: Vec<PathBuf>,
        /// Labels for the matrix header (default: file stems).
        #[arg(long, value_delimiter = ',')]
        labels: Option<Vec<String>>,
        #[arg(long)]
        tsv: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Compare up to the shorter corpus instead of requiring equal line
        /// counts.
        #[arg(long)]
        truncate: bool,
    },

    /// Paired bootstrap significance test between two systems.
    Bootstrap {
        #[arg(long)]
        hyp_a: PathBuf,
        #[arg(long)]
        hyp_b: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricArg::Chrf)]
        metric: MetricArg,
        #[arg(long, default_value_t = 1000)]
        resamples: usize,
    },

    /// Mean cosine similarity between two sentence-vector files.
    Cosine {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[command(flatten)]
        report: ReportArgs,
    },

    /// Convert between Brahmic scripts by Unicode block offset.
    ConvertScript {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },

    /// Recompute the augmentation report from a plan trace.
    Stats {
        #[arg(long)]
        original: PathBuf,
        #[arg(long)]
        noised: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        /// Mark sentences below this length as skipped-short in the report.
        #[arg(long)]
        min_sentence_len: Option<usize>,
        #[arg(long, value_enum, default_value_t = UnitArg::Codepoint)]
        unit: UnitArg,
        /// Output path (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Run a full pipeline manifest.
    Run {
        #[arg(long)]
        manifest: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.threads > 0 {
        // Global pool for every subcommand except `run`, which builds its
        // own scoped pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn info(cli: &Cli, message: impl AsRef<str>) {
    if !cli.quiet {
        eprintln!("{}", message.as_ref());
    }
}

fn write_report(report: &ScoreReport, args: &ReportArgs) -> Result<()> {
    if let Some(path) = &args.report {
        report.write_file(path, args.sentence_scores)?;
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Augment {
            src,
            tgt,
            method,
            out_src,
            out_tgt,
            percent_min,
            percent_max,
            max_span,
            ops,
            alphabet,
            mode,
            min_sentence_len,
            overlap,
            payload,
            unit,
            rate,
            level,
            vocab,
            min_tokens_kept,
            trace,
            stats: stats_out,
        } => {
            let corpus = ParallelCorpus::load(src, tgt.as_deref())?;
            let seed = SeedSpec::new(cli.seed, "noise");
            let noised = match method {
                MethodArg::Charspan | MethodArg::Unigram => {
                    let unigram = matches!(method, MethodArg::Unigram);
                    let span = if unigram { 1 } else { *max_span };
                    let cfg = NoiseConfig {
                        percent_min: *percent_min,
                        percent_max: *percent_max,
                        max_span: span,
                        weights: ops.unwrap_or(if unigram {
                            OpWeights::uniform_all()
                        } else {
                            OpWeights::delete_replace()
                        }),
                        alphabet: CandidateAlphabet::resolve(alphabet)?,
                        mode: match mode {
                            ModeArg::Budget => NoiseMode::Budget,
                            ModeArg::Literal => NoiseMode::Literal,
                        },
                        min_sentence_len: min_sentence_len
                            .unwrap_or_else(|| default_min_sentence_len(span)),
                        overlap: match overlap {
                            OverlapArg::Forbid => OverlapPolicy::Forbid,
                            OverlapArg::Allow => OverlapPolicy::Allow,
                        },
                        payload: match payload {
                            PayloadArg::SingleChar => SpanPayload::SingleChar,
                            PayloadArg::MatchSpanLength => SpanPayload::MatchSpanLength,
                        },
                        char_unit: (*unit).into(),
                        seed,
                    };
                    let (noised, plans) = if unigram {
                        unigram_char_noise(&corpus, &cfg)?
                    } else {
                        charspan_augment(&corpus, &cfg)?
                    };
                    if let Some(path) = trace {
                        write_trace_file(path, &plans)?;
                    }
                    if let Some(path) = stats_out {
                        let report = stats(&corpus, &noised, &plans, cfg.char_unit)?;
                        let json = serde_json::to_string_pretty(&report)
                            .map_err(|e| ForgeError::Internal(e.to_string()))?;
                        std::fs::write(path, json + "\n").map_err(|e| ForgeError::io(path, e))?;
                    }
                    noised
                }
                MethodArg::Switchout | MethodArg::TokenDropout => {
                    if trace.is_some() || stats_out.is_some() {
                        return Err(ForgeError::InvalidConfig(
                            "--trace/--stats apply to char-level methods only".into(),
                        ));
                    }
                    let strategy = match method {
                        MethodArg::Switchout => TokenStrategy::SwitchOut,
                        _ => TokenStrategy::Dropout,
                    };
                    let vocab_tokens = match (vocab, strategy) {
                        (Some(path), _) => read_sentences(path)?
                            .into_iter()
                            .map(Sentence::into_string)
                            .filter(|t| !t.is_empty())
                            .collect(),
                        (None, TokenStrategy::SwitchOut) => {
                            return Err(ForgeError::InvalidConfig(
                                "switchout requires --vocab".into(),
                            ))
                        }
                        (None, TokenStrategy::Dropout) => Vec::new(),
                    };
                    let cfg = TokenAugmentConfig {
                        rate: *rate,
                        level: match level {
                            LevelArg::Word => TokenLevel::Word,
                            LevelArg::Subword => TokenLevel::Subword,
                        },
                        strategy,
                        vocab: vocab_tokens,
                        seed,
                        min_tokens_kept: *min_tokens_kept,
                    };
                    augment_tokens(&corpus, &cfg)?
                }
            };
            write_sentences(out_src, noised.source())?;
            if let Some(path) = out_tgt {
                write_sentences(path, noised.target())?;
            }
            info(cli, format!("augmented {} sentences", noised.len()));
            Ok(())
        }

        Command::LearnBpe {
            src,
            tgt,
            vocab_size,
            min_pair_freq,
            merges,
            vocab,
        } => {
            let corpus = ParallelCorpus::load(src, tgt.as_deref())?;
            let model = learn_bpe(&corpus, *vocab_size, *min_pair_freq)?;
            model.save(merges, vocab)?;
            info(
                cli,
                format!(
                    "learned {} merges over {} tokens",
                    model.merges().len(),
                    model.vocab().len()
                ),
            );
            Ok(())
        }

        Command::ApplyBpe {
            merges,
            input,
            output,
            dropout,
        } => {
            let model = BpeModel::load_merges(merges)?;
            let sentences = read_sentences(input)?;
            let seed = SeedSpec::new(cli.seed, "segment");
            let lines: Vec<String> = if *dropout > 0.0 {
                use rayon::prelude::*;
                sentences
                    .par_iter()
                    .enumerate()
                    .map(|(i, s)| {
                        model
                            .segment_stochastic(s, *dropout, seed.seed_for(i as u64))
                            .map(|seg| seg.tokens.join(" "))
                    })
                    .collect::<Result<_>>()?
            } else {
                use rayon::prelude::*;
                sentences
                    .par_iter()
                    .map(|s| model.segment(s).tokens.join(" "))
                    .collect()
            };
            write_plain_lines(output, &lines)
        }

        Command::Desegment {
            input,
            output,
            marker,
        } => {
            let lines = read_sentences(input)?;
            let mut out = Vec::with_capacity(lines.len());
            for line in &lines {
                let tokens: Vec<&str> = line.as_str().split_whitespace().collect();
                out.push(desegment_tokens(tokens, marker)?);
            }
            write_plain_lines(output, &out)
        }

        Command::Chrf {
            hyp,
            reference,
            char_order,
            word_order,
            beta,
            no_effective_order,
            report,
        } => {
            let params = ChrfParams {
                char_order: *char_order,
                word_order: *word_order,
                beta: *beta,
                effective_order: !no_effective_order,
            };
            let result = chrf(&read_sentences(hyp)?, &read_sentences(reference)?, &params)?;
            println!("chrf = {:.4}", result.corpus_score);
            info(cli, format!("signature: {}", result.signature));
            write_report(&result, report)
        }

        Command::Bleu {
            hyp,
            reference,
            report,
        } => {
            let result = bleu(&read_sentences(hyp)?, &read_sentences(reference)?)?;
            println!("bleu = {:.4}", result.corpus_score);
            info(cli, format!("signature: {}", result.signature));
            write_report(&result, report)
        }

        Command::Lcsr {
            left,
            right,
            report,
        } => {
            let a = read_sentences(left)?;
            let b = read_sentences(right)?;
            let mean = mean_lcsr(&a, &b)?;
            println!("lcsr = {mean:.6}");
            let result = ScoreReport {
                metric: "lcsr".into(),
                signature: "lcsr|unit:codepoint".into(),
                corpus_score: mean,
                sentence_scores: a.iter().zip(&b).map(|(x, y)| lcsr(x, y)).collect(),
            };
            write_report(&result, report)
        }

        Command::Simmatrix {
            corpora,
            labels,
            tsv,
            svg,
            truncate,
        } => {
            if corpora.len() < 2 {
                return Err(ForgeError::InvalidConfig(
                    "simmatrix needs at least two corpora".into(),
                ));
            }
            if let Some(labels) = labels {
                if labels.len() != corpora.len() {
                    return Err(ForgeError::InvalidConfig(format!(
                        "{} labels for {} corpora",
                        labels.len(),
                        corpora.len()
                    )));
                }
            }
            let mut loaded = Vec::with_capacity(corpora.len());
            for (i, path) in corpora.iter().enumerate() {
                let mut corpus = ParallelCorpus::load(path, None)?;
                if let Some(labels) = labels {
                    corpus.set_name(labels[i].clone());
                }
                loaded.push(corpus);
            }
            let matrix = similarity_matrix(&loaded, !truncate)?;
            emit_heatmap(&matrix, tsv, svg.as_deref())?;
            info(cli, format!("wrote {}x{} matrix", matrix.len(), matrix.len()));
            Ok(())
        }

        Command::Bootstrap {
            hyp_a,
            hyp_b,
            reference,
            metric,
            resamples,
        } => {
            let outcome = paired_bootstrap(
                &read_sentences(hyp_a)?,
                &read_sentences(hyp_b)?,
                &read_sentences(reference)?,
                match metric {
                    MetricArg::Chrf => BootstrapMetric::Chrf,
                    MetricArg::Bleu => BootstrapMetric::Bleu,
                },
                *resamples,
                &SeedSpec::new(cli.seed, "bootstrap"),
            )?;
            println!("p_value = {:.6}", outcome.p_value);
            println!("score_a = {:.4}", outcome.score_a);
            println!("score_b = {:.4}", outcome.score_b);
            Ok(())
        }

        Command::Cosine {
            left,
            right,
            report,
        } => {
            let result = cosine_report(left, right)?;
            println!("cosine = {:.6}", result.corpus_score);
            write_report(&result, report)
        }

        Command::ConvertScript {
            from,
            to,
            input,
            output,
        } => {
            let from = Script::parse(from)?;
            let to = Script::parse(to)?;
            let corpus = ParallelCorpus::load(input, None)?;
            let (converted, report) = convert_corpus(&corpus, from, to)?;
            write_sentences(output, converted.source())?;
            info(
                cli,
                format!(
                    "converted={} unassigned_passthrough={} out_of_block={}",
                    report.converted, report.passthrough_unassigned, report.out_of_block
                ),
            );
            Ok(())
        }

        Command::Stats {
            original,
            noised,
            trace,
            min_sentence_len,
            unit,
            out,
        } => {
            let original = ParallelCorpus::load(original, None)?;
            let noised = ParallelCorpus::load(noised, None)?;
            let events = read_trace_file(trace)?;
            let mut plans = plans_from_events(events, original.len())?;
            if let Some(min_len) = min_sentence_len {
                let unit: CharUnit = (*unit).into();
                for (plan, sentence) in plans.iter_mut().zip(original.source()) {
                    plan.skipped_short = sentence.len_in(unit) < *min_len;
                }
            }
            let report = stats(&original, &noised, &plans, (*unit).into())?;
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| ForgeError::Internal(e.to_string()))?
                + "\n";
            match out {
                Some(path) => std::fs::write(path, json).map_err(|e| ForgeError::io(path, e))?,
                None => print!("{json}"),
            }
            Ok(())
        }

        Command::Run { manifest } => {
            let manifest = PipelineManifest::from_file(manifest)?;
            let threads = (cli.threads > 0).then_some(cli.threads);
            let summary = run_manifest(&manifest, threads)?;
            info(cli, format!("wrote {}:", summary.output_dir.display()));
            for artifact in &summary.artifacts {
                info(cli, format!("  {artifact}"));
            }
            Ok(())
        }
    }
}

fn write_plain_lines(path: &PathBuf, lines: &[String]) -> Result<()> {
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for line in lines {
        out.push_str(line);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| ForgeError::io(path, e))
}
