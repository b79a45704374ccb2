mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use tracing_subscriber::EnvFilter;

use crate::config::{CommonOverrides, EmbedderKind, GeneratorKind, RunConfig};
use chapterkit::generate::CassetteMode;
use chapterkit::retrieval::IndexVariant;

/// Chapterize transcripts, score chapterizations and measure chapter-title
/// retrieval expansion.
#[derive(Debug, Parser)]
#[command(name = "chapterkit", version)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every stochastic step (synthesis, splits).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Episode worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Directory receiving every output file.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Print the resolved config and the planned work without writing.
    #[arg(long, global = true)]
    dry_run: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Predict chapters for every episode of a corpus.
    Chapterize(ChapterizeArgs),
    /// Score predictions against reference chapters.
    Evaluate(EvaluateArgs),
    /// Compare BM25 index variants on judged queries.
    RetrieveEval(RetrieveArgs),
    /// Describe a corpus.
    Stats(InputArgs),
    /// Keep episodes that pass the dataset filters.
    Filter(FilterArgs),
    /// Write a seeded synthetic corpus.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Episodes JSONL.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ChapterizeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    generator: Option<GeneratorKind>,
    /// Remote generator endpoint URL.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    cassette: Option<PathBuf>,
    #[arg(long, value_enum)]
    cassette_mode: Option<CassetteModeArg>,
    #[arg(long)]
    no_static_context: bool,
    #[arg(long)]
    no_dynamic_context: bool,
    /// Newline-separated title blocklist.
    #[arg(long)]
    blocklist: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum CassetteModeArg {
    Off,
    Record,
    Replay,
}

impl From<CassetteModeArg> for CassetteMode {
    fn from(m: CassetteModeArg) -> Self {
        match m {
            CassetteModeArg::Off => CassetteMode::Off,
            CassetteModeArg::Record => CassetteMode::Record,
            CassetteModeArg::Replay => CassetteMode::Replay,
        }
    }
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    predictions: Option<PathBuf>,
    #[arg(long)]
    references: Option<PathBuf>,
    /// Fixed WindowDiff window.
    #[arg(long)]
    k: Option<usize>,
    /// Corpus to estimate k from (usually the training split).
    #[arg(long)]
    k_from: Option<PathBuf>,
    #[arg(long, value_enum)]
    embedder: Option<EmbedderKind>,
}

#[derive(Debug, Args)]
struct RetrieveArgs {
    /// Episodes JSONL to index.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    queries: Option<PathBuf>,
    #[arg(long)]
    qrels: Option<PathBuf>,
    /// Repeatable; e.g. DESC, DESC_PRINC, DESC_CHAP, DESC_TRANS.
    #[arg(long = "variant")]
    variants: Vec<IndexVariant>,
    /// Apply the English Snowball stemmer.
    #[arg(long)]
    stem: bool,
}

#[derive(Debug, Args)]
struct FilterArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Also write a seeded train/validation/test split.
    #[arg(long)]
    split: bool,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    episodes: Option<usize>,
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut config = RunConfig::load(cli.common.config.as_deref())?;
    config.apply_common(&CommonOverrides {
        seed: cli.common.seed,
        workers: cli.common.workers,
        output_dir: cli.common.output_dir.clone(),
    });
    match &cli.command {
        Command::Chapterize(a) => {
            set(&mut config.corpus.episodes, &a.input.input);
            set(&mut config.pipeline.blocklist_path, &a.blocklist);
            set(&mut config.generator.remote.cassette, &a.cassette);
            if let Some(g) = a.generator {
                config.generator.kind = g;
            }
            if let Some(e) = &a.endpoint {
                config.generator.remote.endpoint = e.clone();
            }
            if let Some(m) = a.cassette_mode {
                config.generator.remote.cassette_mode = m.into();
            }
            if a.no_static_context {
                config.pipeline.use_static_context = false;
            }
            if a.no_dynamic_context {
                config.pipeline.use_dynamic_context = false;
            }
        }
        Command::Evaluate(a) => {
            set(&mut config.corpus.predictions, &a.predictions);
            set(&mut config.corpus.references, &a.references);
            set(&mut config.eval.k_from, &a.k_from);
            if a.k.is_some() {
                config.eval.k = a.k;
            }
            if let Some(e) = a.embedder {
                config.eval.embedder = e;
            }
        }
        Command::RetrieveEval(a) => {
            set(&mut config.corpus.episodes, &a.corpus);
            set(&mut config.retrieval.queries, &a.queries);
            set(&mut config.retrieval.qrels, &a.qrels);
            if !a.variants.is_empty() {
                config.retrieval.variants = a.variants.clone();
            }
            if a.stem {
                config.retrieval.analyzer = chapterkit::retrieval::Analyzer::new(true);
            }
        }
        Command::Stats(a) => set(&mut config.corpus.episodes, &a.input),
        Command::Filter(a) => {
            set(&mut config.corpus.episodes, &a.input.input);
            if a.split {
                config.filter.split = true;
            }
        }
        Command::Synth(a) => {
            if let Some(n) = a.episodes {
                config.synth.episodes = n;
            }
        }
    }
    config.resolve_workers();
    Ok(config)
}

fn set<T: Clone>(slot: &mut Option<T>, flag: &Option<T>) {
    if flag.is_some() {
        slot.clone_from(flag);
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let config = resolve(cli)?;
    let dry = cli.common.dry_run;
    match &cli.command {
        Command::Chapterize(_) => commands::chapterize::run(&config, dry),
        Command::Evaluate(_) => commands::evaluate::run(&config, dry),
        Command::RetrieveEval(_) => commands::retrieve::run(&config, dry),
        Command::Stats(_) => commands::corpus::stats(&config, dry),
        Command::Filter(_) => commands::corpus::filter(&config, dry),
        Command::Synth(_) => commands::corpus::synth(&config, dry),
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("warn")),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
