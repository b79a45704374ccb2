use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};

use chapterkit::chunking::chunk_transcript;
use chapterkit::generate::{
    CassetteMode, CohesionGenerator, Generator, OracleGenerator, RemoteGenerator,
};
use chapterkit::pipeline::{Pipeline, PredictionRecord};

use super::{load_episodes, print_config};
use crate::config::{check_optional_path, require_path, GeneratorConfig, GeneratorKind, RunConfig};
use crate::output::{ensure_dir, write_jsonl, write_log, Provenance};

pub const PREDICTIONS_FILE: &str = "predictions.jsonl";
pub const LOG_FILE: &str = "chapterize.log";

fn build_generator(config: &GeneratorConfig) -> Result<Box<dyn Generator>> {
    Ok(match config.kind {
        GeneratorKind::Oracle => Box::new(OracleGenerator),
        GeneratorKind::Cohesion => {
            config
                .cohesion
                .validate()
                .map_err(|e| anyhow!("generator.cohesion: {e}"))?;
            Box::new(CohesionGenerator::new(config.cohesion))
        }
        GeneratorKind::Remote => {
            Box::new(RemoteGenerator::new(config.remote.clone()).context("generator.remote")?)
        }
    })
}

pub fn run(config: &RunConfig, dry_run: bool) -> Result<ExitCode> {
    let path = require_path(&config.corpus.episodes, "corpus.episodes")?;
    check_optional_path(&config.pipeline.blocklist_path, "pipeline.blocklist_path")?;
    let remote = &config.generator.remote;
    if config.generator.kind == GeneratorKind::Remote
        && remote.cassette_mode == CassetteMode::Replay
    {
        require_path(&remote.cassette, "generator.remote.cassette")?;
    }
    let episodes = load_episodes(path)?;

    if dry_run {
        print_config(config)?;
        println!("# {} episode(s); chunk plan", episodes.len());
        for ep in &episodes {
            let chunks = chunk_transcript(&ep.transcript, config.pipeline.budget);
            println!(
                "{}\t{} sentences\t{} words\t{} chunk(s)",
                ep.id(),
                ep.transcript.len(),
                ep.transcript.word_count(),
                chunks.len()
            );
        }
        return Ok(ExitCode::SUCCESS);
    }

    let pipeline = Pipeline::new(config.pipeline.clone())?;
    let generator = build_generator(&config.generator)?;
    super::init_pool(config);
    let workers = config.workers.unwrap_or(1);
    let outcomes = pipeline.chapterize_corpus(&episodes, generator.as_ref(), workers);

    let mut records = Vec::with_capacity(episodes.len());
    let mut log = Vec::new();
    let mut failures = Vec::new();
    for (ep, outcome) in episodes.iter().zip(outcomes) {
        match outcome {
            Ok(out) => {
                let record = PredictionRecord::from_outcome(ep, &out);
                log.extend(
                    record
                        .warnings
                        .iter()
                        .map(|w| format!("WARN {}: {w}", ep.id())),
                );
                records.push(record);
            }
            Err(e) => {
                log.push(format!("FAILED {}: {e:#}", ep.id()));
                failures.push(ep.id().to_string());
            }
        }
    }

    ensure_dir(&config.output_dir)?;
    let provenance = Provenance::new("chapterize", config);
    let predictions = config.output_dir.join(PREDICTIONS_FILE);
    write_jsonl(&predictions, &provenance, &records)?;
    write_log(&config.output_dir.join(LOG_FILE), &provenance, &log)?;

    eprintln!(
        "chapterized {} of {} episode(s) into {}",
        records.len(),
        episodes.len(),
        predictions.display()
    );
    if failures.is_empty() {
        return Ok(ExitCode::SUCCESS);
    }
    eprintln!("{} episode(s) failed:", failures.len());
    for line in log.iter().filter(|l| l.starts_with("FAILED")) {
        eprintln!("  {line}");
    }
    Ok(ExitCode::from(2))
}
