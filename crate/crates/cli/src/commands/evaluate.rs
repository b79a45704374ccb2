use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};

use chapterkit::corpus::{ChapterSet, Episode};
use chapterkit::eval::{estimate_k, evaluate_corpus, Embedder, HttpEmbedder};
use chapterkit::pipeline::PredictionRecord;

use super::{load_episodes, print_config};
use crate::config::{check_optional_path, require_path, EmbedderKind, RunConfig};
use crate::output::{ensure_dir, write_report, Provenance};

pub const REPORT_FILE: &str = "eval_report.json";

pub fn load_predictions(path: &Path) -> Result<Vec<(String, ChapterSet)>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading predictions {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let record: PredictionRecord =
                serde_json::from_str(l).with_context(|| format!("predictions line {}", i + 1))?;
            let chapters = ChapterSet::new(record.chapter_list())
                .with_context(|| format!("predictions line {} ({})", i + 1, record.episode_id))?;
            Ok((record.episode_id, chapters))
        })
        .collect()
}

fn resolve_k(config: &RunConfig, references: &[Episode]) -> Result<(usize, String)> {
    if let Some(k) = config.eval.k {
        return Ok((k, "given".into()));
    }
    if let Some(path) = &config.eval.k_from {
        let corpus = load_episodes(path)?;
        let k =
            estimate_k(&corpus).with_context(|| format!("estimating k from {}", path.display()))?;
        return Ok((k, format!("estimated from {}", path.display())));
    }
    let k = estimate_k(references).context("estimating k from the references")?;
    Ok((k, "estimated from references".into()))
}

pub fn run(config: &RunConfig, dry_run: bool) -> Result<ExitCode> {
    let pred_path = require_path(&config.corpus.predictions, "corpus.predictions")?;
    let ref_path = require_path(&config.corpus.references, "corpus.references")?;
    check_optional_path(&config.eval.k_from, "eval.k_from")?;
    let references = load_episodes(ref_path)?;
    let predictions = load_predictions(pred_path)?;
    let (k, k_source) = resolve_k(config, &references)?;

    if dry_run {
        print_config(config)?;
        println!(
            "# {} prediction(s), {} reference(s); k = {k} ({k_source})",
            predictions.len(),
            references.len()
        );
        return Ok(ExitCode::SUCCESS);
    }

    let embedder: Box<dyn Embedder> = match config.eval.embedder {
        EmbedderKind::Hashed => Box::new(config.eval.hashed),
        EmbedderKind::Http => Box::new(HttpEmbedder::new(config.eval.http.clone())?),
    };
    super::init_pool(config);
    let mut report = evaluate_corpus(&references, &predictions, k, embedder.as_ref())?;
    report.k_source = k_source;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }

    ensure_dir(&config.output_dir)?;
    let path = config.output_dir.join(REPORT_FILE);
    write_report(&path, &Provenance::new("evaluate", config), &report)?;
    print!("{}", report.render_table());
    eprintln!("report written to {}", path.display());
    Ok(ExitCode::SUCCESS)
}
