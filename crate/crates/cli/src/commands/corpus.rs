use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use serde::Serialize;

use chapterkit::corpus::{
    corpus_stats, passes_filters, save_corpus, split_corpus, Episode, FilterViolation,
};
use chapterkit::synth::synth_corpus;

use super::{load_episodes, print_config};
use crate::config::{require_path, RunConfig};
use crate::output::{ensure_dir, write_report, write_sidecar, Provenance};

pub const STATS_FILE: &str = "stats.json";
pub const FILTERED_FILE: &str = "filtered.jsonl";
pub const FILTER_REPORT_FILE: &str = "filter_report.json";
pub const SYNTH_FILE: &str = "synth.jsonl";

fn save_with_sidecar(path: &Path, provenance: &Provenance<'_>, episodes: &[Episode]) -> Result<()> {
    save_corpus(path, episodes).with_context(|| format!("writing {}", path.display()))?;
    write_sidecar(path, provenance)
}

pub fn stats(config: &RunConfig, dry_run: bool) -> Result<ExitCode> {
    let path = require_path(&config.corpus.episodes, "corpus.episodes")?;
    let episodes = load_episodes(path)?;
    if dry_run {
        print_config(config)?;
        println!("# {} episode(s)", episodes.len());
        return Ok(ExitCode::SUCCESS);
    }
    let stats = corpus_stats(&episodes)?;
    ensure_dir(&config.output_dir)?;
    write_report(
        &config.output_dir.join(STATS_FILE),
        &Provenance::new("stats", config),
        &stats,
    )?;
    println!("episodes              {}", stats.episodes);
    println!("document words        {:.1}", stats.document_words);
    println!(
        "chapters / episode    {:.2} (std {:.2})",
        stats.chapters_per_episode.mean, stats.chapters_per_episode.std
    );
    println!(
        "segment sentences     {:.1} (std {:.1})",
        stats.segment_sentences.mean, stats.segment_sentences.std
    );
    println!(
        "chapter title words   {:.2} (std {:.2})",
        stats.title_words.mean, stats.title_words.std
    );
    println!("episode title words   {:.1}", stats.title_words_per_episode);
    println!("description words     {:.1}", stats.description_words);
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Rejected {
    episode_id: String,
    violations: Vec<FilterViolation>,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct FilterReport {
    input: usize,
    kept: usize,
    rejected: Vec<Rejected>,
    split: Option<SplitSizes>,
}

#[derive(Serialize)]
struct SplitSizes {
    train: usize,
    validation: usize,
    test: usize,
}

pub fn filter(config: &RunConfig, dry_run: bool) -> Result<ExitCode> {
    let path = require_path(&config.corpus.episodes, "corpus.episodes")?;
    let episodes = load_episodes(path)?;
    let input = episodes.len();
    let mut kept = Vec::new();
    let mut rejected = Vec::new();
    for ep in episodes {
        let outcome = passes_filters(&ep, &config.filter.rules);
        if outcome.passes {
            kept.push(ep);
        } else {
            rejected.push(Rejected {
                episode_id: ep.id().to_string(),
                violations: outcome.violations,
                notes: outcome.notes,
            });
        }
    }
    if dry_run {
        print_config(config)?;
        println!(
            "# {input} episode(s): {} kept, {} rejected",
            kept.len(),
            rejected.len()
        );
        return Ok(ExitCode::SUCCESS);
    }

    ensure_dir(&config.output_dir)?;
    let provenance = Provenance::new("filter", config);
    save_with_sidecar(&config.output_dir.join(FILTERED_FILE), &provenance, &kept)?;
    let n_kept = kept.len();
    let split = if config.filter.split {
        let s = split_corpus(
            kept,
            config.filter.train_fraction,
            config.filter.validation_fraction,
            config.seed,
        );
        for (name, part) in [
            ("train", &s.train),
            ("validation", &s.validation),
            ("test", &s.test),
        ] {
            save_with_sidecar(
                &config.output_dir.join(format!("{name}.jsonl")),
                &provenance,
                part,
            )?;
        }
        Some(SplitSizes {
            train: s.train.len(),
            validation: s.validation.len(),
            test: s.test.len(),
        })
    } else {
        None
    };
    let report = FilterReport {
        input,
        kept: n_kept,
        rejected,
        split,
    };
    write_report(
        &config.output_dir.join(FILTER_REPORT_FILE),
        &provenance,
        &report,
    )?;
    println!("kept {n_kept} of {input} episode(s)");
    Ok(ExitCode::SUCCESS)
}

pub fn synth(config: &RunConfig, dry_run: bool) -> Result<ExitCode> {
    if dry_run {
        print_config(config)?;
        println!(
            "# would write {} synthetic episode(s)",
            config.synth.episodes
        );
        return Ok(ExitCode::SUCCESS);
    }
    let episodes = synth_corpus(&config.synth, config.seed);
    ensure_dir(&config.output_dir)?;
    let path = config.output_dir.join(SYNTH_FILE);
    save_with_sidecar(&path, &Provenance::new("synth", config), &episodes)?;
    println!("wrote {} episode(s) to {}", episodes.len(), path.display());
    Ok(ExitCode::SUCCESS)
}
