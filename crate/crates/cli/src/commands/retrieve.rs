use std::fs;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use chapterkit::retrieval::{
    parse_qrels, parse_queries, run_retrieval_eval, IndexSize, IndexVariant,
};

use super::{load_episodes, print_config};
use crate::config::{require_path, RunConfig};
use crate::output::{ensure_dir, write_report, Provenance};

pub const REPORT_FILE: &str = "retrieval_report.json";
pub const INDEX_SIZES_FILE: &str = "index_sizes.json";

#[derive(Serialize)]
struct IndexSizes {
    index_sizes: Vec<VariantSize>,
}

#[derive(Serialize)]
struct VariantSize {
    variant: IndexVariant,
    #[serde(flatten)]
    size: IndexSize,
}

pub fn run(config: &RunConfig, dry_run: bool) -> Result<ExitCode> {
    let corpus_path = require_path(&config.corpus.episodes, "corpus.episodes")?;
    let queries_path = require_path(&config.retrieval.queries, "retrieval.queries")?;
    let qrels_path = require_path(&config.retrieval.qrels, "retrieval.qrels")?;
    if config.retrieval.variants.is_empty() {
        bail!("retrieval.variants is empty");
    }
    config.retrieval.bm25.validate().context("retrieval.bm25")?;
    let corpus = load_episodes(corpus_path)?;
    let read = |p: &std::path::Path| {
        fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
    };
    let queries = parse_queries(&read(queries_path)?).context("parsing queries")?;
    let judgments = parse_qrels(&read(qrels_path)?).context("parsing qrels")?;

    if dry_run {
        print_config(config)?;
        println!(
            "# {} episode(s), {} quer(y/ies), {} judged quer(y/ies)",
            corpus.len(),
            queries.len(),
            judgments.0.len()
        );
        return Ok(ExitCode::SUCCESS);
    }

    let report = run_retrieval_eval(
        &corpus,
        &queries,
        &judgments,
        &config.retrieval.variants,
        &config.retrieval.options(),
    )?;
    if !report.unscorable_queries.is_empty() {
        eprintln!(
            "warning: {} quer(y/ies) without a judged relevant episode excluded from the means",
            report.unscorable_queries.len()
        );
    }

    ensure_dir(&config.output_dir)?;
    let provenance = Provenance::new("retrieve-eval", config);
    let path = config.output_dir.join(REPORT_FILE);
    write_report(&path, &provenance, &report)?;
    let sizes = IndexSizes {
        index_sizes: report
            .variants
            .iter()
            .map(|v| VariantSize {
                variant: v.variant,
                size: v.index_size,
            })
            .collect(),
    };
    write_report(
        &config.output_dir.join(INDEX_SIZES_FILE),
        &provenance,
        &sizes,
    )?;
    print!("{}", report.render_table());
    eprintln!("report written to {}", path.display());
    Ok(ExitCode::SUCCESS)
}
