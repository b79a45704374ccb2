pub mod chapterize;
pub mod corpus;
pub mod evaluate;
pub mod retrieve;

use std::path::Path;

use anyhow::{Context, Result};

use chapterkit::corpus::{load_corpus, Episode};

use crate::config::RunConfig;

pub fn load_episodes(path: &Path) -> Result<Vec<Episode>> {
    load_corpus(path).with_context(|| format!("loading corpus {}", path.display()))
}

/// Sizes rayon's global pool; later calls are no-ops.
pub fn init_pool(config: &RunConfig) {
    let workers = config.workers.unwrap_or(1).max(1);
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global();
}

pub fn print_config(config: &RunConfig) -> Result<()> {
    print!("{}", config.to_toml()?);
    Ok(())
}
