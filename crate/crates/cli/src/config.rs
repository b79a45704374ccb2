//! The run configuration tree. Precedence, lowest first: built-in
//! defaults, the `--config` TOML file, command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use chapterkit::corpus::FilterConfig;
use chapterkit::eval::{HashedBowEmbedder, HttpEmbedderConfig};
use chapterkit::generate::{CohesionParams, RemoteConfig};
use chapterkit::pipeline::PipelineConfig;
use chapterkit::retrieval::{Analyzer, Bm25Params, IndexVariant, RetrievalOptions};
use chapterkit::synth::SynthProfile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// `None` resolves to the available parallelism.
    pub workers: Option<usize>,
    pub output_dir: PathBuf,
    pub corpus: CorpusPaths,
    pub generator: GeneratorConfig,
    pub pipeline: PipelineConfig,
    pub eval: EvalConfig,
    pub retrieval: RetrievalConfig,
    pub filter: FilterSection,
    pub synth: SynthProfile,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            workers: None,
            output_dir: PathBuf::from("chapterkit-out"),
            corpus: CorpusPaths::default(),
            generator: GeneratorConfig::default(),
            pipeline: PipelineConfig::default(),
            eval: EvalConfig::default(),
            retrieval: RetrievalConfig::default(),
            filter: FilterSection::default(),
            synth: SynthProfile::podcast(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusPaths {
    /// Episodes to chapterize, index, describe or filter.
    pub episodes: Option<PathBuf>,
    /// Reference episodes for `evaluate`.
    pub references: Option<PathBuf>,
    /// Predictions JSONL for `evaluate`.
    pub predictions: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    #[default]
    Oracle,
    Cohesion,
    Remote,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub kind: GeneratorKind,
    pub cohesion: CohesionParams,
    pub remote: RemoteConfig,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EmbedderKind {
    #[default]
    Hashed,
    Http,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// Fixed WindowDiff window; wins over `k_from`.
    pub k: Option<usize>,
    /// Corpus to estimate k from; the references are used when unset.
    pub k_from: Option<PathBuf>,
    pub embedder: EmbedderKind,
    pub hashed: HashedBowEmbedder,
    pub http: HttpEmbedderConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetrievalConfig {
    /// Tab-separated `query_id<TAB>text`.
    pub queries: Option<PathBuf>,
    /// TREC qrels: `query_id iteration episode_id grade`.
    pub qrels: Option<PathBuf>,
    pub variants: Vec<IndexVariant>,
    pub bm25: Bm25Params,
    pub analyzer: Analyzer,
    pub depth: usize,
    pub alpha: f64,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        let options = RetrievalOptions::default();
        Self {
            queries: None,
            qrels: None,
            variants: IndexVariant::ALL.to_vec(),
            bm25: options.params,
            analyzer: options.analyzer,
            depth: options.depth,
            alpha: options.alpha,
        }
    }
}

impl RetrievalConfig {
    pub fn options(&self) -> RetrievalOptions {
        RetrievalOptions {
            params: self.bm25,
            analyzer: self.analyzer,
            depth: self.depth,
            alpha: self.alpha,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterSection {
    pub rules: FilterConfig,
    /// Also write a seeded train/validation/test split of the kept episodes.
    pub split: bool,
    pub train_fraction: f64,
    pub validation_fraction: f64,
}

impl Default for FilterSection {
    fn default() -> Self {
        Self {
            rules: FilterConfig::default(),
            split: false,
            train_fraction: 0.8,
            validation_fraction: 0.1,
        }
    }
}

/// Flags shared by every command; `None` leaves the file value in place.
#[derive(Debug, Clone, Default)]
pub struct CommonOverrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn apply_common(&mut self, o: &CommonOverrides) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(w) = o.workers {
            self.workers = Some(w);
        }
        if let Some(dir) = &o.output_dir {
            self.output_dir = dir.clone();
        }
    }

    /// Replaces an unset worker count with the machine's parallelism.
    pub fn resolve_workers(&mut self) -> usize {
        let w = self
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        self.workers = Some(w);
        w
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).context("serializing config")
    }
}

/// Returns the path when it is set and exists.
pub fn require_path<'a>(path: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    let Some(p) = path else {
        bail!("{what} path is not set");
    };
    if !p.exists() {
        bail!("{what} path {} does not exist", p.display());
    }
    Ok(p)
}

/// Checks an optional path only when it is set.
pub fn check_optional_path(path: &Option<PathBuf>, what: &str) -> Result<()> {
    match path {
        Some(p) if !p.exists() => bail!("{what} path {} does not exist", p.display()),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = RunConfig::default();
        let text = c.to_toml().unwrap();
        assert_eq!(toml::from_str::<RunConfig>(&text).unwrap(), c);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c: RunConfig = toml::from_str(
            r#"
            seed = 9
            [generator]
            kind = "cohesion"
            [generator.cohesion]
            block_size = 4
            [retrieval]
            variants = ["DESC", "DESC_CHAP"]
            "#,
        )
        .unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.generator.kind, GeneratorKind::Cohesion);
        assert_eq!(c.generator.cohesion.block_size, 4);
        assert_eq!(
            c.generator.cohesion.smoothing_width,
            CohesionParams::default().smoothing_width
        );
        assert_eq!(
            c.retrieval.variants,
            [IndexVariant::Desc, IndexVariant::DescChap]
        );
        assert_eq!(c.pipeline, PipelineConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("sed = 1").is_err());
        assert!(toml::from_str::<RunConfig>("[corpus]\nepisode = \"x\"").is_err());
    }

    #[test]
    fn flags_override_file() {
        let mut c: RunConfig = toml::from_str("seed = 1\nworkers = 2\noutput_dir = \"a\"").unwrap();
        c.apply_common(&CommonOverrides {
            seed: Some(5),
            workers: None,
            output_dir: Some("b".into()),
        });
        assert_eq!(
            (c.seed, c.workers, c.output_dir.as_path()),
            (5, Some(2), Path::new("b"))
        );
    }

    #[test]
    fn missing_paths_fail_validation() {
        assert!(require_path(&None, "episodes").is_err());
        assert!(require_path(&Some("/no/such/file".into()), "episodes").is_err());
        assert!(check_optional_path(&None, "k_from").is_ok());
    }
}
