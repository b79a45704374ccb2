//! Episode-level orchestration: chunk, render with context, generate,
//! parse, stitch and sanitize.

use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::chunking::{chunk_transcript, render_indexed_sentences, ChunkBudget};
use crate::corpus::{Chapter, ChapterSet, Episode};
use crate::generate::{GenerateError, Generator, GeneratorRequest};
use crate::promptfmt::{
    parse_output, render_input, ChunkPrediction, DynamicContext, StaticContext,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub budget: ChunkBudget,
    pub use_static_context: bool,
    pub use_dynamic_context: bool,
    pub blocklist_path: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            budget: ChunkBudget::default(),
            use_static_context: true,
            use_dynamic_context: true,
            blocklist_path: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("blocklist {path}: {source}")]
    Blocklist {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("episode {episode_id}: {source}")]
    Generate {
        episode_id: String,
        #[source]
        source: GenerateError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TitleRemoval {
    /// 1-based chapter position.
    pub ordinal: usize,
    pub original: String,
    pub replacement: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChapterizeOutcome {
    pub chapters: ChapterSet,
    pub warnings: Vec<String>,
    pub removals: Vec<TitleRemoval>,
    pub chunks: usize,
}

/// Concatenates chunk predictions; on a repeated start index the earliest
/// chunk's entry wins.
pub fn stitch(predictions: &[ChunkPrediction]) -> ChapterSet {
    let mut all: Vec<Chapter> = predictions
        .iter()
        .flat_map(|p| p.entries.iter().cloned())
        .collect();
    // stable: equal indices stay in chunk order
    all.sort_by_key(|c| c.start_index);
    all.dedup_by_key(|c| c.start_index);
    all.retain(|c| !c.title.trim().is_empty());
    ChapterSet::new(all).expect("sorted, deduplicated, titled")
}

fn blocklist_regex(blocklist: &[String]) -> Option<Regex> {
    let terms: Vec<String> = blocklist
        .iter()
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(regex::escape)
        .collect();
    if terms.is_empty() {
        return None;
    }
    Some(Regex::new(&format!(r"(?i)\b(?:{})\b", terms.join("|"))).expect("escaped terms"))
}

/// Replaces every title containing a blocklisted term (case-insensitive,
/// whole words) with `"Chapter <ordinal>"`. Boundaries are never removed.
pub fn sanitize_titles(
    chapters: &ChapterSet,
    blocklist: &[String],
) -> (ChapterSet, Vec<TitleRemoval>) {
    let Some(re) = blocklist_regex(blocklist) else {
        return (chapters.clone(), Vec::new());
    };
    let mut removals = Vec::new();
    let cleaned = chapters
        .chapters()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if !re.is_match(&c.title) {
                return c.clone();
            }
            let replacement = format!("Chapter {}", i + 1);
            removals.push(TitleRemoval {
                ordinal: i + 1,
                original: c.title.clone(),
                replacement: replacement.clone(),
            });
            Chapter::new(c.start_index, replacement)
        })
        .collect();
    (
        ChapterSet::new(cleaned).expect("start indices unchanged"),
        removals,
    )
}

/// One lowercase term per line; blank lines and `#` comments are ignored.
pub fn parse_blocklist(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone)]
pub struct Pipeline {
    config: PipelineConfig,
    blocklist: Vec<String>,
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Result<Self, PipelineError> {
        let blocklist = match &config.blocklist_path {
            Some(path) => parse_blocklist(&fs::read_to_string(path).map_err(|source| {
                PipelineError::Blocklist {
                    path: path.clone(),
                    source,
                }
            })?),
            None => Vec::new(),
        };
        Ok(Self { config, blocklist })
    }

    pub fn with_blocklist(config: PipelineConfig, blocklist: Vec<String>) -> Self {
        Self { config, blocklist }
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    /// Chunks are processed strictly in order; with dynamic context on,
    /// chunk `i` sees every title predicted for chunks before it.
    pub fn chapterize_episode<G: Generator + ?Sized>(
        &self,
        episode: &Episode,
        generator: &G,
    ) -> Result<ChapterizeOutcome, PipelineError> {
        let cfg = &self.config;
        let static_ctx = if cfg.use_static_context {
            StaticContext {
                title: episode.metadata.title.clone(),
                description: episode.metadata.description.clone(),
            }
        } else {
            StaticContext::default()
        };
        let mut dynamic_ctx = DynamicContext::default();
        let chunks = chunk_transcript(&episode.transcript, cfg.budget);
        let mut predictions = Vec::with_capacity(chunks.len());
        let mut warnings = Vec::new();

        for (i, chunk) in chunks.iter().enumerate() {
            let body = render_indexed_sentences(&episode.transcript, chunk);
            let request = GeneratorRequest {
                episode,
                input_text: render_input(&body, &static_ctx, &dynamic_ctx, cfg.budget),
                valid_range: chunk.range(),
            };
            let raw = generator
                .generate(&request)
                .map_err(|source| PipelineError::Generate {
                    episode_id: episode.id().to_string(),
                    source,
                })?;
            let parsed = parse_output(&raw, chunk.range());
            warnings.extend(
                parsed
                    .warnings
                    .into_iter()
                    .map(|w| format!("chunk {i}: {w}")),
            );
            if cfg.use_dynamic_context {
                dynamic_ctx
                    .previous_titles
                    .extend(parsed.prediction.entries.iter().map(|c| c.title.clone()));
            }
            predictions.push(parsed.prediction);
        }

        let mut chapters = stitch(&predictions);
        if chapters.is_empty() {
            let title = episode.metadata.title.trim();
            let title = if title.is_empty() { "Chapter 1" } else { title };
            warnings.push("no chapters predicted; emitted a single fallback chapter".into());
            chapters = ChapterSet::new(vec![Chapter::new(0, title)]).expect("one chapter");
        }
        let (chapters, removals) = sanitize_titles(&chapters, &self.blocklist);
        for r in &removals {
            tracing::info!(
                episode = episode.id(),
                ordinal = r.ordinal,
                "title removed by blocklist"
            );
        }
        Ok(ChapterizeOutcome {
            chapters,
            warnings,
            removals,
            chunks: chunks.len(),
        })
    }

    /// Episode-parallel run on a pool of `workers` threads; results keep the
    /// input order.
    pub fn chapterize_corpus<G: Generator + ?Sized>(
        &self,
        episodes: &[Episode],
        generator: &G,
        workers: usize,
    ) -> Vec<Result<ChapterizeOutcome, PipelineError>> {
        let run = || {
            episodes
                .par_iter()
                .map(|ep| self.chapterize_episode(ep, generator))
                .collect()
        };
        match rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
        {
            Ok(pool) => pool.install(run),
            Err(_) => episodes
                .iter()
                .map(|ep| self.chapterize_episode(ep, generator))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedChapter {
    pub start_index: usize,
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_s: Option<f64>,
}

/// One line of the predictions JSONL.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub episode_id: String,
    pub chapters: Vec<PredictedChapter>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl PredictionRecord {
    pub fn from_outcome(episode: &Episode, outcome: &ChapterizeOutcome) -> Self {
        let sentences = episode.transcript.sentences();
        let mut warnings = outcome.warnings.clone();
        warnings.extend(
            outcome
                .removals
                .iter()
                .map(|r| format!("chapter {} title replaced by blocklist", r.ordinal)),
        );
        Self {
            episode_id: episode.id().to_string(),
            chapters: outcome
                .chapters
                .chapters()
                .iter()
                .map(|c| PredictedChapter {
                    start_index: c.start_index,
                    title: c.title.clone(),
                    start_s: sentences.get(c.start_index).and_then(|s| s.start_s()),
                })
                .collect(),
            warnings,
        }
    }

    pub fn chapter_list(&self) -> Vec<Chapter> {
        self.chapters
            .iter()
            .map(|c| Chapter::new(c.start_index, c.title.clone()))
            .collect()
    }
}
