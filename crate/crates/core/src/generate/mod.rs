//! The generator contract and its implementations.
//!
//! A generator receives one rendered chunk input and returns raw text that
//! should follow the chapter output grammar. The pipeline never trusts it
//! to; [`crate::promptfmt::parse_output`] repairs whatever comes back.

mod cohesion;
mod remote;

use std::sync::Mutex;

pub use cohesion::{cohesion_boundaries, keyword_title, CohesionGenerator, CohesionParams};
pub use remote::{
    remote_response_to_grammar, CassetteMode, RemoteConfig, RemoteGenerator, DEFAULT_INSTRUCTION,
};

use crate::corpus::Episode;
use crate::promptfmt::render_target;

/// One generator call. `episode` gives implementations that are not pure
/// text models (the oracle, the lexical baseline) access to the source data.
#[derive(Debug, Clone)]
pub struct GeneratorRequest<'a> {
    pub episode: &'a Episode,
    pub input_text: String,
    /// Inclusive global sentence range of the chunk in `input_text`.
    pub valid_range: (usize, usize),
}

#[derive(Debug, thiserror::Error)]
pub enum GenerateError {
    #[error("transport failure after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("endpoint rejected the request: {0}")]
    Rejected(String),
    #[error("no cassette entry for request {0}")]
    CassetteMiss(String),
    #[error("cassette {path}: {message}")]
    Cassette { path: String, message: String },
    #[error("generator misconfigured: {0}")]
    Config(String),
}

impl GenerateError {
    /// Errors worth retrying at the transport level.
    pub fn is_retryable(&self) -> bool {
        matches!(self, Self::Transport { .. })
    }
}

pub trait Generator: Send + Sync {
    fn generate(&self, request: &GeneratorRequest<'_>) -> Result<String, GenerateError>;
}

impl<G: Generator + ?Sized> Generator for &G {
    fn generate(&self, request: &GeneratorRequest<'_>) -> Result<String, GenerateError> {
        (**self).generate(request)
    }
}

impl<G: Generator + ?Sized> Generator for Box<G> {
    fn generate(&self, request: &GeneratorRequest<'_>) -> Result<String, GenerateError> {
        (**self).generate(request)
    }
}

/// Emits the episode's reference chapters that start inside the chunk.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleGenerator;

impl Generator for OracleGenerator {
    fn generate(&self, request: &GeneratorRequest<'_>) -> Result<String, GenerateError> {
        let (lo, hi) = request.valid_range;
        let chapters: Vec<_> = request
            .episode
            .reference_chapters
            .iter()
            .flat_map(|cs| cs.chapters())
            .filter(|c| (lo..=hi).contains(&c.start_index))
            .cloned()
            .collect();
        Ok(render_target(&chapters))
    }
}

/// Always returns the same text.
#[derive(Debug, Clone)]
pub struct FixedGenerator(pub String);

impl Generator for FixedGenerator {
    fn generate(&self, _request: &GeneratorRequest<'_>) -> Result<String, GenerateError> {
        Ok(self.0.clone())
    }
}

/// Wraps another generator and keeps every rendered input it was sent.
#[derive(Debug, Default)]
pub struct RecordingGenerator<G> {
    inner: G,
    inputs: Mutex<Vec<(String, String)>>,
}

impl<G> RecordingGenerator<G> {
    pub fn new(inner: G) -> Self {
        Self {
            inner,
            inputs: Mutex::new(Vec::new()),
        }
    }

    /// `(episode_id, input_text)` pairs in call order.
    pub fn inputs(&self) -> Vec<(String, String)> {
        self.inputs.lock().expect("recording lock").clone()
    }
}

impl<G: Generator> Generator for RecordingGenerator<G> {
    fn generate(&self, request: &GeneratorRequest<'_>) -> Result<String, GenerateError> {
        self.inputs
            .lock()
            .expect("recording lock")
            .push((request.episode.id().to_string(), request.input_text.clone()));
        self.inner.generate(request)
    }
}
