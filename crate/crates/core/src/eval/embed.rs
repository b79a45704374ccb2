use std::collections::HashMap;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::text::analyze;

#[derive(Debug, thiserror::Error)]
pub enum EmbedError {
    #[error("embedding service: {0}")]
    Service(String),
    #[error("embedding service returned {got} vectors for {expected} inputs")]
    Shape { expected: usize, got: usize },
    #[error("embedding for {0:?} has zero norm")]
    ZeroNorm(String),
}

/// Maps a title to a unit-norm vector of fixed dimension. Implementations
/// are deterministic, so `similarity(t, t) == 1`.
pub trait Embedder: Send + Sync {
    fn embed(&self, title: &str) -> Result<Vec<f64>, EmbedError>;

    fn similarity(&self, a: &str, b: &str) -> Result<f64, EmbedError> {
        if a == b {
            return Ok(1.0);
        }
        Ok(cosine(&self.embed(a)?, &self.embed(b)?))
    }
}

impl<E: Embedder + ?Sized> Embedder for &E {
    fn embed(&self, title: &str) -> Result<Vec<f64>, EmbedError> {
        (**self).embed(title)
    }
    fn similarity(&self, a: &str, b: &str) -> Result<f64, EmbedError> {
        (**self).similarity(a, b)
    }
}

impl<E: Embedder + ?Sized> Embedder for Box<E> {
    fn embed(&self, title: &str) -> Result<Vec<f64>, EmbedError> {
        (**self).embed(title)
    }
    fn similarity(&self, a: &str, b: &str) -> Result<f64, EmbedError> {
        (**self).similarity(a, b)
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

fn normalize(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Some(v)
}

/// Bag of lowercased alphanumeric tokens hashed into `dim` buckets with
/// seeded FNV-1a. A title with no tokens hashes as one token (its trimmed,
/// lowercased text), so every title embeds to a non-zero vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashedBowEmbedder {
    pub dim: usize,
    pub seed: u64,
}

impl Default for HashedBowEmbedder {
    fn default() -> Self {
        Self { dim: 256, seed: 0 }
    }
}

impl HashedBowEmbedder {
    pub fn bucket(&self, token: &str) -> usize {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET ^ self.seed;
        for b in token.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(PRIME);
        }
        (h % self.dim.max(1) as u64) as usize
    }
}

impl Embedder for HashedBowEmbedder {
    fn embed(&self, title: &str) -> Result<Vec<f64>, EmbedError> {
        let mut v = vec![0.0; self.dim.max(1)];
        let mut tokens = analyze(title);
        if tokens.is_empty() {
            tokens.push(title.trim().to_lowercase());
        }
        for t in &tokens {
            v[self.bucket(t)] += 1.0;
        }
        normalize(v).ok_or_else(|| EmbedError::ZeroNorm(title.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HttpEmbedderConfig {
    pub endpoint: String,
    pub model: String,
    pub timeout_s: u64,
    pub auth_token_env: Option<String>,
}

impl Default for HttpEmbedderConfig {
    fn default() -> Self {
        Self {
            endpoint: "http://127.0.0.1:8081/v1/embeddings".into(),
            model: "default".into(),
            timeout_s: 60,
            auth_token_env: None,
        }
    }
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    model: &'a str,
    input: Vec<&'a str>,
}

#[derive(Deserialize)]
struct EmbedResponse {
    embeddings: Vec<Vec<f64>>,
}

/// Adapter for an external sentence-embedding service.
///
/// Request: `POST {"model": ..., "input": [title]}`; response:
/// `{"embeddings": [[f64, ...]]}`. Vectors are normalized locally and
/// cached per title.
pub struct HttpEmbedder {
    config: HttpEmbedderConfig,
    client: reqwest::blocking::Client,
    cache: Mutex<HashMap<String, Vec<f64>>>,
}

impl HttpEmbedder {
    pub fn new(config: HttpEmbedderConfig) -> Result<Self, EmbedError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_s))
            .build()
            .map_err(|e| EmbedError::Service(e.to_string()))?;
        Ok(Self {
            config,
            client,
            cache: Mutex::new(HashMap::new()),
        })
    }

    fn fetch(&self, title: &str) -> Result<Vec<f64>, EmbedError> {
        let mut req = self.client.post(&self.config.endpoint).json(&EmbedRequest {
            model: &self.config.model,
            input: vec![title],
        });
        if let Some(token) = self
            .config
            .auth_token_env
            .as_deref()
            .and_then(|var| std::env::var(var).ok())
        {
            req = req.bearer_auth(token);
        }
        let resp = req
            .send()
            .and_then(|r| r.error_for_status())
            .map_err(|e| EmbedError::Service(e.to_string()))?;
        let body: EmbedResponse = resp
            .json()
            .map_err(|e| EmbedError::Service(e.to_string()))?;
        let got = body.embeddings.len();
        let vector = body
            .embeddings
            .into_iter()
            .next()
            .filter(|_| got == 1)
            .ok_or(EmbedError::Shape { expected: 1, got })?;
        normalize(vector).ok_or_else(|| EmbedError::ZeroNorm(title.to_string()))
    }
}

impl Embedder for HttpEmbedder {
    fn embed(&self, title: &str) -> Result<Vec<f64>, EmbedError> {
        if let Some(v) = self.cache.lock().expect("cache lock").get(title) {
            return Ok(v.clone());
        }
        let v = self.fetch(title)?;
        self.cache
            .lock()
            .expect("cache lock")
            .insert(title.to_string(), v.clone());
        Ok(v)
    }
}
