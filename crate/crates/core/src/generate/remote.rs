//! HTTP/JSON chapterization client with cassette record/replay.
//!
//! Request (POST to `endpoint`, optional `Authorization: Bearer <token>`):
//!
//! ```json
//! {"model": "<model>", "instruction": "<instruction>", "input": "<rendered chunk>"}
//! ```
//!
//! Response: `{"content": "<model text>"}` where the model text is a JSON
//! array `[{"start_sentence_id": 12, "title": "..."}]`, optionally wrapped in
//! a markdown code fence. A bare JSON array body is accepted as the content.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::{GenerateError, Generator, GeneratorRequest};
use crate::corpus::Chapter;
use crate::promptfmt::render_target;

pub const DEFAULT_INSTRUCTION: &str = "Split the transcript below into chapters. \
Each transcript line starts with a sentence id followed by a colon. \
Return only a JSON array of objects with the keys \"start_sentence_id\" (integer) \
and \"title\" (string), one object per chapter, ordered by start_sentence_id. \
Return [] if no chapter starts in this part of the transcript.";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CassetteMode {
    /// Always call the endpoint; no cassette file involved.
    #[default]
    Off,
    /// Call the endpoint and store every response in the cassette.
    Record,
    /// Never call the endpoint; answer from the cassette only.
    Replay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RemoteConfig {
    pub endpoint: String,
    /// Name of the environment variable holding the bearer token.
    pub auth_token_env: Option<String>,
    pub timeout_s: f64,
    pub max_concurrent: usize,
    /// Passed through to the endpoint untouched.
    pub model: String,
    pub instruction: String,
    pub max_attempts: u32,
    /// First retry delay; doubled on every further attempt.
    pub backoff_base_s: f64,
    pub cassette: Option<PathBuf>,
    pub cassette_mode: CassetteMode,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        Self {
            endpoint: "http://127.0.0.1:8080/v1/chapterize".into(),
            auth_token_env: None,
            timeout_s: 120.0,
            max_concurrent: 4,
            model: "default".into(),
            instruction: DEFAULT_INSTRUCTION.into(),
            max_attempts: 3,
            backoff_base_s: 1.0,
            cassette: None,
            cassette_mode: CassetteMode::Off,
        }
    }
}

#[derive(Serialize)]
struct RemoteRequest<'a> {
    model: &'a str,
    instruction: &'a str,
    input: &'a str,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct CassetteFile {
    entries: BTreeMap<String, String>,
}

struct Permits {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Permits {
    fn new(n: usize) -> Self {
        Self {
            free: Mutex::new(n.max(1)),
            cv: Condvar::new(),
        }
    }

    fn acquire(&self) -> PermitGuard<'_> {
        let mut free = self.free.lock().expect("permit lock");
        while *free == 0 {
            free = self.cv.wait(free).expect("permit lock");
        }
        *free -= 1;
        PermitGuard(self)
    }
}

struct PermitGuard<'a>(&'a Permits);

impl Drop for PermitGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().expect("permit lock") += 1;
        self.0.cv.notify_one();
    }
}

pub struct RemoteGenerator {
    config: RemoteConfig,
    client: reqwest::blocking::Client,
    token: Option<String>,
    permits: Permits,
    cassette: Mutex<CassetteFile>,
}

impl std::fmt::Debug for RemoteGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RemoteGenerator")
            .field("config", &self.config)
            .finish_non_exhaustive()
    }
}

impl RemoteGenerator {
    pub fn new(config: RemoteConfig) -> Result<Self, GenerateError> {
        if config.max_attempts == 0 {
            return Err(GenerateError::Config(
                "max_attempts must be at least 1".into(),
            ));
        }
        if config.timeout_s.is_nan() || config.timeout_s <= 0.0 {
            return Err(GenerateError::Config("timeout_s must be positive".into()));
        }
        let token = match &config.auth_token_env {
            Some(var) => Some(std::env::var(var).map_err(|_| {
                GenerateError::Config(format!("environment variable {var} is not set"))
            })?),
            None => None,
        };
        let cassette = match (&config.cassette, config.cassette_mode) {
            (_, CassetteMode::Off) => CassetteFile::default(),
            (None, _) => {
                return Err(GenerateError::Config(
                    "cassette mode requires a cassette path".into(),
                ))
            }
            (Some(path), mode) => match fs::read_to_string(path) {
                Ok(text) => serde_json::from_str(&text).map_err(|e| GenerateError::Cassette {
                    path: path.display().to_string(),
                    message: e.to_string(),
                })?,
                Err(_) if mode == CassetteMode::Record => CassetteFile::default(),
                Err(e) => {
                    return Err(GenerateError::Cassette {
                        path: path.display().to_string(),
                        message: e.to_string(),
                    })
                }
            },
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs_f64(config.timeout_s))
            .build()
            .map_err(|e| GenerateError::Config(e.to_string()))?;
        Ok(Self {
            permits: Permits::new(config.max_concurrent),
            config,
            client,
            token,
            cassette: Mutex::new(cassette),
        })
    }

    /// Cassette key of a request: SHA-256 over model, instruction and input.
    pub fn cassette_key(&self, input: &str) -> String {
        let mut h = Sha256::new();
        for part in [&self.config.model, &self.config.instruction, input] {
            h.update(part.as_bytes());
            h.update([0u8]);
        }
        hex::encode(h.finalize())
    }

    fn post_once(&self, input: &str) -> Result<String, GenerateError> {
        let body = RemoteRequest {
            model: &self.config.model,
            instruction: &self.config.instruction,
            input,
        };
        let mut req = self.client.post(&self.config.endpoint).json(&body);
        if let Some(token) = &self.token {
            req = req.bearer_auth(token);
        }
        let transport = |message: String| GenerateError::Transport {
            attempts: 1,
            message,
        };
        let resp = req.send().map_err(|e| transport(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| transport(e.to_string()))?;
        if status.is_server_error() || status.as_u16() == 429 {
            return Err(transport(format!("HTTP {status}")));
        }
        if !status.is_success() {
            return Err(GenerateError::Rejected(format!("HTTP {status}: {text}")));
        }
        Ok(extract_content(&text))
    }

    fn post_with_retries(&self, input: &str) -> Result<String, GenerateError> {
        let _permit = self.permits.acquire();
        let mut attempt = 0;
        loop {
            attempt += 1;
            match self.post_once(input) {
                Err(GenerateError::Transport { message, .. }) => {
                    if attempt >= self.config.max_attempts {
                        return Err(GenerateError::Transport {
                            attempts: attempt,
                            message,
                        });
                    }
                    let delay = self.config.backoff_base_s * f64::from(1u32 << (attempt - 1));
                    tracing::warn!(attempt, %message, "remote call failed, retrying");
                    std::thread::sleep(Duration::from_secs_f64(delay.max(0.0)));
                }
                other => return other,
            }
        }
    }

    fn save_cassette(&self, file: &CassetteFile) -> Result<(), GenerateError> {
        let Some(path) = &self.config.cassette else {
            return Ok(());
        };
        let err = |message: String| GenerateError::Cassette {
            path: path.display().to_string(),
            message,
        };
        let text = serde_json::to_string_pretty(file).map_err(|e| err(e.to_string()))?;
        fs::write(path, text).map_err(|e| err(e.to_string()))
    }

    /// Raw model content for one rendered input.
    pub fn fetch(&self, input: &str) -> Result<String, GenerateError> {
        match self.config.cassette_mode {
            CassetteMode::Off => self.post_with_retries(input),
            CassetteMode::Replay => {
                let key = self.cassette_key(input);
                self.cassette
                    .lock()
                    .expect("cassette lock")
                    .entries
                    .get(&key)
                    .cloned()
                    .ok_or(GenerateError::CassetteMiss(key))
            }
            CassetteMode::Record => {
                let content = self.post_with_retries(input)?;
                let mut file = self.cassette.lock().expect("cassette lock");
                file.entries
                    .insert(self.cassette_key(input), content.clone());
                self.save_cassette(&file)?;
                Ok(content)
            }
        }
    }
}

impl Generator for RemoteGenerator {
    fn generate(&self, request: &GeneratorRequest<'_>) -> Result<String, GenerateError> {
        let content = self.fetch(&request.input_text)?;
        let (grammar, warnings) = remote_response_to_grammar(&content);
        for w in &warnings {
            tracing::warn!(episode = request.episode.id(), warning = %w, "remote output");
        }
        Ok(grammar)
    }
}

fn extract_content(body: &str) -> String {
    match serde_json::from_str::<Value>(body) {
        Ok(Value::Object(map)) => match map.get("content") {
            Some(Value::String(s)) => s.clone(),
            _ => body.to_string(),
        },
        _ => body.to_string(),
    }
}

fn strip_code_fence(text: &str) -> &str {
    let t = text.trim();
    let Some(rest) = t.strip_prefix("```") else {
        return t;
    };
    let rest = rest.split_once('\n').map_or("", |(_, body)| body);
    rest.trim_end().strip_suffix("```").unwrap_or(rest).trim()
}

/// Converts the model's JSON chapter list into the output grammar.
///
/// `[]` becomes the sentinel. Anything that is not a JSON array yields an
/// empty string (parsed downstream as an empty, non-sentinel prediction)
/// plus a warning; malformed items are dropped with a warning each.
pub fn remote_response_to_grammar(content: &str) -> (String, Vec<String>) {
    let mut warnings = Vec::new();
    let items = match serde_json::from_str::<Value>(strip_code_fence(content)) {
        Ok(Value::Array(items)) => items,
        Ok(_) => {
            warnings.push("remote output is JSON but not an array".to_string());
            return (String::new(), warnings);
        }
        Err(e) => {
            warnings.push(format!("remote output is not JSON: {e}"));
            return (String::new(), warnings);
        }
    };
    let mut chapters = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let id = item.get("start_sentence_id").and_then(Value::as_u64);
        let title = item
            .get("title")
            .and_then(Value::as_str)
            .map(str::trim)
            .filter(|t| !t.is_empty());
        match (id, title) {
            (Some(id), Some(title)) => match usize::try_from(id) {
                Ok(id) => chapters.push(Chapter::new(id, title)),
                Err(_) => warnings.push(format!("item {i}: id {id} too large")),
            },
            _ => warnings.push(format!("item {i}: missing start_sentence_id or title")),
        }
    }
    if chapters.is_empty() && !items.is_empty() {
        return (String::new(), warnings);
    }
    chapters.sort_by_key(|c| c.start_index);
    (render_target(&chapters), warnings)
}
