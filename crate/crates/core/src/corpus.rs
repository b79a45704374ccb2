//! Episode data model, JSONL ingestion, dataset filters and corpus statistics.
//!
//! One episode per line:
//!
//! ```text
//! {"episode_id": "e1", "show_id": "s1", "title": "...", "description": "...",
//!  "sentences": [{"text": "...", "start_s": 0.0, "end_s": 2.5}],
//!  "chapters": [{"start_index": 0, "title": "Intro"}]}
//! ```
//!
//! `show_id`, `start_s`, `end_s` and `chapters` are optional.

use std::collections::HashSet;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chunking::count_words;
use crate::stats::MeanStd;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: episode {episode_id}: {message}")]
    Invalid {
        line: usize,
        episode_id: String,
        message: String,
    },
    #[error("episode {0}: no reference chapters")]
    MissingChapters(String),
    #[error("empty corpus")]
    Empty,
}

/// A violated type invariant, raised by the validating constructors.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct InvariantError(pub String);

fn invariant(msg: impl Into<String>) -> InvariantError {
    InvariantError(msg.into())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sentence {
    text: String,
    word_count: usize,
    start_s: Option<f64>,
    end_s: Option<f64>,
}

impl Sentence {
    pub fn new(
        text: impl Into<String>,
        start_s: Option<f64>,
        end_s: Option<f64>,
    ) -> Result<Self, InvariantError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(invariant("sentence text is empty"));
        }
        if text.contains(['\n', '\r']) {
            return Err(invariant("sentence text contains a line break"));
        }
        if let Some(s) = start_s {
            if !(s.is_finite() && s >= 0.0) {
                return Err(invariant(format!("start_s {s} is not a time >= 0")));
            }
        }
        if let Some(e) = end_s {
            if !e.is_finite() || start_s.is_some_and(|s| e < s) || e < 0.0 {
                return Err(invariant(format!("end_s {e} precedes start_s")));
            }
        }
        let word_count = count_words(&text);
        Ok(Self {
            text,
            word_count,
            start_s,
            end_s,
        })
    }

    /// Sentence without timestamps.
    pub fn plain(text: impl Into<String>) -> Result<Self, InvariantError> {
        Self::new(text, None, None)
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn word_count(&self) -> usize {
        self.word_count
    }

    pub fn start_s(&self) -> Option<f64> {
        self.start_s
    }

    pub fn end_s(&self) -> Option<f64> {
        self.end_s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    sentences: Vec<Sentence>,
}

impl Transcript {
    pub fn new(sentences: Vec<Sentence>) -> Result<Self, InvariantError> {
        if sentences.is_empty() {
            return Err(invariant("transcript has no sentences"));
        }
        let mut last: Option<f64> = None;
        for (i, s) in sentences.iter().enumerate() {
            if let Some(t) = s.start_s {
                if last.is_some_and(|prev| t < prev) {
                    return Err(invariant(format!(
                        "sentence {i}: timestamps decrease ({t} after {})",
                        last.unwrap_or_default()
                    )));
                }
                last = Some(t);
            }
        }
        Ok(Self { sentences })
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(Sentence::word_count).sum()
    }

    /// Space-joined text of the whole transcript.
    pub fn full_text(&self) -> String {
        self.sentences
            .iter()
            .map(Sentence::text)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeMetadata {
    pub episode_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub show_id: Option<String>,
    pub title: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chapter {
    pub start_index: usize,
    pub title: String,
}

impl Chapter {
    pub fn new(start_index: usize, title: impl Into<String>) -> Self {
        Self {
            start_index,
            title: title.into(),
        }
    }
}

/// Ordered, non-overlapping chapters. Each chapter runs until the next one
/// starts; the last runs to the end of the transcript.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChapterSet {
    chapters: Vec<Chapter>,
}

impl ChapterSet {
    /// Validates ordering and titles. Range checks against a transcript are
    /// done separately by [`ChapterSet::check_range`].
    pub fn new(chapters: Vec<Chapter>) -> Result<Self, InvariantError> {
        for (i, c) in chapters.iter().enumerate() {
            if c.title.trim().is_empty() {
                return Err(invariant(format!("chapter {i} has an empty title")));
            }
            if i > 0 && c.start_index <= chapters[i - 1].start_index {
                return Err(invariant(format!(
                    "chapter {i} starts at {} which is not after {}",
                    c.start_index,
                    chapters[i - 1].start_index
                )));
            }
        }
        Ok(Self { chapters })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn check_range(&self, n_sentences: usize) -> Result<(), InvariantError> {
        match self.chapters.last() {
            Some(c) if c.start_index >= n_sentences => Err(invariant(format!(
                "chapter start {} is outside a transcript of {n_sentences} sentences",
                c.start_index
            ))),
            _ => Ok(()),
        }
    }

    pub fn chapters(&self) -> &[Chapter] {
        &self.chapters
    }

    pub fn len(&self) -> usize {
        self.chapters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chapters.is_empty()
    }

    pub fn titles(&self) -> impl Iterator<Item = &str> {
        self.chapters.iter().map(|c| c.title.as_str())
    }

    /// Half-open sentence ranges `[start, end)` of every chapter.
    pub fn segments(&self, n_sentences: usize) -> Vec<(usize, usize)> {
        self.chapters
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let end = self
                    .chapters
                    .get(i + 1)
                    .map_or(n_sentences, |next| next.start_index);
                (c.start_index, end)
            })
            .collect()
    }

    pub fn into_inner(self) -> Vec<Chapter> {
        self.chapters
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub metadata: EpisodeMetadata,
    pub transcript: Transcript,
    pub reference_chapters: Option<ChapterSet>,
}

impl Episode {
    pub fn new(
        metadata: EpisodeMetadata,
        transcript: Transcript,
        reference_chapters: Option<ChapterSet>,
    ) -> Result<Self, InvariantError> {
        if let Some(chapters) = &reference_chapters {
            chapters.check_range(transcript.len())?;
        }
        Ok(Self {
            metadata,
            transcript,
            reference_chapters,
        })
    }

    pub fn id(&self) -> &str {
        &self.metadata.episode_id
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SentenceRecord {
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    end_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EpisodeRecord {
    episode_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    show_id: Option<String>,
    title: String,
    description: String,
    sentences: Vec<SentenceRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    chapters: Option<Vec<Chapter>>,
}

impl EpisodeRecord {
    fn into_episode(self) -> Result<Episode, InvariantError> {
        let sentences = self
            .sentences
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                Sentence::new(s.text, s.start_s, s.end_s)
                    .map_err(|e| invariant(format!("sentence {i}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let transcript = Transcript::new(sentences)?;
        let chapters = self.chapters.map(ChapterSet::new).transpose()?;
        Episode::new(
            EpisodeMetadata {
                episode_id: self.episode_id,
                show_id: self.show_id,
                title: self.title,
                description: self.description,
            },
            transcript,
            chapters,
        )
    }

    fn from_episode(ep: &Episode) -> Self {
        Self {
            episode_id: ep.metadata.episode_id.clone(),
            show_id: ep.metadata.show_id.clone(),
            title: ep.metadata.title.clone(),
            description: ep.metadata.description.clone(),
            sentences: ep
                .transcript
                .sentences()
                .iter()
                .map(|s| SentenceRecord {
                    text: s.text.clone(),
                    start_s: s.start_s,
                    end_s: s.end_s,
                })
                .collect(),
            chapters: ep
                .reference_chapters
                .as_ref()
                .map(|c| c.chapters().to_vec()),
        }
    }
}

/// Required top-level keys, with the name used in error messages.
const REQUIRED_KEYS: &[(&str, &str)] = &[
    ("episode_id", "episode_id"),
    ("title", "title"),
    ("description", "description"),
    ("sentences", "transcript"),
];

/// Parses one JSONL line. `line` is 1-based and only used in errors.
pub fn parse_episode_line(raw: &str, line: usize) -> Result<Episode, CorpusError> {
    let value: Value = serde_json::from_str(raw).map_err(|e| CorpusError::Parse {
        line,
        message: format!("malformed JSON: {e}"),
    })?;
    let Some(obj) = value.as_object() else {
        return Err(CorpusError::Parse {
            line,
            message: "expected a JSON object".into(),
        });
    };
    for (key, name) in REQUIRED_KEYS {
        if !obj.contains_key(*key) {
            let message = if key == name {
                format!("missing field {name}")
            } else {
                format!("missing field {name} (key \"{key}\")")
            };
            return Err(CorpusError::Parse { line, message });
        }
    }
    let record: EpisodeRecord = serde_json::from_value(value).map_err(|e| CorpusError::Parse {
        line,
        message: e.to_string(),
    })?;
    let episode_id = record.episode_id.clone();
    record.into_episode().map_err(|e| CorpusError::Invalid {
        line,
        episode_id,
        message: e.0,
    })
}

/// Parses a whole JSONL document. Blank lines are skipped.
pub fn parse_corpus(content: &str) -> Result<Vec<Episode>, CorpusError> {
    let mut seen = HashSet::new();
    let mut episodes = Vec::new();
    for (i, raw) in content.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let line = i + 1;
        let episode = parse_episode_line(raw, line)?;
        if !seen.insert(episode.metadata.episode_id.clone()) {
            return Err(CorpusError::Invalid {
                line,
                episode_id: episode.metadata.episode_id,
                message: "duplicate episode_id".into(),
            });
        }
        episodes.push(episode);
    }
    Ok(episodes)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<Episode>, CorpusError> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_corpus(&content)
}

pub fn episode_to_json_line(episode: &Episode) -> String {
    serde_json::to_string(&EpisodeRecord::from_episode(episode))
        .expect("episode records always serialize")
}

pub fn save_corpus(path: impl AsRef<Path>, episodes: &[Episode]) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let io_err = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut out = BufWriter::new(file);
    for ep in episodes {
        writeln!(out, "{}", episode_to_json_line(ep)).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    pub min_chapter_s: f64,
    pub max_chapter_s: f64,
    /// Titles must have strictly fewer words than this.
    pub max_title_words: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            min_chapter_s: 30.0,
            max_chapter_s: 30.0 * 60.0,
            max_title_words: 15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterViolation {
    /// Position of the offending chapter, or `None` for episode-level issues.
    pub chapter: Option<usize>,
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterOutcome {
    pub passes: bool,
    pub violations: Vec<FilterViolation>,
    pub notes: Vec<String>,
}

/// Chapter durations in seconds, `None` when a needed timestamp is absent.
fn chapter_durations(episode: &Episode, chapters: &ChapterSet) -> Option<Vec<f64>> {
    let sentences = episode.transcript.sentences();
    let end = sentences.last()?.end_s?;
    let starts = chapters
        .chapters()
        .iter()
        .map(|c| sentences.get(c.start_index).and_then(|s| s.start_s))
        .collect::<Option<Vec<_>>>()?;
    Some(
        starts
            .iter()
            .enumerate()
            .map(|(i, s)| starts.get(i + 1).copied().unwrap_or(end) - s)
            .collect(),
    )
}

pub fn passes_filters(episode: &Episode, filters: &FilterConfig) -> FilterOutcome {
    let Some(chapters) = &episode.reference_chapters else {
        return FilterOutcome {
            passes: false,
            violations: vec![FilterViolation {
                chapter: None,
                reasons: vec!["episode has no reference chapters".into()],
            }],
            notes: Vec::new(),
        };
    };
    let mut notes = Vec::new();
    let durations = chapter_durations(episode, chapters);
    if durations.is_none() {
        notes.push("duration not evaluable: missing sentence timestamps".to_string());
    }
    let mut violations = Vec::new();
    for (i, chapter) in chapters.chapters().iter().enumerate() {
        let mut reasons = Vec::new();
        if let Some(d) = durations.as_ref().map(|d| d[i]) {
            if d < filters.min_chapter_s || d > filters.max_chapter_s {
                reasons.push(format!(
                    "duration {d:.1}s outside [{}, {}]",
                    filters.min_chapter_s, filters.max_chapter_s
                ));
            }
        }
        let words = count_words(&chapter.title);
        if words >= filters.max_title_words {
            reasons.push(format!(
                "title has {words} words (must be fewer than {})",
                filters.max_title_words
            ));
        }
        if !reasons.is_empty() {
            violations.push(FilterViolation {
                chapter: Some(i),
                reasons,
            });
        }
    }
    FilterOutcome {
        passes: violations.is_empty(),
        violations,
        notes,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub episodes: usize,
    pub chapters_per_episode: MeanStd,
    /// Pooled over every reference segment.
    pub segment_sentences: MeanStd,
    /// Pooled over every reference title.
    pub title_words: MeanStd,
    pub document_words: f64,
    pub title_words_per_episode: f64,
    pub description_words: f64,
}

pub fn corpus_stats(corpus: &[Episode]) -> Result<CorpusStats, CorpusError> {
    if corpus.is_empty() {
        return Err(CorpusError::Empty);
    }
    let mut n_chapters = Vec::new();
    let mut seg_lens = Vec::new();
    let mut title_lens = Vec::new();
    let mut doc_words = 0.0;
    let mut ep_title_words = 0.0;
    let mut desc_words = 0.0;
    for ep in corpus {
        let chapters = ep
            .reference_chapters
            .as_ref()
            .ok_or_else(|| CorpusError::MissingChapters(ep.id().to_string()))?;
        n_chapters.push(chapters.len() as f64);
        seg_lens.extend(
            chapters
                .segments(ep.transcript.len())
                .into_iter()
                .map(|(s, e)| (e - s) as f64),
        );
        title_lens.extend(chapters.titles().map(|t| count_words(t) as f64));
        doc_words += ep.transcript.word_count() as f64;
        ep_title_words += count_words(&ep.metadata.title) as f64;
        desc_words += count_words(&ep.metadata.description) as f64;
    }
    let n = corpus.len() as f64;
    let zero = MeanStd {
        mean: 0.0,
        std: 0.0,
    };
    Ok(CorpusStats {
        episodes: corpus.len(),
        chapters_per_episode: MeanStd::of(&n_chapters).unwrap_or(zero),
        segment_sentences: MeanStd::of(&seg_lens).unwrap_or(zero),
        title_words: MeanStd::of(&title_lens).unwrap_or(zero),
        document_words: doc_words / n,
        title_words_per_episode: ep_title_words / n,
        description_words: desc_words / n,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSplit {
    pub train: Vec<Episode>,
    pub validation: Vec<Episode>,
    pub test: Vec<Episode>,
}

/// Seeded shuffle followed by a `train`/`validation`/rest split by fraction.
pub fn split_corpus(
    mut episodes: Vec<Episode>,
    train_fraction: f64,
    validation_fraction: f64,
    seed: u64,
) -> CorpusSplit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    episodes.shuffle(&mut rng);
    let n = episodes.len();
    let n_train = ((n as f64) * train_fraction.clamp(0.0, 1.0)).round() as usize;
    let n_val = (((n as f64) * validation_fraction.clamp(0.0, 1.0)).round() as usize)
        .min(n - n_train.min(n));
    let test = episodes.split_off((n_train + n_val).min(n));
    let validation = episodes.split_off(n_train.min(n));
    CorpusSplit {
        train: episodes,
        validation,
        test,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: &str, chapters: &str) -> String {
        format!(
            r#"{{"episode_id":"{id}","title":"T","description":"D","sentences":[{{"text":"a b"}},{{"text":"c"}}]{chapters}}}"#
        )
    }

    #[test]
    fn load_preserves_order() {
        let content = format!("{}\n{}\n", line("x", ""), line("a", ""));
        let eps = parse_corpus(&content).unwrap();
        let ids: Vec<_> = eps.iter().map(Episode::id).collect();
        assert_eq!(ids, ["x", "a"]);
        assert_eq!(eps[0].transcript.sentences()[0].word_count(), 2);
    }

    #[test]
    fn empty_file_is_empty_corpus() {
        assert!(parse_corpus("").unwrap().is_empty());
    }

    #[test]
    fn missing_transcript_names_line() {
        let bad = r#"{"episode_id":"z","title":"T","description":"D"}"#;
        let content = format!("{}\n{}\n{bad}\n", line("a", ""), line("b", ""));
        let err = parse_corpus(&content).unwrap_err().to_string();
        assert!(err.starts_with("line 3: missing field transcript"), "{err}");
    }

    #[test]
    fn malformed_json_names_line() {
        let err = parse_corpus("{oops").unwrap_err().to_string();
        assert!(err.starts_with("line 1: malformed JSON"), "{err}");
    }

    #[test]
    fn invariant_violation_names_episode() {
        let content = line("ep9", r#","chapters":[{"start_index":5,"title":"x"}]"#);
        let err = parse_corpus(&content).unwrap_err().to_string();
        assert!(err.contains("episode ep9"), "{err}");
        assert!(err.contains("outside a transcript of 2"), "{err}");

        let dup = format!("{}\n{}", line("a", ""), line("a", ""));
        assert!(parse_corpus(&dup)
            .unwrap_err()
            .to_string()
            .contains("duplicate episode_id"));
    }

    #[test]
    fn chapter_set_rejects_unordered() {
        assert!(ChapterSet::new(vec![Chapter::new(3, "a"), Chapter::new(3, "b")]).is_err());
        assert!(ChapterSet::new(vec![Chapter::new(0, " ")]).is_err());
        let cs = ChapterSet::new(vec![Chapter::new(1, "a"), Chapter::new(4, "b")]).unwrap();
        assert_eq!(cs.segments(10), vec![(1, 4), (4, 10)]);
    }

    #[test]
    fn decreasing_timestamps_rejected() {
        let s = vec![
            Sentence::new("a", Some(5.0), Some(6.0)).unwrap(),
            Sentence::new("b", Some(4.0), Some(6.0)).unwrap(),
        ];
        assert!(Transcript::new(s).is_err());
        assert!(Sentence::new("a", Some(5.0), Some(4.0)).is_err());
        assert!(Sentence::new("a\nb", None, None).is_err());
    }

    fn timed_episode(chapter_starts: &[(usize, &str)], secs_per_sentence: f64) -> Episode {
        let sentences = (0..20)
            .map(|i| {
                let t = i as f64 * secs_per_sentence;
                Sentence::new(format!("s{i}"), Some(t), Some(t + secs_per_sentence)).unwrap()
            })
            .collect();
        let chapters = chapter_starts
            .iter()
            .map(|(i, t)| Chapter::new(*i, *t))
            .collect();
        Episode::new(
            EpisodeMetadata {
                episode_id: "e".into(),
                show_id: None,
                title: "T".into(),
                description: String::new(),
            },
            Transcript::new(sentences).unwrap(),
            Some(ChapterSet::new(chapters).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn filter_45_second_chapter_passes() {
        // two chapters of 10 sentences at 4.5 s each -> 45 s
        let ep = timed_episode(&[(0, "one two three four"), (10, "a b c d")], 4.5);
        let out = passes_filters(&ep, &FilterConfig::default());
        assert!(out.passes, "{out:?}");
        assert!(out.notes.is_empty());
    }

    #[test]
    fn fifteen_word_title_fails() {
        let title = vec!["w"; 15].join(" ");
        let ep = timed_episode(&[(0, title.as_str()), (10, "ok")], 4.5);
        let out = passes_filters(&ep, &FilterConfig::default());
        assert!(!out.passes);
        assert_eq!(out.violations.len(), 1);
        assert_eq!(out.violations[0].chapter, Some(0));

        let title14 = vec!["w"; 14].join(" ");
        let ep = timed_episode(&[(0, title14.as_str()), (10, "ok")], 4.5);
        assert!(passes_filters(&ep, &FilterConfig::default()).passes);
    }

    #[test]
    fn short_chapter_fails_duration() {
        // second chapter spans 1 sentence of 4.5 s
        let ep = timed_episode(&[(0, "a"), (19, "b")], 4.5);
        let out = passes_filters(&ep, &FilterConfig::default());
        assert!(!out.passes);
        assert_eq!(out.violations[0].chapter, Some(1));
    }

    #[test]
    fn untimed_episode_passes_with_note() {
        let content = line(
            "u",
            r#","chapters":[{"start_index":0,"title":"one two three"}]"#,
        );
        let ep = &parse_corpus(&content).unwrap()[0];
        let out = passes_filters(ep, &FilterConfig::default());
        assert!(out.passes);
        assert_eq!(out.notes.len(), 1);
        assert!(out.notes[0].contains("duration not evaluable"));
    }

    #[test]
    fn stats_constant_corpus() {
        let sentences = (0..10)
            .map(|i| Sentence::plain(format!("w{i}")).unwrap())
            .collect();
        let ep = Episode::new(
            EpisodeMetadata {
                episode_id: "e".into(),
                show_id: None,
                title: "T".into(),
                description: "d d".into(),
            },
            Transcript::new(sentences).unwrap(),
            Some(ChapterSet::new(vec![Chapter::new(0, "a"), Chapter::new(5, "b")]).unwrap()),
        )
        .unwrap();
        let s = corpus_stats(&[ep]).unwrap();
        assert_eq!(
            s.chapters_per_episode,
            MeanStd {
                mean: 2.0,
                std: 0.0
            }
        );
        assert_eq!(
            s.segment_sentences,
            MeanStd {
                mean: 5.0,
                std: 0.0
            }
        );
        assert_eq!(
            s.title_words,
            MeanStd {
                mean: 1.0,
                std: 0.0
            }
        );
        assert_eq!(s.document_words, 10.0);
        assert!(matches!(corpus_stats(&[]), Err(CorpusError::Empty)));
    }

    #[test]
    fn stats_two_and_four_chapters() {
        let two = line(
            "a",
            r#","chapters":[{"start_index":0,"title":"x"},{"start_index":1,"title":"y"}]"#,
        );
        let content = format!(
            "{two}\n{}",
            r#"{"episode_id":"b","title":"T","description":"D","sentences":[{"text":"a"},{"text":"b"},{"text":"c"},{"text":"d"}],"chapters":[{"start_index":0,"title":"p"},{"start_index":1,"title":"q"},{"start_index":2,"title":"r"},{"start_index":3,"title":"s"}]}"#
        );
        let eps = parse_corpus(&content).unwrap();
        let s = corpus_stats(&eps).unwrap();
        assert_eq!(s.chapters_per_episode.mean, 3.0);
        assert_eq!(s.chapters_per_episode.std, 1.0);
    }

    #[test]
    fn split_is_seeded_and_complete() {
        let eps: Vec<_> = (0..10)
            .map(|i| parse_episode_line(&line(&format!("e{i}"), ""), 1).unwrap())
            .collect();
        let a = split_corpus(eps.clone(), 0.8, 0.1, 7);
        let b = split_corpus(eps, 0.8, 0.1, 7);
        assert_eq!(a, b);
        assert_eq!((a.train.len(), a.validation.len(), a.test.len()), (8, 1, 1));
    }
}
