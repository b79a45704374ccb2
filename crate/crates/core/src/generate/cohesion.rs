//! Lexical-cohesion baseline: block similarity valleys as boundaries and
//! TF-IDF keywords as titles.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{GenerateError, Generator, GeneratorRequest};
use crate::corpus::{Chapter, Sentence};
use crate::promptfmt::render_target;
use crate::stats::MeanStd;
use crate::text::{alnum_tokens, analyze, is_stopword};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CohesionParams {
    /// Sentences per comparison block on each side of a gap.
    pub block_size: usize,
    /// Radius of the moving average applied to the similarity curve.
    pub smoothing_width: usize,
    /// A gap is a boundary when its depth exceeds mean + cutoff * std.
    pub boundary_depth_cutoff: f64,
    pub min_segment_sentences: usize,
}

impl Default for CohesionParams {
    fn default() -> Self {
        Self {
            block_size: 10,
            smoothing_width: 2,
            boundary_depth_cutoff: 0.5,
            min_segment_sentences: 5,
        }
    }
}

impl CohesionParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.block_size == 0 || self.smoothing_width == 0 || self.min_segment_sentences == 0 {
            return Err("cohesion sizes must be positive".into());
        }
        if !(self.boundary_depth_cutoff > 0.0 && self.boundary_depth_cutoff <= 3.0) {
            return Err(format!(
                "boundary_depth_cutoff {} not in (0, 3]",
                self.boundary_depth_cutoff
            ));
        }
        Ok(())
    }
}

type TermVector = HashMap<String, f64>;

fn term_vector(sentence: &Sentence) -> TermVector {
    let mut v = TermVector::new();
    for term in analyze(sentence.text()) {
        if !is_stopword(&term) {
            *v.entry(term).or_default() += 1.0;
        }
    }
    v
}

fn add_into(acc: &mut TermVector, v: &TermVector) {
    for (t, c) in v {
        *acc.entry(t.clone()).or_default() += c;
    }
}

fn cosine(a: &TermVector, b: &TermVector) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: f64 = small
        .iter()
        .filter_map(|(t, x)| large.get(t).map(|y| x * y))
        .sum();
    let na = a.values().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.values().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

fn smooth(values: &[f64], radius: usize) -> Vec<f64> {
    (0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(radius);
            let hi = (i + radius).min(values.len() - 1);
            values[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// Depth of every local minimum of `curve`; 0 elsewhere.
fn depth_scores(curve: &[f64]) -> Vec<f64> {
    let n = curve.len();
    (0..n)
        .map(|i| {
            let v = curve[i];
            let left_ok = i == 0 || curve[i - 1] >= v;
            let right_ok = i + 1 == n || curve[i + 1] >= v;
            if !(left_ok && right_ok) {
                return 0.0;
            }
            let mut l = i;
            while l > 0 && curve[l - 1] >= curve[l] {
                l -= 1;
            }
            let mut r = i;
            while r + 1 < n && curve[r + 1] >= curve[r] {
                r += 1;
            }
            (curve[l] - v) + (curve[r] - v)
        })
        .collect()
}

/// Boundary positions (a boundary before sentence `g`, relative to
/// `sentences`) found at the valleys of the block-similarity curve.
///
/// Only gaps with a full block on both sides are scored, so nothing is
/// returned for fewer than `2 * block_size` sentences.
pub fn cohesion_boundaries(sentences: &[Sentence], params: &CohesionParams) -> Vec<usize> {
    let n = sentences.len();
    let bs = params.block_size.max(1);
    if n < 2 * bs {
        return Vec::new();
    }
    let vectors: Vec<TermVector> = sentences.iter().map(term_vector).collect();
    let block = |range: std::ops::Range<usize>| {
        let mut acc = TermVector::new();
        for v in &vectors[range] {
            add_into(&mut acc, v);
        }
        acc
    };
    let gaps: Vec<usize> = (bs..=n - bs).collect();
    let similarity: Vec<f64> = gaps
        .iter()
        .map(|&g| cosine(&block(g - bs..g), &block(g..g + bs)))
        .collect();
    let depths = depth_scores(&smooth(&similarity, params.smoothing_width));
    // statistics over valleys only; non-minima carry depth 0
    let valleys: Vec<f64> = depths.iter().copied().filter(|&d| d > 0.0).collect();
    let Some(ms) = MeanStd::of(&valleys) else {
        return Vec::new();
    };
    let threshold = ms.mean + params.boundary_depth_cutoff * ms.std;

    let mut candidates: Vec<(usize, f64)> = gaps
        .iter()
        .zip(&depths)
        // equal-depth valleys (std 0) sit exactly on the threshold
        .filter(|(_, &d)| d > 0.0 && d >= threshold)
        .map(|(&g, &d)| (g, d))
        .collect();
    // deepest first; ties go to the earlier gap
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let min_seg = params.min_segment_sentences;
    let mut accepted: Vec<usize> = Vec::new();
    for (g, _) in candidates {
        let clear_of_edges = g >= min_seg && n - g >= min_seg;
        if clear_of_edges && accepted.iter().all(|&a| a.abs_diff(g) >= min_seg) {
            accepted.push(g);
        }
    }
    accepted.sort_unstable();
    accepted
}

/// Up to `max_words` keywords of `segment`, ranked by TF-IDF with the
/// episode's sentences as documents and emitted in document order with the
/// casing of their first occurrence. Falls back to `"Chapter"`.
pub fn keyword_title(segment: &[Sentence], episode: &[Sentence], max_words: usize) -> String {
    struct Candidate<'a> {
        surface: &'a str,
        first_seen: usize,
        tf: f64,
    }
    let mut candidates: HashMap<String, Candidate<'_>> = HashMap::new();
    let mut position = 0;
    for sentence in segment {
        for token in alnum_tokens(sentence.text()) {
            let key = token.to_lowercase();
            position += 1;
            if key.chars().count() < 2 || is_stopword(&key) {
                continue;
            }
            candidates
                .entry(key)
                .or_insert(Candidate {
                    surface: token,
                    first_seen: position,
                    tf: 0.0,
                })
                .tf += 1.0;
        }
    }
    if candidates.is_empty() || max_words == 0 {
        return "Chapter".to_string();
    }

    let mut df: HashMap<&str, usize> = HashMap::new();
    for sentence in episode {
        let mut terms = analyze(sentence.text());
        terms.sort_unstable();
        terms.dedup();
        for t in terms {
            if let Some((key, _)) = candidates.get_key_value(&t) {
                *df.entry(key.as_str()).or_default() += 1;
            }
        }
    }
    let n_docs = episode.len().max(1) as f64;
    let mut ranked: Vec<(&str, &Candidate<'_>, f64)> = candidates
        .iter()
        .map(|(k, c)| {
            let d = df.get(k.as_str()).copied().unwrap_or(0).max(1) as f64;
            (k.as_str(), c, c.tf * (1.0 + n_docs / d).ln())
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.2.total_cmp(&a.2)
            .then(a.1.first_seen.cmp(&b.1.first_seen))
    });
    ranked.truncate(max_words);
    ranked.sort_by_key(|(_, c, _)| c.first_seen);
    ranked
        .iter()
        .map(|(_, c, _)| c.surface)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Cohesion boundaries inside the chunk, keyword titles per segment. The
/// first chunk always opens a chapter at its first sentence.
#[derive(Debug, Clone, Default)]
pub struct CohesionGenerator {
    pub params: CohesionParams,
    pub title_words: usize,
}

impl CohesionGenerator {
    pub fn new(params: CohesionParams) -> Self {
        Self {
            params,
            title_words: 6,
        }
    }
}

impl Generator for CohesionGenerator {
    fn generate(&self, request: &GeneratorRequest<'_>) -> Result<String, GenerateError> {
        let all = request.episode.transcript.sentences();
        let (lo, hi) = request.valid_range;
        if lo > hi || hi >= all.len() {
            return Err(GenerateError::Config(format!(
                "chunk range {lo}..={hi} outside transcript of {}",
                all.len()
            )));
        }
        let chunk = &all[lo..=hi];
        let mut starts: Vec<usize> = Vec::new();
        if lo == 0 {
            starts.push(0);
        }
        starts.extend(
            cohesion_boundaries(chunk, &self.params)
                .into_iter()
                .map(|g| g + lo),
        );
        let chapters: Vec<Chapter> = starts
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let end = starts.get(i + 1).copied().unwrap_or(hi + 1);
                Chapter::new(s, keyword_title(&all[s..end], all, self.title_words))
            })
            .collect();
        Ok(render_target(&chapters))
    }
}
