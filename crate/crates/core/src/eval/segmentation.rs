use std::collections::BTreeSet;

use super::EvalError;
use crate::corpus::{ChapterSet, Episode};

/// Boundary gaps of a segmentation: gap `g` is a boundary before sentence
/// `g`, for `g` in `1..n_sentences`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundarySeq {
    n_sentences: usize,
    boundaries: BTreeSet<usize>,
}

impl BoundarySeq {
    pub fn new(
        n_sentences: usize,
        boundaries: impl IntoIterator<Item = usize>,
    ) -> Result<Self, EvalError> {
        if n_sentences == 0 {
            return Err(EvalError::Invalid(
                "a segmentation needs at least one sentence".into(),
            ));
        }
        let boundaries: BTreeSet<usize> = boundaries.into_iter().collect();
        if let Some(&bad) = boundaries.iter().find(|&&g| g == 0 || g >= n_sentences) {
            return Err(EvalError::Invalid(format!(
                "gap {bad} outside 1..{n_sentences}"
            )));
        }
        Ok(Self {
            n_sentences,
            boundaries,
        })
    }

    /// Every chapter start after sentence 0 becomes a gap.
    pub fn from_chapters(chapters: &ChapterSet, n_sentences: usize) -> Result<Self, EvalError> {
        Self::new(
            n_sentences,
            chapters
                .chapters()
                .iter()
                .map(|c| c.start_index)
                .filter(|&s| s > 0),
        )
    }

    pub fn n_sentences(&self) -> usize {
        self.n_sentences
    }

    pub fn boundaries(&self) -> &BTreeSet<usize> {
        &self.boundaries
    }

    /// Boundaries strictly inside the window from sentence `i` to `i + k`.
    fn count_in_window(&self, i: usize, k: usize) -> usize {
        self.boundaries.range(i + 1..=i + k).count()
    }
}

/// WindowDiff: the fraction of the `N - k` windows (sentence `i` to
/// `i + k`) whose boundary counts differ between reference and hypothesis.
pub fn window_diff(
    reference: &BoundarySeq,
    hypothesis: &BoundarySeq,
    k: usize,
) -> Result<f64, EvalError> {
    let n = reference.n_sentences;
    if hypothesis.n_sentences != n {
        return Err(EvalError::Invalid(format!(
            "segmentations cover {n} and {} sentences",
            hypothesis.n_sentences
        )));
    }
    if k == 0 || k >= n {
        return Err(EvalError::Invalid(format!(
            "window size k={k} must satisfy 1 <= k < {n}"
        )));
    }
    let windows = n - k;
    let disagreements = (0..windows)
        .filter(|&i| reference.count_in_window(i, k) != hypothesis.count_in_window(i, k))
        .count();
    Ok(disagreements as f64 / windows as f64)
}

/// Half the mean reference segment length, rounded, never below 2.
pub fn estimate_k(corpus: &[Episode]) -> Result<usize, EvalError> {
    let mut total = 0usize;
    let mut segments = 0usize;
    for ep in corpus {
        let chapters = ep
            .reference_chapters
            .as_ref()
            .ok_or_else(|| EvalError::MissingReference(ep.id().to_string()))?;
        for (s, e) in chapters.segments(ep.transcript.len()) {
            total += e - s;
            segments += 1;
        }
    }
    if segments == 0 {
        return Err(EvalError::EmptyCorpus);
    }
    let k = (0.5 * total as f64 / segments as f64).round() as usize;
    Ok(k.max(2))
}
