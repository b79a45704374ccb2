use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::embed::Embedder;
use super::segmentation::{window_diff, BoundarySeq};
use super::titles::{aligned_rouge_l, corpus_cv, embedding_prf, title_length_cv};
use super::EvalError;
use crate::corpus::{ChapterSet, Episode};
use crate::stats::MeanStd;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeEval {
    pub episode_id: String,
    pub windiff: Option<f64>,
    #[serde(rename = "rougeL_f1_aligned")]
    pub rouge_l_f1_aligned: Option<f64>,
    pub emb_precision: Option<f64>,
    pub emb_recall: Option<f64>,
    pub emb_f1: Option<f64>,
    pub title_cv: Option<f64>,
    pub n_ref: usize,
    pub n_pred: usize,
}

/// Mean and population std over the non-missing values of one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub count: usize,
    pub missing: usize,
}

impl Aggregate {
    fn of(values: impl Iterator<Item = Option<f64>>) -> Self {
        let mut present = Vec::new();
        let mut missing = 0;
        for v in values {
            match v {
                Some(x) => present.push(x),
                None => missing += 1,
            }
        }
        let ms = MeanStd::of(&present);
        Self {
            mean: ms.map(|m| m.mean),
            std: ms.map(|m| m.std),
            count: present.len(),
            missing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub windiff: Aggregate,
    #[serde(rename = "rougeL_f1_aligned")]
    pub rouge_l_f1_aligned: Aggregate,
    pub emb_precision: Aggregate,
    pub emb_recall: Aggregate,
    pub emb_f1: Aggregate,
    pub title_cv: Aggregate,
    /// Mean per-episode title-length CV of the references.
    pub title_cv_reference: Option<f64>,
    pub n_ref: Aggregate,
    pub n_pred: Aggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub k: usize,
    pub k_source: String,
    pub evaluated: usize,
    /// Prediction ids without a reference episode.
    pub skipped_predictions: Vec<String>,
    /// Reference ids without a prediction.
    pub skipped_references: Vec<String>,
    pub warnings: Vec<String>,
    pub aggregate: EvalSummary,
    pub episodes: Vec<EpisodeEval>,
}

fn evaluate_episode<E: Embedder + ?Sized>(
    episode: &Episode,
    reference: &ChapterSet,
    prediction: &ChapterSet,
    k: usize,
    embedder: &E,
) -> Result<(EpisodeEval, Vec<String>), EvalError> {
    let id = episode.id().to_string();
    let n = episode.transcript.len();
    let mut warnings = Vec::new();
    let mut row = EpisodeEval {
        episode_id: id.clone(),
        windiff: None,
        rouge_l_f1_aligned: None,
        emb_precision: None,
        emb_recall: None,
        emb_f1: None,
        title_cv: title_length_cv(prediction),
        n_ref: reference.len(),
        n_pred: prediction.len(),
    };
    if let Err(e) = prediction.check_range(n) {
        warnings.push(format!("{id}: prediction not scorable: {e}"));
        return Ok((row, warnings));
    }
    let r = BoundarySeq::from_chapters(reference, n)?;
    let h = BoundarySeq::from_chapters(prediction, n)?;
    match window_diff(&r, &h, k) {
        Ok(v) => row.windiff = Some(v),
        Err(e) => warnings.push(format!("{id}: windiff missing: {e}")),
    }
    row.rouge_l_f1_aligned = aligned_rouge_l(reference, prediction, n);
    let emb = embedding_prf(reference, prediction, embedder, n)?;
    row.emb_precision = emb.precision;
    row.emb_recall = emb.recall;
    row.emb_f1 = emb.f1;
    if prediction.is_empty() {
        warnings.push(format!("{id}: empty prediction; title metrics missing"));
    }
    Ok((row, warnings))
}

/// Scores every reference episode that has a prediction, in reference
/// order. Ids present on one side only are listed, not scored.
pub fn evaluate_corpus<E: Embedder + ?Sized>(
    references: &[Episode],
    predictions: &[(String, ChapterSet)],
    k: usize,
    embedder: &E,
) -> Result<EvalReport, EvalError> {
    let by_id: HashMap<&str, &ChapterSet> = predictions
        .iter()
        .map(|(id, cs)| (id.as_str(), cs))
        .collect();
    let ref_ids: HashSet<&str> = references.iter().map(Episode::id).collect();
    let skipped_predictions: Vec<String> = predictions
        .iter()
        .filter(|(id, _)| !ref_ids.contains(id.as_str()))
        .map(|(id, _)| id.clone())
        .collect();
    let mut skipped_references = Vec::new();
    let mut pairs = Vec::new();
    for ep in references {
        match by_id.get(ep.id()) {
            Some(pred) => {
                let reference = ep
                    .reference_chapters
                    .as_ref()
                    .ok_or_else(|| EvalError::MissingReference(ep.id().to_string()))?;
                pairs.push((ep, reference, *pred));
            }
            None => skipped_references.push(ep.id().to_string()),
        }
    }
    if pairs.is_empty() {
        return Err(EvalError::EmptyIntersection);
    }
    let results: Vec<(EpisodeEval, Vec<String>)> = pairs
        .par_iter()
        .map(|(ep, r, p)| evaluate_episode(ep, r, p, k, embedder))
        .collect::<Result<_, _>>()?;

    let mut warnings = Vec::new();
    if !skipped_predictions.is_empty() || !skipped_references.is_empty() {
        warnings.push(format!(
            "evaluated on the id intersection; skipped {} prediction(s) and {} reference(s)",
            skipped_predictions.len(),
            skipped_references.len()
        ));
    }
    let mut episodes = Vec::with_capacity(results.len());
    for (row, w) in results {
        episodes.push(row);
        warnings.extend(w);
    }
    let col = |f: fn(&EpisodeEval) -> Option<f64>| Aggregate::of(episodes.iter().map(f));
    let aggregate = EvalSummary {
        windiff: col(|e| e.windiff),
        rouge_l_f1_aligned: col(|e| e.rouge_l_f1_aligned),
        emb_precision: col(|e| e.emb_precision),
        emb_recall: col(|e| e.emb_recall),
        emb_f1: col(|e| e.emb_f1),
        title_cv: col(|e| e.title_cv),
        title_cv_reference: corpus_cv(pairs.iter().map(|(_, r, _)| *r)),
        n_ref: col(|e| Some(e.n_ref as f64)),
        n_pred: col(|e| Some(e.n_pred as f64)),
    };
    Ok(EvalReport {
        k,
        k_source: "given".into(),
        evaluated: episodes.len(),
        skipped_predictions,
        skipped_references,
        warnings,
        aggregate,
        episodes,
    })
}

fn fmt_cell(a: &Aggregate) -> String {
    match (a.mean, a.std) {
        (Some(m), Some(s)) => format!("{m:.3} ± {s:.3}"),
        _ => "n/a".into(),
    }
}

impl EvalReport {
    pub fn render_table(&self) -> String {
        let a = &self.aggregate;
        let mut out = String::new();
        let _ = writeln!(out, "k = {} ({})", self.k, self.k_source);
        let _ = writeln!(
            out,
            "episodes evaluated: {}, skipped: {}",
            self.evaluated,
            self.skipped_predictions.len() + self.skipped_references.len()
        );
        let rows = [
            ("WinDiff", &a.windiff),
            ("ROUGEL_F1", &a.rouge_l_f1_aligned),
            ("Emb_P", &a.emb_precision),
            ("Emb_R", &a.emb_recall),
            ("Emb_F1", &a.emb_f1),
            ("Title_CV", &a.title_cv),
        ];
        for (name, agg) in rows {
            let _ = writeln!(
                out,
                "{name:<10} {:>16}  (missing {})",
                fmt_cell(agg),
                agg.missing
            );
        }
        out
    }
}
