//! Title-level metrics: chapter alignment, ROUGE, embedding similarity and
//! title-length consistency.

use std::collections::HashMap;

use crate::chunking::count_words;
use crate::corpus::ChapterSet;
use crate::text::lower_tokens;

use super::embed::{EmbedError, Embedder};

/// Title pairs `(reference title, predicted title)` from both alignment
/// directions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matches {
    /// One pair per predicted chapter.
    pub pred_matches: Vec<(String, String)>,
    /// One pair per reference chapter.
    pub ref_matches: Vec<(String, String)>,
}

impl Matches {
    /// Multiset union of both directions.
    pub fn all_matches(&self) -> impl Iterator<Item = &(String, String)> {
        self.pred_matches.iter().chain(&self.ref_matches)
    }
}

fn overlap(a: (usize, usize), b: (usize, usize)) -> usize {
    a.1.min(b.1).saturating_sub(a.0.max(b.0))
}

/// Index of the segment in `others` with the largest sentence overlap;
/// ties go to the earlier segment.
fn best_overlap(seg: (usize, usize), others: &[(usize, usize)]) -> usize {
    let mut best = 0;
    let mut best_overlap = 0;
    for (j, &o) in others.iter().enumerate() {
        let ov = overlap(seg, o);
        if ov > best_overlap {
            best = j;
            best_overlap = ov;
        }
    }
    best
}

/// Asymmetric alignment: each chapter of one set is paired with the chapter
/// of the other set it overlaps most, independently in both directions.
pub fn align_chapters(
    reference: &ChapterSet,
    prediction: &ChapterSet,
    n_sentences: usize,
) -> Matches {
    if reference.is_empty() || prediction.is_empty() {
        return Matches::default();
    }
    let ref_segs = reference.segments(n_sentences);
    let pred_segs = prediction.segments(n_sentences);
    let refs = reference.chapters();
    let preds = prediction.chapters();
    let pred_matches = pred_segs
        .iter()
        .zip(preds)
        .map(|(&seg, p)| {
            (
                refs[best_overlap(seg, &ref_segs)].title.clone(),
                p.title.clone(),
            )
        })
        .collect();
    let ref_matches = ref_segs
        .iter()
        .zip(refs)
        .map(|(&seg, r)| {
            (
                r.title.clone(),
                preds[best_overlap(seg, &pred_segs)].title.clone(),
            )
        })
        .collect();
    Matches {
        pred_matches,
        ref_matches,
    }
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

fn f1(overlap: usize, len_ref: usize, len_pred: usize) -> f64 {
    if overlap == 0 || len_ref == 0 || len_pred == 0 {
        return 0.0;
    }
    let p = overlap as f64 / len_pred as f64;
    let r = overlap as f64 / len_ref as f64;
    2.0 * p * r / (p + r)
}

/// LCS-based F1 over lowercased whitespace tokens of `reference` and
/// `candidate`.
pub fn rouge_l_f1(reference: &str, candidate: &str) -> f64 {
    let r = lower_tokens(reference);
    let c = lower_tokens(candidate);
    f1(lcs_len(&r, &c), r.len(), c.len())
}

fn token_counts(tokens: Vec<String>) -> HashMap<String, usize> {
    let mut m = HashMap::new();
    for t in tokens {
        *m.entry(t).or_insert(0) += 1;
    }
    m
}

/// Clipped unigram-overlap F1 over lowercased whitespace tokens.
pub fn rouge1_f1(reference: &str, candidate: &str) -> f64 {
    let r = lower_tokens(reference);
    let c = lower_tokens(candidate);
    let (lr, lc) = (r.len(), c.len());
    let rc = token_counts(r);
    let overlap: usize = token_counts(c)
        .iter()
        .map(|(t, n)| (*n).min(rc.get(t).copied().unwrap_or(0)))
        .sum();
    f1(overlap, lr, lc)
}

/// Mean ROUGE-L F1 over the union of both match directions, `None` when
/// there are no pairs.
pub fn aligned_rouge_l(
    reference: &ChapterSet,
    prediction: &ChapterSet,
    n_sentences: usize,
) -> Option<f64> {
    let m = align_chapters(reference, prediction, n_sentences);
    let scores: Vec<f64> = m.all_matches().map(|(r, p)| rouge_l_f1(r, p)).collect();
    (!scores.is_empty()).then(|| scores.iter().sum::<f64>() / scores.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingScores {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

/// Mean clamped cosine over predicted-side pairs (precision) and
/// reference-side pairs (recall); F1 is their geometric mean.
pub fn embedding_prf<E: Embedder + ?Sized>(
    reference: &ChapterSet,
    prediction: &ChapterSet,
    embedder: &E,
    n_sentences: usize,
) -> Result<EmbeddingScores, EmbedError> {
    let m = align_chapters(reference, prediction, n_sentences);
    let mean_cos = |pairs: &[(String, String)]| -> Result<Option<f64>, EmbedError> {
        if pairs.is_empty() {
            return Ok(None);
        }
        let mut total = 0.0;
        for (r, p) in pairs {
            total += embedder.similarity(r, p)?.clamp(0.0, 1.0);
        }
        Ok(Some(total / pairs.len() as f64))
    };
    let precision = mean_cos(&m.pred_matches)?;
    let recall = mean_cos(&m.ref_matches)?;
    Ok(EmbeddingScores {
        precision,
        recall,
        f1: precision.zip(recall).map(|(p, r)| geometric_f1(p, r)),
    })
}

pub fn geometric_f1(precision: f64, recall: f64) -> f64 {
    (precision * recall).sqrt()
}

/// Population std of title word counts over their mean. `None` for an
/// empty set.
pub fn title_length_cv(chapters: &ChapterSet) -> Option<f64> {
    let lengths: Vec<f64> = chapters.titles().map(|t| count_words(t) as f64).collect();
    let ms = crate::stats::MeanStd::of(&lengths)?;
    Some(if ms.mean > 0.0 { ms.std / ms.mean } else { 0.0 })
}

/// Mean of the per-episode coefficients; episodes without chapters are
/// skipped.
pub fn corpus_cv<'a>(sets: impl IntoIterator<Item = &'a ChapterSet>) -> Option<f64> {
    let values: Vec<f64> = sets.into_iter().filter_map(title_length_cv).collect();
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Chapter;
    use crate::eval::embed::HashedBowEmbedder;

    fn set(entries: &[(usize, &str)]) -> ChapterSet {
        ChapterSet::new(entries.iter().map(|(i, t)| Chapter::new(*i, *t)).collect()).unwrap()
    }

    fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
        v.iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    #[test]
    fn identity_alignment() {
        let cs = set(&[(0, "a"), (10, "b"), (20, "c")]);
        let m = align_chapters(&cs, &cs, 30);
        let id = pairs(&[("a", "a"), ("b", "b"), ("c", "c")]);
        assert_eq!(m.pred_matches, id);
        assert_eq!(m.ref_matches, id);
    }

    #[test]
    fn shifted_two_by_two() {
        let r = set(&[(0, "r1"), (50, "r2")]);
        let p = set(&[(0, "p1"), (60, "p2")]);
        let m = align_chapters(&r, &p, 100);
        // p1 [0,60) overlaps r1 by 50 and r2 by 10; p2 [60,100) overlaps r2 by 40
        assert_eq!(m.pred_matches, pairs(&[("r1", "p1"), ("r2", "p2")]));
        // r1 [0,50) -> p1 (50); r2 [50,100) overlaps p1 by 10 and p2 by 40
        assert_eq!(m.ref_matches, pairs(&[("r1", "p1"), ("r2", "p2")]));
    }

    #[test]
    fn single_prediction_against_three() {
        let r = set(&[(0, "a"), (30, "b"), (60, "c")]);
        let p = set(&[(0, "all")]);
        let m = align_chapters(&r, &p, 90);
        // all reference segments have 30 sentences: tie -> earliest
        assert_eq!(m.pred_matches, pairs(&[("a", "all")]));
        assert_eq!(
            m.ref_matches,
            pairs(&[("a", "all"), ("b", "all"), ("c", "all")])
        );
        assert_eq!(m.all_matches().count(), 4);
    }

    #[test]
    fn empty_side_has_no_pairs() {
        let r = set(&[(0, "a")]);
        let m = align_chapters(&r, &ChapterSet::empty(), 5);
        assert_eq!(m, Matches::default());
        assert_eq!(aligned_rouge_l(&r, &ChapterSet::empty(), 5), None);
        let e = embedding_prf(&r, &ChapterSet::empty(), &HashedBowEmbedder::default(), 5).unwrap();
        assert_eq!((e.precision, e.recall, e.f1), (None, None, None));
    }

    #[test]
    fn rouge_l_cases() {
        assert_eq!(rouge_l_f1("intro", "intro"), 1.0);
        assert_eq!(rouge_l_f1("alpha beta", "gamma delta"), 0.0);
        assert!((rouge_l_f1("planet of lana reviews", "lana review") - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(rouge_l_f1("", "x"), 0.0);
        assert_eq!(rouge_l_f1("Intro", "intro"), 1.0);
    }

    #[test]
    fn rouge1_cases() {
        assert_eq!(rouge1_f1("a b c", "a b c"), 1.0);
        assert_eq!(rouge1_f1("a b", "c d"), 0.0);
        assert!((rouge1_f1("a b c", "a c d") - 2.0 / 3.0).abs() < 1e-12);
        // clipping: the candidate's second "a" does not match again
        assert!((rouge1_f1("a b", "a a") - 0.5).abs() < 1e-12);
    }

    #[test]
    fn aligned_rouge_two_by_two() {
        let r = set(&[(0, "red fox"), (50, "blue whale")]);
        let p = set(&[(0, "red fox"), (60, "whale song")]);
        // pairs: (red fox, red fox) x2 -> 1.0; (blue whale, whale song) x2:
        // LCS 1, P = R = 1/2 -> 0.5
        let v = aligned_rouge_l(&r, &p, 100).unwrap();
        assert!((v - 0.75).abs() < 1e-12);
        assert_eq!(aligned_rouge_l(&r, &r, 100), Some(1.0));
        let disjoint = set(&[(0, "x y"), (50, "z")]);
        assert_eq!(aligned_rouge_l(&r, &disjoint, 100), Some(0.0));
    }

    #[test]
    fn embedding_identity_is_one() {
        let cs = set(&[
            (0, "Getting started"),
            (9, "Peter's training plan"),
            (20, "?!"),
        ]);
        let e = embedding_prf(&cs, &cs, &HashedBowEmbedder::default(), 30).unwrap();
        assert_eq!(e.precision, Some(1.0));
        assert_eq!(e.recall, Some(1.0));
        assert_eq!(e.f1, Some(1.0));
    }

    #[test]
    fn orthogonal_titles_score_zero() {
        let e = HashedBowEmbedder::default();
        assert_eq!(e.similarity("marathon", "espresso").unwrap(), 0.0);
        let r = set(&[(0, "marathon")]);
        let p = set(&[(0, "espresso")]);
        let s = embedding_prf(&r, &p, &e, 10).unwrap();
        assert_eq!(
            (s.precision, s.recall, s.f1),
            (Some(0.0), Some(0.0), Some(0.0))
        );
    }

    #[test]
    fn geometric_mean_by_hand() {
        assert!((geometric_f1(0.64, 0.25) - 0.40).abs() < 1e-12);
    }

    #[test]
    fn cv_cases() {
        assert_eq!(
            title_length_cv(&set(&[(0, "a b c d"), (5, "e f g h")])),
            Some(0.0)
        );
        assert_eq!(
            title_length_cv(&set(&[(0, "a b"), (5, "a b c d e f")])),
            Some(0.5)
        );
        assert_eq!(title_length_cv(&set(&[(0, "only one")])), Some(0.0));
        assert_eq!(title_length_cv(&ChapterSet::empty()), None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        /// Exponential LCS by subsequence enumeration over the shorter side.
        fn lcs_oracle(a: &[String], b: &[String]) -> usize {
            let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
            let is_subseq = |sub: &[&String]| {
                let mut it = long.iter();
                sub.iter().all(|x| it.any(|y| y == *x))
            };
            (0u32..1 << short.len())
                .filter_map(|mask| {
                    let sub: Vec<&String> = (0..short.len())
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| &short[i])
                        .collect();
                    is_subseq(&sub).then_some(sub.len())
                })
                .max()
                .unwrap_or(0)
        }

        fn words() -> impl Strategy<Value = Vec<String>> {
            proptest::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "A"]), 0..8)
                .prop_map(|v| v.into_iter().map(String::from).collect())
        }

        fn chapters(n: usize) -> impl Strategy<Value = ChapterSet> {
            proptest::collection::btree_set(1..n, 0..6).prop_map(|starts| {
                let mut v = vec![Chapter::new(0, "t0")];
                v.extend(
                    starts
                        .into_iter()
                        .enumerate()
                        .map(|(i, s)| Chapter::new(s, format!("t{} x", i + 1))),
                );
                ChapterSet::new(v).unwrap()
            })
        }

        proptest! {
            #[test]
            fn rouge_l_matches_oracle(a in words(), b in words()) {
                let (ja, jb) = (a.join(" "), b.join(" "));
                let la: Vec<String> = a.iter().map(|t| t.to_lowercase()).collect();
                let lb: Vec<String> = b.iter().map(|t| t.to_lowercase()).collect();
                let lcs = lcs_oracle(&la, &lb);
                let expected = if lcs == 0 { 0.0 } else {
                    let (p, r) = (lcs as f64 / lb.len() as f64, lcs as f64 / la.len() as f64);
                    2.0 * p * r / (p + r)
                };
                let got = rouge_l_f1(&ja, &jb);
                prop_assert!((got - expected).abs() < 1e-12);
                prop_assert!((got - rouge_l_f1(&jb, &ja)).abs() < 1e-12);
                prop_assert_eq!(got == 1.0, !la.is_empty() && la == lb);
            }

            #[test]
            fn alignment_sizes(r in chapters(40), p in chapters(40)) {
                let m = align_chapters(&r, &p, 40);
                prop_assert_eq!(m.pred_matches.len(), p.len());
                prop_assert_eq!(m.ref_matches.len(), r.len());
            }

            #[test]
            fn geometric_f1_between(r in chapters(40), p in chapters(40)) {
                let s = embedding_prf(&r, &p, &HashedBowEmbedder::default(), 40).unwrap();
                let (pr, re, f) = (s.precision.unwrap(), s.recall.unwrap(), s.f1.unwrap());
                if pr > 0.0 && re > 0.0 {
                    prop_assert!(f <= pr.max(re) + 1e-12);
                    prop_assert!(f >= pr.min(re) - 1e-12);
                }
            }

            #[test]
            fn cv_scale_invariant(lengths in proptest::collection::vec(1usize..8, 1..8), c in 1usize..4) {
                let build = |mult: usize| {
                    ChapterSet::new(lengths.iter().enumerate().map(|(i, &l)| {
                        Chapter::new(i, vec!["w"; l * mult].join(" "))
                    }).collect()).unwrap()
                };
                let (a, b) = (title_length_cv(&build(1)).unwrap(), title_length_cv(&build(c)).unwrap());
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
