use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::analyzer::Analyzer;
use super::principal::{principal_extract, DEFAULT_WORD_CAP};
use super::RetrievalError;
use crate::corpus::Episode;

/// Which fields make up an episode's indexed document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IndexVariant {
    #[serde(rename = "DESC")]
    Desc,
    #[serde(rename = "DESC_PRINC")]
    DescPrinc,
    #[serde(rename = "DESC_CHAP")]
    DescChap,
    #[serde(rename = "DESC_TRANS")]
    DescTrans,
}

impl IndexVariant {
    pub const ALL: [IndexVariant; 4] =
        [Self::Desc, Self::DescPrinc, Self::DescChap, Self::DescTrans];

    pub fn name(self) -> &'static str {
        match self {
            Self::Desc => "DESC",
            Self::DescPrinc => "DESC_PRINC",
            Self::DescChap => "DESC_CHAP",
            Self::DescTrans => "DESC_TRANS",
        }
    }
}

impl fmt::Display for IndexVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IndexVariant {
    type Err = RetrievalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_uppercase().replace(['-', '+'], "_");
        Self::ALL
            .into_iter()
            .find(|v| v.name() == norm)
            .ok_or_else(|| RetrievalError::Config(format!("unknown index variant {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 0.9, b: 0.4 }
    }
}

impl Bm25Params {
    pub fn validate(&self) -> Result<(), RetrievalError> {
        if !(self.k1.is_finite() && self.k1 >= 0.0) {
            return Err(RetrievalError::Config(format!(
                "k1 must be >= 0, got {}",
                self.k1
            )));
        }
        if !(0.0..=1.0).contains(&self.b) {
            return Err(RetrievalError::Config(format!(
                "b must lie in [0, 1], got {}",
                self.b
            )));
        }
        Ok(())
    }
}

/// `ln(1 + (N - df + 0.5) / (df + 0.5))`
pub fn idf(n_docs: usize, df: usize) -> f64 {
    (1.0 + (n_docs as f64 - df as f64 + 0.5) / (df as f64 + 0.5)).ln()
}

/// Text of one episode's document under `variant`.
pub fn document_text(episode: &Episode, variant: IndexVariant) -> Result<String, RetrievalError> {
    let mut parts = vec![episode.metadata.description.clone()];
    match variant {
        IndexVariant::Desc => {}
        IndexVariant::DescPrinc => {
            parts.push(principal_extract(&episode.transcript, DEFAULT_WORD_CAP));
        }
        IndexVariant::DescChap => {
            let chapters = episode.reference_chapters.as_ref().ok_or_else(|| {
                RetrievalError::MissingField {
                    episode_id: episode.id().to_string(),
                    variant,
                    field: "chapters",
                }
            })?;
            parts.push(chapters.titles().collect::<Vec<_>>().join(" "));
        }
        IndexVariant::DescTrans => parts.push(episode.transcript.full_text()),
    }
    Ok(parts.join(" "))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSize {
    /// Number of (term, document) pairs.
    pub postings: usize,
    pub terms: usize,
    /// Estimated inverted-index footprint: term bytes plus 8 bytes per
    /// posting (doc id and tf as u32) plus 4 bytes per document length.
    pub bytes: usize,
}

/// Inverted BM25 index. Read-only after construction.
#[derive(Debug, Clone)]
pub struct Index {
    variant: IndexVariant,
    params: Bm25Params,
    analyzer: Analyzer,
    doc_ids: Vec<String>,
    doc_lens: Vec<u32>,
    avg_len: f64,
    /// term -> (doc, tf), doc ascending
    postings: HashMap<String, Vec<(u32, u32)>>,
}

pub fn build_index(
    episodes: &[Episode],
    variant: IndexVariant,
    params: Bm25Params,
    analyzer: Analyzer,
) -> Result<Index, RetrievalError> {
    params.validate()?;
    let mut doc_ids = Vec::with_capacity(episodes.len());
    let mut doc_lens = Vec::with_capacity(episodes.len());
    let mut postings: HashMap<String, Vec<(u32, u32)>> = HashMap::new();
    for (doc, ep) in episodes.iter().enumerate() {
        let tokens = analyzer.tokens(&document_text(ep, variant)?);
        doc_lens.push(tokens.len() as u32);
        doc_ids.push(ep.id().to_string());
        let mut tf: HashMap<String, u32> = HashMap::new();
        for t in tokens {
            *tf.entry(t).or_insert(0) += 1;
        }
        for (term, count) in tf {
            postings.entry(term).or_default().push((doc as u32, count));
        }
    }
    let total: u64 = doc_lens.iter().map(|&l| u64::from(l)).sum();
    let avg_len = if doc_lens.is_empty() {
        0.0
    } else {
        total as f64 / doc_lens.len() as f64
    };
    Ok(Index {
        variant,
        params,
        analyzer,
        doc_ids,
        doc_lens,
        avg_len,
        postings,
    })
}

impl Index {
    pub fn variant(&self) -> IndexVariant {
        self.variant
    }

    pub fn n_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn avg_len(&self) -> f64 {
        self.avg_len
    }

    pub fn doc_len(&self, episode_id: &str) -> Option<usize> {
        let i = self.doc_ids.iter().position(|d| d == episode_id)?;
        Some(self.doc_lens[i] as usize)
    }

    pub fn df(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, Vec::len)
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    pub fn size(&self) -> IndexSize {
        let postings = self.postings.values().map(Vec::len).sum();
        let term_bytes: usize = self.postings.keys().map(String::len).sum();
        IndexSize {
            postings,
            terms: self.postings.len(),
            bytes: term_bytes + 8 * postings + 4 * self.doc_lens.len(),
        }
    }

    /// Okapi BM25 over the distinct query terms. Documents matching no term
    /// are not returned; ties order by episode id.
    pub fn search(&self, query: &str, top_k: usize) -> Vec<(String, f64)> {
        let mut terms = self.analyzer.tokens(query);
        let mut seen = std::collections::HashSet::new();
        terms.retain(|t| seen.insert(t.clone()));
        let Bm25Params { k1, b } = self.params;
        let n = self.n_docs();
        let mut scores = vec![0.0f64; n];
        let mut hit = vec![false; n];
        for term in &terms {
            let Some(list) = self.postings.get(term) else {
                continue;
            };
            let w = idf(n, list.len());
            for &(doc, tf) in list {
                let d = doc as usize;
                let tf = f64::from(tf);
                let norm = if self.avg_len > 0.0 {
                    1.0 - b + b * f64::from(self.doc_lens[d]) / self.avg_len
                } else {
                    1.0
                };
                scores[d] += w * tf * (k1 + 1.0) / (tf + k1 * norm);
                hit[d] = true;
            }
        }
        let mut ranked: Vec<(String, f64)> = (0..n)
            .filter(|&d| hit[d])
            .map(|d| (self.doc_ids[d].clone(), scores[d]))
            .collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(top_k);
        ranked
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Chapter, ChapterSet, EpisodeMetadata, Sentence, Transcript};
    use proptest::prelude::*;

    fn episode(id: &str, desc: &str, titles: &[&str], transcript: &str) -> Episode {
        let sentences = (0..titles.len().max(1))
            .map(|_| Sentence::plain(transcript).unwrap())
            .collect();
        let chapters = (!titles.is_empty()).then(|| {
            ChapterSet::new(
                titles
                    .iter()
                    .enumerate()
                    .map(|(i, t)| Chapter::new(i, *t))
                    .collect(),
            )
            .unwrap()
        });
        Episode::new(
            EpisodeMetadata {
                episode_id: id.into(),
                show_id: None,
                title: String::new(),
                description: desc.into(),
            },
            Transcript::new(sentences).unwrap(),
            chapters,
        )
        .unwrap()
    }

    /// Naive scan: recount tf, df and lengths from raw documents per query.
    fn brute_force(docs: &[Vec<String>], query: &[String], k1: f64, b: f64) -> Vec<f64> {
        let n = docs.len();
        let avg = docs.iter().map(Vec::len).sum::<usize>() as f64 / n as f64;
        let mut q = query.to_vec();
        q.sort();
        q.dedup();
        docs.iter()
            .map(|d| {
                q.iter()
                    .map(|t| {
                        let tf = d.iter().filter(|x| *x == t).count() as f64;
                        if tf == 0.0 {
                            return 0.0;
                        }
                        let df = docs.iter().filter(|x| x.contains(t)).count() as f64;
                        let idf = (1.0 + (n as f64 - df + 0.5) / (df + 0.5)).ln();
                        idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * d.len() as f64 / avg))
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn desc_vocabulary() {
        let idx = build_index(
            &[episode("e", "a b", &[], "x")],
            IndexVariant::Desc,
            Bm25Params::default(),
            Analyzer::default(),
        )
        .unwrap();
        let mut vocab: Vec<&str> = idx.vocabulary().collect();
        vocab.sort();
        assert_eq!(vocab, vec!["a", "b"]);
        assert_eq!(idx.doc_len("e"), Some(2));
    }

    #[test]
    fn single_doc_hand_formula() {
        let idx = build_index(
            &[episode("e", "a a b", &[], "x")],
            IndexVariant::Desc,
            Bm25Params::default(),
            Analyzer::default(),
        )
        .unwrap();
        let hits = idx.search("a", 10);
        // N=1, df=1: idf = ln(1 + 0.5/1.5); len = avg, so norm = 1
        let expected = (1.0f64 + 0.5 / 1.5).ln() * 2.0 * 1.9 / (2.0 + 0.9);
        assert_eq!(hits.len(), 1);
        assert!((hits[0].1 - expected).abs() < 1e-9);
    }

    #[test]
    fn absent_terms_contribute_nothing() {
        let idx = build_index(
            &[episode("e", "a b", &[], "x")],
            IndexVariant::Desc,
            Bm25Params::default(),
            Analyzer::default(),
        )
        .unwrap();
        assert!(idx.search("zzz", 10).is_empty());
        assert!(idx.search("", 10).is_empty());
        assert!(idx.search("?!", 10).is_empty());
        assert_eq!(idx.search("a zzz", 10), idx.search("a", 10));
    }

    #[test]
    fn duplication_saturates() {
        let docs = [episode("a", "x y", &[], "_"), episode("b", "y z", &[], "_")];
        let doubled = [
            episode("a", "x y x y", &[], "_"),
            episode("b", "y z y z", &[], "_"),
        ];
        let p = Bm25Params::default();
        let s1 = build_index(&docs, IndexVariant::Desc, p, Analyzer::default())
            .unwrap()
            .search("x", 1)[0]
            .1;
        let s2 = build_index(&doubled, IndexVariant::Desc, p, Analyzer::default())
            .unwrap()
            .search("x", 1)[0]
            .1;
        assert!(s2 > s1);
        assert!(s2 < 2.0 * s1);
    }

    #[test]
    fn chapter_titles_expand_retrievability() {
        let eps = [
            episode("a", "weekly show", &["volcano hiking"], "_"),
            episode("b", "weekly show", &["bread baking"], "_"),
        ];
        let p = Bm25Params::default();
        let desc = build_index(&eps, IndexVariant::Desc, p, Analyzer::default()).unwrap();
        let chap = build_index(&eps, IndexVariant::DescChap, p, Analyzer::default()).unwrap();
        assert!(desc.search("volcano", 10).is_empty());
        let hits = chap.search("volcano", 10);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].0, "a");
    }

    #[test]
    fn missing_chapters_named_in_error() {
        let err = build_index(
            &[episode("nochap", "d", &[], "_")],
            IndexVariant::DescChap,
            Bm25Params::default(),
            Analyzer::default(),
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("nochap") && msg.contains("DESC_CHAP"), "{msg}");
    }

    #[test]
    fn ties_break_by_id() {
        let eps = [
            episode("b", "same", &[], "_"),
            episode("a", "same", &[], "_"),
        ];
        let idx = build_index(
            &eps,
            IndexVariant::Desc,
            Bm25Params::default(),
            Analyzer::default(),
        )
        .unwrap();
        let ids: Vec<String> = idx.search("same", 10).into_iter().map(|h| h.0).collect();
        assert_eq!(ids, vec!["a", "b"]);
    }

    #[test]
    fn variant_names_round_trip() {
        for v in IndexVariant::ALL {
            assert_eq!(v.name().parse::<IndexVariant>().unwrap(), v);
        }
        assert_eq!(
            "desc+chap".parse::<IndexVariant>().unwrap(),
            IndexVariant::DescChap
        );
        assert!("bogus".parse::<IndexVariant>().is_err());
        assert!(Bm25Params { k1: -1.0, b: 0.4 }.validate().is_err());
        assert!(Bm25Params { k1: 1.0, b: 1.5 }.validate().is_err());
    }

    fn corpus() -> impl Strategy<Value = Vec<Vec<String>>> {
        let word = prop::sample::select(vec!["a", "b", "c", "d", "e", "f", "g"]);
        proptest::collection::vec(
            proptest::collection::vec(word.prop_map(String::from), 1..12),
            1..50,
        )
    }

    proptest! {
        #[test]
        fn matches_naive_scan(
            docs in corpus(),
            query in proptest::collection::vec(prop::sample::select(vec!["a", "c", "g", "z"]).prop_map(String::from), 1..4),
            k1 in 0.0f64..3.0,
            b in 0.0f64..=1.0,
        ) {
            let eps: Vec<Episode> = docs
                .iter()
                .enumerate()
                .map(|(i, d)| episode(&format!("d{i:02}"), &d.join(" "), &[], "_"))
                .collect();
            let params = Bm25Params { k1, b };
            let idx = build_index(&eps, IndexVariant::Desc, params, Analyzer::default()).unwrap();
            let expected = brute_force(&docs, &query, k1, b);
            let got: HashMap<String, f64> = idx.search(&query.join(" "), usize::MAX).into_iter().collect();
            for (i, e) in expected.iter().enumerate() {
                let id = format!("d{i:02}");
                let g = got.get(&id).copied().unwrap_or(0.0);
                prop_assert!((g - e).abs() < 1e-9, "{id}: {g} vs {e}");
            }
        }

        #[test]
        fn adding_a_document_keeps_term_frequencies(docs in corpus(), extra in corpus()) {
            let eps: Vec<Episode> = docs.iter().enumerate()
                .map(|(i, d)| episode(&format!("d{i}"), &d.join(" "), &[], "_")).collect();
            let mut more = eps.clone();
            more.push(episode("extra", &extra[0].join(" "), &[], "_"));
            let a = build_index(&eps, IndexVariant::Desc, Bm25Params::default(), Analyzer::default()).unwrap();
            let b = build_index(&more, IndexVariant::Desc, Bm25Params::default(), Analyzer::default()).unwrap();
            for (term, list) in &a.postings {
                let lb: Vec<_> = b.postings[term].iter().filter(|(d, _)| (*d as usize) < eps.len()).copied().collect();
                prop_assert_eq!(list, &lb);
                let df = b.df(term);
                prop_assert!(df == list.len() || df == list.len() + 1);
            }
        }
    }
}
