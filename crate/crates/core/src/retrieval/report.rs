use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::analyzer::Analyzer;
use super::bm25::{build_index, Bm25Params, IndexSize, IndexVariant};
use super::metrics::{ndcg, recall_at, reciprocal_rank, Judgments, Query};
use super::RetrievalError;
use crate::corpus::Episode;

pub const METRICS: [&str; 5] = ["ndcg", "r@30", "r@50", "r@100", "rr"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetrievalOptions {
    pub params: Bm25Params,
    pub analyzer: Analyzer,
    /// Ranking depth used for every metric.
    pub depth: usize,
    pub alpha: f64,
}

impl Default for RetrievalOptions {
    fn default() -> Self {
        Self {
            params: Bm25Params::default(),
            analyzer: Analyzer::default(),
            depth: 1000,
            alpha: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryMetrics {
    pub ndcg: f64,
    #[serde(rename = "r@30")]
    pub r30: f64,
    #[serde(rename = "r@50")]
    pub r50: f64,
    #[serde(rename = "r@100")]
    pub r100: f64,
    pub rr: f64,
}

impl QueryMetrics {
    pub fn get(&self, metric: &str) -> Option<f64> {
        Some(match metric {
            "ndcg" => self.ndcg,
            "r@30" => self.r30,
            "r@50" => self.r50,
            "r@100" => self.r100,
            "rr" => self.rr,
            _ => return None,
        })
    }

    fn compute(ranking: &[String], grades: &BTreeMap<String, u32>) -> Option<Self> {
        Some(Self {
            ndcg: ndcg(ranking, grades, None)?,
            r30: recall_at(ranking, grades, 30)?,
            r50: recall_at(ranking, grades, 50)?,
            r100: recall_at(ranking, grades, 100)?,
            rr: reciprocal_rank(ranking, grades)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantResult {
    pub variant: IndexVariant,
    pub mean: QueryMetrics,
    pub index_size: IndexSize,
    /// Keyed by query id; only scorable queries appear.
    pub per_query: BTreeMap<String, QueryMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedTest {
    pub a: IndexVariant,
    pub b: IndexVariant,
    pub metric: String,
    pub mean_diff: f64,
    pub t: Option<f64>,
    pub p_value: Option<f64>,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalReport {
    pub options: RetrievalOptions,
    pub queries: usize,
    /// Queries without any judged relevant episode.
    pub unscorable_queries: Vec<String>,
    pub variants: Vec<VariantResult>,
    pub significance: Vec<PairedTest>,
}

/// Two-sided paired t-test on `a - b`. Returns `(t, p)`; `None` below two
/// pairs. Zero variance gives `p = 1` for a zero mean difference, else 0.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Option<(f64, f64)> {
    let n = a.len().min(b.len());
    if n < 2 {
        return None;
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return Some(if mean == 0.0 {
            (0.0, 1.0)
        } else {
            (mean.signum() * f64::INFINITY, 0.0)
        });
    }
    let t = mean / (var / n as f64).sqrt();
    let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).ok()?;
    Some((t, 2.0 * (1.0 - dist.cdf(t.abs()))))
}

fn mean_metrics(rows: &BTreeMap<String, QueryMetrics>) -> QueryMetrics {
    let n = rows.len().max(1) as f64;
    let avg = |f: fn(&QueryMetrics) -> f64| rows.values().map(f).sum::<f64>() / n;
    QueryMetrics {
        ndcg: avg(|m| m.ndcg),
        r30: avg(|m| m.r30),
        r50: avg(|m| m.r50),
        r100: avg(|m| m.r100),
        rr: avg(|m| m.rr),
    }
}

pub fn run_retrieval_eval(
    corpus: &[Episode],
    queries: &[Query],
    judgments: &Judgments,
    variants: &[IndexVariant],
    options: &RetrievalOptions,
) -> Result<RetrievalReport, RetrievalError> {
    let empty = BTreeMap::new();
    let unscorable_queries: Vec<String> = queries
        .iter()
        .filter(|q| {
            judgments
                .for_query(&q.id)
                .unwrap_or(&empty)
                .values()
                .all(|&g| g == 0)
        })
        .map(|q| q.id.clone())
        .collect();

    let mut results = Vec::with_capacity(variants.len());
    for &variant in variants {
        let index = build_index(corpus, variant, options.params, options.analyzer)?;
        let mut per_query = BTreeMap::new();
        for q in queries {
            let grades = judgments.for_query(&q.id).unwrap_or(&empty);
            let ranking: Vec<String> = index
                .search(&q.text, options.depth)
                .into_iter()
                .map(|(id, _)| id)
                .collect();
            if let Some(m) = QueryMetrics::compute(&ranking, grades) {
                per_query.insert(q.id.clone(), m);
            }
        }
        results.push(VariantResult {
            variant,
            mean: mean_metrics(&per_query),
            index_size: index.size(),
            per_query,
        });
    }

    let mut significance = Vec::new();
    for (i, a) in results.iter().enumerate() {
        for b in &results[i + 1..] {
            for metric in METRICS {
                let xa: Vec<f64> = a.per_query.values().filter_map(|m| m.get(metric)).collect();
                let xb: Vec<f64> = b.per_query.values().filter_map(|m| m.get(metric)).collect();
                let test = paired_t_test(&xa, &xb);
                let mean_diff = if xa.is_empty() {
                    0.0
                } else {
                    xa.iter().zip(&xb).map(|(x, y)| x - y).sum::<f64>() / xa.len() as f64
                };
                significance.push(PairedTest {
                    a: a.variant,
                    b: b.variant,
                    metric: metric.to_string(),
                    mean_diff,
                    t: test.map(|(t, _)| t),
                    p_value: test.map(|(_, p)| p),
                    significant: test.is_some_and(|(_, p)| p < options.alpha),
                });
            }
        }
    }

    Ok(RetrievalReport {
        options: options.clone(),
        queries: queries.len(),
        unscorable_queries,
        variants: results,
        significance,
    })
}

impl RetrievalReport {
    pub fn variant(&self, v: IndexVariant) -> Option<&VariantResult> {
        self.variants.iter().find(|r| r.variant == v)
    }

    pub fn render_table(&self) -> String {
        let mut out = format!(
            "{:<11} {:>6} {:>6} {:>6} {:>6} {:>6} {:>10}\n",
            "Setting", "nDCG", "R@30", "R@50", "R@100", "RR", "postings"
        );
        for r in &self.variants {
            let m = &r.mean;
            out.push_str(&format!(
                "{:<11} {:>6.3} {:>6.3} {:>6.3} {:>6.3} {:>6.3} {:>10}\n",
                r.variant.name(),
                m.ndcg,
                m.r30,
                m.r50,
                m.r100,
                m.rr,
                r.index_size.postings
            ));
        }
        out
    }
}
