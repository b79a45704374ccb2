use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::RetrievalError;

/// Graded relevance per query and episode; absent pairs have grade 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgments(pub BTreeMap<String, BTreeMap<String, u32>>);

impl Judgments {
    pub fn for_query(&self, query_id: &str) -> Option<&BTreeMap<String, u32>> {
        self.0.get(query_id)
    }

    pub fn insert(&mut self, query_id: &str, episode_id: &str, grade: u32) {
        self.0
            .entry(query_id.to_string())
            .or_default()
            .insert(episode_id.to_string(), grade);
    }
}

/// TREC qrels: `query_id iteration episode_id grade`, whitespace separated.
pub fn parse_qrels(text: &str) -> Result<Judgments, RetrievalError> {
    let mut j = Judgments::default();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [query, _, episode, grade] = fields[..] else {
            return Err(RetrievalError::Parse {
                line: i + 1,
                message: format!("expected 4 fields, found {}", fields.len()),
            });
        };
        // negative grades (some collections use -1 for "unjudgeable") are 0
        let grade: i64 = grade.parse().map_err(|_| RetrievalError::Parse {
            line: i + 1,
            message: format!("grade {grade:?} is not an integer"),
        })?;
        j.insert(query, episode, grade.max(0) as u32);
    }
    Ok(j)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub id: String,
    pub text: String,
}

/// `query_id<TAB>query_text` per line.
pub fn parse_queries(text: &str) -> Result<Vec<Query>, RetrievalError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, q) = line.split_once('\t').ok_or_else(|| RetrievalError::Parse {
            line: i + 1,
            message: "expected query_id<TAB>query_text".into(),
        })?;
        out.push(Query {
            id: id.trim().to_string(),
            text: q.trim().to_string(),
        });
    }
    Ok(out)
}

fn grade(grades: &BTreeMap<String, u32>, id: &str) -> u32 {
    grades.get(id).copied().unwrap_or(0)
}

fn relevant_count(grades: &BTreeMap<String, u32>) -> usize {
    grades.values().filter(|&&g| g > 0).count()
}

fn gain(grade: u32) -> f64 {
    2f64.powi(grade as i32) - 1.0
}

fn discount(rank: usize) -> f64 {
    ((rank + 1) as f64).log2()
}

/// DCG with gain `2^rel - 1` and discount `log2(rank + 1)` over the first
/// `cutoff` results, normalized by the ideal DCG of every judged relevant
/// document (the ideal is never truncated). `None` when nothing is relevant.
pub fn ndcg(
    ranking: &[String],
    grades: &BTreeMap<String, u32>,
    cutoff: Option<usize>,
) -> Option<f64> {
    let mut ideal: Vec<u32> = grades.values().copied().filter(|&g| g > 0).collect();
    if ideal.is_empty() {
        return None;
    }
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg: f64 = ideal
        .iter()
        .enumerate()
        .map(|(i, &g)| gain(g) / discount(i + 1))
        .sum();
    let depth = cutoff.unwrap_or(ranking.len()).min(ranking.len());
    let dcg: f64 = ranking[..depth]
        .iter()
        .enumerate()
        .map(|(i, id)| gain(grade(grades, id)) / discount(i + 1))
        .sum();
    Some(dcg / idcg)
}

/// Judged-relevant documents in the top `n` over all judged relevant.
pub fn recall_at(ranking: &[String], grades: &BTreeMap<String, u32>, n: usize) -> Option<f64> {
    let total = relevant_count(grades);
    if total == 0 {
        return None;
    }
    let found = ranking
        .iter()
        .take(n)
        .filter(|id| grade(grades, id) > 0)
        .count();
    Some(found as f64 / total as f64)
}

pub fn reciprocal_rank(ranking: &[String], grades: &BTreeMap<String, u32>) -> Option<f64> {
    if relevant_count(grades) == 0 {
        return None;
    }
    Some(
        ranking
            .iter()
            .position(|id| grade(grades, id) > 0)
            .map_or(0.0, |p| 1.0 / (p + 1) as f64),
    )
}
