//! BM25 episode retrieval over description-expansion variants.

mod analyzer;
mod bm25;
mod metrics;
mod principal;
mod report;

pub use analyzer::Analyzer;
pub use bm25::{build_index, document_text, idf, Bm25Params, Index, IndexSize, IndexVariant};
pub use metrics::{ndcg, parse_qrels, parse_queries, recall_at, reciprocal_rank, Judgments, Query};
pub use principal::{principal_extract, principal_scores, DEFAULT_WORD_CAP};
pub use report::{
    paired_t_test, run_retrieval_eval, PairedTest, QueryMetrics, RetrievalOptions, RetrievalReport,
    VariantResult, METRICS,
};

#[derive(Debug, thiserror::Error)]
pub enum RetrievalError {
    #[error("{0}")]
    Config(String),
    #[error("episode {episode_id}: variant {variant} requires {field}")]
    MissingField {
        episode_id: String,
        variant: IndexVariant,
        field: &'static str,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
