//! Intrinsic evaluation of predicted chapters against references.

pub mod embed;
mod report;
mod segmentation;
mod titles;

pub use embed::{
    cosine, EmbedError, Embedder, HashedBowEmbedder, HttpEmbedder, HttpEmbedderConfig,
};
pub use report::{evaluate_corpus, Aggregate, EpisodeEval, EvalReport, EvalSummary};
pub use segmentation::{estimate_k, window_diff, BoundarySeq};
pub use titles::{
    align_chapters, aligned_rouge_l, corpus_cv, embedding_prf, geometric_f1, rouge1_f1, rouge_l_f1,
    title_length_cv, EmbeddingScores, Matches,
};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("{0}")]
    Invalid(String),
    #[error("corpus has no reference segments")]
    EmptyCorpus,
    #[error("episode {0} has no reference chapters")]
    MissingReference(String),
    #[error("predictions and references share no episode ids")]
    EmptyIntersection,
    #[error(transparent)]
    Embed(#[from] EmbedError),
}
