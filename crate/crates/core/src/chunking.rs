//! Word counting and budgeted, non-overlapping transcript chunking.

use serde::{Deserialize, Serialize};

use crate::corpus::{Sentence, Transcript};

/// Number of maximal non-whitespace runs. Hyphens and apostrophes do not
/// split words.
pub fn count_words(text: &str) -> usize {
    text.split_whitespace().count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("context_words ({context_words}) must be smaller than total_words ({total_words})")]
pub struct BudgetError {
    pub total_words: usize,
    pub context_words: usize,
}

/// Word budget of one generator call: `total_words` split between the
/// transcript body and the prepended context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawBudget", into = "RawBudget")]
pub struct ChunkBudget {
    total_words: usize,
    context_words: usize,
}

#[derive(Serialize, Deserialize)]
struct RawBudget {
    total_words: usize,
    context_words: usize,
}

impl TryFrom<RawBudget> for ChunkBudget {
    type Error = BudgetError;
    fn try_from(raw: RawBudget) -> Result<Self, Self::Error> {
        Self::new(raw.total_words, raw.context_words)
    }
}

impl From<ChunkBudget> for RawBudget {
    fn from(b: ChunkBudget) -> Self {
        Self {
            total_words: b.total_words,
            context_words: b.context_words,
        }
    }
}

impl Default for ChunkBudget {
    fn default() -> Self {
        Self {
            total_words: 8000,
            context_words: 1000,
        }
    }
}

impl ChunkBudget {
    pub fn new(total_words: usize, context_words: usize) -> Result<Self, BudgetError> {
        if total_words == 0 || context_words >= total_words {
            return Err(BudgetError {
                total_words,
                context_words,
            });
        }
        Ok(Self {
            total_words,
            context_words,
        })
    }

    /// Whole budget for the body, no room for context.
    pub fn body_only(total_words: usize) -> Result<Self, BudgetError> {
        Self::new(total_words, 0)
    }

    pub fn total_words(&self) -> usize {
        self.total_words
    }

    pub fn context_words(&self) -> usize {
        self.context_words
    }

    pub fn body_words(&self) -> usize {
        self.total_words - self.context_words
    }
}

/// Inclusive sentence window `[first_index, last_index]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Chunk {
    pub first_index: usize,
    pub last_index: usize,
    pub body_word_count: usize,
}

impl Chunk {
    pub fn range(&self) -> (usize, usize) {
        (self.first_index, self.last_index)
    }

    pub fn contains(&self, index: usize) -> bool {
        (self.first_index..=self.last_index).contains(&index)
    }

    pub fn sentences<'t>(&self, transcript: &'t Transcript) -> &'t [Sentence] {
        &transcript.sentences()[self.first_index..=self.last_index]
    }
}

/// Greedy left-to-right packing at sentence boundaries. A sentence that does
/// not fit on its own still gets a chunk of its own.
pub fn chunk_transcript(transcript: &Transcript, budget: ChunkBudget) -> Vec<Chunk> {
    let limit = budget.body_words();
    let mut chunks = Vec::new();
    let mut current: Option<Chunk> = None;
    for (i, sentence) in transcript.sentences().iter().enumerate() {
        let words = sentence.word_count();
        current = match current {
            Some(mut c) if c.body_word_count + words <= limit => {
                c.last_index = i;
                c.body_word_count += words;
                Some(c)
            }
            prev => {
                chunks.extend(prev);
                Some(Chunk {
                    first_index: i,
                    last_index: i,
                    body_word_count: words,
                })
            }
        };
    }
    chunks.extend(current);
    chunks
}

/// One `"<global index>: <text>"` line per sentence of the chunk.
pub fn render_indexed_sentences(transcript: &Transcript, chunk: &Chunk) -> String {
    chunk
        .sentences(transcript)
        .iter()
        .zip(chunk.first_index..)
        .map(|(s, i)| format!("{i}: {}", s.text()))
        .collect::<Vec<_>>()
        .join("\n")
}
