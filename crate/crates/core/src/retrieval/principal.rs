use std::collections::{HashMap, HashSet};

use crate::corpus::Transcript;
use crate::text::analyze;

pub const DEFAULT_WORD_CAP: usize = 24;

/// Per-sentence unique-unigram ROUGE-1 F1 against the set of unigrams in
/// all other sentences. Tokens are lowercased alphanumeric runs.
pub fn principal_scores(transcript: &Transcript) -> Vec<f64> {
    let sets: Vec<HashSet<String>> = transcript
        .sentences()
        .iter()
        .map(|s| analyze(s.text()).into_iter().collect())
        .collect();
    // number of sentences containing each token
    let mut sentence_freq: HashMap<&str, usize> = HashMap::new();
    for set in &sets {
        for t in set {
            *sentence_freq.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    let vocab = sentence_freq.len();
    sets.iter()
        .map(|set| {
            let only_here = set
                .iter()
                .filter(|t| sentence_freq[t.as_str()] == 1)
                .count();
            let shared = set.len() - only_here;
            let rest = vocab - only_here;
            if shared == 0 {
                return 0.0;
            }
            let p = shared as f64 / set.len() as f64;
            let r = shared as f64 / rest as f64;
            2.0 * p * r / (p + r)
        })
        .collect()
}

/// Highest-scoring sentences (ties to the earlier one) taken greedily while
/// the total word count stays within `word_cap`; a sentence that would
/// overflow is skipped. Returned in document order, space-joined.
pub fn principal_extract(transcript: &Transcript, word_cap: usize) -> String {
    let scores = principal_scores(transcript);
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let sentences = transcript.sentences();
    let mut used = 0;
    let mut chosen = Vec::new();
    for i in order {
        let w = sentences[i].word_count();
        if used + w <= word_cap {
            used += w;
            chosen.push(i);
        }
    }
    chosen.sort_unstable();
    chosen
        .iter()
        .map(|&i| sentences[i].text())
        .collect::<Vec<_>>()
        .join(" ")
}
