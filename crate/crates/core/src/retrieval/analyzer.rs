use std::fmt;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

use crate::text::analyze;

/// Lowercase, split on non-alphanumerics, drop empties; optionally apply the
/// English Snowball stemmer.
#[derive(Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(from = "AnalyzerConfig", into = "AnalyzerConfig")]
pub struct Analyzer {
    stem: bool,
}

#[derive(Default, Serialize, Deserialize)]
#[serde(default)]
struct AnalyzerConfig {
    stem: bool,
}

impl From<AnalyzerConfig> for Analyzer {
    fn from(c: AnalyzerConfig) -> Self {
        Self { stem: c.stem }
    }
}

impl From<Analyzer> for AnalyzerConfig {
    fn from(a: Analyzer) -> Self {
        Self { stem: a.stem }
    }
}

impl fmt::Debug for Analyzer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Analyzer")
            .field("stem", &self.stem)
            .finish()
    }
}

impl Analyzer {
    pub fn new(stem: bool) -> Self {
        Self { stem }
    }

    pub fn stems(&self) -> bool {
        self.stem
    }

    pub fn tokens(&self, text: &str) -> Vec<String> {
        let tokens = analyze(text);
        if !self.stem {
            return tokens;
        }
        let stemmer = Stemmer::create(Algorithm::English);
        tokens
            .into_iter()
            .map(|t| stemmer.stem(&t).into_owned())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_analysis() {
        let a = Analyzer::default();
        assert_eq!(
            a.tokens("Running-shoes, 2024!"),
            vec!["running", "shoes", "2024"]
        );
        assert!(a.tokens(" ,;. ").is_empty());
    }

    #[test]
    fn stemming_folds_inflections() {
        let a = Analyzer::new(true);
        assert_eq!(a.tokens("Running runs"), vec!["run", "run"]);
    }
}
