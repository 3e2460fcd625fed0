//! Label normalization and tokenization.

use std::collections::BTreeSet;

use crate::model::DEFAULT_STOPWORDS;

/// Lowercases a label and turns underscores, hyphens and camel-case
/// boundaries into single spaces. The result is a fixed point of this
/// function.
pub fn normalize(label: &str) -> String {
    let chars: Vec<char> = label.chars().collect();
    let mut spaced = String::with_capacity(label.len() + 8);
    for (i, &c) in chars.iter().enumerate() {
        if c == '_' || c == '-' {
            spaced.push(' ');
            continue;
        }
        if c.is_uppercase() && i > 0 {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            // "hasTopic" -> "has Topic", "XMLParser" -> "XML Parser"
            if prev.is_lowercase() || prev.is_ascii_digit() || (prev.is_uppercase() && next_lower) {
                spaced.push(' ');
            }
        }
        spaced.push(c);
    }
    let lowered = spaced.to_lowercase();
    lowered.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Tokenizer with a configurable stopword list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelAnalyzer {
    stopwords: BTreeSet<String>,
}

impl Default for LabelAnalyzer {
    fn default() -> Self {
        LabelAnalyzer::new(DEFAULT_STOPWORDS.iter().map(|s| s.to_string()))
    }
}

impl LabelAnalyzer {
    pub fn new(stopwords: impl IntoIterator<Item = String>) -> Self {
        LabelAnalyzer {
            stopwords: stopwords.into_iter().map(|s| s.to_lowercase()).collect(),
        }
    }

    pub fn without_stopwords() -> Self {
        LabelAnalyzer {
            stopwords: BTreeSet::new(),
        }
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    /// Tokens of the normalized label with stopwords removed, unless that
    /// would remove every token.
    pub fn tokenize(&self, label: &str) -> Vec<String> {
        let normalized = normalize(label);
        let all: Vec<&str> = normalized.split(' ').filter(|t| !t.is_empty()).collect();
        let kept: Vec<String> = all
            .iter()
            .filter(|t| !self.stopwords.contains(**t))
            .map(|t| t.to_string())
            .collect();
        if kept.is_empty() {
            all.into_iter().map(str::to_string).collect()
        } else {
            kept
        }
    }
}
