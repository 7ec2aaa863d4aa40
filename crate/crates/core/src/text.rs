//! Tokenization shared by indexing and querying.

use serde::{Deserialize, Serialize};

/// English stop set applied by default (the classic Lucene English list).
pub const STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "but", "by", "for", "if", "in", "into", "is", "it", "no", "not", "of",
    "on", "or", "such", "that", "the", "their", "then", "there", "these", "they", "this", "to", "was", "will", "with",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TokenizerConfig {
    pub stopwords: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self { stopwords: true }
    }
}

pub fn is_stopword(token: &str) -> bool {
    // STOPWORDS is sorted
    STOPWORDS.binary_search(&token).is_ok()
}

/// Lowercases, splits on every non-alphanumeric character, drops empty
/// tokens and (optionally) stopwords. No stemming.
pub fn tokenize(text: &str, config: TokenizerConfig) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .filter(|t| !(config.stopwords && is_stopword(t)))
        .map(str::to_string)
        .collect()
}
