use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

/// Fixed stopword vocabulary; the bundled English list can be replaced by a
/// file with one token per line (`#` comments allowed).
#[derive(Debug, Clone)]
pub struct StopwordList {
    words: HashSet<String>,
}

static DEFAULT_ENGLISH: OnceLock<StopwordList> = OnceLock::new();

impl StopwordList {
    /// The list shipped with the crate.
    pub fn default_english() -> &'static StopwordList {
        DEFAULT_ENGLISH
            .get_or_init(|| Self::parse(include_str!("../../resources/stopwords_en.txt")))
    }

    pub fn from_file(path: impl AsRef<Path>) -> std::io::Result<StopwordList> {
        Ok(Self::parse(&fs::read_to_string(path)?))
    }

    fn parse(text: &str) -> StopwordList {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_lowercase())
            .collect();
        StopwordList { words }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Order-preserving removal of stopword tokens.
pub fn remove_stopwords(words: Vec<String>, list: &StopwordList) -> Vec<String> {
    words.into_iter().filter(|w| !list.contains(w)).collect()
}
