//! Raw tweet text to normalized word and hashtag tokens.
//!
//! Pipeline: strip URLs and mentions, pull out `#`-prefixed hashtags, split
//! the rest on non-alphanumeric boundaries, drop stopwords, Porter-stem the
//! words. Hashtags are lowercased with the `#` stripped and are never
//! stemmed; hashtags containing non-ASCII characters are dropped so the
//! token universe stays within `[a-z0-9_]+`.

mod porter;
mod stopwords;

pub use porter::porter_stem;
pub use stopwords::{remove_stopwords, StopwordList};

use std::collections::BTreeSet;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::Tweet;

/// Normalized view of one tweet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedTweet {
    pub tweet_id: u64,
    pub label: String,
    /// Stemmed, stopword-free word tokens in text order.
    pub words: Vec<String>,
    /// Normalized hashtag tokens (`#` stripped) in text order.
    pub hashtags: Vec<String>,
}

fn url_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"https?://\S+").unwrap())
}

fn mention_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"@\w+").unwrap())
}

fn hashtag_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"#\w+").unwrap())
}

fn is_normalized_hashtag(tag: &str) -> bool {
    !tag.is_empty()
        && tag
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
}

/// Splits text into lowercase word tokens and normalized hashtag tokens.
///
/// URLs and @-mentions are removed first, so `#fragment`s inside links never
/// become hashtags. Punctuation-only and emoticon tokens disappear with the
/// non-alphanumeric split.
pub fn tokenize(text: &str) -> (Vec<String>, Vec<String>) {
    let text = url_re().replace_all(text, " ");
    let text = mention_re().replace_all(&text, " ");

    let mut hashtags = Vec::new();
    let text = hashtag_re().replace_all(&text, |caps: &regex::Captures| {
        let tag = caps[0][1..].to_lowercase();
        if is_normalized_hashtag(&tag) {
            hashtags.push(tag);
        }
        " ".to_string()
    });

    let words = text
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect();
    (words, hashtags)
}

/// Full per-tweet normalization: tokenize, drop stopwords, stem.
///
/// A word that collides with one of the tweet's own hashtag tokens is
/// dropped so the two token lists never overlap.
pub fn preprocess(tweet: &Tweet, stopwords: &StopwordList) -> TokenizedTweet {
    let (raw_words, hashtags) = tokenize(&tweet.text);
    let tag_set: BTreeSet<&str> = hashtags.iter().map(String::as_str).collect();
    let words = remove_stopwords(raw_words, stopwords)
        .into_iter()
        .map(|w| porter_stem(&w))
        .filter(|w| !tag_set.contains(w.as_str()))
        .collect();
    TokenizedTweet {
        tweet_id: tweet.id,
        label: tweet.label.clone(),
        words,
        hashtags,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tokenize_strips_urls_and_extracts_hashtags() {
        let (words, tags) = tokenize("Great game tonight! #NBA #sports http://t.co/x");
        assert_eq!(words, vec!["great", "game", "tonight"]);
        assert_eq!(tags, vec!["nba", "sports"]);
    }

    #[test]
    fn tokenize_empty_input() {
        let (words, tags) = tokenize("");
        assert!(words.is_empty());
        assert!(tags.is_empty());
    }

    #[test]
    fn tokenize_mentions_and_punctuation() {
        let (words, tags) = tokenize("@user #OhMyGod!!!");
        assert!(words.is_empty());
        assert_eq!(tags, vec!["ohmygod"]);
    }

    #[test]
    fn non_ascii_hashtags_dropped() {
        let (_, tags) = tokenize("fête time #café #ok");
        assert_eq!(tags, vec!["ok"]);
    }

    #[test]
    fn url_fragment_is_not_a_hashtag() {
        let (_, tags) = tokenize("see https://example.com/#anchor #real");
        assert_eq!(tags, vec!["real"]);
    }

    #[test]
    fn preprocess_stems_and_keeps_hashtags_raw() {
        let t = Tweet::new(1, "Playing games #gaming", "sport");
        let tok = preprocess(&t, StopwordList::default_english());
        assert_eq!(tok.words, vec!["play", "game"]);
        assert_eq!(tok.hashtags, vec!["gaming"]);
    }

    #[test]
    fn preprocess_hashtags_only() {
        let t = Tweet::new(2, "#a #b", "sport");
        let tok = preprocess(&t, StopwordList::default_english());
        assert!(tok.words.is_empty());
        assert_eq!(tok.hashtags, vec!["a", "b"]);
    }

    #[test]
    fn preprocess_whitespace_only() {
        let t = Tweet::new(3, " ", "sport");
        let tok = preprocess(&t, StopwordList::default_english());
        assert!(tok.words.is_empty());
        assert!(tok.hashtags.is_empty());
    }

    #[test]
    fn word_colliding_with_hashtag_is_dropped() {
        let t = Tweet::new(4, "nba tonight #nba", "sport");
        let tok = preprocess(&t, StopwordList::default_english());
        assert!(!tok.words.contains(&"nba".to_string()));
        assert_eq!(tok.hashtags, vec!["nba"]);
    }

    proptest! {
        #[test]
        fn hashtag_normalization_is_idempotent(tag in "[a-z0-9_]{1,20}") {
            let (_, tags) = tokenize(&format!("#{tag}"));
            prop_assert_eq!(tags, vec![tag]);
        }

        #[test]
        fn deterministic_and_disjoint(text in ".{0,200}") {
            let a = tokenize(&text);
            let b = tokenize(&text);
            prop_assert_eq!(&a, &b);
            let t = Tweet::new(0, text, "c");
            let tok = preprocess(&t, StopwordList::default_english());
            for w in &tok.words {
                prop_assert!(!tok.hashtags.contains(w));
            }
        }
    }
}
