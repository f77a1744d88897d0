//! Tweet corpora: loading, synthesis, and replay as an unbounded stream.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Platform limit; longer texts are truncated on ingest.
pub const MAX_TWEET_CHARS: usize = 280;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("empty corpus")]
    Empty,
    #[error("line {line}: malformed record: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: unknown class label {label:?}")]
    UnknownLabel { line: usize, label: String },
    #[error("line {line}: duplicate tweet id {id}")]
    DuplicateId { line: usize, id: u64 },
    #[error("invalid synth spec: {0}")]
    InvalidSpec(String),
}

/// One labeled post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: u64,
    pub text: String,
    pub label: String,
}

impl Tweet {
    /// Enforces the 280-character cap, warning when text is cut.
    pub fn new(id: u64, text: impl Into<String>, label: impl Into<String>) -> Self {
        let mut text = text.into();
        if text.chars().count() > MAX_TWEET_CHARS {
            let cut = text
                .char_indices()
                .nth(MAX_TWEET_CHARS)
                .map(|(i, _)| i)
                .unwrap_or(text.len());
            text.truncate(cut);
            log::warn!("tweet {id}: text exceeds {MAX_TWEET_CHARS} chars, truncated");
        }
        Tweet {
            id,
            text,
            label: label.into(),
        }
    }
}

/// An ordered, labeled tweet collection with its class set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    tweets: Vec<Tweet>,
    classes: BTreeSet<String>,
}

impl Corpus {
    /// Builds a corpus whose class set is derived from the observed labels.
    pub fn new(tweets: Vec<Tweet>) -> Result<Self, CorpusError> {
        let classes = tweets.iter().map(|t| t.label.clone()).collect();
        Self::with_classes(tweets, classes)
    }

    /// Builds a corpus validated against a declared class set.
    pub fn with_classes(
        tweets: Vec<Tweet>,
        classes: BTreeSet<String>,
    ) -> Result<Self, CorpusError> {
        if tweets.is_empty() {
            return Err(CorpusError::Empty);
        }
        let mut seen = BTreeSet::new();
        for (i, t) in tweets.iter().enumerate() {
            if !classes.contains(&t.label) {
                return Err(CorpusError::UnknownLabel {
                    line: i + 1,
                    label: t.label.clone(),
                });
            }
            if !seen.insert(t.id) {
                return Err(CorpusError::DuplicateId {
                    line: i + 1,
                    id: t.id,
                });
            }
        }
        Ok(Corpus { tweets, classes })
    }

    pub fn tweets(&self) -> &[Tweet] {
        &self.tweets
    }

    pub fn classes(&self) -> &BTreeSet<String> {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    /// Unbounded replay: every pass is a fresh seeded permutation of the corpus.
    pub fn stream(&self, seed: u64) -> StreamSimulator {
        stream_simulator(self, seed)
    }
}

/// Loads a corpus file (one flat JSON record per line), deriving classes from labels.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let tweets = read_records(path.as_ref(), None)?;
    Corpus::new(tweets)
}

/// Loads a corpus file and rejects any record whose label is outside `classes`.
pub fn load_corpus_with_classes(
    path: impl AsRef<Path>,
    classes: &BTreeSet<String>,
) -> Result<Corpus, CorpusError> {
    let tweets = read_records(path.as_ref(), Some(classes))?;
    Corpus::with_classes(tweets, classes.clone())
}

fn read_records(
    path: &Path,
    classes: Option<&BTreeSet<String>>,
) -> Result<Vec<Tweet>, CorpusError> {
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut tweets = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let raw: Tweet = serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
            line: line_no,
            msg: e.to_string(),
        })?;
        if let Some(classes) = classes {
            if !classes.contains(&raw.label) {
                return Err(CorpusError::UnknownLabel {
                    line: line_no,
                    label: raw.label,
                });
            }
        }
        tweets.push(Tweet::new(raw.id, raw.text, raw.label));
    }
    Ok(tweets)
}

/// Writes one JSON record per line; `load_corpus` round-trips the result.
pub fn write_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut w = BufWriter::new(file);
    for t in &corpus.tweets {
        serde_json::to_writer(&mut w, t).map_err(|e| CorpusError::Malformed {
            line: 0,
            msg: e.to_string(),
        })?;
        writeln!(w).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    w.flush().map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Per-class generation parameters for the synthetic corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassSpec {
    pub name: String,
    /// Word pool the class draws topical words from. Entries may repeat to
    /// weight a word more heavily.
    pub keywords: Vec<String>,
    /// Hashtags emitted only by this class; pools must be disjoint.
    pub signal_hashtags: Vec<String>,
    /// Per-slot probability of emitting a signal hashtag.
    pub hashtag_prob: f64,
}

/// Recipe for a deterministic labeled corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthSpec {
    pub classes: Vec<ClassSpec>,
    /// Shared vocabulary mixed into every class's word stream.
    #[serde(default)]
    pub filler_words: Vec<String>,
    /// Probability that a word slot draws from the class keyword pool rather
    /// than the shared filler pool.
    #[serde(default = "default_keyword_prob")]
    pub keyword_prob: f64,
    /// Hashtags emitted by any class with `noise_prob`.
    #[serde(default)]
    pub noise_hashtags: Vec<String>,
    #[serde(default)]
    pub noise_prob: f64,
    /// Independent signal-hashtag draws per tweet, each at the class's
    /// `hashtag_prob`.
    #[serde(default = "default_signal_slots")]
    pub signal_slots: u32,
    pub tweets_per_class: usize,
    /// Inclusive `[min, max]` word count per tweet.
    pub words_per_tweet: (usize, usize),
    #[serde(default)]
    pub seed: u64,
}

fn default_keyword_prob() -> f64 {
    1.0
}

fn default_signal_slots() -> u32 {
    1
}

impl SynthSpec {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let spec: SynthSpec = serde_json::from_reader(BufReader::new(file))
            .map_err(|e| CorpusError::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let bad = |msg: String| Err(CorpusError::InvalidSpec(msg));
        if self.classes.is_empty() {
            return bad("no classes declared".into());
        }
        if self.tweets_per_class == 0 {
            return bad("tweets_per_class must be >= 1".into());
        }
        let (lo, hi) = self.words_per_tweet;
        if lo == 0 || lo > hi {
            return bad(format!("bad words_per_tweet range [{lo}, {hi}]"));
        }
        if !(0.0..=1.0).contains(&self.noise_prob) {
            return bad(format!("noise_prob {} outside [0, 1]", self.noise_prob));
        }
        if !(0.0..=1.0).contains(&self.keyword_prob) {
            return bad(format!("keyword_prob {} outside [0, 1]", self.keyword_prob));
        }
        if self.keyword_prob < 1.0 && self.filler_words.is_empty() {
            return bad("keyword_prob < 1 requires a filler_words pool".into());
        }
        if self.noise_prob > 0.0 && self.noise_hashtags.is_empty() {
            return bad("noise_prob > 0 requires a noise_hashtags pool".into());
        }
        let mut names = BTreeSet::new();
        let mut signals: BTreeSet<&str> = BTreeSet::new();
        for class in &self.classes {
            if !names.insert(class.name.as_str()) {
                return bad(format!("duplicate class name {:?}", class.name));
            }
            if class.keywords.is_empty() {
                return bad(format!("class {:?} has an empty keyword pool", class.name));
            }
            if !(0.0..=1.0).contains(&class.hashtag_prob) {
                return bad(format!(
                    "class {:?} hashtag_prob {} outside [0, 1]",
                    class.name, class.hashtag_prob
                ));
            }
            for tag in &class.signal_hashtags {
                if !signals.insert(tag.as_str()) {
                    return bad(format!(
                        "signal hashtag {tag:?} appears in more than one class pool"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Generates a corpus from the spec, identical for identical specs.
///
/// Classes are interleaved round-robin so every prefix stays balanced.
pub fn synth_corpus(spec: &SynthSpec) -> Result<Corpus, CorpusError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut tweets = Vec::with_capacity(spec.tweets_per_class * spec.classes.len());
    let mut id = 0u64;
    for _ in 0..spec.tweets_per_class {
        for class in &spec.classes {
            let (lo, hi) = spec.words_per_tweet;
            let n_words = rng.gen_range(lo..=hi);
            let mut parts: Vec<&str> = Vec::with_capacity(n_words + 4);
            for _ in 0..n_words {
                let from_class =
                    spec.filler_words.is_empty() || rng.gen_bool(spec.keyword_prob);
                let pool = if from_class {
                    &class.keywords
                } else {
                    &spec.filler_words
                };
                parts.push(&pool[rng.gen_range(0..pool.len())]);
            }
            let mut text = parts.join(" ");
            if !class.signal_hashtags.is_empty() {
                for _ in 0..spec.signal_slots {
                    if rng.gen_bool(class.hashtag_prob) {
                        let tag =
                            &class.signal_hashtags[rng.gen_range(0..class.signal_hashtags.len())];
                        text.push_str(" #");
                        text.push_str(tag);
                    }
                }
            }
            if !spec.noise_hashtags.is_empty() && rng.gen_bool(spec.noise_prob) {
                let tag = &spec.noise_hashtags[rng.gen_range(0..spec.noise_hashtags.len())];
                text.push_str(" #");
                text.push_str(tag);
            }
            tweets.push(Tweet::new(id, text, class.name.clone()));
            id += 1;
        }
    }
    let classes = spec.classes.iter().map(|c| c.name.clone()).collect();
    Corpus::with_classes(tweets, classes)
}

/// Unbounded tweet source: each pass through the corpus is a fresh random
/// permutation, so any pass-aligned window of `len` items covers every id
/// exactly once.
///
/// Single consumer; hand off between threads, do not share.
pub struct StreamSimulator {
    tweets: Arc<Vec<Tweet>>,
    order: Vec<usize>,
    pos: usize,
    rng: ChaCha8Rng,
}

/// See [`StreamSimulator`]. Deterministic for a fixed seed.
pub fn stream_simulator(corpus: &Corpus, seed: u64) -> StreamSimulator {
    let mut sim = StreamSimulator {
        tweets: Arc::new(corpus.tweets.clone()),
        order: (0..corpus.tweets.len()).collect(),
        pos: 0,
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    sim.order.shuffle(&mut sim.rng);
    sim
}

impl Iterator for StreamSimulator {
    type Item = Tweet;

    fn next(&mut self) -> Option<Tweet> {
        if self.pos == self.order.len() {
            self.order.shuffle(&mut self.rng);
            self.pos = 0;
        }
        let tweet = self.tweets[self.order[self.pos]].clone();
        self.pos += 1;
        Some(tweet)
    }
}
