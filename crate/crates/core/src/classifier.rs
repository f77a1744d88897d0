//! Incremental Naive Bayes over feature-token sets, with prequential
//! (test-then-train) and batch evaluation drivers.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Tweet};
use crate::features::{FeatureMode, FeatureStage, HybridHashtagState};
use crate::num::Real;
use crate::preprocess::{preprocess, StopwordList};

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("empty class set")]
    EmptyClassSet,
    #[error("smoothing alpha must be > 0")]
    InvalidAlpha,
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("cannot merge models with different classes or alpha")]
    MergeMismatch,
    #[error("split {0} leaves an empty train or test partition")]
    DegenerateSplit(f64),
    #[error("model snapshot: {0}")]
    Snapshot(String),
    #[error("result io: {0}")]
    Io(#[from] std::io::Error),
}

/// Multinomial Naive Bayes with additive smoothing over binary per-tweet
/// feature presence (each distinct feature counts once per tweet).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "F: Serialize", deserialize = "F: DeserializeOwned"))]
pub struct NaiveBayes<F: Real> {
    classes: BTreeSet<String>,
    class_doc_counts: BTreeMap<String, u64>,
    feature_counts: BTreeMap<String, BTreeMap<String, u64>>,
    class_feature_totals: BTreeMap<String, u64>,
    vocabulary: BTreeSet<String>,
    alpha: F,
}

/// Outcome of one prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction<F> {
    pub class: String,
    pub log_scores: BTreeMap<String, F>,
    /// True when the model had no training observations yet.
    pub cold_start: bool,
}

impl<F: Real> NaiveBayes<F> {
    pub fn new(classes: BTreeSet<String>, alpha: F) -> Result<Self, ClassifierError> {
        if classes.is_empty() {
            return Err(ClassifierError::EmptyClassSet);
        }
        if alpha <= F::zero() {
            return Err(ClassifierError::InvalidAlpha);
        }
        Ok(NaiveBayes {
            class_doc_counts: classes.iter().map(|c| (c.clone(), 0)).collect(),
            class_feature_totals: classes.iter().map(|c| (c.clone(), 0)).collect(),
            feature_counts: classes.iter().map(|c| (c.clone(), BTreeMap::new())).collect(),
            classes,
            vocabulary: BTreeSet::new(),
            alpha,
        })
    }

    pub fn classes(&self) -> &BTreeSet<String> {
        &self.classes
    }

    pub fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocabulary
    }

    pub fn alpha(&self) -> F {
        self.alpha
    }

    pub fn total_docs(&self) -> u64 {
        self.class_doc_counts.values().sum()
    }

    pub fn class_doc_count(&self, class: &str) -> u64 {
        self.class_doc_counts.get(class).copied().unwrap_or(0)
    }

    pub fn feature_count(&self, class: &str, feature: &str) -> u64 {
        self.feature_counts
            .get(class)
            .and_then(|m| m.get(feature))
            .copied()
            .unwrap_or(0)
    }

    pub fn class_feature_total(&self, class: &str) -> u64 {
        self.class_feature_totals.get(class).copied().unwrap_or(0)
    }

    /// One training observation: bumps the class document count and each
    /// distinct feature's count.
    pub fn train(
        &mut self,
        features: &BTreeSet<String>,
        label: &str,
    ) -> Result<(), ClassifierError> {
        if !self.classes.contains(label) {
            return Err(ClassifierError::UnknownLabel(label.to_string()));
        }
        *self.class_doc_counts.get_mut(label).unwrap() += 1;
        let per_class = self.feature_counts.get_mut(label).unwrap();
        let total = self.class_feature_totals.get_mut(label).unwrap();
        for f in features {
            *per_class.entry(f.clone()).or_default() += 1;
            *total += 1;
            self.vocabulary.insert(f.clone());
        }
        Ok(())
    }

    /// Smoothed log posterior argmax with lexicographic tie-break.
    ///
    /// Features outside the vocabulary are skipped: their smoothed
    /// likelihood is taken as class-independent, so they cancel in the
    /// argmax and contribute nothing to the reported scores.
    pub fn predict(&self, features: &BTreeSet<String>) -> Prediction<F> {
        let total = self.total_docs();
        if total == 0 {
            let uniform = (F::one() / F::from_count(self.classes.len() as u64)).ln();
            return Prediction {
                class: self.classes.iter().next().unwrap().clone(),
                log_scores: self.classes.iter().map(|c| (c.clone(), uniform)).collect(),
                cold_start: true,
            };
        }
        let alpha = self.alpha;
        let n_classes = F::from_count(self.classes.len() as u64);
        let vocab_size = F::from_count(self.vocabulary.len() as u64);
        let prior_den = F::from_count(total) + alpha * n_classes;
        let mut log_scores = BTreeMap::new();
        for class in &self.classes {
            let mut score =
                ((F::from_count(self.class_doc_count(class)) + alpha) / prior_den).ln();
            let like_den = F::from_count(self.class_feature_total(class)) + alpha * vocab_size;
            for f in features {
                if self.vocabulary.contains(f) {
                    let num = F::from_count(self.feature_count(class, f)) + alpha;
                    score = score + (num / like_den).ln();
                }
            }
            log_scores.insert(class.clone(), score);
        }
        let mut best: Option<(&String, F)> = None;
        for (class, &score) in &log_scores {
            match best {
                Some((_, s)) if score <= s => {}
                _ => best = Some((class, score)),
            }
        }
        Prediction {
            class: best.unwrap().0.clone(),
            log_scores,
            cold_start: false,
        }
    }

    /// Field-wise count addition; the merged model equals one trained on the
    /// concatenated observations.
    pub fn merge(&mut self, other: &NaiveBayes<F>) -> Result<(), ClassifierError> {
        if self.classes != other.classes || self.alpha != other.alpha {
            return Err(ClassifierError::MergeMismatch);
        }
        for (c, v) in &other.class_doc_counts {
            *self.class_doc_counts.get_mut(c).unwrap() += v;
        }
        for (c, v) in &other.class_feature_totals {
            *self.class_feature_totals.get_mut(c).unwrap() += v;
        }
        for (c, feats) in &other.feature_counts {
            let entry = self.feature_counts.get_mut(c).unwrap();
            for (f, v) in feats {
                *entry.entry(f.clone()).or_default() += v;
            }
        }
        self.vocabulary.extend(other.vocabulary.iter().cloned());
        Ok(())
    }

    /// Fresh model with the same classes and alpha, zero counts.
    pub fn fresh(&self) -> NaiveBayes<F> {
        NaiveBayes::new(self.classes.clone(), self.alpha).expect("already validated")
    }

    pub fn to_json(&self) -> Result<String, ClassifierError>
    where
        F: Serialize,
    {
        serde_json::to_string_pretty(self).map_err(|e| ClassifierError::Snapshot(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, ClassifierError>
    where
        F: DeserializeOwned,
    {
        serde_json::from_str(text).map_err(|e| ClassifierError::Snapshot(e.to_string()))
    }
}

/// One prequential observation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub instance: u64,
    pub tweet_id: u64,
    pub predicted: String,
    pub actual: String,
    pub correct: bool,
}

/// Full test-then-train evaluation output.
#[derive(Debug, Clone, Serialize)]
pub struct PrequentialResult {
    pub records: Vec<InstanceRecord>,
    pub running_accuracy: Vec<f64>,
    pub final_accuracy: f64,
    /// actual class -> predicted class -> count.
    pub confusion: BTreeMap<String, BTreeMap<String, u64>>,
    /// Set when the source ran dry before the requested instance count.
    pub partial: bool,
}

impl PrequentialResult {
    fn from_records(records: Vec<InstanceRecord>, partial: bool) -> PrequentialResult {
        let mut correct = 0u64;
        let mut running = Vec::with_capacity(records.len());
        let mut confusion: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            if r.correct {
                correct += 1;
            }
            running.push(correct as f64 / (i + 1) as f64);
            *confusion
                .entry(r.actual.clone())
                .or_default()
                .entry(r.predicted.clone())
                .or_default() += 1;
        }
        let final_accuracy = if records.is_empty() {
            0.0
        } else {
            correct as f64 / records.len() as f64
        };
        PrequentialResult {
            records,
            running_accuracy: running,
            final_accuracy,
            confusion,
            partial,
        }
    }

    /// One row per instance:
    /// `instance,tweet_id,predicted,actual,correct,running_accuracy`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ClassifierError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "instance",
            "tweet_id",
            "predicted",
            "actual",
            "correct",
            "running_accuracy",
        ])
        .map_err(io_err)?;
        for (r, acc) in self.records.iter().zip(&self.running_accuracy) {
            w.write_record([
                r.instance.to_string(),
                r.tweet_id.to_string(),
                r.predicted.clone(),
                r.actual.clone(),
                r.correct.to_string(),
                format!("{acc:.6}"),
            ])
            .map_err(io_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn io_err(e: csv::Error) -> ClassifierError {
    ClassifierError::Io(std::io::Error::new(std::io::ErrorKind::Other, e))
}

/// Runs the online loop over the first `n` stream items: preprocess,
/// extract features under the current hybrid state, predict, train, fold
/// the tweet into the statistics.
pub fn prequential_run<F: Real>(
    source: impl Iterator<Item = Tweet>,
    n: u64,
    stopwords: &StopwordList,
    stage: &mut FeatureStage,
    model: &mut NaiveBayes<F>,
) -> Result<PrequentialResult, ClassifierError> {
    let mut records = Vec::with_capacity(n.min(1 << 20) as usize);
    let mut taken = 0u64;
    for tweet in source.take(n as usize) {
        taken += 1;
        let tok = preprocess(&tweet, stopwords);
        let features = stage.extract(&tok);
        let prediction = model.predict(&features);
        records.push(InstanceRecord {
            instance: taken,
            tweet_id: tok.tweet_id,
            correct: prediction.class == tok.label,
            predicted: prediction.class,
            actual: tok.label.clone(),
        });
        model.train(&features, &tok.label)?;
    }
    Ok(PrequentialResult::from_records(records, taken < n))
}

/// Batch analogue: the hybrid state is built from the training prefix only
/// and then frozen; the model trains on that prefix and is scored on the
/// holdout remainder.
pub fn batch_fit_predict<F: Real>(
    corpus: &Corpus,
    split: f64,
    stopwords: &StopwordList,
    mut stage: FeatureStage,
    model: &mut NaiveBayes<F>,
) -> Result<f64, ClassifierError> {
    if !(0.0 < split && split < 1.0) {
        return Err(ClassifierError::DegenerateSplit(split));
    }
    let n_train = ((split * corpus.len() as f64).ceil() as usize).min(corpus.len());
    if n_train == 0 || n_train == corpus.len() {
        return Err(ClassifierError::DegenerateSplit(split));
    }
    let tokens: Vec<_> = corpus
        .tweets()
        .iter()
        .map(|t| preprocess(t, stopwords))
        .collect();
    let (train, test) = tokens.split_at(n_train);

    // Pass 1: full training statistics, anchors re-derived, pair counts
    // backfilled so H2 selection sees complete co-occurrence data.
    for tok in train {
        stage.acc.observe(tok);
    }
    stage.state.update(&mut stage.acc);
    for tok in train {
        stage.acc.observe_pairs(tok);
    }
    stage.state.update(&mut stage.acc);

    // Pass 2: train on frozen features.
    for tok in train {
        let features = crate::features::feature_vector(tok, stage.mode, &stage.state);
        model.train(&features, &tok.label)?;
    }

    let mut correct = 0usize;
    for tok in test {
        let features = crate::features::feature_vector(tok, stage.mode, &stage.state);
        if model.predict(&features).class == tok.label {
            correct += 1;
        }
    }
    Ok(correct as f64 / test.len() as f64)
}
