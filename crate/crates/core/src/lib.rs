//! Online tweet topic classification with hybrid hashtag features.
//!
//! The crate covers the full loop: corpus loading/synthesis and stream
//! replay, text normalization, ontology-driven and tweet-extracted hashtag
//! correlation, the evolving hybrid feature set, an incremental Naive Bayes
//! classifier with prequential evaluation, and an in-process spout/bolt
//! topology for throughput and latency benchmarks.
//!
//! Score math is generic over the [`num::Real`] scalar (`f32` or `f64`);
//! the aliases below fix the default `f64` instantiations.

pub mod classifier;
pub mod corpus;
pub mod features;
pub mod knowledge;
pub mod num;
pub mod preprocess;
pub mod topology;

/// Default scalar for scores and log-probabilities.
pub type Scalar = f64;

/// Naive Bayes model at the default scalar.
pub type NaiveBayesModel = classifier::NaiveBayes<Scalar>;

/// Prediction at the default scalar.
pub type Prediction = classifier::Prediction<Scalar>;

/// Correlation score at the default scalar.
pub type Correlation = knowledge::Correlation<Scalar>;

pub use classifier::{batch_fit_predict, prequential_run, InstanceRecord, PrequentialResult};
pub use corpus::{
    load_corpus, load_corpus_with_classes, stream_simulator, synth_corpus, write_corpus, Corpus,
    SynthSpec, Tweet,
};
pub use features::{
    feature_vector, hybrid_hashtags_fig1, select_correlated, topk_tweet_hashtags,
    CorrelationAccumulator, FeatureMode, FeatureStage, HybridHashtagState, HybridRule,
};
pub use knowledge::{
    load_knowledge_base, ontology_driven_hashtags, parse_knowledge_base, pearson_corr,
    ConceptKnowledgeBase,
};
pub use preprocess::{porter_stem, preprocess, tokenize, StopwordList, TokenizedTweet};
pub use topology::{
    build_topology, scaling_benchmark, MetricsReport, ScalingReport, SessionLimit, TopologyConfig,
};
