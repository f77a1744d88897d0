//! Streaming correlation statistics and the online hybrid hashtag set.
//!
//! Samples are individual tweets with binary presence indicators, which
//! turns the correlation of a class (or anchor hashtag) with a hashtag into
//! the phi coefficient over four counts: `n`, `n_x`, `n_h`, `n_xh`. The
//! accumulator keeps those counts in O(1) per pair and merges across
//! partitions by field-wise addition.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::knowledge::Correlation;
use crate::num::Real;
use crate::preprocess::TokenizedTweet;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("correlation statistics undefined before 2 observations (n = {0})")]
    UndefinedStatistics(u64),
}

/// Feature construction modes for the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureMode {
    WordsOnly,
    WordsAndTweetHashtags,
    TweetHashtagsOnly,
    HybridHashtags,
}

impl FeatureMode {
    pub const ALL: [FeatureMode; 4] = [
        FeatureMode::WordsOnly,
        FeatureMode::WordsAndTweetHashtags,
        FeatureMode::TweetHashtagsOnly,
        FeatureMode::HybridHashtags,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FeatureMode::WordsOnly => "words",
            FeatureMode::WordsAndTweetHashtags => "words+tags",
            FeatureMode::TweetHashtagsOnly => "tags",
            FeatureMode::HybridHashtags => "hybrid",
        }
    }
}

impl std::fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FeatureMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "words" => Ok(FeatureMode::WordsOnly),
            "words+tags" => Ok(FeatureMode::WordsAndTweetHashtags),
            "tags" => Ok(FeatureMode::TweetHashtagsOnly),
            "hybrid" => Ok(FeatureMode::HybridHashtags),
            other => Err(format!(
                "unknown feature mode {other:?} (expected words, words+tags, tags or hybrid)"
            )),
        }
    }
}

/// Which combination rule produces the final hybrid set H.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HybridRule {
    /// H = H1 ∪ H2.
    Fig1Strict,
    /// H = H_c ∪ H1 ∪ H2; keeps ontology coverage from the first tweet.
    UnionWithHc,
}

impl std::fmt::Display for HybridRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            HybridRule::Fig1Strict => "fig1",
            HybridRule::UnionWithHc => "union",
        })
    }
}

impl std::str::FromStr for HybridRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fig1" => Ok(HybridRule::Fig1Strict),
            "union" => Ok(HybridRule::UnionWithHc),
            other => Err(format!(
                "unknown hybrid rule {other:?} (expected fig1 or union)"
            )),
        }
    }
}

/// Phi score kept in exact integer form: value = num / sqrt(den).
///
/// Ranking compares scores through [`PhiScore::cmp_score`], which is exact
/// whenever the cross products fit in `i128`, so top-k selection never
/// depends on floating-point rounding of mathematically equal scores.
#[derive(Debug, Clone, Copy)]
pub struct PhiScore {
    num: i128,
    den: u128,
}

impl PhiScore {
    pub fn from_counts(n: u64, n_x: u64, n_h: u64, n_xh: u64) -> PhiScore {
        let (n, n_x, n_h, n_xh) = (n as i128, n_x as i128, n_h as i128, n_xh as i128);
        let den = n_x * (n - n_x) * n_h * (n - n_h);
        PhiScore {
            num: n * n_xh - n_x * n_h,
            den: den.max(0) as u128,
        }
    }

    pub fn degenerate(&self) -> bool {
        self.den == 0
    }

    pub fn value<F: Real>(&self) -> F {
        if self.den == 0 {
            return F::zero();
        }
        let num = F::from_i128(self.num).unwrap_or_else(F::zero);
        let den = F::from_u128(self.den).unwrap_or_else(F::one);
        num / den.sqrt()
    }

    pub fn correlation<F: Real>(&self) -> Correlation<F> {
        Correlation {
            value: self.value::<F>(),
            degenerate: self.degenerate(),
        }
    }

    /// Total order on non-degenerate scores; falls back to `f64` only when
    /// the exact comparison would overflow.
    pub fn cmp_score(&self, other: &PhiScore) -> Ordering {
        debug_assert!(!self.degenerate() && !other.degenerate());
        let sign = |v: i128| v.signum();
        match sign(self.num).cmp(&sign(other.num)) {
            Ordering::Equal => {}
            ord => return ord,
        }
        if self.num == 0 {
            return Ordering::Equal;
        }
        let exact = (|| {
            let a = self.num.checked_mul(self.num)?;
            let b = other.num.checked_mul(other.num)?;
            let lhs = a.checked_mul(i128::try_from(other.den).ok()?)?;
            let rhs = b.checked_mul(i128::try_from(self.den).ok()?)?;
            Some(if self.num > 0 {
                lhs.cmp(&rhs)
            } else {
                rhs.cmp(&lhs)
            })
        })();
        exact.unwrap_or_else(|| {
            self.value::<f64>()
                .partial_cmp(&other.value::<f64>())
                .unwrap_or(Ordering::Equal)
        })
    }
}

/// Streaming co-occurrence counts over tweets.
///
/// Hashtag presence is binary per tweet: a duplicated hashtag counts once.
/// Hashtag-hashtag pair counts are tracked only for the current anchor set
/// (the union of per-class H1); a newly adopted anchor starts its pair
/// counts at zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelationAccumulator {
    n: u64,
    class_counts: BTreeMap<String, u64>,
    hashtag_counts: BTreeMap<String, u64>,
    class_hashtag_counts: BTreeMap<String, BTreeMap<String, u64>>,
    anchor_pair_counts: BTreeMap<String, BTreeMap<String, u64>>,
}

impl CorrelationAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn class_count(&self, class: &str) -> u64 {
        self.class_counts.get(class).copied().unwrap_or(0)
    }

    pub fn hashtag_count(&self, tag: &str) -> u64 {
        self.hashtag_counts.get(tag).copied().unwrap_or(0)
    }

    pub fn class_hashtag_count(&self, class: &str, tag: &str) -> u64 {
        self.class_hashtag_counts
            .get(class)
            .and_then(|m| m.get(tag))
            .copied()
            .unwrap_or(0)
    }

    pub fn pair_count(&self, anchor: &str, tag: &str) -> u64 {
        self.anchor_pair_counts
            .get(anchor)
            .and_then(|m| m.get(tag))
            .copied()
            .unwrap_or(0)
    }

    pub fn classes(&self) -> impl Iterator<Item = &str> {
        self.class_counts.keys().map(String::as_str)
    }

    pub fn hashtags(&self) -> impl Iterator<Item = &str> {
        self.hashtag_counts.keys().map(String::as_str)
    }

    pub fn anchors(&self) -> BTreeSet<String> {
        self.anchor_pair_counts.keys().cloned().collect()
    }

    /// Folds one labeled tweet into every count table.
    pub fn observe(&mut self, tweet: &TokenizedTweet) {
        self.n += 1;
        *self.class_counts.entry(tweet.label.clone()).or_default() += 1;
        let distinct: BTreeSet<&str> = tweet.hashtags.iter().map(String::as_str).collect();
        let per_class = self
            .class_hashtag_counts
            .entry(tweet.label.clone())
            .or_default();
        for tag in &distinct {
            *self.hashtag_counts.entry(tag.to_string()).or_default() += 1;
            *per_class.entry(tag.to_string()).or_default() += 1;
        }
        self.observe_pairs_of(&distinct);
    }

    /// Updates only the anchor pair counts for one tweet; used to backfill
    /// pair statistics in batch construction.
    pub fn observe_pairs(&mut self, tweet: &TokenizedTweet) {
        let distinct: BTreeSet<&str> = tweet.hashtags.iter().map(String::as_str).collect();
        self.observe_pairs_of(&distinct);
    }

    fn observe_pairs_of(&mut self, distinct: &BTreeSet<&str>) {
        for (anchor, pairs) in self.anchor_pair_counts.iter_mut() {
            if distinct.contains(anchor.as_str()) {
                for tag in distinct {
                    if *tag != anchor.as_str() {
                        *pairs.entry(tag.to_string()).or_default() += 1;
                    }
                }
            }
        }
    }

    /// Re-anchors pair tracking: counts survive for anchors that stay,
    /// removed anchors are dropped, new anchors start from zero.
    pub fn set_anchors(&mut self, anchors: &BTreeSet<String>) {
        self.anchor_pair_counts
            .retain(|anchor, _| anchors.contains(anchor));
        for anchor in anchors {
            self.anchor_pair_counts.entry(anchor.clone()).or_default();
        }
    }

    /// Field-wise addition; commutative and associative over disjoint
    /// observation multisets.
    pub fn merge(&mut self, other: &CorrelationAccumulator) {
        self.n += other.n;
        for (k, v) in &other.class_counts {
            *self.class_counts.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.hashtag_counts {
            *self.hashtag_counts.entry(k.clone()).or_default() += v;
        }
        for (class, tags) in &other.class_hashtag_counts {
            let entry = self.class_hashtag_counts.entry(class.clone()).or_default();
            for (tag, v) in tags {
                *entry.entry(tag.clone()).or_default() += v;
            }
        }
        for (anchor, tags) in &other.anchor_pair_counts {
            let entry = self.anchor_pair_counts.entry(anchor.clone()).or_default();
            for (tag, v) in tags {
                *entry.entry(tag.clone()).or_default() += v;
            }
        }
    }

    fn class_phi_score(&self, class: &str, tag: &str) -> PhiScore {
        PhiScore::from_counts(
            self.n,
            self.class_count(class),
            self.hashtag_count(tag),
            self.class_hashtag_count(class, tag),
        )
    }

    fn pair_phi_score(&self, anchor: &str, tag: &str) -> PhiScore {
        PhiScore::from_counts(
            self.n,
            self.hashtag_count(anchor),
            self.hashtag_count(tag),
            self.pair_count(anchor, tag),
        )
    }

    /// Class-to-hashtag phi coefficient; equals the Pearson correlation of
    /// the expanded 0/1 presence vectors.
    pub fn phi_corr<F: Real>(&self, class: &str, tag: &str) -> Result<Correlation<F>, FeatureError> {
        if self.n < 2 {
            return Err(FeatureError::UndefinedStatistics(self.n));
        }
        Ok(self.class_phi_score(class, tag).correlation())
    }

    /// Anchor-to-hashtag phi coefficient from the pair tables.
    pub fn pair_phi<F: Real>(&self, anchor: &str, tag: &str) -> Result<Correlation<F>, FeatureError> {
        if self.n < 2 {
            return Err(FeatureError::UndefinedStatistics(self.n));
        }
        Ok(self.pair_phi_score(anchor, tag).correlation())
    }
}

/// Ranks `(tag, score)` pairs score-descending with lexicographic tie-break
/// and keeps the first k.
fn top_k(mut scored: Vec<(String, PhiScore)>, k: usize) -> Vec<String> {
    scored.sort_by(|a, b| b.1.cmp_score(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.truncate(k);
    scored.into_iter().map(|(tag, _)| tag).collect()
}

/// Top k hashtags seen so far by correlation with `class`, best first.
///
/// Returns an empty list while statistics are undefined (n < 2) or when
/// every candidate is degenerate, so cold-start streams keep flowing.
pub fn topk_tweet_hashtags(acc: &CorrelationAccumulator, class: &str, k: usize) -> Vec<String> {
    if acc.n < 2 {
        return Vec::new();
    }
    let scored = acc
        .hashtags()
        .map(|tag| (tag.to_string(), acc.class_phi_score(class, tag)))
        .filter(|(_, s)| !s.degenerate())
        .collect();
    top_k(scored, k)
}

/// Top k candidates by hashtag-hashtag correlation with `anchor`;
/// degenerate scores are excluded.
pub fn select_correlated(
    candidates: &BTreeSet<String>,
    anchor: &str,
    acc: &CorrelationAccumulator,
    k: usize,
) -> BTreeSet<String> {
    if acc.n < 2 {
        return BTreeSet::new();
    }
    let scored = candidates
        .iter()
        .map(|tag| (tag.clone(), acc.pair_phi_score(anchor, tag)))
        .filter(|(_, s)| !s.degenerate())
        .collect();
    top_k(scored, k).into_iter().collect()
}

/// The hybrid combination: H1 = H_c ∩ H_T anchors the selection of further
/// tweet hashtags k-correlated with each anchor, and the result is H1 ∪ H2.
pub fn hybrid_hashtags_fig1(
    h_c: &BTreeSet<String>,
    h_t: &BTreeSet<String>,
    acc: &CorrelationAccumulator,
    k: usize,
) -> BTreeSet<String> {
    let h1: BTreeSet<String> = h_c.intersection(h_t).cloned().collect();
    let candidates: BTreeSet<String> = h_t.difference(h_c).cloned().collect();
    let mut h2 = BTreeSet::new();
    for anchor in &h1 {
        h2.extend(select_correlated(&candidates, anchor, acc, k));
    }
    h1.union(&h2).cloned().collect()
}

/// Per-class view of the evolving hashtag sets.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassHybrid {
    /// H_c: ontology-driven hashtags, fixed at construction.
    pub ontology: BTreeSet<String>,
    /// H_T: current top-k tweet hashtags for the class.
    pub tweet_based: BTreeSet<String>,
    /// H1 = H_c ∩ H_T.
    pub strong: BTreeSet<String>,
    /// H2: tweet hashtags selected via anchor correlation.
    pub selected: BTreeSet<String>,
    /// H: the class's current hybrid set under the active rule.
    pub hybrid: BTreeSet<String>,
}

/// All per-class hybrid sets plus the combination rule and k.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridHashtagState {
    per_class: BTreeMap<String, ClassHybrid>,
    k: usize,
    rule: HybridRule,
    /// Union of per-class hybrid sets, cached for feature extraction.
    recognized: BTreeSet<String>,
}

impl HybridHashtagState {
    /// Starts from the ontology-driven sets. Under the union rule the
    /// hybrid sets already equal H_c before any tweet arrives.
    pub fn new(
        ontology_sets: BTreeMap<String, BTreeSet<String>>,
        k: usize,
        rule: HybridRule,
    ) -> Self {
        let per_class = ontology_sets
            .into_iter()
            .map(|(class, ontology)| {
                let hybrid = match rule {
                    HybridRule::Fig1Strict => BTreeSet::new(),
                    HybridRule::UnionWithHc => ontology.clone(),
                };
                (
                    class,
                    ClassHybrid {
                        ontology,
                        hybrid,
                        ..ClassHybrid::default()
                    },
                )
            })
            .collect();
        let mut state = HybridHashtagState {
            per_class,
            k,
            rule,
            recognized: BTreeSet::new(),
        };
        state.refresh_recognized();
        state
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rule(&self) -> HybridRule {
        self.rule
    }

    pub fn class(&self, name: &str) -> Option<&ClassHybrid> {
        self.per_class.get(name)
    }

    pub fn classes(&self) -> impl Iterator<Item = (&String, &ClassHybrid)> {
        self.per_class.iter()
    }

    /// Union of the per-class hybrid sets: the hashtags the feature
    /// extractor currently recognizes.
    pub fn recognized(&self) -> &BTreeSet<String> {
        &self.recognized
    }

    fn refresh_recognized(&mut self) {
        self.recognized = self
            .per_class
            .values()
            .flat_map(|c| c.hybrid.iter().cloned())
            .collect();
    }

    /// Recomputes H_T, H1, H2 and H for every class from the accumulator,
    /// then re-anchors the accumulator's pair tracking on the union of H1.
    pub fn update(&mut self, acc: &mut CorrelationAccumulator) {
        let mut all_anchors = BTreeSet::new();
        for (class, entry) in self.per_class.iter_mut() {
            entry.tweet_based = topk_tweet_hashtags(acc, class, self.k).into_iter().collect();
            entry.strong = entry
                .ontology
                .intersection(&entry.tweet_based)
                .cloned()
                .collect();
            let candidates: BTreeSet<String> = entry
                .tweet_based
                .difference(&entry.ontology)
                .cloned()
                .collect();
            entry.selected.clear();
            for anchor in &entry.strong {
                entry
                    .selected
                    .extend(select_correlated(&candidates, anchor, acc, self.k));
            }
            entry.hybrid = entry.strong.union(&entry.selected).cloned().collect();
            if self.rule == HybridRule::UnionWithHc {
                entry.hybrid.extend(entry.ontology.iter().cloned());
            }
            all_anchors.extend(entry.strong.iter().cloned());
        }
        acc.set_anchors(&all_anchors);
        self.refresh_recognized();
    }
}

/// Feature tokens for one tweet under a mode. Hashtag features carry a `#`
/// prefix so the word and hashtag namespaces never collide.
pub fn feature_vector(
    tweet: &TokenizedTweet,
    mode: FeatureMode,
    state: &HybridHashtagState,
) -> BTreeSet<String> {
    let words = || tweet.words.iter().cloned();
    let tags = || tweet.hashtags.iter().map(|h| format!("#{h}"));
    match mode {
        FeatureMode::WordsOnly => words().collect(),
        FeatureMode::WordsAndTweetHashtags => words().chain(tags()).collect(),
        FeatureMode::TweetHashtagsOnly => tags().collect(),
        FeatureMode::HybridHashtags => tweet
            .hashtags
            .iter()
            .filter(|h| state.recognized().contains(*h))
            .map(|h| format!("#{h}"))
            .collect(),
    }
}

/// JSON snapshot of all counts and current hybrid sets.
pub fn snapshot_json(
    acc: &CorrelationAccumulator,
    state: &HybridHashtagState,
) -> serde_json::Value {
    serde_json::json!({
        "accumulator": acc,
        "hybrid_state": state,
    })
}

/// The feature half of the online loop: extracts the feature vector for a
/// tweet under the current state, then folds the tweet into the statistics,
/// refreshing the hybrid sets every `update_every` tweets.
#[derive(Debug, Clone)]
pub struct FeatureStage {
    pub acc: CorrelationAccumulator,
    pub state: HybridHashtagState,
    pub mode: FeatureMode,
    update_every: u64,
    seen: u64,
}

impl FeatureStage {
    pub fn new(state: HybridHashtagState, mode: FeatureMode, update_every: u64) -> Self {
        FeatureStage {
            acc: CorrelationAccumulator::new(),
            state,
            mode,
            update_every: update_every.max(1),
            seen: 0,
        }
    }

    pub fn extract(&mut self, tweet: &TokenizedTweet) -> BTreeSet<String> {
        let features = feature_vector(tweet, self.mode, &self.state);
        self.acc.observe(tweet);
        self.seen += 1;
        if self.seen % self.update_every == 0 {
            self.state.update(&mut self.acc);
        }
        features
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tok(label: &str, tags: &[&str]) -> TokenizedTweet {
        TokenizedTweet {
            tweet_id: 0,
            label: label.into(),
            words: vec![],
            hashtags: tags.iter().map(|t| t.to_string()).collect(),
        }
    }

    fn set(tags: &[&str]) -> BTreeSet<String> {
        tags.iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn observe_single_tweet() {
        let mut acc = CorrelationAccumulator::new();
        acc.observe(&tok("sport", &["nba"]));
        assert_eq!(acc.n(), 1);
        assert_eq!(acc.class_count("sport"), 1);
        assert_eq!(acc.hashtag_count("nba"), 1);
        assert_eq!(acc.class_hashtag_count("sport", "nba"), 1);
    }

    #[test]
    fn duplicate_hashtag_counts_once() {
        let mut acc = CorrelationAccumulator::new();
        acc.observe(&tok("sport", &["nba", "nba"]));
        assert_eq!(acc.hashtag_count("nba"), 1);
    }

    #[test]
    fn no_hashtags_only_bumps_class_counts() {
        let mut acc = CorrelationAccumulator::new();
        acc.observe(&tok("sport", &[]));
        assert_eq!(acc.n(), 1);
        assert_eq!(acc.class_count("sport"), 1);
        assert_eq!(acc.hashtags().count(), 0);
    }

    #[test]
    fn phi_identical_indicators() {
        let mut acc = CorrelationAccumulator::new();
        acc.observe(&tok("a", &["h"]));
        acc.observe(&tok("a", &["h"]));
        acc.observe(&tok("b", &[]));
        acc.observe(&tok("b", &[]));
        let c = acc.phi_corr::<f64>("a", "h").unwrap();
        assert_abs_diff_eq!(c.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn phi_complementary_indicators() {
        let mut acc = CorrelationAccumulator::new();
        acc.observe(&tok("a", &[]));
        acc.observe(&tok("a", &[]));
        acc.observe(&tok("b", &["h"]));
        acc.observe(&tok("b", &["h"]));
        let c = acc.phi_corr::<f64>("a", "h").unwrap();
        assert_abs_diff_eq!(c.value, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn phi_worked_value() {
        // n=4, n_c=2, n_h=1, n_ch=1 -> 2/sqrt(12)
        let mut acc = CorrelationAccumulator::new();
        acc.observe(&tok("a", &["h"]));
        acc.observe(&tok("a", &[]));
        acc.observe(&tok("b", &[]));
        acc.observe(&tok("b", &[]));
        let c = acc.phi_corr::<f64>("a", "h").unwrap();
        assert_abs_diff_eq!(c.value, 2.0 / 12f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn phi_undefined_below_two_samples() {
        let mut acc = CorrelationAccumulator::new();
        acc.observe(&tok("a", &["h"]));
        assert!(acc.phi_corr::<f64>("a", "h").is_err());
    }

    #[test]
    fn phi_degenerate_flags_zero() {
        let mut acc = CorrelationAccumulator::new();
        acc.observe(&tok("a", &["h"]));
        acc.observe(&tok("a", &["h"]));
        // every tweet is class a and carries h: both factors degenerate
        let c = acc.phi_corr::<f64>("a", "h").unwrap();
        assert_eq!(c.value, 0.0);
        assert!(c.degenerate);
    }

    fn ranked_acc() -> CorrelationAccumulator {
        // a: strongly sport, b: weakly sport, c: anti-sport
        let mut acc = CorrelationAccumulator::new();
        acc.observe(&tok("sport", &["a", "b"]));
        acc.observe(&tok("sport", &["a"]));
        acc.observe(&tok("sport", &["a", "b", "c"]));
        acc.observe(&tok("ent", &["c"]));
        acc.observe(&tok("ent", &["c", "b"]));
        acc.observe(&tok("ent", &[]));
        acc
    }

    #[test]
    fn topk_orders_by_score() {
        let acc = ranked_acc();
        assert_eq!(topk_tweet_hashtags(&acc, "sport", 2), vec!["a", "b"]);
        assert_eq!(topk_tweet_hashtags(&acc, "sport", 10).len(), 3);
    }

    #[test]
    fn topk_tie_breaks_lexicographically() {
        let mut acc = CorrelationAccumulator::new();
        acc.observe(&tok("sport", &["x", "y"]));
        acc.observe(&tok("ent", &[]));
        // x and y have identical counts, hence identical scores
        assert_eq!(topk_tweet_hashtags(&acc, "sport", 1), vec!["x"]);
    }

    #[test]
    fn topk_empty_when_undefined() {
        let mut acc = CorrelationAccumulator::new();
        acc.observe(&tok("sport", &["x"]));
        assert!(topk_tweet_hashtags(&acc, "sport", 3).is_empty());
    }

    fn anchored_acc() -> CorrelationAccumulator {
        let mut acc = CorrelationAccumulator::new();
        acc.set_anchors(&set(&["b"]));
        acc.observe(&tok("s", &["b", "c"]));
        acc.observe(&tok("s", &["b", "c"]));
        acc.observe(&tok("s", &["b", "d"]));
        acc.observe(&tok("s", &["d"]));
        acc
    }

    #[test]
    fn select_top1_by_anchor_correlation() {
        let acc = anchored_acc();
        let picked = select_correlated(&set(&["c", "d"]), "b", &acc, 1);
        assert_eq!(picked, set(&["c"]));
    }

    #[test]
    fn select_empty_candidates() {
        let acc = anchored_acc();
        assert!(select_correlated(&BTreeSet::new(), "b", &acc, 3).is_empty());
    }

    #[test]
    fn select_exhausts_candidates() {
        let acc = anchored_acc();
        let picked = select_correlated(&set(&["c", "d"]), "b", &acc, 5);
        assert_eq!(picked, set(&["c", "d"]));
    }

    #[test]
    fn fig1_worked_example() {
        let acc = anchored_acc();
        let h = hybrid_hashtags_fig1(&set(&["a", "b"]), &set(&["b", "c", "d"]), &acc, 1);
        assert_eq!(h, set(&["b", "c"]));
    }

    #[test]
    fn fig1_empty_intersection() {
        let acc = anchored_acc();
        let h = hybrid_hashtags_fig1(&set(&["a"]), &set(&["b"]), &acc, 2);
        assert!(h.is_empty());
    }

    #[test]
    fn fig1_identical_sets() {
        let acc = anchored_acc();
        let h = hybrid_hashtags_fig1(&set(&["b"]), &set(&["b"]), &acc, 2);
        assert_eq!(h, set(&["b"]));
    }

    #[test]
    fn cold_start_sets() {
        let ontology = BTreeMap::from([("sport".to_string(), set(&["nba"]))]);
        let strict = HybridHashtagState::new(ontology.clone(), 2, HybridRule::Fig1Strict);
        assert!(strict.recognized().is_empty());
        let union = HybridHashtagState::new(ontology, 2, HybridRule::UnionWithHc);
        assert_eq!(union.recognized(), &set(&["nba"]));
    }

    #[test]
    fn update_promotes_ontology_tag_to_strong() {
        let ontology = BTreeMap::from([
            ("sport".to_string(), set(&["nba"])),
            ("ent".to_string(), set(&["oscars"])),
        ]);
        let mut state = HybridHashtagState::new(ontology, 2, HybridRule::Fig1Strict);
        let mut acc = CorrelationAccumulator::new();
        for _ in 0..5 {
            acc.observe(&tok("sport", &["nba"]));
            acc.observe(&tok("ent", &["oscars"]));
        }
        state.update(&mut acc);
        assert!(state.class("sport").unwrap().strong.contains("nba"));
        assert!(state.recognized().contains("nba"));
        assert_eq!(acc.anchors(), set(&["nba", "oscars"]));
    }

    #[test]
    fn observe_is_permutation_invariant_at_count_level() {
        let tweets = [
            tok("a", &["x", "y"]),
            tok("b", &["y"]),
            tok("a", &[]),
            tok("b", &["x", "z"]),
        ];
        let mut fwd = CorrelationAccumulator::new();
        let mut rev = CorrelationAccumulator::new();
        for t in &tweets {
            fwd.observe(t);
        }
        for t in tweets.iter().rev() {
            rev.observe(t);
        }
        assert_eq!(fwd, rev);
    }

    #[test]
    fn merge_equals_sequential_observation() {
        let tweets: Vec<TokenizedTweet> = (0..20)
            .map(|i| {
                tok(
                    if i % 2 == 0 { "a" } else { "b" },
                    if i % 3 == 0 { &["x", "y"][..] } else { &["y"][..] },
                )
            })
            .collect();
        let mut whole = CorrelationAccumulator::new();
        let mut left = CorrelationAccumulator::new();
        let mut right = CorrelationAccumulator::new();
        for (i, t) in tweets.iter().enumerate() {
            whole.observe(t);
            if i < 10 {
                left.observe(t);
            } else {
                right.observe(t);
            }
        }
        left.merge(&right);
        assert_eq!(left, whole);
    }

    #[test]
    fn feature_vectors_per_mode() {
        let ontology = BTreeMap::from([("sport".to_string(), set(&["nba"]))]);
        let state = HybridHashtagState::new(ontology, 2, HybridRule::UnionWithHc);
        let t = TokenizedTweet {
            tweet_id: 1,
            label: "sport".into(),
            words: vec!["play".into()],
            hashtags: vec!["nba".into(), "lol".into()],
        };
        assert_eq!(
            feature_vector(&t, FeatureMode::WordsOnly, &state),
            set(&["play"])
        );
        assert_eq!(
            feature_vector(&t, FeatureMode::WordsAndTweetHashtags, &state),
            set(&["play", "#nba", "#lol"])
        );
        assert_eq!(
            feature_vector(&t, FeatureMode::TweetHashtagsOnly, &state),
            set(&["#nba", "#lol"])
        );
        assert_eq!(
            feature_vector(&t, FeatureMode::HybridHashtags, &state),
            set(&["#nba"])
        );
        let unrecognized = TokenizedTweet {
            hashtags: vec!["lol".into()],
            ..t
        };
        assert!(feature_vector(&unrecognized, FeatureMode::HybridHashtags, &state).is_empty());
    }

    #[test]
    fn monotone_count_bound_holds() {
        let acc = ranked_acc();
        for class in ["sport", "ent"] {
            for tag in ["a", "b", "c"] {
                let n_ch = acc.class_hashtag_count(class, tag);
                assert!(n_ch <= acc.class_count(class).min(acc.hashtag_count(tag)));
            }
        }
    }
}
