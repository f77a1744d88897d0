//! Topic ontology plus concept-to-hashtag frequency tables, and the
//! correlation ranking that turns them into per-class ontology-driven
//! hashtag sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::Real;

#[derive(Debug, Error)]
pub enum KnowledgeError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("knowledge base parse error: {0}")]
    Parse(String),
    #[error("concept {concept:?}: {msg}")]
    Schema { concept: String, msg: String },
    #[error("concept {concept:?}: frequency vectors have mismatched lengths")]
    VectorLengthMismatch { concept: String },
    #[error("concept {concept:?} repeats within class {class:?}: concept graph must be acyclic")]
    CyclicConcepts { class: String, concept: String },
    #[error("class {class:?} declares no concepts")]
    EmptyClass { class: String },
    #[error("correlation inputs have different lengths ({left} vs {right})")]
    MismatchedLengths { left: usize, right: usize },
    #[error("correlation needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("k must be >= 1")]
    InvalidK,
}

/// Node of a class's concept tree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConceptNode {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ConceptNode>,
}

/// A topic class and its concept forest.
#[derive(Debug, Clone, Serialize)]
pub struct TopicClass {
    pub name: String,
    pub concepts: Vec<ConceptNode>,
}

/// Frequency data for one leaf concept: the concept's own occurrence vector
/// and one vector per candidate hashtag, all of equal length n >= 2.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConceptEntry {
    #[serde(rename = "self")]
    pub self_vector: Vec<f64>,
    pub hashtags: BTreeMap<String, Vec<f64>>,
}

/// Validated ontology plus frequency tables.
#[derive(Debug, Clone, Serialize)]
pub struct ConceptKnowledgeBase {
    pub classes: Vec<TopicClass>,
    pub table: BTreeMap<String, ConceptEntry>,
}

// Accepts either a single concept node or an array of nodes for a class.
#[derive(Deserialize)]
#[serde(untagged)]
enum ConceptsField {
    One(ConceptNode),
    Many(Vec<ConceptNode>),
}

#[derive(Deserialize)]
struct RawClass {
    name: String,
    concepts: ConceptsField,
}

#[derive(Deserialize)]
struct RawKnowledgeBase {
    classes: Vec<RawClass>,
    table: BTreeMap<String, ConceptEntry>,
}

impl ConceptKnowledgeBase {
    pub fn class_names(&self) -> BTreeSet<String> {
        self.classes.iter().map(|c| c.name.clone()).collect()
    }

    /// Leaf concepts of one class, in tree order.
    pub fn leaf_concepts<'a>(&'a self, class: &TopicClass) -> Vec<&'a str> {
        fn walk<'a>(node: &'a ConceptNode, out: &mut Vec<&'a str>) {
            if node.children.is_empty() {
                out.push(&node.name);
            } else {
                for child in &node.children {
                    walk(child, out);
                }
            }
        }
        let mut out = Vec::new();
        for root in &class.concepts {
            // lifetime: nodes are owned by self through class
            walk(root, &mut out);
        }
        out
    }
}

/// Loads and fully validates a knowledge-base JSON document.
pub fn load_knowledge_base(path: impl AsRef<Path>) -> Result<ConceptKnowledgeBase, KnowledgeError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| KnowledgeError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_knowledge_base(&text)
}

/// See [`load_knowledge_base`]; parses from an in-memory document.
pub fn parse_knowledge_base(text: &str) -> Result<ConceptKnowledgeBase, KnowledgeError> {
    let raw: RawKnowledgeBase =
        serde_json::from_str(text).map_err(|e| KnowledgeError::Parse(e.to_string()))?;
    if raw.classes.is_empty() {
        return Err(KnowledgeError::Parse("no classes declared".into()));
    }
    let classes: Vec<TopicClass> = raw
        .classes
        .into_iter()
        .map(|c| TopicClass {
            name: c.name,
            concepts: match c.concepts {
                ConceptsField::One(node) => vec![node],
                ConceptsField::Many(nodes) => nodes,
            },
        })
        .collect();

    let mut class_names = BTreeSet::new();
    for class in &classes {
        if !class_names.insert(class.name.clone()) {
            return Err(KnowledgeError::Parse(format!(
                "duplicate class name {:?}",
                class.name
            )));
        }
        if class.concepts.is_empty() {
            return Err(KnowledgeError::EmptyClass {
                class: class.name.clone(),
            });
        }
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&ConceptNode> = class.concepts.iter().collect();
        while let Some(node) = stack.pop() {
            if !seen.insert(node.name.as_str()) {
                return Err(KnowledgeError::CyclicConcepts {
                    class: class.name.clone(),
                    concept: node.name.clone(),
                });
            }
            stack.extend(node.children.iter());
        }
    }

    let kb = ConceptKnowledgeBase {
        classes,
        table: raw.table,
    };

    for class in &kb.classes {
        for leaf in kb.leaf_concepts(class) {
            if !kb.table.contains_key(leaf) {
                return Err(KnowledgeError::Schema {
                    concept: leaf.to_string(),
                    msg: "leaf concept has no table entry".into(),
                });
            }
        }
    }
    for (concept, entry) in &kb.table {
        let n = entry.self_vector.len();
        if n < 2 {
            return Err(KnowledgeError::Schema {
                concept: concept.clone(),
                msg: format!("self vector must have length >= 2, got {n}"),
            });
        }
        let check = |v: &[f64]| v.iter().all(|x| x.is_finite() && *x >= 0.0);
        if !check(&entry.self_vector) {
            return Err(KnowledgeError::Schema {
                concept: concept.clone(),
                msg: "self vector has negative or non-finite values".into(),
            });
        }
        for (tag, vec) in &entry.hashtags {
            if vec.len() != n {
                return Err(KnowledgeError::VectorLengthMismatch {
                    concept: concept.clone(),
                });
            }
            if !check(vec) {
                return Err(KnowledgeError::Schema {
                    concept: concept.clone(),
                    msg: format!("hashtag {tag:?} vector has negative or non-finite values"),
                });
            }
            if !tag
                .bytes()
                .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
                || tag.is_empty()
            {
                return Err(KnowledgeError::Schema {
                    concept: concept.clone(),
                    msg: format!("hashtag {tag:?} is not a normalized token"),
                });
            }
        }
    }
    Ok(kb)
}

/// A correlation score plus a degeneracy marker for zero-variance inputs
/// (which score 0 rather than failing).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation<F> {
    pub value: F,
    pub degenerate: bool,
}

/// Sample Pearson correlation of two equal-length vectors.
///
/// Computed as `cov_sum / sqrt(ss_x * ss_y)`, which equals the
/// `(n-1) * S_x * S_y` denominator for sample standard deviations while
/// keeping the worked integer cases exact.
pub fn pearson_corr<F: Real>(x: &[F], y: &[F]) -> Result<Correlation<F>, KnowledgeError> {
    if x.len() != y.len() {
        return Err(KnowledgeError::MismatchedLengths {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n < 2 {
        return Err(KnowledgeError::TooFewSamples(n));
    }
    let count = F::from_count(n as u64);
    let mean = |v: &[F]| v.iter().fold(F::zero(), |a, &b| a + b) / count;
    let mx = mean(x);
    let my = mean(y);
    let mut cov = F::zero();
    let mut ss_x = F::zero();
    let mut ss_y = F::zero();
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mx;
        let dy = yi - my;
        cov = cov + dx * dy;
        ss_x = ss_x + dx * dx;
        ss_y = ss_y + dy * dy;
    }
    if ss_x.is_zero() || ss_y.is_zero() {
        return Ok(Correlation {
            value: F::zero(),
            degenerate: true,
        });
    }
    Ok(Correlation {
        value: cov / (ss_x * ss_y).sqrt(),
        degenerate: false,
    })
}

/// Hashtags of one concept ranked by correlation with the concept's own
/// frequency vector: score descending, ties broken by token.
#[derive(Debug, Clone, Serialize)]
pub struct RankedHashtags {
    pub concept: String,
    pub ranked: Vec<(String, f64)>,
}

pub fn rank_concept_hashtags(
    concept: &str,
    entry: &ConceptEntry,
) -> Result<RankedHashtags, KnowledgeError> {
    let mut ranked: Vec<(String, f64)> = entry
        .hashtags
        .iter()
        .map(|(tag, vec)| {
            pearson_corr::<f64>(&entry.self_vector, vec).map(|c| (tag.clone(), c.value))
        })
        .collect::<Result<_, _>>()?;
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("scores are finite")
            .then_with(|| a.0.cmp(&b.0))
    });
    Ok(RankedHashtags {
        concept: concept.to_string(),
        ranked,
    })
}

/// Per-class ontology-driven hashtag sets: the union over each class's leaf
/// concepts of that concept's top-k hashtags.
pub fn ontology_driven_hashtags(
    kb: &ConceptKnowledgeBase,
    k: usize,
) -> Result<BTreeMap<String, BTreeSet<String>>, KnowledgeError> {
    if k == 0 {
        return Err(KnowledgeError::InvalidK);
    }
    let mut out = BTreeMap::new();
    for class in &kb.classes {
        let mut set = BTreeSet::new();
        for leaf in kb.leaf_concepts(class) {
            let entry = &kb.table[leaf];
            let ranked = rank_concept_hashtags(leaf, entry)?;
            set.extend(ranked.ranked.into_iter().take(k).map(|(tag, _)| tag));
        }
        out.insert(class.name.clone(), set);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn minimal_kb_json() -> String {
        r#"{
            "classes": [
                {"name": "sport", "concepts": {"name": "ball_games", "children": []}},
                {"name": "entertainment", "concepts": [{"name": "movies"}]}
            ],
            "table": {
                "ball_games": {
                    "self": [1.0, 2.0, 3.0],
                    "hashtags": {"nba": [1.0, 2.0, 3.1], "golf": [3.0, 2.0, 1.0]}
                },
                "movies": {
                    "self": [5.0, 1.0, 4.0],
                    "hashtags": {"oscars": [5.0, 1.2, 4.0], "film": [1.0, 1.0, 2.0]}
                }
            }
        }"#
        .to_string()
    }

    #[test]
    fn minimal_kb_loads() {
        let kb = parse_knowledge_base(&minimal_kb_json()).unwrap();
        assert_eq!(kb.classes.len(), 2);
        assert_eq!(kb.table.len(), 2);
    }

    #[test]
    fn vector_length_mismatch_names_concept() {
        let bad = minimal_kb_json().replace("[1.0, 2.0, 3.1]", "[1.0, 2.0, 3.0, 4.0]");
        let err = parse_knowledge_base(&bad).unwrap_err();
        match err {
            KnowledgeError::VectorLengthMismatch { concept } => {
                assert_eq!(concept, "ball_games")
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn class_without_concepts_rejected() {
        let bad = minimal_kb_json().replace(r#"[{"name": "movies"}]"#, "[]");
        let err = parse_knowledge_base(&bad).unwrap_err();
        assert!(matches!(err, KnowledgeError::EmptyClass { .. }), "{err}");
    }

    #[test]
    fn repeated_concept_rejected_as_cycle() {
        let bad = minimal_kb_json().replace(
            r#"{"name": "ball_games", "children": []}"#,
            r#"{"name": "ball_games", "children": [{"name": "ball_games"}]}"#,
        );
        let err = parse_knowledge_base(&bad).unwrap_err();
        assert!(matches!(err, KnowledgeError::CyclicConcepts { .. }), "{err}");
    }

    #[test]
    fn missing_leaf_table_entry_rejected() {
        let bad = minimal_kb_json().replace("\"movies\": {", "\"films\": {");
        let err = parse_knowledge_base(&bad).unwrap_err();
        assert!(matches!(err, KnowledgeError::Schema { .. }), "{err}");
    }

    #[test]
    fn pearson_perfect_positive() {
        let c = pearson_corr::<f64>(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_abs_diff_eq!(c.value, 1.0, epsilon = 1e-12);
        assert!(!c.degenerate);
    }

    #[test]
    fn pearson_perfect_negative() {
        let c = pearson_corr::<f64>(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap();
        assert_abs_diff_eq!(c.value, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn pearson_worked_value_is_exact() {
        let c = pearson_corr::<f64>(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_eq!(c.value, 0.8);
    }

    #[test]
    fn pearson_zero_variance_flags_degenerate() {
        let c = pearson_corr::<f64>(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(c.value, 0.0);
        assert!(c.degenerate);
    }

    #[test]
    fn pearson_length_mismatch_errors() {
        let err = pearson_corr::<f64>(&[1.0, 2.0], &[1.0, 2.0, 3.0]).unwrap_err();
        assert!(matches!(err, KnowledgeError::MismatchedLengths { .. }));
    }

    #[test]
    fn top1_picks_highest_correlated() {
        let kb = parse_knowledge_base(&minimal_kb_json()).unwrap();
        let hc = ontology_driven_hashtags(&kb, 1).unwrap();
        assert_eq!(
            hc["sport"],
            BTreeSet::from(["nba".to_string()]),
            "nba tracks the concept vector, golf anti-correlates"
        );
    }

    #[test]
    fn k_exhausts_candidates() {
        let kb = parse_knowledge_base(&minimal_kb_json()).unwrap();
        let hc = ontology_driven_hashtags(&kb, 10).unwrap();
        assert_eq!(hc["sport"].len(), 2);
        assert_eq!(hc["entertainment"].len(), 2);
    }

    #[test]
    fn union_across_concepts_dedupes() {
        let json = r#"{
            "classes": [{"name": "c", "concepts": [{"name": "a"}, {"name": "b"}]}],
            "table": {
                "a": {"self": [1.0, 2.0], "hashtags": {"x": [1.0, 2.0]}},
                "b": {"self": [1.0, 2.0], "hashtags": {"x": [2.0, 4.0]}}
            }
        }"#;
        let kb = parse_knowledge_base(json).unwrap();
        let hc = ontology_driven_hashtags(&kb, 1).unwrap();
        assert_eq!(hc["c"], BTreeSet::from(["x".to_string()]));
    }

    proptest! {
        #[test]
        fn self_correlation_is_one(v in proptest::collection::vec(-1e3..1e3f64, 2..20)) {
            let c = pearson_corr::<f64>(&v, &v).unwrap();
            if !c.degenerate {
                prop_assert!((c.value - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn symmetric_and_bounded(
            x in proptest::collection::vec(-1e3..1e3f64, 2..20),
            y in proptest::collection::vec(-1e3..1e3f64, 2..20),
        ) {
            let n = x.len().min(y.len());
            let (x, y) = (&x[..n], &y[..n]);
            let a = pearson_corr::<f64>(x, y).unwrap();
            let b = pearson_corr::<f64>(y, x).unwrap();
            prop_assert_eq!(a.degenerate, b.degenerate);
            prop_assert!((a.value - b.value).abs() < 1e-12);
            prop_assert!(a.value.abs() <= 1.0 + 1e-12);
        }

        #[test]
        fn affine_rescaling_preserves_scores(
            x in proptest::collection::vec(-1e3..1e3f64, 2..20),
            a in 0.01..100.0f64,
            b in -1e3..1e3f64,
        ) {
            let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            let base = pearson_corr::<f64>(&x, &x).unwrap();
            let scaled = pearson_corr::<f64>(&x, &y).unwrap();
            prop_assert_eq!(base.degenerate, scaled.degenerate);
            if !base.degenerate {
                prop_assert!((scaled.value - base.value).abs() < 1e-9);
            }
        }
    }
}
