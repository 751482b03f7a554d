//! First-level analysis: syntactic candidate generation and the two
//! per-candidate accuracies that feed the neural ranker.

use std::collections::BTreeSet;

use crate::corpus::{Document, InvertedIndex, MetaRecord};
use crate::query::{tokenize, QuerySyntaxTree};

/// Concept tags with at least this weight count as metadata terms.
pub const CONCEPT_WEIGHT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateFeatures {
    pub doc_id: String,
    pub syntactic: f64,
    pub semantic: f64,
}

impl CandidateFeatures {
    pub fn as_input(&self) -> [f64; 2] {
        [self.syntactic, self.semantic]
    }
}

/// Documents whose body contains at least one leaf token.
pub fn syntactic_candidates(tree: &QuerySyntaxTree, index: &InvertedIndex) -> BTreeSet<String> {
    tree.distinct_leaves()
        .into_iter()
        .flat_map(|leaf| index.posting_list(leaf))
        .map(|p| p.doc.clone())
        .collect()
}

/// Fraction of distinct leaf tokens that occur in the document body.
pub fn syntactic_score(tree: &QuerySyntaxTree, doc: &Document) -> f64 {
    let leaves = tree.distinct_leaves();
    if leaves.is_empty() {
        return 0.0;
    }
    let body: BTreeSet<String> = tokenize(&doc.body).into_iter().collect();
    let matched = leaves.iter().filter(|leaf| body.contains(**leaf)).count();
    matched as f64 / leaves.len() as f64
}

/// Keywords plus concept tags at or above [`CONCEPT_WEIGHT_THRESHOLD`].
pub fn metadata_terms(meta: &MetaRecord) -> BTreeSet<&str> {
    meta.keywords()
        .iter()
        .map(String::as_str)
        .chain(
            meta.concepts()
                .iter()
                .filter(|(_, &w)| w >= CONCEPT_WEIGHT_THRESHOLD)
                .map(|(tag, _)| tag.as_str()),
        )
        .collect()
}

/// Jaccard overlap between the query's distinct leaves and the metadata
/// terms. Zero when both sets are empty.
pub fn semantic_score(tree: &QuerySyntaxTree, meta: &MetaRecord) -> f64 {
    let query = tree.distinct_leaves();
    let terms = metadata_terms(meta);
    let union = query.union(&terms).count();
    if union == 0 {
        return 0.0;
    }
    query.intersection(&terms).count() as f64 / union as f64
}

/// Scores every syntactic candidate, ascending by document id.
pub fn analyze(tree: &QuerySyntaxTree, index: &InvertedIndex) -> Vec<CandidateFeatures> {
    syntactic_candidates(tree, index)
        .into_iter()
        .filter_map(|id| index.doc(&id))
        .map(|doc| CandidateFeatures {
            doc_id: doc.id.clone(),
            syntactic: syntactic_score(tree, doc),
            semantic: semantic_score(tree, &doc.meta),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_index;
    use crate::query::build_syntax_tree;

    fn meta(keywords: &[&str]) -> MetaRecord {
        MetaRecord::new(keywords.iter().copied(), std::iter::empty::<(&str, f64)>()).unwrap()
    }

    fn tree(q: &str) -> QuerySyntaxTree {
        build_syntax_tree(q).unwrap()
    }

    fn small_index() -> InvertedIndex {
        build_index(vec![
            Document::new("d1", "semantic web", meta(&[])),
            Document::new("d2", "cooking", meta(&[])),
        ])
        .unwrap()
    }

    #[test]
    fn candidates_use_or_semantics() {
        let index = small_index();
        let got: Vec<_> = syntactic_candidates(&tree("semantic web mining"), &index)
            .into_iter()
            .collect();
        assert_eq!(got, ["d1"]);
        assert!(syntactic_candidates(&tree("ontology"), &index).is_empty());

        let all = build_index(vec![
            Document::new("a", "web x", meta(&[])),
            Document::new("b", "y web", meta(&[])),
        ])
        .unwrap();
        assert_eq!(syntactic_candidates(&tree("web"), &all).len(), 2);
    }

    #[test]
    fn syntactic_coverage() {
        let q = tree("semantic web mining");
        assert_eq!(
            syntactic_score(
                &q,
                &Document::new("x", "mining the semantic web", meta(&[]))
            ),
            1.0
        );
        assert_eq!(
            syntactic_score(&q, &Document::new("x", "web only", meta(&[]))),
            1.0 / 3.0
        );
        assert_eq!(syntactic_score(&q, &Document::new("x", "", meta(&[]))), 0.0);
    }

    #[test]
    fn repeated_leaves_count_once() {
        let q = tree("web web mining");
        assert_eq!(
            syntactic_score(&q, &Document::new("x", "web", meta(&[]))),
            0.5
        );
    }

    #[test]
    fn semantic_jaccard() {
        let q = tree("semantic web mining");
        assert_eq!(
            semantic_score(&q, &meta(&["semantic", "web", "mining"])),
            1.0
        );
        assert_eq!(semantic_score(&q, &meta(&["web", "ontology"])), 0.25);
        assert_eq!(semantic_score(&q, &meta(&[])), 0.0);
    }

    #[test]
    fn concept_threshold_is_inclusive() {
        let q = tree("ontology");
        let at = MetaRecord::new(Vec::<&str>::new(), [("ontology", 0.5)]).unwrap();
        let below = MetaRecord::new(Vec::<&str>::new(), [("ontology", 0.49)]).unwrap();
        assert_eq!(semantic_score(&q, &at), 1.0);
        assert_eq!(semantic_score(&q, &below), 0.0);
    }

    #[test]
    fn analyze_outputs() {
        let index = small_index();
        assert!(analyze(&tree("ontology"), &index).is_empty());

        let full = build_index(vec![Document::new(
            "d1",
            "semantic web mining",
            meta(&["semantic", "web", "mining"]),
        )])
        .unwrap();
        assert_eq!(
            analyze(&tree("semantic web mining"), &full),
            [CandidateFeatures {
                doc_id: "d1".into(),
                syntactic: 1.0,
                semantic: 1.0
            }]
        );

        let got = analyze(&tree("semantic"), &index);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].semantic, 0.0);
        assert!(got[0].syntactic > 0.0);
    }
}
