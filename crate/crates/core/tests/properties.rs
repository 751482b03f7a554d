use std::collections::BTreeSet;

use proptest::prelude::*;

use pswm_core::corpus::{build_index, Document, MetaRecord};
use pswm_core::query::{build_syntax_tree, tokenize};
use pswm_core::scoring::{analyze, semantic_score, syntactic_candidates, syntactic_score};

const VOCAB: &[&str] = &[
    "semantic", "web", "mining", "data", "ontology", "neural", "net", "x1",
];

fn text(max: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(VOCAB), 0..max).prop_map(|w| w.join(" "))
}

fn corpus() -> impl Strategy<Value = Vec<Document>> {
    prop::collection::vec(
        (
            text(10),
            prop::collection::vec(prop::sample::select(VOCAB), 0..3),
        ),
        0..8,
    )
    .prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (body, kw))| {
                Document::new(
                    format!("d{i:02}"),
                    body,
                    MetaRecord::new(kw, std::iter::empty::<(&str, f64)>()).unwrap(),
                )
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn postings_cover_every_token(docs in corpus()) {
        let total: usize = docs.iter().map(|d| tokenize(&d.body).len()).sum();
        let index = build_index(docs.clone()).unwrap();
        let indexed: u32 = index.postings().values().flatten().map(|p| p.tf).sum();
        prop_assert_eq!(indexed as usize, total);
        for doc in &docs {
            for token in tokenize(&doc.body) {
                let count = tokenize(&doc.body).iter().filter(|t| **t == token).count();
                let entries: Vec<_> = index.posting_list(&token).iter().filter(|p| p.doc == doc.id).collect();
                prop_assert_eq!(entries.len(), 1);
                prop_assert_eq!(entries[0].tf as usize, count);
            }
        }
        prop_assert_eq!(index.doc_count(), docs.len());
    }

    #[test]
    fn build_ignores_input_order(docs in corpus(), seed in any::<u64>()) {
        let mut shuffled = docs.clone();
        let n = shuffled.len();
        if n > 1 {
            shuffled.rotate_left((seed % n as u64) as usize);
            shuffled.reverse();
        }
        prop_assert_eq!(build_index(docs).unwrap(), build_index(shuffled).unwrap());
    }

    #[test]
    fn candidates_are_exactly_positive_syntactic(docs in corpus(), q in text(4)) {
        let Ok(tree) = build_syntax_tree(&q) else { return Ok(()) };
        let index = build_index(docs).unwrap();
        let candidates = syntactic_candidates(&tree, &index);
        for doc in index.docs().values() {
            prop_assert_eq!(candidates.contains(&doc.id), syntactic_score(&tree, doc) > 0.0);
        }
        let features = analyze(&tree, &index);
        let ids: Vec<&str> = features.iter().map(|f| f.doc_id.as_str()).collect();
        let sorted: Vec<&str> = ids.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        prop_assert_eq!(ids, sorted);
        for f in &features {
            prop_assert!(f.syntactic > 0.0 && f.syntactic <= 1.0);
            prop_assert!((0.0..=1.0).contains(&f.semantic));
        }
    }

    #[test]
    fn adding_a_matching_leaf_never_lowers_hits(body in text(10), q in text(4), extra in prop::sample::select(VOCAB)) {
        let Ok(tree) = build_syntax_tree(&q) else { return Ok(()) };
        let doc = Document::new("d", body.clone(), MetaRecord::default());
        let hits = |t: &pswm_core::query::QuerySyntaxTree| {
            (syntactic_score(t, &doc) * t.distinct_leaves().len() as f64).round() as usize
        };
        let longer = build_syntax_tree(&format!("{q} {extra}")).unwrap();
        if tokenize(&body).iter().any(|t| t == extra) {
            prop_assert!(hits(&longer) >= hits(&tree));
        }
    }

    #[test]
    fn semantic_score_is_symmetric(a in text(5), b in text(5)) {
        let (Ok(ta), Ok(tb)) = (build_syntax_tree(&a), build_syntax_tree(&b)) else { return Ok(()) };
        let ma = MetaRecord::new(tokenize(&a), std::iter::empty::<(&str, f64)>()).unwrap();
        let mb = MetaRecord::new(tokenize(&b), std::iter::empty::<(&str, f64)>()).unwrap();
        let ab = semantic_score(&ta, &mb);
        prop_assert_eq!(ab, semantic_score(&tb, &ma));
        let same: BTreeSet<String> = tokenize(&a).into_iter().collect();
        let other: BTreeSet<String> = tokenize(&b).into_iter().collect();
        prop_assert_eq!(ab == 1.0, same == other);
    }
}
