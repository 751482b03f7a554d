//! Turning relevance judgments into training data, and measuring a model
//! against them.
//!
//! Judgments file: one `query<TAB>doc_id<TAB>label` per line, label `0` or
//! `1`. Blank lines and lines starting with `#` are ignored.

use std::fs;
use std::path::Path;

use crate::corpus::InvertedIndex;
use crate::error::{Error, Result};
use crate::neural::{error, Network, TrainingExample};
use crate::query::build_syntax_tree;
use crate::scoring::{semantic_score, syntactic_score};

/// Probability at or above which a prediction counts as "relevant".
pub const DECISION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgment {
    pub query: String,
    pub doc_id: String,
    pub relevant: bool,
}

impl Judgment {
    pub fn new(query: impl Into<String>, doc_id: impl Into<String>, relevant: bool) -> Self {
        Self {
            query: query.into(),
            doc_id: doc_id.into(),
            relevant,
        }
    }

    pub fn label(&self) -> f64 {
        if self.relevant {
            1.0
        } else {
            0.0
        }
    }
}

pub fn parse_judgments(text: &str) -> Result<Vec<Judgment>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [query, doc_id, label] = fields[..] else {
            return Err(Error::data(format!(
                "judgments line {lineno}: expected 3 tab-separated fields, found {}",
                fields.len()
            )));
        };
        let relevant = match label.trim() {
            "1" => true,
            "0" => false,
            other => {
                return Err(Error::data(format!(
                    "judgments line {lineno}: label must be 0 or 1, found `{other}`"
                )))
            }
        };
        if build_syntax_tree(query).is_err() {
            return Err(Error::data(format!(
                "judgments line {lineno}: query has no tokens"
            )));
        }
        out.push(Judgment::new(query, doc_id.trim(), relevant));
    }
    Ok(out)
}

pub fn parse_judgments_file(path: impl AsRef<Path>) -> Result<Vec<Judgment>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_judgments(&text)
}

/// One example per judgment, in order: features `[syntactic, semantic]`,
/// desired `[label]`. Documents that are not syntactic candidates are kept
/// with syntactic score 0.
pub fn judgments_to_examples(
    judgments: &[Judgment],
    index: &InvertedIndex,
) -> Result<Vec<TrainingExample>> {
    judgments
        .iter()
        .map(|j| {
            let doc = index.doc(&j.doc_id).ok_or_else(|| {
                Error::data(format!("judgment names unknown document `{}`", j.doc_id))
            })?;
            let tree = build_syntax_tree(&j.query)
                .map_err(|_| Error::data(format!("judgment query `{}` has no tokens", j.query)))?;
            Ok(TrainingExample::new(
                vec![
                    syntactic_score(&tree, doc),
                    semantic_score(&tree, &doc.meta),
                ],
                vec![j.label()],
            ))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub count: usize,
    pub mean_error: f64,
    /// Fraction of judgments where `probability >= 0.5` agrees with the label.
    pub accuracy: f64,
}

pub fn evaluate_examples(net: &Network, examples: &[TrainingExample]) -> Result<EvalReport> {
    if examples.is_empty() {
        return Err(Error::contract("cannot evaluate on zero judgments"));
    }
    let mut total_error = 0.0;
    let mut correct = 0usize;
    for ex in examples {
        let out = net.predict(&ex.features)?;
        total_error += error(&out, &ex.desired)?;
        let predicted = out[0] >= DECISION_THRESHOLD;
        let actual = ex.desired[0] >= DECISION_THRESHOLD;
        if predicted == actual {
            correct += 1;
        }
    }
    let n = examples.len() as f64;
    Ok(EvalReport {
        count: examples.len(),
        mean_error: total_error / n,
        accuracy: correct as f64 / n,
    })
}

pub fn evaluate(
    net: &Network,
    judgments: &[Judgment],
    index: &InvertedIndex,
) -> Result<EvalReport> {
    if judgments.is_empty() {
        return Err(Error::contract("cannot evaluate on zero judgments"));
    }
    evaluate_examples(net, &judgments_to_examples(judgments, index)?)
}
