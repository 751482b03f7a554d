//! Probability attachment, result formatting and rendering.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::corpus::InvertedIndex;
use crate::error::{Error, Result};
use crate::neural::Network;
use crate::query::build_syntax_tree;
use crate::scoring::{analyze, CandidateFeatures};

pub const DEFAULT_CUTOFF: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct RankedResult {
    pub doc_id: String,
    pub syntactic: f64,
    pub semantic: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultPage {
    pub query: String,
    pub results: Vec<RankedResult>,
    pub cutoff: f64,
    pub total_candidates: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputMode {
    Text,
    Machine,
}

/// Labels each candidate with the network output for
/// `[syntactic, semantic]`, preserving candidate order.
pub fn attach_probabilities(
    candidates: &[CandidateFeatures],
    net: &Network,
) -> Result<Vec<RankedResult>> {
    if net.input_size() != 2 || net.output_size() != 1 {
        return Err(Error::contract(format!(
            "ranking network must map 2 features to 1 probability, got {:?}",
            net.layer_sizes()
        )));
    }
    candidates
        .iter()
        .map(|c| {
            let out = net.predict(&c.as_input())?;
            Ok(RankedResult {
                doc_id: c.doc_id.clone(),
                syntactic: c.syntactic,
                semantic: c.semantic,
                probability: out[0],
            })
        })
        .collect()
}

/// Probability descending, then doc id ascending.
pub fn result_order(a: &RankedResult, b: &RankedResult) -> Ordering {
    b.probability
        .total_cmp(&a.probability)
        .then_with(|| a.doc_id.cmp(&b.doc_id))
}

/// Keeps results with `probability >= cutoff`, sorts them and truncates to
/// `top_k` when given.
pub fn format_results(
    query: &str,
    ranked: Vec<RankedResult>,
    cutoff: f64,
    top_k: Option<usize>,
) -> ResultPage {
    let total_candidates = ranked.len();
    let mut results: Vec<RankedResult> = ranked
        .into_iter()
        .filter(|r| r.probability >= cutoff)
        .collect();
    results.sort_by(result_order);
    if let Some(k) = top_k {
        results.truncate(k);
    }
    ResultPage {
        query: query.to_owned(),
        results,
        cutoff,
        total_candidates,
    }
}

/// Runs the whole pipeline for one query.
pub fn search(
    index: &InvertedIndex,
    net: &Network,
    query: &str,
    cutoff: f64,
    top_k: Option<usize>,
) -> Result<ResultPage> {
    let tree = build_syntax_tree(query)?;
    let candidates = analyze(&tree, index);
    let ranked = attach_probabilities(&candidates, net)?;
    Ok(format_results(query, ranked, cutoff, top_k))
}

#[derive(Serialize, Deserialize)]
struct MachinePage {
    query: String,
    cutoff: f64,
    total_candidates: usize,
    results: Vec<MachineResult>,
}

#[derive(Serialize, Deserialize)]
struct MachineResult {
    rank: usize,
    doc_id: String,
    probability: f64,
    syntactic: f64,
    semantic: f64,
}

impl ResultPage {
    pub fn to_machine(&self) -> String {
        let page = MachinePage {
            query: self.query.clone(),
            cutoff: self.cutoff,
            total_candidates: self.total_candidates,
            results: self
                .results
                .iter()
                .enumerate()
                .map(|(i, r)| MachineResult {
                    rank: i + 1,
                    doc_id: r.doc_id.clone(),
                    probability: r.probability,
                    syntactic: r.syntactic,
                    semantic: r.semantic,
                })
                .collect(),
        };
        serde_json::to_string(&page).expect("result pages always serialize")
    }

    pub fn from_machine(text: &str) -> Result<Self> {
        let page: MachinePage =
            serde_json::from_str(text).map_err(|e| Error::data(format!("result page: {e}")))?;
        for (i, r) in page.results.iter().enumerate() {
            if r.rank != i + 1 {
                return Err(Error::data(format!("result {i} has rank {}", r.rank)));
            }
        }
        Ok(Self {
            query: page.query,
            cutoff: page.cutoff,
            total_candidates: page.total_candidates,
            results: page
                .results
                .into_iter()
                .map(|r| RankedResult {
                    doc_id: r.doc_id,
                    syntactic: r.syntactic,
                    semantic: r.semantic,
                    probability: r.probability,
                })
                .collect(),
        })
    }

    pub fn to_text(&self) -> String {
        let id_width = self
            .results
            .iter()
            .map(|r| r.doc_id.chars().count())
            .max()
            .unwrap_or(0)
            .max("doc_id".len());
        let mut out = format!(
            "query: {}\ncutoff: {:.4}  candidates: {}\n{:>4}  {:<id_width$}  {:>11}  {:>9}  {:>8}\n",
            self.query, self.cutoff, self.total_candidates, "rank", "doc_id", "probability", "syntactic", "semantic",
        );
        for (i, r) in self.results.iter().enumerate() {
            out.push_str(&format!(
                "{:>4}  {:<id_width$}  {:>11.4}  {:>9.4}  {:>8.4}\n",
                i + 1,
                r.doc_id,
                r.probability,
                r.syntactic,
                r.semantic
            ));
        }
        let n = self.results.len();
        out.push_str(&format!("{n} result{}\n", if n == 1 { "" } else { "s" }));
        out
    }
}

pub fn render(page: &ResultPage, mode: OutputMode) -> String {
    match mode {
        OutputMode::Text => page.to_text(),
        OutputMode::Machine => page.to_machine(),
    }
}
