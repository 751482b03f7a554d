//! Query parsing.
//!
//! A query becomes a [`QuerySyntaxTree`]: a root holding the raw string and an
//! ordered list of leaf tokens. There is no operator grammar; leaves are
//! combined with OR semantics when generating candidates.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Splits text into lowercase alphanumeric tokens.
///
/// Text is lowercased first and then split on every run of non-alphanumeric
/// characters; empty pieces are dropped. No stemming, no stop words. The same
/// function normalizes document bodies, metadata and queries.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySyntaxTree {
    raw: String,
    leaves: Vec<String>,
}

impl QuerySyntaxTree {
    pub fn parse(query: &str) -> Result<Self> {
        let leaves = tokenize(query);
        if leaves.is_empty() {
            return Err(Error::EmptyQuery);
        }
        Ok(Self {
            raw: query.to_owned(),
            leaves,
        })
    }

    /// The query exactly as the user typed it.
    pub fn raw(&self) -> &str {
        &self.raw
    }

    /// Leaf tokens in query order, duplicates kept.
    pub fn leaves(&self) -> &[String] {
        &self.leaves
    }

    pub fn distinct_leaves(&self) -> BTreeSet<&str> {
        self.leaves.iter().map(String::as_str).collect()
    }
}

pub fn build_syntax_tree(query: &str) -> Result<QuerySyntaxTree> {
    QuerySyntaxTree::parse(query)
}
