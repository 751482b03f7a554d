//! Corpus ingestion and the inverted index.
//!
//! A corpus file holds one JSON record per line:
//!
//! ```text
//! {"id":"d1","url":"http://a/1","title":"Intro","body":"semantic web mining",
//!  "meta":{"keywords":["semantic","web"],"concepts":{"ontology":0.8}}}
//! ```
//!
//! `id` and `body` are required; everything else is optional. The index file
//! written by [`save_index`] is a line-oriented text container:
//!
//! ```text
//! PSWM-INDEX v1
//! docs <doc_count>
//! <one JSON document per line, ascending id>
//! postings <token_count>
//! <one JSON line per token: ["token", [{"doc":"d1","tf":2}, ...]], ascending token>
//! end
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::query::tokenize;

pub const INDEX_MAGIC: &str = "PSWM-INDEX v1";

/// Keyword and concept tags describing what a document is about.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetaRecord {
    keywords: BTreeSet<String>,
    concepts: BTreeMap<String, f64>,
}

impl MetaRecord {
    /// Builds a record, normalizing every keyword and concept tag with
    /// [`tokenize`]. A multi-word tag contributes each of its tokens; when two
    /// tags share a token the larger concept weight is kept.
    pub fn new<K, C, S, T>(keywords: K, concepts: C) -> Result<Self>
    where
        K: IntoIterator<Item = S>,
        C: IntoIterator<Item = (T, f64)>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let keywords = keywords
            .into_iter()
            .flat_map(|k| tokenize(k.as_ref()))
            .collect();
        let mut normalized = BTreeMap::new();
        for (tag, weight) in concepts {
            check_weight(tag.as_ref(), weight)?;
            for token in tokenize(tag.as_ref()) {
                let slot = normalized.entry(token).or_insert(weight);
                if weight > *slot {
                    *slot = weight;
                }
            }
        }
        Ok(Self {
            keywords,
            concepts: normalized,
        })
    }

    pub fn keywords(&self) -> &BTreeSet<String> {
        &self.keywords
    }

    pub fn concepts(&self) -> &BTreeMap<String, f64> {
        &self.concepts
    }

    fn validate(&self) -> Result<()> {
        for tag in self.keywords.iter().chain(self.concepts.keys()) {
            if tokenize(tag) != [tag.as_str()] {
                return Err(Error::data(format!(
                    "metadata tag `{tag}` is not normalized"
                )));
            }
        }
        for (tag, &weight) in &self.concepts {
            check_weight(tag, weight)?;
        }
        Ok(())
    }
}

fn check_weight(tag: &str, weight: f64) -> Result<()> {
    if (0.0..=1.0).contains(&weight) {
        Ok(())
    } else {
        Err(Error::data(format!(
            "concept `{tag}` has weight {weight}, expected a value in [0, 1]"
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub url: String,
    pub title: String,
    pub body: String,
    pub meta: MetaRecord,
}

impl Document {
    pub fn new(id: impl Into<String>, body: impl Into<String>, meta: MetaRecord) -> Self {
        Self {
            id: id.into(),
            url: String::new(),
            title: String::new(),
            body: body.into(),
            meta,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CorpusRecord {
    id: String,
    #[serde(default)]
    url: String,
    #[serde(default)]
    title: String,
    body: String,
    #[serde(default)]
    meta: CorpusMeta,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorpusMeta {
    #[serde(default)]
    keywords: Vec<String>,
    #[serde(default)]
    concepts: BTreeMap<String, f64>,
}

/// Parses line-delimited JSON corpus text. Blank lines are skipped; line
/// numbers in errors are 1-based.
pub fn parse_corpus(text: &str) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    let mut seen = BTreeSet::new();
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        if line.trim().is_empty() {
            continue;
        }
        let record: CorpusRecord = serde_json::from_str(line)
            .map_err(|e| Error::data(format!("corpus line {lineno}: {e}")))?;
        if record.id.is_empty() {
            return Err(Error::data(format!(
                "corpus line {lineno}: empty document id"
            )));
        }
        let meta = MetaRecord::new(record.meta.keywords, record.meta.concepts)
            .map_err(|e| Error::data(format!("corpus line {lineno}: {e}")))?;
        if !seen.insert(record.id.clone()) {
            return Err(Error::data(format!(
                "corpus line {lineno}: duplicate document id `{}`",
                record.id
            )));
        }
        docs.push(Document {
            id: record.id,
            url: record.url,
            title: record.title,
            body: record.body,
            meta,
        });
    }
    Ok(docs)
}

pub fn parse_corpus_file(path: impl AsRef<Path>) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(&text)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    pub doc: String,
    pub tf: u32,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct InvertedIndex {
    postings: BTreeMap<String, Vec<Posting>>,
    docs: BTreeMap<String, Document>,
    doc_count: usize,
}

impl InvertedIndex {
    pub fn postings(&self) -> &BTreeMap<String, Vec<Posting>> {
        &self.postings
    }

    pub fn posting_list(&self, token: &str) -> &[Posting] {
        self.postings.get(token).map_or(&[], Vec::as_slice)
    }

    pub fn docs(&self) -> &BTreeMap<String, Document> {
        &self.docs
    }

    pub fn doc(&self, id: &str) -> Option<&Document> {
        self.docs.get(id)
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn token_count(&self) -> usize {
        self.postings.len()
    }

    fn check_invariants(&self) -> Result<()> {
        if self.doc_count != self.docs.len() {
            return Err(Error::data(format!(
                "index declares {} documents but holds {}",
                self.doc_count,
                self.docs.len()
            )));
        }
        for (id, doc) in &self.docs {
            if id != &doc.id {
                return Err(Error::data(format!(
                    "document keyed `{id}` has id `{}`",
                    doc.id
                )));
            }
            doc.meta.validate()?;
        }
        for (token, list) in &self.postings {
            if list.is_empty() {
                return Err(Error::data(format!("empty posting list for `{token}`")));
            }
            for pair in list.windows(2) {
                if pair[0].doc >= pair[1].doc {
                    return Err(Error::data(format!(
                        "posting list for `{token}` is not strictly sorted"
                    )));
                }
            }
            for p in list {
                if p.tf == 0 {
                    return Err(Error::data(format!(
                        "zero term frequency for `{token}` in `{}`",
                        p.doc
                    )));
                }
                if !self.docs.contains_key(&p.doc) {
                    return Err(Error::data(format!(
                        "posting for `{token}` names unknown document `{}`",
                        p.doc
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Builds the inverted index. The result does not depend on the order of
/// `docs`.
pub fn build_index(docs: Vec<Document>) -> Result<InvertedIndex> {
    let mut by_id = BTreeMap::new();
    for doc in docs {
        if by_id.contains_key(&doc.id) {
            return Err(Error::data(format!("duplicate document id `{}`", doc.id)));
        }
        by_id.insert(doc.id.clone(), doc);
    }

    let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    // docs are visited in ascending id order, so every list is pushed sorted
    for (id, doc) in &by_id {
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        for token in tokenize(&doc.body) {
            *counts.entry(token).or_default() += 1;
        }
        for (token, tf) in counts {
            postings.entry(token).or_default().push(Posting {
                doc: id.clone(),
                tf,
            });
        }
    }

    Ok(InvertedIndex {
        postings,
        doc_count: by_id.len(),
        docs: by_id,
    })
}

/// Serializes `index` into the text container described in the module docs.
pub fn encode_index(index: &InvertedIndex) -> String {
    let mut out = String::new();
    out.push_str(INDEX_MAGIC);
    out.push('\n');
    out.push_str(&format!("docs {}\n", index.doc_count));
    for doc in index.docs.values() {
        out.push_str(&serde_json::to_string(doc).expect("documents always serialize"));
        out.push('\n');
    }
    out.push_str(&format!("postings {}\n", index.postings.len()));
    for entry in &index.postings {
        out.push_str(&serde_json::to_string(&entry).expect("postings always serialize"));
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

pub fn decode_index(text: &str) -> Result<InvertedIndex> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header != INDEX_MAGIC {
        return Err(Error::Version {
            expected: INDEX_MAGIC.to_owned(),
            found: header.to_owned(),
        });
    }

    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::data(format!("index file truncated while reading {what}")))
    };

    let doc_count = section_count(next("document count")?, "docs")?;
    let mut docs = BTreeMap::new();
    for i in 0..doc_count {
        let doc: Document = serde_json::from_str(next("documents")?)
            .map_err(|e| Error::data(format!("index document {i}: {e}")))?;
        if docs.insert(doc.id.clone(), doc).is_some() {
            return Err(Error::data(format!("index document {i}: duplicate id")));
        }
    }

    let token_count = section_count(next("posting count")?, "postings")?;
    let mut postings = BTreeMap::new();
    for i in 0..token_count {
        let (token, list): (String, Vec<Posting>) = serde_json::from_str(next("postings")?)
            .map_err(|e| Error::data(format!("index posting line {i}: {e}")))?;
        if postings.insert(token.clone(), list).is_some() {
            return Err(Error::data(format!("duplicate posting list for `{token}`")));
        }
    }

    if next("end marker")? != "end" {
        return Err(Error::data(
            "index file has trailing content before end marker",
        ));
    }
    if lines.any(|l| !l.is_empty()) {
        return Err(Error::data("index file has content after end marker"));
    }

    let index = InvertedIndex {
        postings,
        docs,
        doc_count,
    };
    index.check_invariants()?;
    Ok(index)
}

fn section_count(line: &str, name: &str) -> Result<usize> {
    line.strip_prefix(name)
        .and_then(|rest| rest.strip_prefix(' '))
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| Error::data(format!("expected `{name} <count>`, found `{line}`")))
}

pub fn save_index(index: &InvertedIndex, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_index(index)).map_err(|e| Error::io(path, e))
}

pub fn load_index(path: impl AsRef<Path>) -> Result<InvertedIndex> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    decode_index(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, body: &str) -> Document {
        Document::new(id, body, MetaRecord::default())
    }

    fn fixture() -> InvertedIndex {
        let text = r#"
{"id":"d1","url":"http://example.org/1","title":"Mining","body":"semantic web mining","meta":{"keywords":["Semantic","web"],"concepts":{"Data Mining":0.7}}}
{"id":"d2","body":"cooking with web recipes web","meta":{"keywords":["cooking"]}}
{"id":"d3","body":""}
"#;
        build_index(parse_corpus(text).unwrap()).unwrap()
    }

    #[test]
    fn empty_corpus() {
        assert!(parse_corpus("").unwrap().is_empty());
        assert!(parse_corpus("\n  \n").unwrap().is_empty());
    }

    #[test]
    fn single_record() {
        let docs = parse_corpus(r#"{"id":"d1","body":"x"}"#).unwrap();
        assert_eq!(docs.len(), 1);
        assert_eq!(docs[0].id, "d1");
    }

    #[test]
    fn duplicate_id_is_named() {
        let err = parse_corpus("{\"id\":\"d1\",\"body\":\"a\"}\n{\"id\":\"d1\",\"body\":\"b\"}")
            .unwrap_err();
        assert!(err.is_data_error());
        assert!(err.to_string().contains("d1"), "{err}");
    }

    #[test]
    fn malformed_line_is_numbered() {
        let err = parse_corpus("{\"id\":\"d1\",\"body\":\"a\"}\n\n{\"id\":\"d2\"}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        let err = parse_corpus("not json").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn bad_concept_weight_rejected() {
        let err =
            parse_corpus(r#"{"id":"d1","body":"","meta":{"concepts":{"x":1.5}}}"#).unwrap_err();
        assert!(err.is_data_error());
    }

    #[test]
    fn metadata_is_normalized() {
        let meta = MetaRecord::new(
            ["  Web ", "Semantic Web"],
            [("Data MINING", 0.7), ("data", 0.2)],
        )
        .unwrap();
        let kw: Vec<_> = meta.keywords().iter().map(String::as_str).collect();
        assert_eq!(kw, ["semantic", "web"]);
        assert_eq!(meta.concepts()["data"], 0.7);
        assert_eq!(meta.concepts()["mining"], 0.7);
    }

    #[test]
    fn empty_index() {
        let index = build_index(vec![]).unwrap();
        assert_eq!(index.doc_count(), 0);
        assert!(index.postings().is_empty());
    }

    #[test]
    fn term_frequencies() {
        let index = build_index(vec![doc("x", "web web mining")]).unwrap();
        assert_eq!(
            index.posting_list("web"),
            [Posting {
                doc: "x".into(),
                tf: 2
            }]
        );
        assert_eq!(
            index.posting_list("mining"),
            [Posting {
                doc: "x".into(),
                tf: 1
            }]
        );
    }

    #[test]
    fn empty_body_has_no_postings() {
        let index = build_index(vec![doc("e", ""), doc("f", "web")]).unwrap();
        assert!(index.doc("e").is_some());
        assert!(index.postings().values().flatten().all(|p| p.doc != "e"));
    }

    #[test]
    fn build_rejects_duplicates() {
        assert!(build_index(vec![doc("a", "x"), doc("a", "y")]).is_err());
    }

    #[test]
    fn roundtrip_empty_and_fixture() {
        let empty = InvertedIndex::default();
        assert_eq!(decode_index(&encode_index(&empty)).unwrap(), empty);

        let index = fixture();
        let back = decode_index(&encode_index(&index)).unwrap();
        assert_eq!(back.doc_count(), index.doc_count());
        assert_eq!(back.docs(), index.docs());
        assert_eq!(back.postings(), index.postings());
        assert_eq!(back, index);
    }

    #[test]
    fn file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.idx");
        let index = fixture();
        save_index(&index, &path).unwrap();
        assert_eq!(load_index(&path).unwrap(), index);
    }

    #[test]
    fn wrong_magic_is_version_error() {
        let text = encode_index(&fixture()).replacen("v1", "v2", 1);
        assert!(matches!(decode_index(&text), Err(Error::Version { .. })));
        assert!(matches!(decode_index(""), Err(Error::Version { .. })));
    }

    #[test]
    fn truncation_is_detected() {
        let text = encode_index(&fixture());
        let lines: Vec<&str> = text.lines().collect();
        for keep in 1..lines.len() {
            let cut = lines[..keep].join("\n");
            assert!(
                decode_index(&cut).unwrap_err().is_data_error(),
                "kept {keep} lines"
            );
        }
    }

    #[test]
    fn dangling_posting_rejected() {
        let text =
            encode_index(&fixture()).replace(r#"{"doc":"d2","tf":2}"#, r#"{"doc":"zz","tf":2}"#);
        assert!(decode_index(&text).is_err());
    }
}
