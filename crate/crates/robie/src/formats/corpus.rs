//! Line-delimited JSON sentence records.
//!
//! One object per line with `id`, `text` (whitespace tokenized), `parse`
//! (bracketed, leaves equal to the text tokens), optional `source` (id of
//! the sentence this one paraphrases) and optional `tuples`. Spans are
//! half-open `[l, r]` token offsets; missing spans are located at ingest.

use std::collections::BTreeSet;

use robie_core::restore::{Extraction, Slot};
use robie_core::treebank::TreeError;
use robie_core::{ParseTree, TokenSpan};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CorpusError {
    #[error("line {line}: missing field `{field}`")]
    MissingField { line: usize, field: &'static str },
    #[error("line {line}: {msg}")]
    Json { line: usize, msg: String },
    #[error("record {id}: parse leaves do not match the text tokens")]
    ParseTokenMismatch { id: String },
    #[error("record {id}: {source}")]
    BadParse { id: String, source: TreeError },
    #[error("record {id}: duplicate id")]
    DuplicateId { id: String },
    #[error("record {id}, tuple {tuple}: {msg}")]
    BadTuple { id: String, tuple: usize, msg: String },
}

fn default_confidence() -> f64 {
    1.0
}

/// One extraction as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleRecord {
    pub predicate: String,
    pub args: Vec<String>,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pred_span: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub arg_spans: Vec<Option<[usize; 2]>>,
    /// `(token index, importance)` over the argument tokens.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub importance: Option<Vec<(usize, f64)>>,
}

impl TupleRecord {
    pub fn new(predicate: &str, args: &[&str]) -> Self {
        TupleRecord {
            predicate: predicate.to_string(),
            args: args.iter().map(|a| a.to_string()).collect(),
            confidence: 1.0,
            pred_span: None,
            arg_spans: Vec::new(),
            importance: None,
        }
    }

    pub fn arg_span(&self, i: usize) -> Option<TokenSpan> {
        self.arg_spans.get(i).copied().flatten().map(to_span)
    }

    pub fn extraction(&self) -> Extraction {
        Extraction::new(
            Slot::new(self.predicate.clone(), self.pred_span.map(to_span)),
            self.args
                .iter()
                .enumerate()
                .map(|(i, a)| Slot::new(a.clone(), self.arg_span(i)))
                .collect(),
            self.confidence,
        )
    }
}

pub fn to_span(s: [usize; 2]) -> TokenSpan {
    TokenSpan::new(s[0], s[1])
}

pub fn from_span(s: TokenSpan) -> [usize; 2] {
    [s.l, s.r]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    id: String,
    text: String,
    parse: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<String>,
    #[serde(default)]
    tuples: Vec<TupleRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentenceRecord {
    pub id: String,
    pub text: String,
    pub tree: ParseTree,
    pub source: Option<String>,
    pub tuples: Vec<TupleRecord>,
}

impl SentenceRecord {
    pub fn tokens(&self) -> Vec<&str> {
        self.text.split_whitespace().collect()
    }

    pub fn span_text(&self, span: TokenSpan) -> String {
        self.tokens()[span.l..span.r].join(" ")
    }
}

/// First occurrence of `phrase` as a token run not overlapping `taken`;
/// exact match first, then case-insensitive.
fn locate(tokens: &[&str], phrase: &str, taken: &[TokenSpan]) -> Option<TokenSpan> {
    let words: Vec<&str> = phrase.split_whitespace().collect();
    if words.is_empty() || words.len() > tokens.len() {
        return None;
    }
    let free = |s: &TokenSpan| taken.iter().all(|t| !t.overlaps(s));
    let exact = |w: &[&str]| w == words.as_slice();
    let folded = |w: &[&str]| w.iter().zip(&words).all(|(a, b)| a.eq_ignore_ascii_case(b));
    for matches in [&exact as &dyn Fn(&[&str]) -> bool, &folded] {
        for (l, window) in tokens.windows(words.len()).enumerate() {
            let span = TokenSpan::new(l, l + words.len());
            if matches(window) && free(&span) {
                return Some(span);
            }
        }
    }
    None
}

fn resolve_tuple(id: &str, index: usize, tokens: &[&str], tuple: &mut TupleRecord) -> Result<(), CorpusError> {
    let bad = |msg: String| CorpusError::BadTuple {
        id: id.to_string(),
        tuple: index,
        msg,
    };
    if tuple.args.is_empty() {
        return Err(bad("no arguments".into()));
    }
    if tuple.arg_spans.is_empty() {
        tuple.arg_spans = vec![None; tuple.args.len()];
    }
    if tuple.arg_spans.len() != tuple.args.len() {
        return Err(bad(format!(
            "{} spans for {} arguments",
            tuple.arg_spans.len(),
            tuple.args.len()
        )));
    }
    let given = tuple.arg_spans.iter().flatten().chain(tuple.pred_span.iter());
    for s in given {
        if s[0] >= s[1] || s[1] > tokens.len() {
            return Err(bad(format!("span [{}, {}) outside {} tokens", s[0], s[1], tokens.len())));
        }
    }
    let mut taken: Vec<TokenSpan> = tuple.arg_spans.iter().flatten().map(|s| to_span(*s)).collect();
    for i in 0..tuple.args.len() {
        if tuple.arg_spans[i].is_none() {
            let found = locate(tokens, &tuple.args[i], &taken);
            if let Some(span) = found {
                taken.push(span);
            }
            tuple.arg_spans[i] = found.map(from_span);
        }
    }
    if tuple.pred_span.is_none() {
        tuple.pred_span = locate(tokens, &tuple.predicate, &taken).map(from_span);
    }
    if let Some(imp) = &tuple.importance {
        if let Some(&(j, v)) = imp.iter().find(|(j, v)| *j >= tokens.len() || !(*v > 0.0 && v.is_finite())) {
            return Err(bad(format!("importance ({j}, {v}) invalid")));
        }
    }
    Ok(())
}

/// Parse and validate a whole corpus file.
pub fn parse_corpus(text: &str) -> Result<Vec<SentenceRecord>, CorpusError> {
    let mut out = Vec::new();
    let mut ids = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let json = |e: serde_json::Error| CorpusError::Json {
            line: line_no,
            msg: e.to_string(),
        };
        let value: serde_json::Value = serde_json::from_str(line).map_err(json)?;
        for field in ["id", "text", "parse"] {
            if value.get(field).is_none() {
                return Err(CorpusError::MissingField { line: line_no, field });
            }
        }
        let mut raw: RawRecord = serde_json::from_value(value).map_err(json)?;
        let tree = ParseTree::parse(&raw.parse).map_err(|source| CorpusError::BadParse {
            id: raw.id.clone(),
            source,
        })?;
        let tokens: Vec<&str> = raw.text.split_whitespace().collect();
        if tree.tokens() != tokens {
            return Err(CorpusError::ParseTokenMismatch { id: raw.id });
        }
        for (t, tuple) in raw.tuples.iter_mut().enumerate() {
            resolve_tuple(&raw.id, t, &tokens, tuple)?;
        }
        if !ids.insert(raw.id.clone()) {
            return Err(CorpusError::DuplicateId { id: raw.id });
        }
        out.push(SentenceRecord {
            id: raw.id,
            text: tokens.join(" "),
            tree,
            source: raw.source,
            tuples: raw.tuples,
        });
    }
    Ok(out)
}

/// Serialize records, one JSON object per line.
pub fn write_corpus(records: &[SentenceRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let raw = RawRecord {
            id: r.id.clone(),
            text: r.text.clone(),
            parse: r.tree.to_string(),
            source: r.source.clone(),
            tuples: r.tuples.clone(),
        };
        out.push_str(&serde_json::to_string(&raw).expect("records serialize"));
        out.push('\n');
    }
    out
}
