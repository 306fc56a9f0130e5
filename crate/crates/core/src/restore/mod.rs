//! Knowledge restoration: relocating a source tuple inside a paraphrase.
//!
//! Arguments are located by summing token-level cosine similarities
//! ([`similarity_profile`]), thresholding them into runs
//! ([`merge_threshold_spans`]), optionally widening the runs to enclosing
//! noun phrases ([`complete_spans`]), and picking one non-overlapping span
//! per argument ([`select_tuple_spans`]). Predicates are produced by an
//! external generator ([`predicate_request`]) or, without one, by
//! [`fallback_predicate`]. Token importances from the similarity scores
//! drive the denoise mask ([`mask_indices`]).

mod align;
mod mask;
mod predicate;

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::treebank::{TokenSpan, TreeError};

pub use align::{
    complete_spans, merge_threshold_spans, restore_arguments, select_tuple_spans,
    similarity_profile, RestoreOptions, RestoredTuple, DEFAULT_MAX_CANDIDATES, DEFAULT_TAU,
};
pub use mask::{importance_scores, mask_count, mask_indices, mask_tokens, TokenImportance, DEFAULT_MASK_RATE};
pub use predicate::{fallback_predicate, predicate_request, LemmaTable, REQUEST_TERMINATOR};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RestoreError {
    #[error("embedding dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("span {span} out of range for {len} tokens")]
    SpanOutOfRange { span: TokenSpan, len: usize },
    #[error("embedding data length {len} is not a multiple of dimension {dim}")]
    RaggedEmbedding { len: usize, dim: usize },
    #[error("embedding contains a non-finite value at row {row}")]
    NonFinite { row: usize },
    #[error("target has {embedding} embedding rows but {tree} parse tokens")]
    TokenCountMismatch { embedding: usize, tree: usize },
    #[error("argument {slot} has no candidate span")]
    NoCandidates { slot: usize },
    #[error("no slot may be empty")]
    EmptySlot,
    #[error("no non-overlapping selection exists")]
    NoFeasibleSelection,
    #[error("source argument {slot} has no span")]
    MissingSpan { slot: usize },
    #[error("sentence is empty")]
    EmptySentence,
    #[error("importance must be positive, got {value} at position {index}")]
    NonPositiveImportance { index: usize, value: f64 },
    #[error("mask rate must lie in [0, 1], got {0}")]
    RateOutOfRange(f64),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// One contextual vector per token of a sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    sentence_id: String,
    dim: usize,
    data: Vec<f32>,
}

impl EmbeddingMatrix {
    /// `data` is row-major, `dim` values per token.
    pub fn new(sentence_id: impl Into<String>, dim: usize, data: Vec<f32>) -> Result<Self, RestoreError> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(RestoreError::RaggedEmbedding { len: data.len(), dim });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(RestoreError::NonFinite { row: pos / dim });
        }
        Ok(EmbeddingMatrix {
            sentence_id: sentence_id.into(),
            dim,
            data,
        })
    }

    pub fn from_rows(sentence_id: impl Into<String>, rows: &[Vec<f32>]) -> Result<Self, RestoreError> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(RestoreError::DimMismatch(dim, bad.len()));
        }
        Self::new(sentence_id, dim, rows.concat())
    }

    pub fn sentence_id(&self) -> &str {
        &self.sentence_id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }
}

/// A tuple element: surface text plus its location, when known.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Slot {
    pub text: String,
    pub span: Option<TokenSpan>,
}

impl Slot {
    pub fn new(text: impl Into<String>, span: Option<TokenSpan>) -> Self {
        Slot {
            text: text.into(),
            span,
        }
    }
}

/// An n-ary extraction `(arg1, predicate, arg2, ...)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub args: Vec<Slot>,
    pub predicate: Slot,
    pub confidence: f64,
}

impl Extraction {
    pub fn new(predicate: Slot, args: Vec<Slot>, confidence: f64) -> Self {
        Extraction {
            args,
            predicate,
            confidence,
        }
    }

    /// Build from texts only.
    pub fn from_texts<S: Into<String>>(predicate: S, args: impl IntoIterator<Item = S>, confidence: f64) -> Self {
        Extraction {
            predicate: Slot::new(predicate, None),
            args: args.into_iter().map(|a| Slot::new(a, None)).collect(),
            confidence,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Similarity,
    /// Widened to a phrase subtree; `origin` is the similarity run it grew from.
    TreeCompleted { origin: TokenSpan },
}

/// A candidate span with its summed similarity score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredSpan {
    pub span: TokenSpan,
    pub score: f64,
    pub provenance: Provenance,
}

impl ScoredSpan {
    /// Tokens whose score came from the similarity profile.
    pub fn similarity_span(&self) -> TokenSpan {
        match self.provenance {
            Provenance::Similarity => self.span,
            Provenance::TreeCompleted { origin } => origin,
        }
    }
}
