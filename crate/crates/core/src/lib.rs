//! Algorithmic core for building syntactically diverse OpenIE training data.
//!
//! The crate is `no_std` (it needs `alloc`) and contains no IO. It covers:
//!
//! * [`treebank`]: bracketed constituency trees, pruning, traversal and
//!   phrase-subtree lookup.
//! * [`syndist`]: the hierarchical weighted syntactic distance, parse-string
//!   similarity, and retrieval/sampling of target parses for controlled
//!   paraphrasing.
//! * [`cluster`]: k-medoids over a precomputed distance matrix, train-to-medoid
//!   distances and word-distribution reports.
//! * [`restore`]: relocation of source tuple arguments inside a paraphrase,
//!   predicate exchange helpers and denoise masks.
//! * [`carbscore`]: all-pair token matching of extraction tuples and P-R curve
//!   summaries.
//!
//! All randomness is driven by explicit `u64` seeds; see [`seed`].
#![no_std]

extern crate alloc;

pub mod carbscore;
pub mod cluster;
pub mod restore;
pub mod seed;
pub mod syndist;
pub mod treebank;

pub use treebank::{ParseNode, ParseTree, TokenSpan};
