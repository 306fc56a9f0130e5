//! Hierarchical weighted syntactic distance and parse retrieval.
//!
//! Two trees are pruned, flattened to their level-order label sequences,
//! and compared by the maximal common substrings of those sequences. Runs
//! are weighted by a geometric discount in decreasing-length order, so the
//! distance is symmetric and does not depend on the DP scan order.

mod retrieval;
pub mod rouge;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::treebank::{ParseTree, TreeError};

pub use retrieval::{
    parse_similarity, parse_similarity_with, retrieve_source_parses, sample_target_parses,
    ParsePairTable,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SyndistError {
    #[error("prune height must be at least 1")]
    HeightZero,
    #[error("discount must lie in (0, 1], got {0}")]
    DiscountOutOfRange(f64),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("malformed parse: {0}")]
    MalformedParse(#[from] TreeError),
    #[error("parse-pair table is empty")]
    EmptyTable,
    #[error("pair count must be positive")]
    ZeroCount,
    #[error("no target parses recorded for source {0}")]
    NoTargets(String),
    #[error("number of requested parses must be at least 1")]
    KZero,
}

/// Pruning height and run discount.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceParams {
    prune_height: usize,
    discount: f64,
}

impl DistanceParams {
    pub const DEFAULT_HEIGHT: usize = 3;
    pub const DEFAULT_DISCOUNT: f64 = 0.9;

    pub fn new(prune_height: usize, discount: f64) -> Result<Self, SyndistError> {
        if prune_height == 0 {
            return Err(SyndistError::HeightZero);
        }
        if !(discount > 0.0 && discount <= 1.0) {
            return Err(SyndistError::DiscountOutOfRange(discount));
        }
        Ok(DistanceParams {
            prune_height,
            discount,
        })
    }

    pub fn prune_height(&self) -> usize {
        self.prune_height
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }
}

impl Default for DistanceParams {
    fn default() -> Self {
        DistanceParams {
            prune_height: Self::DEFAULT_HEIGHT,
            discount: Self::DEFAULT_DISCOUNT,
        }
    }
}

/// A maximal common substring of two sequences. Always `length >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct MatchRun {
    pub length: usize,
    pub pos_a: usize,
    pub pos_b: usize,
}

/// All maximal common substrings of length at least 2, found with the
/// longest-common-substring table.
pub fn maximal_runs<T: PartialEq>(a: &[T], b: &[T]) -> Vec<MatchRun> {
    let (n, m) = (a.len(), b.len());
    let width = m + 1;
    // table[(i + 1) * width + (j + 1)] = length of common suffix ending at a[i], b[j]
    let mut table = vec![0usize; (n + 1) * width];
    let mut runs = Vec::new();
    for i in 0..n {
        for j in 0..m {
            if a[i] == b[j] {
                table[(i + 1) * width + j + 1] = table[i * width + j] + 1;
            }
        }
    }
    for i in 0..n {
        for j in 0..m {
            let len = table[(i + 1) * width + j + 1];
            let extends = i + 1 < n && j + 1 < m && a[i + 1] == b[j + 1];
            if len >= 2 && !extends {
                runs.push(MatchRun {
                    length: len,
                    pos_a: i + 1 - len,
                    pos_b: j + 1 - len,
                });
            }
        }
    }
    runs
}

/// Discounted total matching length: runs sorted by decreasing length
/// (ties by position), the i-th weighted by `discount^i`.
pub fn discounted_length(runs: &mut [MatchRun], discount: f64) -> f64 {
    runs.sort_by(|x, y| {
        y.length
            .cmp(&x.length)
            .then(x.pos_a.cmp(&y.pos_a))
            .then(x.pos_b.cmp(&y.pos_b))
    });
    let mut weight = 1.0;
    let mut total = 0.0;
    for run in runs.iter() {
        total += run.length as f64 * weight;
        weight *= discount;
    }
    total
}

/// Distance between two label sequences, in `[0, 1]`.
pub fn sequence_distance<T: PartialEq>(q1: &[T], q2: &[T], discount: f64) -> f64 {
    if q1 == q2 {
        return 0.0;
    }
    let shortest = q1.len().min(q2.len());
    if shortest == 0 {
        return 1.0;
    }
    let mut runs = maximal_runs(q1, q2);
    let total = discounted_length(&mut runs, discount);
    (1.0 - total / shortest as f64).clamp(0.0, 1.0)
}

/// Level-order labels of the tree pruned at `height`.
pub fn syntax_signature(tree: &ParseTree, height: usize) -> Result<Vec<String>, SyndistError> {
    let pruned = tree.prune(height).map_err(|_| SyndistError::HeightZero)?;
    Ok(pruned
        .level_order_labels()
        .into_iter()
        .map(String::from)
        .collect())
}

/// HW syntactic distance between two parse trees. Tokens are ignored.
pub fn hw_distance(t1: &ParseTree, t2: &ParseTree, params: &DistanceParams) -> f64 {
    // prune_height >= 1 is guaranteed by DistanceParams
    let q1 = syntax_signature(t1, params.prune_height).expect("valid height");
    let q2 = syntax_signature(t2, params.prune_height).expect("valid height");
    sequence_distance(&q1, &q2, params.discount)
}

/// Dense symmetric matrix of pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Wrap row-major data. Returns `None` unless `data.len() == n * n`.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Option<Self> {
        (data.len() == n * n).then_some(DistanceMatrix { n, data })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn has_zero_diagonal(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) == 0.0)
    }
}

/// Pairwise [`hw_distance`] over a corpus. Each tree is pruned once.
pub fn distance_matrix(
    corpus: &[ParseTree],
    params: &DistanceParams,
) -> Result<DistanceMatrix, SyndistError> {
    if corpus.is_empty() {
        return Err(SyndistError::EmptyCorpus);
    }
    let signatures = corpus
        .iter()
        .map(|t| syntax_signature(t, params.prune_height))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(matrix_from_signatures(&signatures, params.discount))
}

/// Pairwise [`sequence_distance`] over precomputed signatures.
pub fn matrix_from_signatures<T: PartialEq>(signatures: &[Vec<T>], discount: f64) -> DistanceMatrix {
    let n = signatures.len();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = sequence_distance(&signatures[i], &signatures[j], discount);
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    DistanceMatrix { n, data }
}
