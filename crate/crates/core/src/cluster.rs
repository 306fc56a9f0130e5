//! K-medoids over a precomputed distance matrix, and corpus-level analyses.
//!
//! HW syntactic distance has no mean, so cluster centers are medoid
//! sentences. The iteration alternates a nearest-medoid assignment with a
//! per-cluster medoid update; both steps never increase the total cost.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use thiserror::Error;

use crate::seed;
use crate::syndist::{hw_distance, DistanceMatrix, DistanceParams};
use crate::treebank::ParseTree;

pub const DEFAULT_MAX_ITER: usize = 300;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClusterError {
    #[error("k = {k} outside 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("distance matrix is not symmetric with a zero diagonal")]
    AsymmetricMatrix,
    #[error("train sample is empty")]
    EmptySample,
    #[error("reference corpus is empty")]
    EmptyCorpusB,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub k: usize,
    /// Cluster id per point; cluster `c` has medoid `medoids[c]`.
    pub assignments: Vec<usize>,
    /// Medoid point ids, ascending.
    pub medoids: Vec<usize>,
    pub cost: f64,
    /// Cost after the initial assignment and after every iteration.
    pub cost_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl Clustering {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.assignments {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn members(&self, cluster: usize) -> impl Iterator<Item = usize> + '_ {
        self.assignments
            .iter()
            .enumerate()
            .filter(move |&(_, &c)| c == cluster)
            .map(|(i, _)| i)
    }
}

fn assign(matrix: &DistanceMatrix, medoids: &[usize]) -> (Vec<usize>, f64) {
    let mut cost = 0.0;
    let assignments = (0..matrix.len())
        .map(|p| {
            // a medoid always stays in its own cluster
            if let Some(own) = medoids.iter().position(|&m| m == p) {
                return own;
            }
            let mut best = 0;
            for c in 1..medoids.len() {
                if matrix.get(p, medoids[c]) < matrix.get(p, medoids[best]) {
                    best = c;
                }
            }
            cost += matrix.get(p, medoids[best]);
            best
        })
        .collect();
    (assignments, cost)
}

fn update(matrix: &DistanceMatrix, assignments: &[usize], medoids: &[usize]) -> Vec<usize> {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); medoids.len()];
    for (p, &c) in assignments.iter().enumerate() {
        members[c].push(p);
    }
    medoids
        .iter()
        .zip(&members)
        .map(|(&current, group)| {
            let within = |cand: usize| group.iter().map(|&q| matrix.get(cand, q)).sum::<f64>();
            let mut best = current;
            let mut best_cost = within(current);
            for &cand in group {
                let c = within(cand);
                if c < best_cost {
                    best = cand;
                    best_cost = c;
                }
            }
            best
        })
        .collect()
}

fn relabel(medoids: &mut [usize]) {
    medoids.sort_unstable();
}

/// Seeded k-medoids (alternating assign/update).
///
/// Stops when an iteration leaves the assignment unchanged or after
/// `max_iter` iterations.
pub fn cluster_by_distance(
    matrix: &DistanceMatrix,
    k: usize,
    max_iter: usize,
    seed: u64,
) -> Result<Clustering, ClusterError> {
    let n = matrix.len();
    if k == 0 || k > n {
        return Err(ClusterError::KOutOfRange { k, n });
    }
    if !matrix.is_symmetric() || !matrix.has_zero_diagonal() {
        return Err(ClusterError::AsymmetricMatrix);
    }
    let mut rng = seed::rng(seed);
    let mut medoids = index::sample(&mut rng, n, k).into_vec();
    relabel(&mut medoids);
    let (mut assignments, mut cost) = assign(matrix, &medoids);
    let mut history = vec![cost];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let mut next = update(matrix, &assignments, &medoids);
        relabel(&mut next);
        let (next_assign, next_cost) = assign(matrix, &next);
        history.push(next_cost);
        let unchanged = next_assign == assignments;
        medoids = next;
        assignments = next_assign;
        cost = next_cost;
        if unchanged {
            converged = true;
            break;
        }
    }
    Ok(Clustering {
        k,
        assignments,
        medoids,
        cost,
        cost_history: history,
        iterations,
        converged,
    })
}

/// Mean HW distance from each sampled training tree to `medoid`.
pub fn train_to_cluster_distance(
    train_sample: &[ParseTree],
    medoid: &ParseTree,
    params: &DistanceParams,
) -> Result<f64, ClusterError> {
    if train_sample.is_empty() {
        return Err(ClusterError::EmptySample);
    }
    let total: f64 = train_sample
        .iter()
        .map(|t| hw_distance(t, medoid, params))
        .sum();
    Ok(total / train_sample.len() as f64)
}

/// `size` distinct indices out of `0..n` (all of them when `size >= n`),
/// ascending.
pub fn sample_indices(n: usize, size: usize, seed: u64) -> Vec<usize> {
    if size >= n {
        return (0..n).collect();
    }
    let mut picked = index::sample(&mut seed::rng(seed), n, size).into_vec();
    picked.sort_unstable();
    picked
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordFrequency {
    pub word: String,
    pub freq_a: f64,
    pub freq_b: f64,
}

fn count_tokens<S: AsRef<str>>(corpus: &[Vec<S>]) -> (BTreeMap<String, usize>, usize) {
    let mut counts = BTreeMap::new();
    let mut total = 0;
    for token in corpus.iter().flatten() {
        *counts.entry(token.as_ref().to_lowercase()).or_insert(0) += 1;
        total += 1;
    }
    (counts, total)
}

/// Relative frequency of every word of `corpus_b` in both corpora.
/// Tokens are lowercased. Rows are sorted by descending `freq_b`, then by
/// word.
pub fn word_distribution_report<A: AsRef<str>, B: AsRef<str>>(
    corpus_a: &[Vec<A>],
    corpus_b: &[Vec<B>],
) -> Result<Vec<WordFrequency>, ClusterError> {
    let (counts_b, total_b) = count_tokens(corpus_b);
    if total_b == 0 {
        return Err(ClusterError::EmptyCorpusB);
    }
    let (counts_a, total_a) = count_tokens(corpus_a);
    let mut rows: Vec<WordFrequency> = counts_b
        .into_iter()
        .map(|(word, cb)| {
            let ca = counts_a.get(&word).copied().unwrap_or(0);
            WordFrequency {
                freq_a: if total_a == 0 { 0.0 } else { ca as f64 / total_a as f64 },
                freq_b: cb as f64 / total_b as f64,
                word,
            }
        })
        .collect();
    rows.sort_by(|x, y| y.freq_b.total_cmp(&x.freq_b).then_with(|| x.word.cmp(&y.word)));
    Ok(rows)
}
