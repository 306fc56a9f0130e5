//! ROUGE-1/2/L F1 over arbitrary token sequences.

use alloc::collections::BTreeMap;
use alloc::vec;

/// Relative weights of the three ROUGE variants. They are normalized by
/// their sum, so only ratios matter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RougeWeights {
    pub rouge1: f64,
    pub rouge2: f64,
    pub rouge_l: f64,
}

impl Default for RougeWeights {
    fn default() -> Self {
        RougeWeights {
            rouge1: 1.0,
            rouge2: 1.0,
            rouge_l: 1.0,
        }
    }
}

fn f1(overlap: usize, len_a: usize, len_b: usize) -> f64 {
    if len_a + len_b == 0 {
        return 0.0;
    }
    2.0 * overlap as f64 / (len_a + len_b) as f64
}

/// ROUGE-N F1. When either side has no n-grams the score is 1 for equal
/// sequences and 0 otherwise.
pub fn rouge_n<T: Ord>(a: &[T], b: &[T], n: usize) -> f64 {
    assert!(n >= 1);
    let grams_a = a.len().saturating_sub(n - 1);
    let grams_b = b.len().saturating_sub(n - 1);
    if grams_a == 0 || grams_b == 0 {
        return if a == b { 1.0 } else { 0.0 };
    }
    let mut counts: BTreeMap<&[T], usize> = BTreeMap::new();
    for gram in a.windows(n) {
        *counts.entry(gram).or_default() += 1;
    }
    let mut overlap = 0;
    for gram in b.windows(n) {
        if let Some(c) = counts.get_mut(gram) {
            if *c > 0 {
                *c -= 1;
                overlap += 1;
            }
        }
    }
    f1(overlap, grams_a, grams_b)
}

pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn rouge_l<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    f1(lcs_len(a, b), a.len(), b.len())
}

/// Weighted mean of ROUGE-1, ROUGE-2 and ROUGE-L F1.
pub fn weighted_rouge<T: Ord>(a: &[T], b: &[T], w: &RougeWeights) -> f64 {
    let total = w.rouge1 + w.rouge2 + w.rouge_l;
    let s = w.rouge1 * rouge_n(a, b, 1) + w.rouge2 * rouge_n(a, b, 2) + w.rouge_l * rouge_l(a, b);
    (s / total).clamp(0.0, 1.0)
}
