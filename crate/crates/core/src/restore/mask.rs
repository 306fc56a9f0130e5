use alloc::vec::Vec;

use rand::Rng;

use super::{RestoreError, ScoredSpan};
use crate::seed;

pub const DEFAULT_MASK_RATE: f64 = 0.15;

/// Importance of one argument token.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TokenImportance {
    pub index: usize,
    pub value: f64,
}

/// Per-token importance for the argument spans of one tuple.
///
/// Tokens matched by similarity take their profile value. Tokens added by
/// tree completion take the mean over all similarity tokens of the tuple,
/// or 1.0 when the tuple has none. Tokens outside the spans get nothing.
/// `profiles[i]` is the similarity profile that produced `spans[i]`.
pub fn importance_scores(
    spans: &[ScoredSpan],
    profiles: &[Vec<f64>],
) -> Result<Vec<TokenImportance>, RestoreError> {
    let mut matched = Vec::new();
    let mut added = Vec::new();
    for (cand, profile) in spans.iter().zip(profiles) {
        if !cand.span.fits(profile.len()) {
            return Err(RestoreError::SpanOutOfRange {
                span: cand.span,
                len: profile.len(),
            });
        }
        let origin = cand.similarity_span();
        for j in cand.span.indices() {
            if origin.contains(j) {
                matched.push(TokenImportance { index: j, value: profile[j] });
            } else {
                added.push(j);
            }
        }
    }
    let fill = if matched.is_empty() {
        1.0
    } else {
        matched.iter().map(|t| t.value).sum::<f64>() / matched.len() as f64
    };
    matched.extend(added.into_iter().map(|index| TokenImportance { index, value: fill }));
    matched.sort_by_key(|t| t.index);
    Ok(matched)
}

/// `round(rate * n)`, halves rounded up.
pub fn mask_count(n: usize, rate: f64) -> usize {
    libm::floor(rate * n as f64 + 0.5) as usize
}

/// Positions to mask, drawn without replacement with probability
/// proportional to `1 / importance`. Returns positions into `importances`,
/// ascending.
pub fn mask_indices(importances: &[f64], rate: f64, seed: u64) -> Result<Vec<usize>, RestoreError> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(RestoreError::RateOutOfRange(rate));
    }
    if let Some((index, &value)) = importances
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
    {
        return Err(RestoreError::NonPositiveImportance { index, value });
    }
    let draws = mask_count(importances.len(), rate);
    let mut pool: Vec<(usize, f64)> = importances
        .iter()
        .enumerate()
        .map(|(i, &v)| (i, 1.0 / v))
        .collect();
    let mut rng = seed::rng(seed);
    let mut picked = Vec::with_capacity(draws);
    for _ in 0..draws {
        let total: f64 = pool.iter().map(|p| p.1).sum();
        let mut ticket = rng.gen::<f64>() * total;
        let mut at = pool.len() - 1;
        for (k, &(_, w)) in pool.iter().enumerate() {
            if ticket < w {
                at = k;
                break;
            }
            ticket -= w;
        }
        picked.push(pool.remove(at).0);
    }
    picked.sort_unstable();
    Ok(picked)
}

/// [`mask_indices`] over argument tokens, returning sentence token indices.
pub fn mask_tokens(
    importances: &[TokenImportance],
    rate: f64,
    seed: u64,
) -> Result<Vec<usize>, RestoreError> {
    let values: Vec<f64> = importances.iter().map(|t| t.value).collect();
    Ok(mask_indices(&values, rate, seed)?
        .into_iter()
        .map(|p| importances[p].index)
        .collect())
}
