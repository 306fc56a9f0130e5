use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use super::rouge::{weighted_rouge, RougeWeights};
use super::SyndistError;
use crate::seed;
use crate::treebank::ParseTree;

/// Co-occurrence counts of (source parse, target parse) pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsePairTable {
    entries: BTreeMap<String, BTreeMap<String, u64>>,
}

impl ParsePairTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add `count` observations of the pair; repeated pairs accumulate.
    pub fn insert(&mut self, source: &str, target: &str, count: u64) -> Result<(), SyndistError> {
        if count == 0 {
            return Err(SyndistError::ZeroCount);
        }
        *self
            .entries
            .entry(source.trim().to_string())
            .or_default()
            .entry(target.trim().to_string())
            .or_default() += count;
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of distinct (source, target) pairs.
    pub fn len(&self) -> usize {
        self.entries.values().map(BTreeMap::len).sum()
    }

    pub fn sources(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn targets(&self, source: &str) -> Option<&BTreeMap<String, u64>> {
        self.entries.get(source.trim())
    }

    /// `(source, target, count)` in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.entries.iter().flat_map(|(s, ts)| {
            ts.iter()
                .map(move |(t, &c)| (s.as_str(), t.as_str(), c))
        })
    }
}

fn signature(parse: &str) -> Result<Vec<String>, SyndistError> {
    let tree = ParseTree::parse(parse)?;
    Ok(tree
        .level_order_labels()
        .into_iter()
        .map(String::from)
        .collect())
}

/// Weighted ROUGE between the level-order label sequences of two parse
/// strings, with equal weights.
pub fn parse_similarity(p1: &str, p2: &str) -> Result<f64, SyndistError> {
    parse_similarity_with(p1, p2, &RougeWeights::default())
}

pub fn parse_similarity_with(
    p1: &str,
    p2: &str,
    weights: &RougeWeights,
) -> Result<f64, SyndistError> {
    Ok(weighted_rouge(&signature(p1)?, &signature(p2)?, weights))
}

/// The `m` table sources most similar to `src`, best first; ties are
/// broken lexicographically.
pub fn retrieve_source_parses(
    src: &str,
    table: &ParsePairTable,
    m: usize,
) -> Result<Vec<String>, SyndistError> {
    if table.is_empty() {
        return Err(SyndistError::EmptyTable);
    }
    if m == 0 {
        return Err(SyndistError::KZero);
    }
    let query = signature(src)?;
    let weights = RougeWeights::default();
    let mut scored = table
        .sources()
        .map(|s| Ok((weighted_rouge(&query, &signature(s)?, &weights), s)))
        .collect::<Result<Vec<_>, SyndistError>>()?;
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(b.1)));
    Ok(scored
        .into_iter()
        .take(m)
        .map(|(_, s)| s.to_string())
        .collect())
}

/// Draws from `targets` without replacement, each draw proportional to
/// the pair counts of what is left.
fn draw_targets<'a, R: Rng>(targets: &'a BTreeMap<String, u64>, draws: usize, rng: &mut R) -> Vec<&'a str> {
    let mut pool: Vec<(&str, u64)> = targets.iter().map(|(t, &c)| (t.as_str(), c)).collect();
    let mut total: u64 = pool.iter().map(|p| p.1).sum();
    let mut out = Vec::with_capacity(draws.min(pool.len()));
    while out.len() < draws && !pool.is_empty() {
        let mut ticket = rng.gen_range(0..total);
        let idx = pool
            .iter()
            .position(|&(_, c)| {
                if ticket < c {
                    true
                } else {
                    ticket -= c;
                    false
                }
            })
            .expect("ticket below total");
        let (t, c) = pool.remove(idx);
        total -= c;
        out.push(t);
    }
    out
}

/// Sample up to `k` target parses for the retrieved source parses.
///
/// Each source contributes up to `k` draws from its conditional
/// distribution `count(src, tgt) / sum_j count(src, tgt_j)`. The per-source
/// draw lists are merged round-robin in source order, deduplicated and
/// truncated to `k`.
pub fn sample_target_parses<S: AsRef<str>>(
    src_matches: &[S],
    table: &ParsePairTable,
    k: usize,
    seed: u64,
) -> Result<Vec<String>, SyndistError> {
    if k == 0 {
        return Err(SyndistError::KZero);
    }
    let mut rng = seed::rng(seed);
    let mut per_source = Vec::with_capacity(src_matches.len());
    for src in src_matches {
        let src = src.as_ref();
        let targets = table
            .targets(src)
            .filter(|t| !t.is_empty())
            .ok_or_else(|| SyndistError::NoTargets(src.to_string()))?;
        per_source.push(draw_targets(targets, k, &mut rng));
    }
    let longest = per_source.iter().map(Vec::len).max().unwrap_or(0);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(k);
    'merge: for rank in 0..longest {
        for draws in &per_source {
            if let Some(&t) = draws.get(rank) {
                if seen.insert(t) {
                    out.push(t.to_string());
                    if out.len() == k {
                        break 'merge;
                    }
                }
            }
        }
    }
    Ok(out)
}
