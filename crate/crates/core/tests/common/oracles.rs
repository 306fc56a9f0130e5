//! Brute-force reference implementations used by the test suites.
//!
//! Nothing here calls into the code paths it checks: each oracle works on
//! plain vectors and enumerates explicitly.
#![allow(dead_code)]

use robie_core::{ParseNode, ParseTree, TokenSpan};

/// Every maximal common substring of length >= 2, by direct enumeration of
/// start pairs, sorted by decreasing length then position.
pub fn maximal_common_substrings<T: PartialEq>(a: &[T], b: &[T]) -> Vec<(usize, usize, usize)> {
    let mut runs = Vec::new();
    for i in 0..a.len() {
        for j in 0..b.len() {
            if i > 0 && j > 0 && a[i - 1] == b[j - 1] {
                continue; // not left-maximal
            }
            let mut len = 0;
            while i + len < a.len() && j + len < b.len() && a[i + len] == b[j + len] {
                len += 1;
            }
            if len >= 2 {
                runs.push((len, i, j));
            }
        }
    }
    runs.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    runs
}

pub fn hw_oracle<T: PartialEq>(a: &[T], b: &[T], alpha: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let mut weight = 1.0;
    let mut total = 0.0;
    for (len, _, _) in maximal_common_substrings(a, b) {
        total += len as f64 * weight;
        weight *= alpha;
    }
    let shortest = a.len().min(b.len()) as f64;
    (1.0 - total / shortest).clamp(0.0, 1.0)
}

/// (label, token span) of every node that has tokens below it.
pub fn all_subtrees(tree: &ParseTree) -> Vec<(String, TokenSpan)> {
    fn walk(node: &ParseNode, out: &mut Vec<(String, TokenSpan)>) -> Vec<usize> {
        let mut leaves = Vec::new();
        if let Some(i) = node.leaf_index() {
            leaves.push(i);
        }
        for c in node.children() {
            leaves.extend(walk(c, out));
        }
        if let (Some(&lo), Some(&hi)) = (leaves.iter().min(), leaves.iter().max()) {
            out.push((node.label().to_string(), TokenSpan::new(lo, hi + 1)));
        }
        leaves
    }
    let mut out = Vec::new();
    walk(tree.root(), &mut out);
    out
}

pub fn covering_oracle(tree: &ParseTree, leaf: usize, allowed: &[&str]) -> Option<TokenSpan> {
    all_subtrees(tree)
        .into_iter()
        .filter(|(label, span)| allowed.contains(&label.as_str()) && span.contains(leaf))
        .map(|(_, span)| span)
        .min_by_key(|s| s.len())
}

pub fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum();
    let na: f64 = a.iter().map(|&x| f64::from(x) * f64::from(x)).sum();
    let nb: f64 = b.iter().map(|&x| f64::from(x) * f64::from(x)).sum();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na.sqrt() * nb.sqrt())
    }
}

pub fn profile_oracle(src: &[Vec<f32>], tgt: &[Vec<f32>], span: TokenSpan) -> Vec<f64> {
    let mut out = vec![0.0; tgt.len()];
    for (j, t) in tgt.iter().enumerate() {
        for s in &src[span.l..span.r] {
            out[j] += cosine(s, t);
        }
    }
    out
}

/// Runs of `> tau` as (span, score).
pub fn threshold_runs(profile: &[f64], tau: f64) -> Vec<(TokenSpan, f64)> {
    let mut out = Vec::new();
    let mut j = 0;
    while j < profile.len() {
        if profile[j] > tau {
            let l = j;
            while j < profile.len() && profile[j] > tau {
                j += 1;
            }
            out.push((TokenSpan::new(l, j), profile[l..j].iter().sum()));
        } else {
            j += 1;
        }
    }
    out
}

/// Widen a run to the hull of the smallest allowed subtrees over its tokens,
/// when that hull covers the run.
pub fn complete_oracle(tree: &ParseTree, span: TokenSpan, allowed: &[&str]) -> TokenSpan {
    let mut hull: Option<TokenSpan> = None;
    for tok in span.l..span.r {
        if let Some(s) = covering_oracle(tree, tok, allowed) {
            hull = Some(match hull {
                None => s,
                Some(h) => TokenSpan::new(h.l.min(s.l), h.r.max(s.r)),
            });
        }
    }
    match hull {
        Some(h) if h.l <= span.l && span.r <= h.r => h,
        _ => span,
    }
}

/// Exhaustive search over one span per slot with no overlaps. Returns the
/// maximum total and every assignment reaching it with the
/// lexicographically smallest starts, or `None` if nothing is feasible.
pub fn best_assignments(slots: &[Vec<(TokenSpan, f64)>]) -> Option<(f64, Vec<Vec<TokenSpan>>)> {
    let mut best: Option<(f64, Vec<usize>, Vec<Vec<TokenSpan>>)> = None;
    let total_combos: usize = slots.iter().map(Vec::len).product();
    for mut code in 0..total_combos {
        let mut pick = Vec::with_capacity(slots.len());
        for slot in slots {
            pick.push(slot[code % slot.len()]);
            code /= slot.len();
        }
        let clash = (0..pick.len())
            .any(|a| (0..a).any(|b| pick[a].0.l < pick[b].0.r && pick[b].0.l < pick[a].0.r));
        if clash {
            continue;
        }
        let total: f64 = pick.iter().map(|p| p.1).sum();
        let spans: Vec<TokenSpan> = pick.iter().map(|p| p.0).collect();
        let starts: Vec<usize> = spans.iter().map(|s| s.l).collect();
        match &mut best {
            Some((bt, bs, all)) if total == *bt && starts == *bs => all.push(spans),
            Some((bt, bs, _)) if total < *bt || (total == *bt && starts > *bs) => {}
            _ => best = Some((total, starts, vec![spans])),
        }
    }
    best.map(|(t, _, all)| (t, all))
}

/// Candidate spans for one argument: threshold runs, optionally completed,
/// duplicates keeping the higher score.
pub fn slot_candidates(
    profile: &[f64],
    tau: f64,
    tree: Option<&ParseTree>,
    allowed: &[&str],
) -> Vec<(TokenSpan, f64)> {
    let mut out: Vec<(TokenSpan, f64)> = Vec::new();
    for (span, score) in threshold_runs(profile, tau) {
        let span = match tree {
            Some(t) => complete_oracle(t, span, allowed),
            None => span,
        };
        match out.iter_mut().find(|c| c.0 == span) {
            Some(c) => c.1 = c.1.max(score),
            None => out.push((span, score)),
        }
    }
    out
}

/// Exact inclusion probability of each position under sequential weighted
/// sampling of `draws` items without replacement.
pub fn inclusion_probabilities(weights: &[f64], draws: usize) -> Vec<f64> {
    fn go(weights: &[f64], taken: &mut Vec<bool>, left: usize, prob: f64, acc: &mut [f64]) {
        if left == 0 {
            return;
        }
        let total: f64 = weights
            .iter()
            .zip(taken.iter())
            .filter(|(_, &t)| !t)
            .map(|(w, _)| *w)
            .sum();
        for i in 0..weights.len() {
            if taken[i] {
                continue;
            }
            let p = prob * weights[i] / total;
            acc[i] += p;
            taken[i] = true;
            go(weights, taken, left - 1, p, acc);
            taken[i] = false;
        }
    }
    let mut acc = vec![0.0; weights.len()];
    go(weights, &mut vec![false; weights.len()], draws, 1.0, &mut acc);
    acc
}
