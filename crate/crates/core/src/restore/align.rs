use alloc::string::String;
use alloc::vec::Vec;

use super::{EmbeddingMatrix, Extraction, Provenance, RestoreError, ScoredSpan};
use crate::treebank::{ParseTree, TokenSpan, PHRASE_ROOTS};

pub const DEFAULT_TAU: f64 = 0.7;
pub const DEFAULT_MAX_CANDIDATES: usize = 5;

fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let (mut dot, mut na, mut nb) = (0.0f64, 0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (f64::from(x), f64::from(y));
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (libm::sqrt(na) * libm::sqrt(nb))
}

/// `c[j] = sum over i in src_span of cos(src_i, tgt_j)`. Zero vectors
/// contribute 0.
pub fn similarity_profile(
    src: &EmbeddingMatrix,
    tgt: &EmbeddingMatrix,
    src_span: TokenSpan,
) -> Result<Vec<f64>, RestoreError> {
    if src.dim() != tgt.dim() {
        return Err(RestoreError::DimMismatch(src.dim(), tgt.dim()));
    }
    if !src_span.fits(src.len()) {
        return Err(RestoreError::SpanOutOfRange {
            span: src_span,
            len: src.len(),
        });
    }
    Ok((0..tgt.len())
        .map(|j| {
            src_span
                .indices()
                .map(|i| cosine(src.row(i), tgt.row(j)))
                .sum()
        })
        .collect())
}

/// Maximal runs of consecutive positions with `profile > tau`.
pub fn merge_threshold_spans(profile: &[f64], tau: f64) -> Vec<ScoredSpan> {
    let mut out = Vec::new();
    let mut start = None;
    for (j, &v) in profile.iter().chain(core::iter::once(&f64::NEG_INFINITY)).enumerate() {
        match (start, v > tau) {
            (None, true) => start = Some(j),
            (Some(l), false) => {
                out.push(ScoredSpan {
                    span: TokenSpan::new(l, j),
                    score: profile[l..j].iter().sum(),
                    provenance: Provenance::Similarity,
                });
                start = None;
            }
            _ => {}
        }
    }
    out
}

/// Widen each span to the hull of the phrase subtrees covering its tokens.
///
/// The widened span replaces the original only when it covers it; the
/// score is carried over. Duplicate spans keep the higher score.
pub fn complete_spans(
    tree: &ParseTree,
    spans: &[ScoredSpan],
    allowed_roots: &[&str],
) -> Result<Vec<ScoredSpan>, RestoreError> {
    let len = tree.token_count();
    let mut out: Vec<ScoredSpan> = Vec::with_capacity(spans.len());
    for cand in spans {
        if !cand.span.fits(len) {
            return Err(RestoreError::SpanOutOfRange { span: cand.span, len });
        }
        let mut hull: Option<TokenSpan> = None;
        for tok in cand.span.indices() {
            if let Some(sub) = tree.covering_phrase_subtree(tok, allowed_roots)? {
                hull = Some(hull.map_or(sub, |h| h.hull(&sub)));
            }
        }
        let completed = match hull {
            Some(h) if h.covers(&cand.span) && h != cand.span => ScoredSpan {
                span: h,
                score: cand.score,
                provenance: Provenance::TreeCompleted {
                    origin: cand.similarity_span(),
                },
            },
            _ => *cand,
        };
        match out.iter_mut().find(|s| s.span == completed.span) {
            Some(existing) if existing.score < completed.score => *existing = completed,
            Some(_) => {}
            None => out.push(completed),
        }
    }
    Ok(out)
}

fn cap_candidates(slot: &[ScoredSpan], cap: usize) -> Vec<ScoredSpan> {
    let mut sorted = slot.to_vec();
    sorted.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.span.l.cmp(&b.span.l)));
    sorted.truncate(cap);
    sorted
}

struct Search<'a> {
    slots: &'a [Vec<ScoredSpan>],
    chosen: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
}

impl Search<'_> {
    fn starts(&self, picks: &[usize]) -> Vec<usize> {
        picks
            .iter()
            .enumerate()
            .map(|(s, &c)| self.slots[s][c].span.l)
            .collect()
    }

    fn better(&self, total: f64) -> bool {
        match &self.best {
            None => true,
            Some((best_total, best_picks)) => {
                total > *best_total
                    || (total == *best_total && self.starts(&self.chosen) < self.starts(best_picks))
            }
        }
    }

    fn run(&mut self) {
        let slot = self.chosen.len();
        if slot == self.slots.len() {
            let total: f64 = self
                .chosen
                .iter()
                .enumerate()
                .map(|(s, &c)| self.slots[s][c].score)
                .sum();
            if self.better(total) {
                self.best = Some((total, self.chosen.clone()));
            }
            return;
        }
        for c in 0..self.slots[slot].len() {
            let span = self.slots[slot][c].span;
            let clash = self
                .chosen
                .iter()
                .enumerate()
                .any(|(s, &p)| self.slots[s][p].span.overlaps(&span));
            if !clash {
                self.chosen.push(c);
                self.run();
                self.chosen.pop();
            }
        }
    }
}

/// One span per slot maximizing the total score with no two spans
/// overlapping. Each slot is first capped to its `max_candidates` best
/// spans. Ties prefer the lexicographically smallest sequence of starts in
/// slot order.
pub fn select_tuple_spans(
    candidates_per_slot: &[Vec<ScoredSpan>],
    max_candidates: usize,
) -> Result<Vec<ScoredSpan>, RestoreError> {
    if candidates_per_slot.iter().any(Vec::is_empty) {
        return Err(RestoreError::EmptySlot);
    }
    let slots: Vec<Vec<ScoredSpan>> = candidates_per_slot
        .iter()
        .map(|s| cap_candidates(s, max_candidates.max(1)))
        .collect();
    let mut search = Search {
        slots: &slots,
        chosen: Vec::with_capacity(slots.len()),
        best: None,
    };
    search.run();
    let (_, picks) = search.best.ok_or(RestoreError::NoFeasibleSelection)?;
    Ok(picks
        .iter()
        .enumerate()
        .map(|(s, &c)| slots[s][c])
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestoreOptions {
    /// Similarity threshold; positions must score strictly above it.
    pub tau: f64,
    /// Widen runs to phrase subtrees. Off gives the similarity-only path.
    pub complete: bool,
    pub max_candidates: usize,
    pub phrase_roots: Vec<String>,
    /// Let the source predicate compete for a span as an extra slot.
    pub predicate_candidates: bool,
}

impl Default for RestoreOptions {
    fn default() -> Self {
        RestoreOptions {
            tau: DEFAULT_TAU,
            complete: true,
            max_candidates: DEFAULT_MAX_CANDIDATES,
            phrase_roots: PHRASE_ROOTS.iter().map(|s| String::from(*s)).collect(),
            predicate_candidates: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestoredTuple {
    /// One selected span per source argument.
    pub args: Vec<ScoredSpan>,
    pub predicate: Option<ScoredSpan>,
    /// Similarity profile over the target for each argument.
    pub profiles: Vec<Vec<f64>>,
}

impl RestoredTuple {
    pub fn arg_spans(&self) -> Vec<TokenSpan> {
        self.args.iter().map(|s| s.span).collect()
    }
}

/// Locate every argument of `src_tuple` inside the target sentence.
pub fn restore_arguments(
    src_tuple: &Extraction,
    src_emb: &EmbeddingMatrix,
    tgt_emb: &EmbeddingMatrix,
    tgt_tree: &ParseTree,
    opts: &RestoreOptions,
) -> Result<RestoredTuple, RestoreError> {
    if tgt_emb.len() != tgt_tree.token_count() {
        return Err(RestoreError::TokenCountMismatch {
            embedding: tgt_emb.len(),
            tree: tgt_tree.token_count(),
        });
    }
    let roots: Vec<&str> = opts.phrase_roots.iter().map(String::as_str).collect();
    let mut slots = Vec::with_capacity(src_tuple.args.len() + 1);
    let mut profiles = Vec::with_capacity(src_tuple.args.len());
    for (slot, arg) in src_tuple.args.iter().enumerate() {
        let span = arg.span.ok_or(RestoreError::MissingSpan { slot })?;
        let profile = similarity_profile(src_emb, tgt_emb, span)?;
        let mut cands = merge_threshold_spans(&profile, opts.tau);
        if opts.complete {
            cands = complete_spans(tgt_tree, &cands, &roots)?;
        }
        if cands.is_empty() {
            return Err(RestoreError::NoCandidates { slot });
        }
        slots.push(cands);
        profiles.push(profile);
    }
    let n_args = slots.len();

    if opts.predicate_candidates {
        if let Some(span) = src_tuple.predicate.span {
            let profile = similarity_profile(src_emb, tgt_emb, span)?;
            let cands = merge_threshold_spans(&profile, opts.tau);
            if !cands.is_empty() {
                slots.push(cands);
                match select_tuple_spans(&slots, opts.max_candidates) {
                    Ok(mut picked) => {
                        let predicate = picked.pop();
                        return Ok(RestoredTuple {
                            args: picked,
                            predicate,
                            profiles,
                        });
                    }
                    Err(RestoreError::NoFeasibleSelection) => {
                        slots.truncate(n_args);
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }

    let args = select_tuple_spans(&slots, opts.max_candidates)?;
    Ok(RestoredTuple {
        args,
        predicate: None,
        profiles,
    })
}
