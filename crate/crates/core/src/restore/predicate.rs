use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::RestoreError;
use crate::treebank::TokenSpan;

pub const REQUEST_TERMINATOR: &str = "</s>";

/// Input line for the external predicate generator:
/// `"<sentence>, <arg1>, <arg2> </s>"`.
pub fn predicate_request(sentence: &str, arg1: &str, arg2: &str) -> Result<String, RestoreError> {
    if sentence.trim().is_empty() {
        return Err(RestoreError::EmptySentence);
    }
    Ok(format!("{sentence}, {arg1}, {arg2} {REQUEST_TERMINATOR}"))
}

/// Word to lemma mapping; lookups are case-insensitive and unknown words
/// are their own lemma.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LemmaTable {
    lemmas: BTreeMap<String, String>,
}

impl LemmaTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, word: &str, lemma: &str) {
        self.lemmas.insert(word.to_lowercase(), lemma.to_lowercase());
    }

    pub fn lemma(&self, word: &str) -> String {
        let lower = word.to_lowercase();
        self.lemmas.get(&lower).cloned().unwrap_or(lower)
    }

    pub fn len(&self) -> usize {
        self.lemmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lemmas.is_empty()
    }
}

fn gaps(len: usize, args: &[TokenSpan]) -> Vec<(usize, usize)> {
    let mut sorted = args.to_vec();
    sorted.sort();
    if sorted.len() >= 2 {
        return sorted
            .windows(2)
            .filter(|w| w[0].r < w[1].l)
            .map(|w| (w[0].r, w[1].l))
            .collect();
    }
    // fewer than two arguments: every region outside them
    let mut out = Vec::new();
    let mut at = 0;
    for span in &sorted {
        if at < span.l {
            out.push((at, span.l));
        }
        at = at.max(span.r);
    }
    if at < len {
        out.push((at, len));
    }
    out
}

/// Deterministic predicate locator used when no generator is attached.
///
/// Within each gap between adjacent argument spans, the candidate is the
/// smallest span holding every token whose lemma is a source predicate
/// lemma. The gap matching the most distinct lemmas wins; ties go to the
/// shorter span, then the leftmost.
pub fn fallback_predicate<S: AsRef<str>>(
    tgt_tokens: &[S],
    src_pred_lemmas: &[S],
    arg_spans: &[TokenSpan],
    lemmas: &LemmaTable,
) -> Option<TokenSpan> {
    let wanted: BTreeSet<String> = src_pred_lemmas
        .iter()
        .map(|l| lemmas.lemma(l.as_ref()))
        .collect();
    let mut best: Option<(usize, TokenSpan)> = None;
    for (lo, hi) in gaps(tgt_tokens.len(), arg_spans) {
        let hits: Vec<(usize, String)> = (lo..hi)
            .map(|j| (j, lemmas.lemma(tgt_tokens[j].as_ref())))
            .filter(|(_, l)| wanted.contains(l))
            .collect();
        let (Some(first), Some(last)) = (hits.first(), hits.last()) else {
            continue;
        };
        let distinct = hits.iter().map(|h| &h.1).collect::<BTreeSet<_>>().len();
        let span = TokenSpan::new(first.0, last.0 + 1);
        let better = match &best {
            None => true,
            Some((d, s)) => distinct > *d || (distinct == *d && span.len() < s.len()),
        };
        if better {
            best = Some((distinct, span));
        }
    }
    best.map(|(_, s)| s)
}
