//! Token-overlap scoring of extraction tuples.
//!
//! For every (gold, prediction) pair the matcher counts common tokens slot
//! by slot (predicate against predicate, `arg_i` against `arg_i`; surplus
//! slots only add to the denominator). Precision is single-match: each gold
//! tuple backs at most one prediction, assigned greedily by cell precision.
//! Recall is multi-match: each gold takes its best cell recall over all
//! kept predictions.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::restore::Extraction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoreError {
    #[error("no gold tuples to score against")]
    NoGolds,
}

fn tokens(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_lowercase).collect()
}

fn slot_tokens(ex: &Extraction) -> Vec<Vec<String>> {
    core::iter::once(&ex.predicate)
        .chain(ex.args.iter())
        .map(|s| tokens(&s.text))
        .collect()
}

fn common(a: &[String], b: &[String]) -> usize {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for t in a {
        *counts.entry(t).or_default() += 1;
    }
    b.iter()
        .filter(|t| match counts.get_mut(t.as_str()) {
            Some(c) if *c > 0 => {
                *c -= 1;
                true
            }
            _ => false,
        })
        .count()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchCell {
    pub common_tokens: usize,
    pub gold_tokens: usize,
    pub pred_tokens: usize,
}

impl MatchCell {
    pub fn precision(&self) -> f64 {
        if self.pred_tokens == 0 {
            0.0
        } else {
            self.common_tokens as f64 / self.pred_tokens as f64
        }
    }

    pub fn recall(&self) -> f64 {
        if self.gold_tokens == 0 {
            0.0
        } else {
            self.common_tokens as f64 / self.gold_tokens as f64
        }
    }
}

/// Rows are gold tuples, columns are predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchTable {
    golds: usize,
    preds: usize,
    cells: Vec<MatchCell>,
}

impl MatchTable {
    pub fn gold_count(&self) -> usize {
        self.golds
    }

    pub fn pred_count(&self) -> usize {
        self.preds
    }

    pub fn cell(&self, gold: usize, pred: usize) -> &MatchCell {
        &self.cells[gold * self.preds + pred]
    }
}

pub fn build_match_table(golds: &[Extraction], preds: &[Extraction]) -> MatchTable {
    let gold_slots: Vec<_> = golds.iter().map(slot_tokens).collect();
    let pred_slots: Vec<_> = preds.iter().map(slot_tokens).collect();
    let mut cells = Vec::with_capacity(golds.len() * preds.len());
    for g in &gold_slots {
        let gold_tokens = g.iter().map(Vec::len).sum();
        for p in &pred_slots {
            let common_tokens = g.iter().zip(p).map(|(a, b)| common(a, b)).sum();
            cells.push(MatchCell {
                common_tokens,
                gold_tokens,
                pred_tokens: p.iter().map(Vec::len).sum(),
            });
        }
    }
    MatchTable {
        golds: golds.len(),
        preds: preds.len(),
        cells,
    }
}

/// Unnormalized counts at one confidence threshold.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThresholdCounts {
    pub precision_sum: f64,
    pub kept: usize,
    pub recall_sum: f64,
    pub golds: usize,
}

impl ThresholdCounts {
    pub fn precision(&self) -> f64 {
        if self.kept == 0 {
            1.0
        } else {
            self.precision_sum / self.kept as f64
        }
    }

    pub fn recall(&self) -> f64 {
        if self.golds == 0 {
            0.0
        } else {
            self.recall_sum / self.golds as f64
        }
    }

    fn add(&mut self, other: &ThresholdCounts) {
        self.precision_sum += other.precision_sum;
        self.kept += other.kept;
        self.recall_sum += other.recall_sum;
        self.golds += other.golds;
    }
}

/// Counts for the predictions with confidence `>= threshold`.
pub fn threshold_counts(table: &MatchTable, preds: &[Extraction], threshold: f64) -> ThresholdCounts {
    let kept: Vec<usize> = (0..table.preds)
        .filter(|&p| preds[p].confidence >= threshold)
        .collect();

    let mut pairs: Vec<(f64, usize, usize)> = kept
        .iter()
        .flat_map(|&p| (0..table.golds).map(move |g| (g, p)))
        .map(|(g, p)| (table.cell(g, p).precision(), g, p))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut gold_used = alloc::vec![false; table.golds];
    let mut pred_used = alloc::vec![false; table.preds];
    let mut precision_sum = 0.0;
    for (prec, g, p) in pairs {
        if !gold_used[g] && !pred_used[p] {
            gold_used[g] = true;
            pred_used[p] = true;
            precision_sum += prec;
        }
    }

    let recall_sum = (0..table.golds)
        .map(|g| {
            kept.iter()
                .map(|&p| table.cell(g, p).recall())
                .fold(0.0, f64::max)
        })
        .sum();

    ThresholdCounts {
        precision_sum,
        kept: kept.len(),
        recall_sum,
        golds: table.golds,
    }
}

/// `(precision, recall)` at `threshold`. Precision is 1 when nothing is kept.
pub fn score_at_threshold(table: &MatchTable, preds: &[Extraction], threshold: f64) -> (f64, f64) {
    let c = threshold_counts(table, preds, threshold);
    (c.precision(), c.recall())
}

pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Points ordered by descending confidence threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
    pub auc: f64,
    pub optimal_f1: f64,
    pub last_f1: f64,
}

impl PrCurve {
    /// Summaries for a precomputed sweep (recall non-decreasing).
    pub fn from_points(points: Vec<PrPoint>) -> Self {
        let recall_units: Vec<f64> = points.iter().map(|p| p.recall).collect();
        Self::summarize(points, &recall_units, 1.0)
    }

    // The trapezoid is accumulated over unnormalized recall and divided
    // once, so perfect sweeps integrate to exactly 1.
    fn summarize(points: Vec<PrPoint>, recall_units: &[f64], scale: f64) -> Self {
        let mut area = 0.0;
        if let Some(first) = points.first() {
            let (mut prev_r, mut prev_p) = (0.0, first.precision);
            for (p, &r) in points.iter().zip(recall_units) {
                area += (r - prev_r) * (p.precision + prev_p) / 2.0;
                prev_r = r;
                prev_p = p.precision;
            }
        }
        let optimal_f1 = points
            .iter()
            .map(|p| f1(p.precision, p.recall))
            .fold(0.0, f64::max);
        let last_f1 = points.last().map_or(0.0, |p| f1(p.precision, p.recall));
        PrCurve {
            auc: area / scale,
            optimal_f1,
            last_f1,
            points,
        }
    }
}

/// Golds and predictions of one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceTuples {
    pub golds: Vec<Extraction>,
    pub preds: Vec<Extraction>,
}

/// P-R curve over a corpus: precision and recall are pooled over all
/// sentences at each distinct prediction confidence, descending.
pub fn corpus_pr_curve(sentences: &[SentenceTuples]) -> Result<PrCurve, ScoreError> {
    let total_golds: usize = sentences.iter().map(|s| s.golds.len()).sum();
    if total_golds == 0 {
        return Err(ScoreError::NoGolds);
    }
    let tables: Vec<MatchTable> = sentences
        .iter()
        .map(|s| build_match_table(&s.golds, &s.preds))
        .collect();
    let mut thresholds: Vec<f64> = sentences
        .iter()
        .flat_map(|s| s.preds.iter().map(|p| p.confidence))
        .collect();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();

    let mut points = Vec::with_capacity(thresholds.len());
    let mut recall_units = Vec::with_capacity(thresholds.len());
    for t in thresholds {
        let mut pooled = ThresholdCounts::default();
        for (s, table) in sentences.iter().zip(&tables) {
            pooled.add(&threshold_counts(table, &s.preds, t));
        }
        points.push(PrPoint {
            threshold: t,
            precision: pooled.precision(),
            recall: pooled.recall(),
        });
        recall_units.push(pooled.recall_sum);
    }
    Ok(PrCurve::summarize(points, &recall_units, total_golds as f64))
}

/// Single-sentence P-R curve.
pub fn pr_curve(golds: &[Extraction], preds: &[Extraction]) -> Result<PrCurve, ScoreError> {
    corpus_pr_curve(&[SentenceTuples {
        golds: golds.to_vec(),
        preds: preds.to_vec(),
    }])
}
