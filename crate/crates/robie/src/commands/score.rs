use std::fmt::Write;
use std::path::Path;

use robie_core::carbscore::{build_match_table, corpus_pr_curve, PrCurve, SentenceTuples};

use super::{num, require, Command, Invocation};
use crate::error::CliError;
use crate::formats::{self, tables, tables::TupleSet};

/// Predictions from a `.jsonl` corpus (its tuples, with their confidences)
/// or from a prediction table.
fn load_predictions(path: &Path) -> Result<TupleSet, CliError> {
    if path.extension().is_some_and(|e| e == "jsonl") {
        let mut set = TupleSet::default();
        for r in formats::load_corpus(path)? {
            for t in &r.tuples {
                set.push(&r.text, t.extraction());
            }
        }
        return Ok(set);
    }
    formats::load_table(path, tables::parse_predictions)
}

/// Render a scored corpus: the match cells per sentence, the swept curve
/// and the `AUC<TAB>OptF1<TAB>LastF1` summary as the last two lines.
pub fn render_report(sentences: &[String], aligned: &[SentenceTuples], curve: &PrCurve) -> String {
    let mut out = String::from("sentence\tgold\tpred\tprecision\trecall\n");
    for (s, pair) in sentences.iter().zip(aligned) {
        let table = build_match_table(&pair.golds, &pair.preds);
        for g in 0..table.gold_count() {
            for p in 0..table.pred_count() {
                let cell = table.cell(g, p);
                writeln!(out, "{s}\t{g}\t{p}\t{}\t{}", num(cell.precision()), num(cell.recall())).unwrap();
            }
        }
    }
    out.push_str("\nthreshold\tprecision\trecall\n");
    for pt in &curve.points {
        writeln!(out, "{}\t{}\t{}", num(pt.threshold), num(pt.precision), num(pt.recall)).unwrap();
    }
    writeln!(
        out,
        "\nAUC\tOptF1\tLastF1\n{}\t{}\t{}",
        num(curve.auc),
        num(curve.optimal_f1),
        num(curve.last_f1)
    )
    .unwrap();
    out
}

pub fn score(inv: &Invocation) -> Result<String, CliError> {
    let paths = &inv.config.paths;
    let golds = formats::load_table(require(&paths.gold, "gold", Command::Score)?, tables::parse_gold)?;
    let preds = load_predictions(require(&paths.predictions, "predictions", Command::Score)?)?;
    let aligned = TupleSet::align(&golds, &preds);
    let curve = corpus_pr_curve(&aligned).map_err(|e| CliError::invalid(e.to_string()))?;
    Ok(render_report(&golds.sentences, &aligned, &curve))
}
