use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use rayon::prelude::*;
use robie_core::restore::{
    fallback_predicate, importance_scores, mask_tokens, predicate_request, restore_arguments, LemmaTable,
    RestoreError, RestoreOptions, TokenImportance,
};
use robie_core::seed::{self, purpose};

use super::{require, Command, Invocation};
use crate::config::PipelineConfig;
use crate::error::CliError;
use crate::formats::corpus::{from_span, write_corpus, SentenceRecord, TupleRecord};
use crate::formats::embeddings::EmbeddingBundle;
use crate::formats::{self, tables};

/// Restored paraphrase records plus the predicate request lines, one per
/// restored tuple in output order.
#[derive(Debug, Clone, PartialEq)]
pub struct RestoreSummary {
    pub records: Vec<SentenceRecord>,
    pub requests: Vec<String>,
    pub kept: usize,
    pub dropped: usize,
}

struct Restored {
    record: SentenceRecord,
    requests: Vec<String>,
    dropped: usize,
}

fn restore_one(
    target: &SentenceRecord,
    by_id: &BTreeMap<&str, &SentenceRecord>,
    bundle: &EmbeddingBundle,
    lemmas: &LemmaTable,
    opts: &RestoreOptions,
) -> Result<Restored, CliError> {
    let src_id = target.source.as_deref().expect("paraphrase records only");
    let source = by_id
        .get(src_id)
        .ok_or_else(|| CliError::invalid(format!("record {}: unknown source {src_id}", target.id)))?;
    let embedding = |r: &SentenceRecord| {
        let m = bundle
            .get(&r.id)
            .ok_or_else(|| CliError::invalid(format!("record {}: no embeddings", r.id)))?;
        if m.len() != r.tree.token_count() {
            return Err(CliError::invalid(format!(
                "record {}: {} embedding rows for {} tokens",
                r.id,
                m.len(),
                r.tree.token_count()
            )));
        }
        Ok(m)
    };
    let (src_emb, tgt_emb) = (embedding(source)?, embedding(target)?);
    let tgt_tokens = target.tokens();

    let mut tuples = Vec::new();
    let mut requests = Vec::new();
    let mut dropped = 0;
    for (ti, t) in source.tuples.iter().enumerate() {
        let ctx = |msg: String| CliError::invalid(format!("record {}, tuple {ti}: {msg}", source.id));
        if let Some(i) = (0..t.args.len()).find(|&i| t.arg_span(i).is_none()) {
            return Err(ctx(format!("argument {i} {:?} is not in the sentence", t.args[i])));
        }
        let restored = match restore_arguments(&t.extraction(), src_emb, tgt_emb, &target.tree, opts) {
            Ok(r) => r,
            Err(RestoreError::NoCandidates { .. } | RestoreError::NoFeasibleSelection) => {
                dropped += 1;
                continue;
            }
            Err(e) => return Err(ctx(e.to_string())),
        };
        let spans = restored.arg_spans();
        let args: Vec<String> = spans.iter().map(|&s| target.span_text(s)).collect();
        let importance = importance_scores(&restored.args, &restored.profiles).map_err(|e| ctx(e.to_string()))?;
        let src_pred: Vec<&str> = t.predicate.split_whitespace().collect();
        let pred_span = restored
            .predicate
            .map(|p| p.span)
            .or_else(|| fallback_predicate(&tgt_tokens, &src_pred, &spans, lemmas));
        requests.push(
            predicate_request(
                &target.text,
                &args[0],
                args.get(1).map_or("", String::as_str),
            )
            .map_err(|e| ctx(e.to_string()))?,
        );
        tuples.push(TupleRecord {
            predicate: pred_span.map_or_else(|| t.predicate.clone(), |s| target.span_text(s)),
            args,
            confidence: t.confidence,
            pred_span: pred_span.map(from_span),
            arg_spans: spans.into_iter().map(|s| Some(from_span(s))).collect(),
            importance: Some(importance.iter().map(|i| (i.index, i.value)).collect()),
        });
    }
    Ok(Restored {
        record: SentenceRecord {
            tuples,
            ..target.clone()
        },
        requests,
        dropped,
    })
}

/// Restore every source tuple inside each paraphrase record (a record with
/// a `source`). Tuples with an argument that cannot be placed are dropped;
/// records left without tuples are omitted.
///
/// With `replies`, predicates come from the external generator: reply `n`
/// answers request line `n`, and predicate spans are left empty. Without
/// them the source predicate competes for a span and the lemma scan is the
/// fallback.
pub fn restore_corpus(
    records: &[SentenceRecord],
    bundle: &EmbeddingBundle,
    lemmas: &LemmaTable,
    replies: Option<&BTreeMap<usize, String>>,
    tau: f64,
) -> Result<RestoreSummary, CliError> {
    let by_id: BTreeMap<&str, &SentenceRecord> = records.iter().map(|r| (r.id.as_str(), r)).collect();
    let opts = RestoreOptions {
        tau,
        predicate_candidates: replies.is_none(),
        ..RestoreOptions::default()
    };
    let targets: Vec<&SentenceRecord> = records.iter().filter(|r| r.source.is_some()).collect();
    if targets.is_empty() {
        return Err(CliError::invalid("no record names a source sentence"));
    }
    let results = targets
        .par_iter()
        .map(|t| restore_one(t, &by_id, bundle, lemmas, &opts))
        .collect::<Result<Vec<_>, _>>()?;

    let mut summary = RestoreSummary {
        records: Vec::new(),
        requests: Vec::new(),
        kept: 0,
        dropped: 0,
    };
    for mut r in results {
        summary.dropped += r.dropped;
        for (tuple, request) in r.record.tuples.iter_mut().zip(r.requests) {
            summary.requests.push(request);
            summary.kept += 1;
            if let Some(replies) = replies {
                let n = summary.kept;
                tuple.predicate = replies
                    .get(&n)
                    .ok_or_else(|| CliError::invalid(format!("no reply for request {n}")))?
                    .clone();
                tuple.pred_span = None;
            }
        }
        if !r.record.tuples.is_empty() {
            summary.records.push(r.record);
        }
    }
    Ok(summary)
}

pub fn restore(inv: &Invocation, records: &[SentenceRecord]) -> Result<(String, String), CliError> {
    let paths = &inv.config.paths;
    let bundle = formats::load_bundle(require(&paths.embeddings, "embeddings", Command::Restore)?)?;
    let lemmas = match &paths.lemmas {
        Some(p) => formats::load_table(p, tables::parse_lemmas)?,
        None => LemmaTable::new(),
    };
    let replies = match &paths.replies {
        Some(p) => Some(formats::load_table(p, tables::parse_replies)?),
        None => None,
    };
    let summary = restore_corpus(records, &bundle, &lemmas, replies.as_ref(), inv.config.tau)?;
    let requests: String = summary.requests.iter().map(|r| format!("{r}\n")).collect();
    Ok((write_corpus(&summary.records), requests))
}

/// Importance of each tuple's argument tokens: stored values, or 1.0 for
/// every argument token when none are stored.
fn tuple_importance(t: &TupleRecord) -> Vec<TokenImportance> {
    if let Some(stored) = &t.importance {
        return stored
            .iter()
            .map(|&(index, value)| TokenImportance { index, value })
            .collect();
    }
    let tokens: BTreeSet<usize> = (0..t.args.len())
        .filter_map(|i| t.arg_span(i))
        .flat_map(|s| s.indices())
        .collect();
    tokens
        .into_iter()
        .map(|index| TokenImportance { index, value: 1.0 })
        .collect()
}

/// `id<TAB>tuple<TAB>masked indices<TAB>masked words` per tuple. Each
/// tuple draws from its own seed so records can be processed in any order.
pub fn mask(records: &[SentenceRecord], config: &PipelineConfig) -> Result<String, CliError> {
    let mut out = String::new();
    for r in records {
        let tokens = r.tokens();
        for (ti, t) in r.tuples.iter().enumerate() {
            let key = format!("{}#{ti}", r.id);
            let masked = mask_tokens(
                &tuple_importance(t),
                config.mask_rate,
                seed::derive(config.seed, purpose::MASK, &key),
            )
            .map_err(|e| CliError::invalid(format!("record {}, tuple {ti}: {e}", r.id)))?;
            let idx: Vec<String> = masked.iter().map(usize::to_string).collect();
            let words: Vec<&str> = masked.iter().map(|&i| tokens[i]).collect();
            writeln!(out, "{}\t{ti}\t{}\t{}", r.id, idx.join(" "), words.join(" ")).unwrap();
        }
    }
    Ok(out)
}
