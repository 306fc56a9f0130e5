use std::fmt::Write;

use robie_core::cluster::{cluster_by_distance, sample_indices, train_to_cluster_distance, word_distribution_report};
use robie_core::seed::{self, purpose};
use robie_core::syndist::{retrieve_source_parses, sample_target_parses};
use robie_core::ParseTree;

use super::{num, require, Command, Invocation};
use crate::config::PipelineConfig;
use crate::error::CliError;
use crate::formats::{self, corpus::SentenceRecord, tables};
use crate::parallel;

fn trees(records: &[SentenceRecord]) -> Vec<ParseTree> {
    records.iter().map(|r| r.tree.clone()).collect()
}

/// `id<TAB>pruned parse` per record.
pub fn prune(records: &[SentenceRecord], config: &PipelineConfig) -> Result<String, CliError> {
    let mut out = String::new();
    for r in records {
        let pruned = r.tree.prune(config.height).map_err(|e| CliError::invalid(e.to_string()))?;
        writeln!(out, "{}\t{pruned}", r.id).unwrap();
    }
    Ok(out)
}

/// Square matrix with a header row of ids.
pub fn distance(records: &[SentenceRecord], config: &PipelineConfig) -> Result<String, CliError> {
    let m = parallel::distance_matrix(&trees(records), &config.distance_params())
        .map_err(|e| CliError::invalid(e.to_string()))?;
    let mut out = String::from("id");
    for r in records {
        write!(out, "\t{}", r.id).unwrap();
    }
    out.push('\n');
    for (i, r) in records.iter().enumerate() {
        out.push_str(&r.id);
        for &d in m.row(i) {
            write!(out, "\t{}", num(d)).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

/// Per-sentence assignments, then one summary row per cluster with the
/// mean distance of the sampled training sentences to its medoid.
pub fn cluster(inv: &Invocation, records: &[SentenceRecord]) -> Result<String, CliError> {
    let config = &inv.config;
    if config.clusters > records.len() {
        return Err(CliError::invalid(format!(
            "clusters = {} exceeds the {} corpus sentences",
            config.clusters,
            records.len()
        )));
    }
    let params = config.distance_params();
    let corpus = trees(records);
    let m = parallel::distance_matrix(&corpus, &params).map_err(|e| CliError::invalid(e.to_string()))?;
    let train = match &config.paths.train {
        Some(path) => {
            let train = formats::load_corpus(path)?;
            let picked = sample_indices(
                train.len(),
                config.train_sample,
                seed::derive(config.seed, purpose::TRAIN_SAMPLE, ""),
            );
            Some(picked.into_iter().map(|i| train[i].tree.clone()).collect::<Vec<_>>())
        }
        None => None,
    };
    let c = cluster_by_distance(
        &m,
        config.clusters,
        config.max_iter,
        seed::derive(config.seed, purpose::CLUSTER_INIT, ""),
    )
    .map_err(|e| CliError::invalid(e.to_string()))?;

    let mut out = String::from("id\tcluster\tdistance\n");
    for (i, r) in records.iter().enumerate() {
        let a = c.assignments[i];
        writeln!(out, "{}\t{a}\t{}", r.id, num(m.get(i, c.medoids[a]))).unwrap();
    }
    writeln!(
        out,
        "\n# iterations {} converged {} cost {}",
        c.iterations,
        c.converged,
        num(c.cost)
    )
    .unwrap();
    out.push_str("cluster\tmedoid\tsize\ttrain_distance\n");
    for (k, size) in c.cluster_sizes().into_iter().enumerate() {
        let medoid = c.medoids[k];
        let train_d = match &train {
            Some(sample) if !sample.is_empty() => {
                num(train_to_cluster_distance(sample, &corpus[medoid], &params)
                    .map_err(|e| CliError::invalid(e.to_string()))?)
            }
            _ => "-".to_string(),
        };
        writeln!(out, "{k}\t{}\t{size}\t{train_d}", records[medoid].id).unwrap();
    }
    Ok(out)
}

/// `id<TAB>rank<TAB>target parse` for up to `k` sampled targets per record.
pub fn select_parses(inv: &Invocation, records: &[SentenceRecord]) -> Result<String, CliError> {
    let config = &inv.config;
    let path = require(&config.paths.pairs, "pairs", Command::SelectParses)?;
    let table = formats::load_table(path, tables::parse_pair_table)?;
    if table.is_empty() {
        return Err(CliError::invalid(format!("{}: empty pair table", path.display())));
    }
    let mut out = String::new();
    for r in records {
        let query = r
            .tree
            .prune(config.height)
            .map_err(|e| CliError::invalid(e.to_string()))?
            .to_string();
        let invalid = |e: robie_core::syndist::SyndistError| CliError::invalid(format!("record {}: {e}", r.id));
        let sources = retrieve_source_parses(&query, &table, config.m).map_err(invalid)?;
        let targets = sample_target_parses(
            &sources,
            &table,
            config.k,
            seed::derive(config.seed, purpose::SAMPLING, &r.id),
        )
        .map_err(invalid)?;
        for (rank, t) in targets.iter().enumerate() {
            writeln!(out, "{}\t{}\t{t}", r.id, rank + 1).unwrap();
        }
    }
    Ok(out)
}

/// Word frequencies of the corpus against the training corpus.
pub fn report(inv: &Invocation, records: &[SentenceRecord]) -> Result<String, CliError> {
    let path = require(&inv.config.paths.train, "train", Command::Report)?;
    let train = formats::load_corpus(path)?;
    let tokens = |rs: &[SentenceRecord]| -> Vec<Vec<String>> {
        rs.iter()
            .map(|r| r.tokens().into_iter().map(String::from).collect())
            .collect()
    };
    let rows = word_distribution_report(&tokens(&train), &tokens(records))
        .map_err(|e| CliError::invalid(e.to_string()))?;
    let mut out = String::from("word\tfreq_train\tfreq_corpus\n");
    for w in rows {
        writeln!(out, "{}\t{}\t{}", w.word, num(w.freq_a), num(w.freq_b)).unwrap();
    }
    Ok(out)
}
