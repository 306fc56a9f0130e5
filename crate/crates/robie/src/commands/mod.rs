//! Batch commands. Each one validates its configuration, reads its inputs,
//! renders every output in memory and only then writes.

mod restore;
mod score;
mod syntax;

use std::path::{Path, PathBuf};

use crate::config::PipelineConfig;
use crate::error::CliError;
use crate::formats::{self, corpus::SentenceRecord};

pub use restore::{restore_corpus, RestoreSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Prune,
    Distance,
    Cluster,
    SelectParses,
    Restore,
    Mask,
    Score,
    Report,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Prune,
        Command::Distance,
        Command::Cluster,
        Command::SelectParses,
        Command::Restore,
        Command::Mask,
        Command::Score,
        Command::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Prune => "prune",
            Command::Distance => "distance",
            Command::Cluster => "cluster",
            Command::SelectParses => "select-parses",
            Command::Restore => "restore",
            Command::Mask => "mask",
            Command::Score => "score",
            Command::Report => "report",
        }
    }
}

/// A fully resolved command line.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config: PipelineConfig,
    pub out: PathBuf,
    /// Predicate request file, written by `restore` only.
    pub requests: Option<PathBuf>,
}

/// A rendered output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
}

fn require<'a>(path: &'a Option<PathBuf>, flag: &str, command: Command) -> Result<&'a Path, CliError> {
    path.as_deref()
        .ok_or_else(|| CliError::invalid(format!("{} needs --{flag}", command.name())))
}

fn corpus_of(inv: &Invocation) -> Result<Vec<SentenceRecord>, CliError> {
    let path = require(&inv.config.paths.corpus, "corpus", inv.command)?;
    let records = formats::load_corpus(path)?;
    if records.is_empty() {
        return Err(CliError::invalid(format!("{}: no records", path.display())));
    }
    Ok(records)
}

/// Compute every output of `inv` without touching the filesystem beyond
/// reading inputs.
pub fn render(inv: &Invocation) -> Result<Vec<Artifact>, CliError> {
    inv.config.validate()?;
    if inv.requests.is_some() && inv.command != Command::Restore {
        return Err(CliError::invalid("--requests only applies to restore"));
    }
    let main = match inv.command {
        Command::Prune => syntax::prune(&corpus_of(inv)?, &inv.config)?,
        Command::Distance => syntax::distance(&corpus_of(inv)?, &inv.config)?,
        Command::Cluster => syntax::cluster(inv, &corpus_of(inv)?)?,
        Command::SelectParses => syntax::select_parses(inv, &corpus_of(inv)?)?,
        Command::Report => syntax::report(inv, &corpus_of(inv)?)?,
        Command::Mask => restore::mask(&corpus_of(inv)?, &inv.config)?,
        Command::Score => score::score(inv)?,
        Command::Restore => {
            let (restored, requests) = restore::restore(inv, &corpus_of(inv)?)?;
            let mut out = vec![Artifact {
                path: inv.out.clone(),
                bytes: restored.into_bytes(),
            }];
            if let Some(path) = &inv.requests {
                out.push(Artifact {
                    path: path.clone(),
                    bytes: requests.into_bytes(),
                });
            }
            return Ok(out);
        }
    };
    Ok(vec![Artifact {
        path: inv.out.clone(),
        bytes: main.into_bytes(),
    }])
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

/// Render, then write every artifact. Inputs are never overwritten.
pub fn run(inv: &Invocation) -> Result<(), CliError> {
    let p = &inv.config.paths;
    let inputs = [
        &p.corpus,
        &p.train,
        &p.embeddings,
        &p.pairs,
        &p.gold,
        &p.predictions,
        &p.lemmas,
        &p.replies,
    ];
    let outputs: Vec<&PathBuf> = std::iter::once(&inv.out).chain(inv.requests.as_ref()).collect();
    for out in &outputs {
        if inputs.iter().copied().flatten().any(|i| same_file(i, out)) {
            return Err(CliError::invalid(format!("{} is also an input", out.display())));
        }
    }
    if outputs.len() == 2 && same_file(outputs[0], outputs[1]) {
        return Err(CliError::invalid("--out and --requests name the same file"));
    }
    for artifact in render(inv)? {
        formats::write_atomic(&artifact.path, &artifact.bytes)?;
    }
    Ok(())
}

/// Fixed-precision rendering used by every report.
pub(crate) fn num(v: f64) -> String {
    format!("{v:.6}")
}
