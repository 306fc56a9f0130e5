pub mod corpus;
pub mod embeddings;
pub mod tables;

use std::io::Write;
use std::path::Path;

use crate::error::CliError;
use corpus::SentenceRecord;
use embeddings::EmbeddingBundle;
use tables::LineError;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn load_corpus(path: &Path) -> Result<Vec<SentenceRecord>, CliError> {
    corpus::parse_corpus(&read_text(path)?).map_err(|source| CliError::Corpus {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_bundle(path: &Path) -> Result<EmbeddingBundle, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    EmbeddingBundle::from_bytes(&bytes)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

/// Read and parse a line-oriented table, attaching the path to errors.
pub fn load_table<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T, LineError>) -> Result<T, CliError> {
    parse(&read_text(path)?).map_err(|e| CliError::format(path, e.line, e.msg))
}

/// Replace `path` with `bytes` through a temporary file in the same
/// directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
