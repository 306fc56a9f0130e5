use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::formats::corpus::CorpusError;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration, flags or input content.
    #[error("{0}")]
    Invalid(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}:{line}: {msg}", path.display())]
    Format {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{}: {source}", path.display())]
    Corpus {
        path: PathBuf,
        source: CorpusError,
    },
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Invalid(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn format(path: &Path, line: usize, msg: impl Into<String>) -> Self {
        CliError::Format {
            path: path.to_path_buf(),
            line,
            msg: msg.into(),
        }
    }

    /// 2 for I/O failures, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 2,
            _ => 1,
        }
    }
}
