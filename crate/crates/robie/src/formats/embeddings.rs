//! `EMB1` embedding bundles.
//!
//! Little-endian: magic `EMB1`, `u32` entry count, then per entry a `u16`
//! id length, the id bytes, `u32` token count, `u32` dim and
//! `tokens * dim` `f32` values, row-major.

use std::collections::BTreeMap;

use robie_core::restore::EmbeddingMatrix;
use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"EMB1";

#[derive(Debug, Error, PartialEq)]
pub enum BundleError {
    #[error("not an EMB1 bundle")]
    BadMagic,
    #[error("truncated at byte {0}")]
    Truncated(usize),
    #[error("{0} trailing bytes")]
    Trailing(usize),
    #[error("entry {0}: id is not UTF-8")]
    BadId(usize),
    #[error("duplicate entry {0}")]
    DuplicateId(String),
    #[error("entry {id}: dim {dim} differs from bundle dim {expected}")]
    MixedDim { id: String, dim: usize, expected: usize },
    #[error("entry {id}: non-finite value in row {row}")]
    NonFinite { id: String, row: usize },
    #[error("entry {0}: dim is zero")]
    ZeroDim(String),
    #[error("entry id longer than 65535 bytes")]
    IdTooLong,
}

/// Embedding matrices keyed by sentence id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingBundle {
    entries: BTreeMap<String, EmbeddingMatrix>,
}

impl EmbeddingBundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, matrix: EmbeddingMatrix) -> Result<(), BundleError> {
        if let Some(expected) = self.dim() {
            if matrix.dim() != expected {
                return Err(BundleError::MixedDim {
                    id: matrix.sentence_id().to_string(),
                    dim: matrix.dim(),
                    expected,
                });
            }
        }
        let id = matrix.sentence_id().to_string();
        if self.entries.contains_key(&id) {
            return Err(BundleError::DuplicateId(id));
        }
        self.entries.insert(id, matrix);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&EmbeddingMatrix> {
        self.entries.get(id)
    }

    pub fn dim(&self) -> Option<usize> {
        self.entries.values().next().map(EmbeddingMatrix::dim)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &EmbeddingMatrix> {
        self.entries.values()
    }

    /// Entries in id order.
    pub fn to_bytes(&self) -> Result<Vec<u8>, BundleError> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.entries.len() as u32).to_le_bytes());
        for (id, m) in &self.entries {
            let len = u16::try_from(id.len()).map_err(|_| BundleError::IdTooLong)?;
            out.extend_from_slice(&len.to_le_bytes());
            out.extend_from_slice(id.as_bytes());
            out.extend_from_slice(&(m.len() as u32).to_le_bytes());
            out.extend_from_slice(&(m.dim() as u32).to_le_bytes());
            for v in m.as_slice() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, BundleError> {
        let mut r = Reader { bytes, at: 0 };
        if r.take(4)? != MAGIC {
            return Err(BundleError::BadMagic);
        }
        let count = r.u32()? as usize;
        let mut bundle = EmbeddingBundle::new();
        for entry in 0..count {
            let id_len = r.u16()? as usize;
            let id = std::str::from_utf8(r.take(id_len)?)
                .map_err(|_| BundleError::BadId(entry))?
                .to_string();
            let tokens = r.u32()? as usize;
            let dim = r.u32()? as usize;
            let mut data = Vec::with_capacity(tokens.saturating_mul(dim).min(1 << 24));
            for _ in 0..tokens * dim {
                data.push(f32::from_le_bytes(r.take(4)?.try_into().expect("4 bytes")));
            }
            if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
                return Err(BundleError::NonFinite { id, row: pos / dim.max(1) });
            }
            let matrix = EmbeddingMatrix::new(id.clone(), dim, data)
                .map_err(|_| BundleError::ZeroDim(id))?;
            bundle.insert(matrix)?;
        }
        if r.at != bytes.len() {
            return Err(BundleError::Trailing(bytes.len() - r.at));
        }
        Ok(bundle)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], BundleError> {
        let end = self.at.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or(BundleError::Truncated(self.bytes.len()))?;
        let out = &self.bytes[self.at..end];
        self.at = end;
        Ok(out)
    }

    fn u16(&mut self) -> Result<u16, BundleError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    fn u32(&mut self) -> Result<u32, BundleError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
}
