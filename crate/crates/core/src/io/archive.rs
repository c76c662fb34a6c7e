//! Token-embedding archives: per-token contextual vectors for every sentence
//! of one corpus side.
//!
//! An archive is a directory holding `index.json` and one packed blob of
//! little-endian `f32` values. Each index entry names the source line of the
//! sentence, its first row in the blob and its token count. Lines missing
//! from the index were skipped by the producer (empty input lines).

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const INDEX_FILE: &str = "index.json";
const DEFAULT_BLOB: &str = "tokens.f32";

/// The `L x D` token matrix of one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenMatrix {
    line: usize,
    rows: usize,
    dim: usize,
    data: Vec<f64>,
}

impl TokenMatrix {
    pub fn new(line: usize, data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(Error::data(format!(
                "sentence at line {line} does not form a non-empty matrix of width {dim}"
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::data_at(
                pos / dim,
                format!("non-finite token value in sentence at line {line}"),
            ));
        }
        Ok(Self {
            line,
            rows: data.len() / dim,
            dim,
            data,
        })
    }

    pub fn line(&self) -> usize {
        self.line
    }

    pub fn len(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn token(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn tokens(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TokenEmbeddingArchive {
    dim: usize,
    sentences: Vec<TokenMatrix>,
    by_line: HashMap<usize, usize>,
}

impl TokenEmbeddingArchive {
    pub fn new(dim: usize, sentences: Vec<TokenMatrix>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::data("token archive dimension must be positive"));
        }
        let mut by_line = HashMap::with_capacity(sentences.len());
        for (i, s) in sentences.iter().enumerate() {
            if s.dim != dim {
                return Err(Error::data(format!(
                    "sentence at line {} has dimension {}, archive has {dim}",
                    s.line, s.dim
                )));
            }
            if by_line.insert(s.line, i).is_some() {
                return Err(Error::data(format!(
                    "line {} appears twice in archive",
                    s.line
                )));
            }
        }
        Ok(Self {
            dim,
            sentences,
            by_line,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn sentences(&self) -> &[TokenMatrix] {
        &self.sentences
    }

    /// The sentence produced from the given source line, if it was encoded.
    pub fn line(&self, line: usize) -> Option<&TokenMatrix> {
        self.by_line.get(&line).map(|&i| &self.sentences[i])
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Index {
    version: u32,
    dim: usize,
    dtype: String,
    blob: String,
    sentences: Vec<IndexEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct IndexEntry {
    line: usize,
    offset: usize,
    rows: usize,
}

pub fn read_token_archive(dir: impl AsRef<Path>) -> Result<TokenEmbeddingArchive> {
    let dir = dir.as_ref();
    let index_path = dir.join(INDEX_FILE);
    let text = fs::read_to_string(&index_path).map_err(|e| Error::io(&index_path, e))?;
    let index: Index = serde_json::from_str(&text).map_err(|e| Error::Format {
        line: Some(e.line()),
        message: format!("{}: {e}", index_path.display()),
    })?;
    if index.version != 1 {
        return Err(Error::format(format!(
            "unsupported token archive version {}",
            index.version
        )));
    }
    if index.dtype != "<f4" {
        return Err(Error::format(format!(
            "unsupported token archive dtype '{}'",
            index.dtype
        )));
    }
    if index.dim == 0 {
        return Err(Error::data("token archive dimension must be positive"));
    }
    let blob_path = dir.join(&index.blob);
    let bytes = fs::read(&blob_path).map_err(|e| Error::io(&blob_path, e))?;
    let row_bytes = index.dim * 4;
    if bytes.len() % row_bytes != 0 {
        return Err(Error::format(format!(
            "blob size {} is not a multiple of the row size {row_bytes}",
            bytes.len()
        )));
    }
    let total_rows = bytes.len() / row_bytes;

    let mut sentences = Vec::with_capacity(index.sentences.len());
    for entry in &index.sentences {
        if entry.rows == 0 {
            return Err(Error::data(format!(
                "sentence at line {} has no tokens",
                entry.line
            )));
        }
        let end = entry
            .offset
            .checked_add(entry.rows)
            .filter(|&end| end <= total_rows)
            .ok_or_else(|| {
                Error::format(format!(
                    "sentence at line {} extends past the end of the blob",
                    entry.line
                ))
            })?;
        let data = bytes[entry.offset * row_bytes..end * row_bytes]
            .chunks_exact(4)
            .map(|b| f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]])))
            .collect();
        sentences.push(TokenMatrix::new(entry.line, data, index.dim)?);
    }
    TokenEmbeddingArchive::new(index.dim, sentences)
}

/// Writes `archive` into `dir` (created if missing). Values are stored as `f32`.
pub fn write_token_archive(archive: &TokenEmbeddingArchive, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut blob = Vec::new();
    let mut entries = Vec::with_capacity(archive.len());
    let mut offset = 0;
    for s in archive.sentences() {
        entries.push(IndexEntry {
            line: s.line,
            offset,
            rows: s.rows,
        });
        offset += s.rows;
        for &v in &s.data {
            blob.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    let index = Index {
        version: 1,
        dim: archive.dim,
        dtype: "<f4".to_string(),
        blob: DEFAULT_BLOB.to_string(),
        sentences: entries,
    };
    let blob_path = dir.join(DEFAULT_BLOB);
    fs::write(&blob_path, blob).map_err(|e| Error::io(&blob_path, e))?;
    let index_path = dir.join(INDEX_FILE);
    let json = serde_json::to_string_pretty(&index).expect("index serializes");
    fs::write(&index_path, json).map_err(|e| Error::io(&index_path, e))
}
