//! File formats and the validated data types every other module consumes.
//!
//! Readers validate at the boundary: a value returned from any `read_*`
//! function already satisfies the invariants of its type.

mod archive;
mod corpus;
mod npy;
mod ratings;
mod word_vectors;

use crate::error::{Error, Result};

pub use archive::{read_token_archive, write_token_archive, TokenEmbeddingArchive, TokenMatrix};
pub use corpus::{read_lines, read_text_corpus};
pub use npy::{
    read_embedding_set, read_npy, write_embedding_set, write_embedding_set_with, write_npy,
    Precision,
};
pub use ratings::{read_ratings, read_ratings_from, RatingRow, RatingsTable};
pub use word_vectors::{read_word_vectors, read_word_vectors_from, WordVectorTable};

/// An `N x D` matrix of sentence-pair representations, one row per pair.
///
/// Rows are stored contiguously in row-major order. Construction fails unless
/// `N >= 1`, `D >= 1` and every value is finite.
#[derive(Debug, Clone)]
pub struct EmbeddingSet {
    data: Vec<f64>,
    n: usize,
    dim: usize,
    system_id: String,
    source: String,
}

impl EmbeddingSet {
    pub fn new(data: Vec<f64>, n: usize, dim: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::data("embedding set has zero rows"));
        }
        if dim == 0 {
            return Err(Error::data("embedding set has zero columns"));
        }
        if data.len() != n * dim {
            return Err(Error::data(format!(
                "expected {} values for shape ({n}, {dim}), got {}",
                n * dim,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::data_at(
                pos / dim,
                format!("non-finite value {} in column {}", data[pos], pos % dim),
            ));
        }
        Ok(Self {
            data,
            n,
            dim,
            system_id: String::new(),
            source: "synthetic".to_string(),
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::data_at(
                    i,
                    format!("row has {} columns, expected {dim}", row.len()),
                ));
            }
            data.extend_from_slice(row);
        }
        Self::new(data, rows.len(), dim)
    }

    pub fn with_system_id(mut self, system_id: impl Into<String>) -> Self {
        self.system_id = system_id.into();
        self
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn system_id(&self) -> &str {
        &self.system_id
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    /// Row-major view of all values.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Values of one column, in row order.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    /// New set containing the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.n {
                return Err(Error::Domain(format!(
                    "row index {i} out of range for {} rows",
                    self.n
                )));
            }
            data.extend_from_slice(self.row(i));
        }
        Ok(Self::new(data, indices.len(), self.dim)?
            .with_system_id(self.system_id.clone())
            .with_source(self.source.clone()))
    }

    /// True when shapes match and every value has the same bit pattern.
    pub fn bitwise_eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.dim == other.dim
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}
