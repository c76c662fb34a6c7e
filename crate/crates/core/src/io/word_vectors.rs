//! Static word vectors in the common plain-text distribution format:
//! `token v1 ... vD` per line, optionally preceded by a `count dim` header.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct WordVectorTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl WordVectorTable {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            vectors: HashMap::new(),
        }
    }

    pub fn insert(&mut self, token: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        let token = token.into();
        if vector.len() != self.dim {
            return Err(Error::data(format!(
                "vector for '{token}' has dimension {}, table has {}",
                vector.len(),
                self.dim
            )));
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::data(format!(
                "vector for '{token}' has a non-finite value"
            )));
        }
        if self.vectors.contains_key(&token) {
            return Err(Error::data(format!("duplicate token '{token}'")));
        }
        self.vectors.insert(token, vector);
        Ok(())
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(Vec::as_slice)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Copy of the table with every vector multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            vectors: self
                .vectors
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(|x| x * factor).collect()))
                .collect(),
        }
    }
}

pub fn read_word_vectors(path: impl AsRef<Path>) -> Result<WordVectorTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_word_vectors_from(BufReader::new(file))
}

pub fn read_word_vectors_from<R: BufRead>(reader: R) -> Result<WordVectorTable> {
    let mut table: Option<WordVectorTable> = None;
    let mut declared_count = None;
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io("<word vectors>", e))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if i == 0 && fields.len() == 2 {
            if let (Ok(count), Ok(dim)) = (fields[0].parse::<usize>(), fields[1].parse::<usize>()) {
                declared_count = Some(count);
                table = Some(WordVectorTable::new(dim));
                continue;
            }
        }
        let values = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| {
                Error::format_at(lineno, format!("unparsable vector for '{}'", fields[0]))
            })?;
        if values.is_empty() {
            return Err(Error::format_at(
                lineno,
                format!("token '{}' has no vector", fields[0]),
            ));
        }
        let table = table.get_or_insert_with(|| WordVectorTable::new(values.len()));
        table.insert(fields[0], values).map_err(|e| match e {
            Error::Data { message, .. } => Error::Data {
                row: Some(lineno),
                message,
            },
            other => other,
        })?;
    }
    let table = table.ok_or_else(|| Error::data("word-vector file is empty"))?;
    if table.dim == 0 {
        return Err(Error::format("word-vector dimension must be positive"));
    }
    if let Some(count) = declared_count {
        if count != table.len() {
            return Err(Error::format(format!(
                "header declares {count} vectors, file has {}",
                table.len()
            )));
        }
    }
    Ok(table)
}
