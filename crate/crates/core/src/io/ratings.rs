//! Human ratings: UTF-8 CSV with header `system_id,sample_id,aspect,score`.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RatingRow {
    pub system_id: String,
    pub sample_id: String,
    pub aspect: String,
    pub score: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RatingsTable {
    rows: Vec<RatingRow>,
    keys: HashSet<(String, String, String)>,
}

impl RatingsTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, row: RatingRow) -> Result<()> {
        if !row.score.is_finite() {
            return Err(Error::data(format!(
                "non-finite score for ({}, {}, {})",
                row.system_id, row.sample_id, row.aspect
            )));
        }
        let key = (
            row.system_id.clone(),
            row.sample_id.clone(),
            row.aspect.clone(),
        );
        if !self.keys.insert(key) {
            return Err(Error::data(format!(
                "duplicate rating for ({}, {}, {})",
                row.system_id, row.sample_id, row.aspect
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[RatingRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Aspects in order of first appearance.
    pub fn aspects(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        self.rows
            .iter()
            .filter(|r| seen.insert(r.aspect.as_str()))
            .map(|r| r.aspect.clone())
            .collect()
    }

    /// Mean score per system for one aspect.
    pub fn system_means(&self, aspect: &str) -> BTreeMap<String, f64> {
        let mut acc: BTreeMap<String, (f64, usize)> = BTreeMap::new();
        for r in self.rows.iter().filter(|r| r.aspect == aspect) {
            let e = acc.entry(r.system_id.clone()).or_default();
            e.0 += r.score;
            e.1 += 1;
        }
        acc.into_iter()
            .map(|(k, (sum, n))| (k, sum / n as f64))
            .collect()
    }
}

pub fn read_ratings(path: impl AsRef<Path>) -> Result<RatingsTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_ratings_from(file)
}

pub fn read_ratings_from<R: Read>(reader: R) -> Result<RatingsTable> {
    const HEADER: [&str; 4] = ["system_id", "sample_id", "aspect", "score"];
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = csv
        .headers()
        .map_err(|e| Error::format_at(1, e.to_string()))?
        .clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::format_at(
            1,
            format!("expected header '{}'", HEADER.join(",")),
        ));
    }
    let mut table = RatingsTable::new();
    for record in csv.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize);
            Error::Format {
                line,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let score = record[3]
            .parse::<f64>()
            .ok()
            .filter(|s| s.is_finite())
            .ok_or_else(|| Error::format_at(line, format!("unparsable score '{}'", &record[3])))?;
        table
            .push(RatingRow {
                system_id: record[0].to_string(),
                sample_id: record[1].to_string(),
                aspect: record[2].to_string(),
                score,
            })
            .map_err(|e| match e {
                Error::Data { message, .. } => Error::Data {
                    row: Some(line),
                    message,
                },
                other => other,
            })?;
    }
    Ok(table)
}
