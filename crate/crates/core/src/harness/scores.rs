use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::TurnScore;
use crate::error::{Error, Result};
use crate::metric::Orientation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreEntry {
    pub system_id: String,
    pub metric: String,
    pub value: f64,
    pub orientation: Orientation,
}

/// One scalar per (system, metric). Entries keep insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreTable {
    entries: Vec<ScoreEntry>,
    index: HashMap<(String, String), usize>,
}

impl ScoreTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, entry: ScoreEntry) -> Result<()> {
        if !entry.value.is_finite() {
            return Err(Error::data(format!(
                "non-finite {} score for system '{}'",
                entry.metric, entry.system_id
            )));
        }
        if let Some(other) = self.entries.iter().find(|e| e.metric == entry.metric) {
            if other.orientation != entry.orientation {
                return Err(Error::data(format!(
                    "metric '{}' recorded with conflicting orientations",
                    entry.metric
                )));
            }
        }
        let key = (entry.system_id.clone(), entry.metric.clone());
        if self.index.contains_key(&key) {
            return Err(Error::data(format!(
                "duplicate score for system '{}', metric '{}'",
                key.0, key.1
            )));
        }
        self.index.insert(key, self.entries.len());
        self.entries.push(entry);
        Ok(())
    }

    pub fn get(&self, system_id: &str, metric: &str) -> Option<&ScoreEntry> {
        self.index
            .get(&(system_id.to_string(), metric.to_string()))
            .map(|&i| &self.entries[i])
    }

    pub fn entries(&self) -> &[ScoreEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Metric names in order of first appearance.
    pub fn metrics(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        self.entries
            .iter()
            .filter(|e| seen.insert(e.metric.as_str()))
            .map(|e| e.metric.clone())
            .collect()
    }

    /// System ids in order of first appearance.
    pub fn systems(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        self.entries
            .iter()
            .filter(|e| seen.insert(e.system_id.as_str()))
            .map(|e| e.system_id.clone())
            .collect()
    }

    /// `system_id,metric,value,orientation` with a header row. Values use the
    /// shortest representation that parses back to the same `f64`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["system_id", "metric", "value", "orientation"])
            .expect("in-memory write");
        for e in &self.entries {
            w.write_record([
                e.system_id.as_str(),
                e.metric.as_str(),
                &e.value.to_string(),
                e.orientation.as_str(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is UTF-8")
    }

    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr
            .headers()
            .map_err(|e| Error::format_at(1, e.to_string()))?;
        if header.iter().collect::<Vec<_>>() != ["system_id", "metric", "value", "orientation"] {
            return Err(Error::format_at(
                1,
                "expected header 'system_id,metric,value,orientation'",
            ));
        }
        let mut table = ScoreTable::new();
        for record in rdr.records() {
            let record = record.map_err(|e| Error::Format {
                line: e.position().map(|p| p.line() as usize),
                message: e.to_string(),
            })?;
            let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
            let value = record[2].parse::<f64>().map_err(|_| {
                Error::format_at(line, format!("unparsable value '{}'", &record[2]))
            })?;
            let orientation = record[3].parse::<Orientation>().map_err(|_| {
                Error::format_at(line, format!("unknown orientation '{}'", &record[3]))
            })?;
            table.insert(ScoreEntry {
                system_id: record[0].to_string(),
                metric: record[1].to_string(),
                value,
                orientation,
            })?;
        }
        Ok(table)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(file)
    }
}

/// Scores collected for one system.
#[derive(Debug, Clone, Default)]
pub struct SystemScores {
    pub system_id: String,
    /// Turn-level scores, averaged per metric.
    pub turn_scores: Vec<TurnScore>,
    /// Scores already at system level (distribution metrics, corpus BLEU),
    /// copied through unchanged.
    pub system_scores: Vec<TurnScore>,
}

pub fn aggregate_system_scores(systems: &[SystemScores]) -> Result<ScoreTable> {
    let mut table = ScoreTable::new();
    for system in systems {
        if system.turn_scores.is_empty() && system.system_scores.is_empty() {
            return Err(Error::data(format!(
                "system '{}' has no scores",
                system.system_id
            )));
        }
        // metric -> (sum, count, orientation), in first-appearance order
        let mut order = Vec::new();
        let mut acc: HashMap<&str, (f64, usize, Orientation)> = HashMap::new();
        for s in &system.turn_scores {
            let e = acc.entry(s.metric.as_str()).or_insert_with(|| {
                order.push(s.metric.as_str());
                (0.0, 0, s.orientation)
            });
            if e.2 != s.orientation {
                return Err(Error::data(format!(
                    "metric '{}' has conflicting orientations",
                    s.metric
                )));
            }
            e.0 += s.value;
            e.1 += 1;
        }
        for metric in order {
            let (sum, count, orientation) = acc[metric];
            table.insert(ScoreEntry {
                system_id: system.system_id.clone(),
                metric: metric.to_string(),
                value: sum / count as f64,
                orientation,
            })?;
        }
        for s in &system.system_scores {
            table.insert(ScoreEntry {
                system_id: system.system_id.clone(),
                metric: s.metric.clone(),
                value: s.value,
                orientation: s.orientation,
            })?;
        }
    }
    Ok(table)
}
