use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::ScoreTable;
use crate::error::{Error, Result};
use crate::io::RatingsTable;

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Domain(format!(
            "correlation inputs have lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::Domain(format!(
            "correlation needs at least 3 observations, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::data("correlation input has a non-finite value"));
    }
    Ok(())
}

/// Product-moment correlation, clamped to `[-1, 1]`.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::data("correlation is undefined for a constant input"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share the mean of their positions.
pub fn rank_average(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation of average-tie ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson(&rank_average(x), &rank_average(y))
        .map_err(|_| Error::data("Spearman correlation is undefined: zero rank variance"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cell {
    Value {
        spearman: f64,
        pearson: f64,
    },
    /// Shown as `ERR` in rendered reports.
    Error(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub metric: String,
    pub aspect: String,
    pub n_systems: usize,
    pub cell: Cell,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub rows: Vec<CorrelationRow>,
}

impl CorrelationReport {
    pub fn extend(&mut self, other: CorrelationReport) {
        self.rows.extend(other.rows);
    }

    pub fn find(&self, metric: &str, aspect: &str) -> Option<&CorrelationRow> {
        self.rows
            .iter()
            .find(|r| r.metric == metric && r.aspect == aspect)
    }
}

/// Correlates every metric in `scores` with the per-system mean rating of
/// `aspect`. Lower-better metrics are negated first so that a positive
/// coefficient always means agreement with the human ranking.
pub fn correlate(
    scores: &ScoreTable,
    ratings: &RatingsTable,
    aspect: &str,
) -> Result<CorrelationReport> {
    let human = ratings.system_means(aspect);
    let scored: BTreeSet<String> = scores.systems().into_iter().collect();
    let common: Vec<&String> = human.keys().filter(|s| scored.contains(*s)).collect();
    if common.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "aspect '{aspect}' has ratings for {} of the scored systems; at least 3 are needed",
            common.len()
        )));
    }

    let mut report = CorrelationReport::default();
    for metric in scores.metrics() {
        let mut metric_values = Vec::new();
        let mut rating_values = Vec::new();
        let mut missing = Vec::new();
        for &system in &common {
            match scores.get(system, &metric) {
                Some(e) => {
                    metric_values.push(e.orientation.orient(e.value));
                    rating_values.push(human[system]);
                }
                None => missing.push(system.as_str()),
            }
        }
        let n_systems = metric_values.len();
        let cell = if !missing.is_empty() {
            Cell::Error(format!("no score for system(s) {}", missing.join(", ")))
        } else {
            match (
                spearman(&metric_values, &rating_values),
                pearson(&metric_values, &rating_values),
            ) {
                (Ok(spearman), Ok(pearson)) => Cell::Value { spearman, pearson },
                (Err(e), _) | (_, Err(e)) => Cell::Error(e.to_string()),
            }
        };
        report.rows.push(CorrelationRow {
            metric,
            aspect: aspect.to_string(),
            n_systems,
            cell,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ScoreEntry;
    use crate::io::RatingRow;
    use crate::metric::Orientation;

    #[test]
    fn spearman_basic_cases() {
        assert_eq!(
            spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(),
            1.0
        );
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert!(
            (spearman(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]).unwrap() - 0.6).abs() < 1e-15
        );
    }

    #[test]
    fn average_ranks_for_ties() {
        assert_eq!(
            rank_average(&[3.0, 1.0, 3.0, 2.0]),
            vec![3.5, 1.0, 3.5, 2.0]
        );
    }

    #[test]
    fn pearson_cases() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((pearson(&x, &y).unwrap() - 1.0).abs() < 1e-15);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
        // means 2.5 and 2.75; sxy = 5.5, sxx = 5, syy = 8.75
        let r = pearson(&x, &[1.0, 3.0, 2.0, 5.0]).unwrap();
        assert!((r - 5.5 / (5.0f64 * 8.75).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn correlation_errors() {
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::Data { .. })
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]),
            Err(Error::Data { .. })
        ));
    }

    fn ratings(values: &[(&str, f64)], aspect: &str) -> RatingsTable {
        let mut t = RatingsTable::new();
        for (s, v) in values {
            t.push(RatingRow {
                system_id: s.to_string(),
                sample_id: "q1".into(),
                aspect: aspect.into(),
                score: *v,
            })
            .unwrap();
        }
        t
    }

    fn table(metric: &str, orientation: Orientation, values: &[(&str, f64)]) -> ScoreTable {
        let mut t = ScoreTable::new();
        for (s, v) in values {
            t.insert(ScoreEntry {
                system_id: s.to_string(),
                metric: metric.into(),
                value: *v,
                orientation,
            })
            .unwrap();
        }
        t
    }

    #[test]
    fn lower_better_is_flipped() {
        let scores = table(
            "fbd",
            Orientation::LowerBetter,
            &[("a", 2.0), ("b", 1.0), ("c", 3.0)],
        );
        let human = ratings(&[("a", 4.0), ("b", 5.0), ("c", 3.0)], "overall");
        let report = correlate(&scores, &human, "overall").unwrap();
        let row = report.find("fbd", "overall").unwrap();
        assert_eq!(row.n_systems, 3);
        assert!(matches!(row.cell, Cell::Value { spearman, .. } if spearman == 1.0));
    }

    #[test]
    fn missing_aspect_and_missing_scores() {
        let scores = table(
            "bleu",
            Orientation::HigherBetter,
            &[("a", 0.1), ("b", 0.2), ("c", 0.3)],
        );
        let human = ratings(&[("a", 1.0), ("b", 2.0), ("c", 3.0)], "overall");
        assert!(
            matches!(correlate(&scores, &human, "grammar"), Err(Error::InsufficientData(m)) if m.contains("grammar"))
        );

        let mut partial = scores.clone();
        partial
            .insert(ScoreEntry {
                system_id: "a".into(),
                metric: "prd".into(),
                value: 0.5,
                orientation: Orientation::HigherBetter,
            })
            .unwrap();
        let report = correlate(&partial, &human, "overall").unwrap();
        assert!(matches!(
            report.find("prd", "overall").unwrap().cell,
            Cell::Error(_)
        ));
        assert!(matches!(
            report.find("bleu", "overall").unwrap().cell,
            Cell::Value { .. }
        ));
    }
}
