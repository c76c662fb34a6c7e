use std::fmt::Write as _;
use std::str::FromStr;

use super::correlation::{Cell, CorrelationReport, CorrelationRow};
use crate::error::{Error, Result};
use crate::metric::Category;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Markdown,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Domain(format!("unknown report format '{other}'"))),
        }
    }
}

impl std::fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ReportFormat::Markdown => "markdown",
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        })
    }
}

const CSV_HEADER: [&str; 7] = [
    "category",
    "metric",
    "aspect",
    "spearman",
    "pearson",
    "n_systems",
    "error",
];

/// Rows ordered by metric category, then metric name; aspect order within a
/// metric is kept as given.
fn ordered(report: &CorrelationReport) -> Vec<&CorrelationRow> {
    let mut rows: Vec<&CorrelationRow> = report.rows.iter().collect();
    rows.sort_by(|a, b| {
        Category::of(&a.metric)
            .cmp(&Category::of(&b.metric))
            .then_with(|| a.metric.cmp(&b.metric))
    });
    rows
}

pub fn render_report(report: &CorrelationReport, format: ReportFormat) -> Result<String> {
    if report.rows.is_empty() {
        return Err(Error::data("correlation report is empty"));
    }
    let rows = ordered(report);
    match format {
        ReportFormat::Markdown => {
            let mut out = String::from(
                "| Category | Metric | Aspect | Spearman | Pearson | Systems |\n|---|---|---|---:|---:|---:|\n",
            );
            for r in rows {
                let (s, p) = match &r.cell {
                    Cell::Value { spearman, pearson } => {
                        (format!("{spearman:.3}"), format!("{pearson:.3}"))
                    }
                    Cell::Error(_) => ("ERR".to_string(), "ERR".to_string()),
                };
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {s} | {p} | {} |",
                    Category::of(&r.metric).label(),
                    r.metric,
                    r.aspect,
                    r.n_systems
                );
            }
            Ok(out)
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER).expect("in-memory write");
            for r in rows {
                let (s, p, err) = match &r.cell {
                    Cell::Value { spearman, pearson } => {
                        (spearman.to_string(), pearson.to_string(), String::new())
                    }
                    Cell::Error(e) => ("ERR".into(), "ERR".into(), e.clone()),
                };
                w.write_record([
                    Category::of(&r.metric).label(),
                    &r.metric,
                    &r.aspect,
                    &s,
                    &p,
                    &r.n_systems.to_string(),
                    &err,
                ])
                .expect("in-memory write");
            }
            Ok(String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is UTF-8"))
        }
        ReportFormat::Json => {
            let ordered = CorrelationReport {
                rows: rows.into_iter().cloned().collect(),
            };
            Ok(serde_json::to_string_pretty(&ordered).expect("report serializes") + "\n")
        }
    }
}

/// Parses CSV produced by [`render_report`].
pub fn parse_report_csv(text: &str) -> Result<CorrelationReport> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| Error::format_at(1, e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::format_at(
            1,
            format!("expected header '{}'", CSV_HEADER.join(",")),
        ));
    }
    let mut report = CorrelationReport::default();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Format {
            line: e.position().map(|p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let number = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::format_at(line, format!("unparsable coefficient '{s}'")))
        };
        let cell = if &record[3] == "ERR" {
            Cell::Error(record[6].to_string())
        } else {
            Cell::Value {
                spearman: number(&record[3])?,
                pearson: number(&record[4])?,
            }
        };
        report.rows.push(CorrelationRow {
            metric: record[1].to_string(),
            aspect: record[2].to_string(),
            n_systems: record[5]
                .parse()
                .map_err(|_| Error::format_at(line, "unparsable system count"))?,
            cell,
        });
    }
    Ok(report)
}
