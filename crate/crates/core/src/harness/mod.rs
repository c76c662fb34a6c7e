//! System-level evaluation: aggregate scores, correlate them with human
//! ratings, test per-dimension normality and render the results.

mod correlation;
mod normality;
mod report;
mod scores;
mod shapiro;

pub use correlation::{
    correlate, pearson, rank_average, spearman, Cell, CorrelationReport, CorrelationRow,
};
pub use normality::{normality_profile, NormalityProfile, MAX_NORMALITY_SAMPLES};
pub use report::{parse_report_csv, render_report, ReportFormat};
pub use scores::{aggregate_system_scores, ScoreEntry, ScoreTable, SystemScores};
pub use shapiro::{shapiro_wilk, ShapiroWilk};
