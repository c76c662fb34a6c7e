//! Correlation studies: score several systems with several metrics and
//! correlate the system-level scores with human ratings.
//!
//! A study is described by a JSON manifest. Relative paths are resolved
//! against the manifest's directory:
//!
//! ```json
//! {
//!   "real_embeddings": "real.npy",
//!   "references": "refs.txt",
//!   "reference_tokens": "refs.tokens",
//!   "word_vectors": "vectors.txt",
//!   "ratings": "ratings.csv",
//!   "metrics": ["fbd", "prd", "bleu", "rouge-l"],
//!   "params": { "k": 20, "m": 1001, "runs": 10, "seed": 20210604 },
//!   "systems": [
//!     { "system_id": "seq2seq", "embeddings": "seq2seq.npy", "hypotheses": "seq2seq.txt" }
//!   ]
//! }
//! ```
//!
//! Which optional inputs are required depends on the metric list.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::baselines::{self, TurnPair, TurnScore};
use crate::error::{Error, Result};
use crate::frechet::{fbd_from_sets, CovDivisor, FbdOptions, FitOptions, MeanNorm};
use crate::harness::{
    aggregate_system_scores, correlate, Cell, CorrelationReport, CorrelationRow, ScoreTable,
    SystemScores,
};
use crate::io::{self, EmbeddingSet, RatingsTable, TokenEmbeddingArchive, WordVectorTable};
use crate::metric::Metric;
use crate::prd::{prd_from_sets, PrdOptions, DEFAULT_ANGLES, DEFAULT_CLUSTERS, DEFAULT_RUNS};
use crate::seed::{Seed, DEFAULT_SEED};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    real_embeddings: Option<PathBuf>,
    references: Option<PathBuf>,
    reference_tokens: Option<PathBuf>,
    word_vectors: Option<PathBuf>,
    ratings: PathBuf,
    metrics: Vec<String>,
    #[serde(default)]
    params: StudyParams,
    #[serde(default)]
    aspects: Option<Vec<String>>,
    scores_out: Option<PathBuf>,
    systems: Vec<RawSystem>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    system_id: String,
    embeddings: Option<PathBuf>,
    hypotheses: Option<PathBuf>,
    tokens: Option<PathBuf>,
}

/// Per-metric parameters. Every field has a default.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyParams {
    pub k: usize,
    pub m: usize,
    pub runs: usize,
    pub seed: u64,
    pub max_n: usize,
    pub mean_norm: MeanNorm,
    pub cov_divisor: CovDivisor,
    pub cov_ridge: f64,
}

impl Default for StudyParams {
    fn default() -> Self {
        Self {
            k: DEFAULT_CLUSTERS,
            m: DEFAULT_ANGLES,
            runs: DEFAULT_RUNS,
            seed: DEFAULT_SEED,
            max_n: baselines::DEFAULT_BLEU_ORDER,
            mean_norm: MeanNorm::Squared,
            cov_divisor: CovDivisor::NMinusOne,
            cov_ridge: 0.0,
        }
    }
}

impl StudyParams {
    pub fn fbd_options(&self) -> FbdOptions {
        FbdOptions {
            mean_norm: self.mean_norm,
            fit: FitOptions {
                divisor: self.cov_divisor,
                ridge: self.cov_ridge,
            },
        }
    }

    pub fn prd_options(&self) -> PrdOptions {
        PrdOptions {
            clusters: self.k,
            angles: self.m,
            runs: self.runs,
            seed: Seed(self.seed),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SystemEntry {
    pub system_id: String,
    pub embeddings: Option<PathBuf>,
    pub hypotheses: Option<PathBuf>,
    pub tokens: Option<PathBuf>,
}

/// A validated study manifest with absolute (resolved) paths.
#[derive(Debug, Clone)]
pub struct StudyManifest {
    pub real_embeddings: Option<PathBuf>,
    pub references: Option<PathBuf>,
    pub reference_tokens: Option<PathBuf>,
    pub word_vectors: Option<PathBuf>,
    pub ratings: PathBuf,
    pub metrics: Vec<Metric>,
    pub params: StudyParams,
    pub aspects: Option<Vec<String>>,
    pub scores_out: Option<PathBuf>,
    pub systems: Vec<SystemEntry>,
}

impl StudyManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_json(&text, base)
    }

    /// Parses and validates a manifest; relative paths resolve against `base`.
    pub fn from_json(text: &str, base: &Path) -> Result<Self> {
        let raw: RawManifest =
            serde_json::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
        let mut metrics = Vec::new();
        for name in &raw.metrics {
            let metric: Metric = name.parse()?;
            if !metrics.contains(&metric) {
                metrics.push(metric);
            }
        }
        if metrics.is_empty() {
            return Err(Error::Manifest("metric list is empty".into()));
        }
        if raw.systems.len() < 3 {
            return Err(Error::InsufficientData(format!(
                "a study needs at least 3 systems, the manifest lists {}",
                raw.systems.len()
            )));
        }
        let mut ids = HashSet::new();
        for s in &raw.systems {
            if !ids.insert(s.system_id.as_str()) {
                return Err(Error::Manifest(format!(
                    "duplicate system_id '{}'",
                    s.system_id
                )));
            }
        }

        let resolve = |p: &Option<PathBuf>, what: &str| -> Result<Option<PathBuf>> {
            match p {
                None => Ok(None),
                Some(p) => {
                    let full = if p.is_absolute() {
                        p.clone()
                    } else {
                        base.join(p)
                    };
                    if !full.exists() {
                        return Err(Error::Manifest(format!(
                            "{what} '{}' does not exist",
                            full.display()
                        )));
                    }
                    Ok(Some(full))
                }
            }
        };
        let require = |p: Option<PathBuf>, what: &str, metric: Metric| -> Result<PathBuf> {
            p.ok_or_else(|| Error::Manifest(format!("metric '{metric}' needs {what}")))
        };

        let needs = |pred: fn(Metric) -> bool| metrics.iter().copied().find(|&m| pred(m));
        let distribution = needs(|m| matches!(m, Metric::Fbd | Metric::Prd));
        let text = needs(|m| {
            matches!(
                m,
                Metric::Bleu | Metric::RougeL | Metric::Average | Metric::Extrema | Metric::Greedy
            )
        });
        let vectors = needs(|m| matches!(m, Metric::Average | Metric::Extrema | Metric::Greedy));
        let contextual = needs(|m| m == Metric::BertScore);

        let real_embeddings = resolve(&raw.real_embeddings, "real_embeddings")?;
        let references = resolve(&raw.references, "references")?;
        let reference_tokens = resolve(&raw.reference_tokens, "reference_tokens")?;
        let word_vectors = resolve(&raw.word_vectors, "word_vectors")?;
        let ratings = resolve(&Some(raw.ratings.clone()), "ratings")?.expect("present");
        if let Some(m) = distribution {
            require(real_embeddings.clone(), "real_embeddings", m)?;
        }
        if let Some(m) = text {
            require(references.clone(), "references", m)?;
        }
        if let Some(m) = vectors {
            require(word_vectors.clone(), "word_vectors", m)?;
        }
        if let Some(m) = contextual {
            require(reference_tokens.clone(), "reference_tokens", m)?;
        }

        let mut systems = Vec::with_capacity(raw.systems.len());
        for s in &raw.systems {
            let what = |field: &str| format!("{field} of system '{}'", s.system_id);
            let entry = SystemEntry {
                system_id: s.system_id.clone(),
                embeddings: resolve(&s.embeddings, &what("embeddings"))?,
                hypotheses: resolve(&s.hypotheses, &what("hypotheses"))?,
                tokens: resolve(&s.tokens, &what("tokens"))?,
            };
            if let Some(m) = distribution {
                require(entry.embeddings.clone(), &what("embeddings"), m)?;
            }
            if let Some(m) = text {
                require(entry.hypotheses.clone(), &what("hypotheses"), m)?;
            }
            if let Some(m) = contextual {
                require(entry.tokens.clone(), &what("tokens"), m)?;
            }
            systems.push(entry);
        }
        let scores_out = raw
            .scores_out
            .map(|p| if p.is_absolute() { p } else { base.join(p) });

        Ok(Self {
            real_embeddings,
            references,
            reference_tokens,
            word_vectors,
            ratings,
            metrics,
            params: raw.params,
            aspects: raw.aspects,
            scores_out,
            systems,
        })
    }
}

/// A metric that could not be computed for one system.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricFailure {
    pub system_id: String,
    pub metric: Metric,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct StudyOutcome {
    pub scores: ScoreTable,
    pub report: CorrelationReport,
    pub failures: Vec<MetricFailure>,
}

/// Inputs shared by every system.
struct Shared {
    real: Option<EmbeddingSet>,
    references: Option<Vec<String>>,
    reference_tokens: Option<TokenEmbeddingArchive>,
    word_vectors: Option<WordVectorTable>,
}

pub fn run_study(manifest: &StudyManifest) -> Result<StudyOutcome> {
    let ratings = io::read_ratings(&manifest.ratings)?;
    let shared = Shared {
        real: manifest
            .real_embeddings
            .as_ref()
            .map(io::read_embedding_set)
            .transpose()?,
        references: manifest
            .references
            .as_ref()
            .map(io::read_lines)
            .transpose()?,
        reference_tokens: manifest
            .reference_tokens
            .as_ref()
            .map(io::read_token_archive)
            .transpose()?,
        word_vectors: manifest
            .word_vectors
            .as_ref()
            .map(io::read_word_vectors)
            .transpose()?,
    };

    let per_system: Vec<(SystemScores, Vec<MetricFailure>)> = manifest
        .systems
        .par_iter()
        .map(|system| score_system(system, manifest, &shared))
        .collect();

    let mut groups = Vec::with_capacity(per_system.len());
    let mut failures = Vec::new();
    for (scores, failed) in per_system {
        failures.extend(failed);
        if !scores.turn_scores.is_empty() || !scores.system_scores.is_empty() {
            groups.push(scores);
        }
    }
    let scores = aggregate_system_scores(&groups)?;
    let aspects = manifest
        .aspects
        .clone()
        .unwrap_or_else(|| ratings.aspects());
    if aspects.is_empty() {
        return Err(Error::InsufficientData("ratings file has no rows".into()));
    }
    let report = correlate_all(&scores, &ratings, &aspects, &manifest.metrics, &failures)?;
    Ok(StudyOutcome {
        scores,
        report,
        failures,
    })
}

fn correlate_all(
    scores: &ScoreTable,
    ratings: &RatingsTable,
    aspects: &[String],
    metrics: &[Metric],
    failures: &[MetricFailure],
) -> Result<CorrelationReport> {
    let mut report = CorrelationReport::default();
    for aspect in aspects {
        let mut part = correlate(scores, ratings, aspect)?;
        for &metric in metrics {
            let failed: Vec<String> = failures
                .iter()
                .filter(|f| f.metric == metric)
                .map(|f| format!("{}: {}", f.system_id, f.message))
                .collect();
            if failed.is_empty() {
                continue;
            }
            let cell = Cell::Error(failed.join("; "));
            match part.rows.iter_mut().find(|r| r.metric == metric.name()) {
                Some(row) => row.cell = cell,
                None => part.rows.push(CorrelationRow {
                    metric: metric.name().to_string(),
                    aspect: aspect.clone(),
                    n_systems: 0,
                    cell,
                }),
            }
        }
        report.extend(part);
    }
    Ok(report)
}

fn score_system(
    system: &SystemEntry,
    manifest: &StudyManifest,
    shared: &Shared,
) -> (SystemScores, Vec<MetricFailure>) {
    let mut scores = SystemScores {
        system_id: system.system_id.clone(),
        ..Default::default()
    };
    let mut failures = Vec::new();
    let params = &manifest.params;

    // Inputs are loaded lazily and at most once per system.
    let mut embeddings: Option<Result<EmbeddingSet>> = None;
    let mut pairs: Option<Result<Vec<TurnPair>>> = None;

    for &metric in &manifest.metrics {
        let outcome: Result<()> = (|| {
            match metric {
                Metric::Fbd | Metric::Prd => {
                    let gen = embeddings
                        .get_or_insert_with(|| {
                            io::read_embedding_set(system.embeddings.as_ref().expect("validated"))
                        })
                        .as_ref()
                        .map_err(clone_error)?;
                    let real = shared.real.as_ref().expect("validated");
                    let value = if metric == Metric::Fbd {
                        fbd_from_sets(real, gen, &params.fbd_options())?
                    } else {
                        prd_from_sets(real, gen, &params.prd_options())?.max_f1
                    };
                    scores.system_scores.push(TurnScore::new(metric, value));
                }
                Metric::BertScore => {
                    let hyp = io::read_token_archive(system.tokens.as_ref().expect("validated"))?;
                    let refs = shared.reference_tokens.as_ref().expect("validated");
                    let mut turns = 0;
                    for h in hyp.sentences() {
                        if let Some(r) = refs.line(h.line()) {
                            let s = baselines::bertscore(h, r)?;
                            scores.turn_scores.push(TurnScore::new(metric, s.f1));
                            turns += 1;
                        }
                    }
                    if turns == 0 {
                        return Err(Error::data("no line is present in both token archives"));
                    }
                }
                _ => {
                    let pairs = pairs
                        .get_or_insert_with(|| {
                            let hyp =
                                io::read_lines(system.hypotheses.as_ref().expect("validated"))?;
                            baselines::turn_pairs(
                                &hyp,
                                shared.references.as_ref().expect("validated"),
                            )
                        })
                        .as_ref()
                        .map_err(clone_error)?;
                    score_text_metric(metric, pairs, params, shared, &mut scores)?;
                }
            }
            Ok(())
        })();
        if let Err(e) = outcome {
            // Drop partial turn scores of the failed metric.
            scores.turn_scores.retain(|s| s.metric != metric.name());
            failures.push(MetricFailure {
                system_id: system.system_id.clone(),
                metric,
                message: e.to_string(),
            });
        }
    }
    (scores, failures)
}

fn score_text_metric(
    metric: Metric,
    pairs: &[TurnPair],
    params: &StudyParams,
    shared: &Shared,
    scores: &mut SystemScores,
) -> Result<()> {
    if metric == Metric::Bleu {
        let value = baselines::bleu(pairs, params.max_n)?;
        scores.system_scores.push(TurnScore::new(metric, value));
        return Ok(());
    }
    for pair in pairs {
        let value = match metric {
            Metric::RougeL => baselines::rouge_l(pair),
            Metric::Average => baselines::embedding_average(pair, word_vectors(shared))?,
            Metric::Extrema => baselines::vector_extrema(pair, word_vectors(shared))?,
            Metric::Greedy => baselines::greedy_matching(pair, word_vectors(shared))?,
            other => unreachable!("{other} is not a text metric"),
        };
        scores.turn_scores.push(TurnScore::new(metric, value));
    }
    Ok(())
}

fn word_vectors(shared: &Shared) -> &WordVectorTable {
    shared.word_vectors.as_ref().expect("validated")
}

fn clone_error(e: &Error) -> Error {
    match e {
        Error::Io { path, source } => Error::Io {
            path: path.clone(),
            source: std::io::Error::new(source.kind(), source.to_string()),
        },
        Error::Format { line, message } => Error::Format {
            line: *line,
            message: message.clone(),
        },
        Error::Data { row, message } => Error::Data {
            row: *row,
            message: message.clone(),
        },
        Error::InsufficientData(m) => Error::InsufficientData(m.clone()),
        Error::Domain(m) => Error::Domain(m.clone()),
        Error::Numerical(m) => Error::Numerical(m.clone()),
        Error::Coverage(m) => Error::Coverage(m.clone()),
        Error::Manifest(m) => Error::Manifest(m.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn touch(dir: &Path, name: &str) {
        fs::write(dir.join(name), "").unwrap();
    }

    fn manifest(systems: usize, metrics: &str) -> String {
        let systems: Vec<String> = (0..systems)
            .map(|i| {
                format!(r#"{{"system_id": "s{i}", "embeddings": "e.npy", "hypotheses": "h.txt"}}"#)
            })
            .collect();
        format!(
            r#"{{"real_embeddings": "e.npy", "references": "h.txt", "ratings": "r.csv",
                "metrics": {metrics}, "systems": [{}]}}"#,
            systems.join(",")
        )
    }

    #[test]
    fn validation() {
        let dir = tempfile::tempdir().unwrap();
        for f in ["e.npy", "h.txt", "r.csv"] {
            touch(dir.path(), f);
        }
        let ok = StudyManifest::from_json(&manifest(3, r#"["fbd", "bleu"]"#), dir.path()).unwrap();
        assert_eq!(ok.metrics, vec![Metric::Fbd, Metric::Bleu]);
        assert_eq!(ok.params, StudyParams::default());
        assert_eq!(
            ok.systems[0].embeddings.as_deref(),
            Some(dir.path().join("e.npy").as_path())
        );

        let two = StudyManifest::from_json(&manifest(2, r#"["fbd"]"#), dir.path());
        assert!(matches!(two, Err(Error::InsufficientData(_))));

        let unknown = StudyManifest::from_json(&manifest(3, r#"["fbd", "meteor"]"#), dir.path());
        assert!(matches!(unknown, Err(Error::Manifest(m)) if m.contains("meteor")));

        let no_vectors = StudyManifest::from_json(&manifest(3, r#"["greedy"]"#), dir.path());
        assert!(matches!(no_vectors, Err(Error::Manifest(m)) if m.contains("word_vectors")));

        fs::remove_file(dir.path().join("r.csv")).unwrap();
        let missing = StudyManifest::from_json(&manifest(3, r#"["fbd"]"#), dir.path());
        assert!(matches!(missing, Err(Error::Manifest(m)) if m.contains("r.csv")));
    }
}
