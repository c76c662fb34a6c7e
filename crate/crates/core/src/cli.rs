//! The `distmetric` command-line front end.
//!
//! Exit codes: 0 on success, 1 on a computational error, 2 on a usage,
//! format or data error. `DISTMETRIC_THREADS` caps the worker pool.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::baselines::{self, TurnPair};
use crate::error::{Error, Result};
use crate::frechet::{fbd_from_sets, CovDivisor, FbdOptions, FitOptions, MeanNorm};
use crate::harness::{
    correlate, normality_profile, render_report, CorrelationReport, ReportFormat, ScoreTable,
};
use crate::io;
use crate::metric::Metric;
use crate::prd::{prd_from_sets, PrdOptions, DEFAULT_ANGLES, DEFAULT_CLUSTERS, DEFAULT_RUNS};
use crate::seed::{Seed, DEFAULT_SEED};
use crate::study::{run_study, StudyManifest};

pub const THREADS_ENV: &str = "DISTMETRIC_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "distmetric",
    version,
    about = "Distribution-wise metrics for dialogue evaluation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fréchet distance between the Gaussian fits of two embedding sets.
    Fbd(FbdArgs),
    /// Precision-recall distance (max F1) between two embedding sets.
    Prd(PrdArgs),
    /// A turn-level baseline metric over line-aligned hypothesis/reference files.
    Baseline(BaselineArgs),
    /// Run a correlation study described by a JSON manifest.
    Study(StudyArgs),
    /// Per-dimension Shapiro-Wilk profile of an embedding set.
    Normality(NormalityArgs),
    /// Correlate a saved score table with human ratings.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct FbdArgs {
    pub real: PathBuf,
    pub gen: PathBuf,
    #[arg(long, default_value_t = MeanNorm::Squared)]
    pub mean_norm: MeanNorm,
    #[arg(long, default_value_t = CovDivisor::NMinusOne)]
    pub cov_divisor: CovDivisor,
    #[arg(long, default_value_t = 0.0)]
    pub cov_ridge: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct PrdArgs {
    pub real: PathBuf,
    pub gen: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CLUSTERS)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_ANGLES)]
    pub m: usize,
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    pub runs: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write the run-averaged curve as CSV.
    #[arg(long)]
    pub curve_out: Option<PathBuf>,
    /// Also write each run's curve next to `--curve-out` as `<stem>.runNN.csv`.
    #[arg(long, requires = "curve_out")]
    pub per_run_curves: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[arg(long)]
    pub metric: Metric,
    /// Hypothesis text, one turn per line.
    #[arg(long)]
    pub hyp: Option<PathBuf>,
    /// Reference text, line-aligned with `--hyp`.
    #[arg(long = "ref")]
    pub reference: Option<PathBuf>,
    #[arg(long)]
    pub word_vectors: Option<PathBuf>,
    /// Token-embedding archive for the hypotheses (bertscore).
    #[arg(long)]
    pub hyp_tokens: Option<PathBuf>,
    #[arg(long)]
    pub ref_tokens: Option<PathBuf>,
    #[arg(long, default_value_t = baselines::DEFAULT_BLEU_ORDER)]
    pub max_n: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    pub manifest: PathBuf,
    #[arg(long, default_value_t = ReportFormat::Markdown)]
    pub format: ReportFormat,
    /// Where to write the score table (default: next to the manifest).
    #[arg(long)]
    pub scores_out: Option<PathBuf>,
    /// Overrides the manifest's seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct NormalityArgs {
    pub embeddings: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long)]
    pub ratings: PathBuf,
    /// Restrict to these aspects (repeatable); default is every rated aspect.
    #[arg(long = "aspect")]
    pub aspects: Vec<String>,
    #[arg(long, default_value_t = ReportFormat::Markdown)]
    pub format: ReportFormat,
}

/// Runs the CLI on the process arguments and returns the exit code.
pub fn main() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(message) = configure_threads() {
        eprintln!("error: {message}");
        return 2;
    }
    match run(&cli.command) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got '{value}'"))?;
    // A pool may already exist when the CLI is driven in-process; keep it.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

/// Executes one command and returns what it prints on stdout.
pub fn run(command: &Command) -> Result<String> {
    match command {
        Command::Fbd(a) => cmd_fbd(a),
        Command::Prd(a) => cmd_prd(a),
        Command::Baseline(a) => cmd_baseline(a),
        Command::Study(a) => cmd_study(a),
        Command::Normality(a) => cmd_normality(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn cmd_fbd(a: &FbdArgs) -> Result<String> {
    let real = io::read_embedding_set(&a.real)?;
    let gen = io::read_embedding_set(&a.gen)?;
    let options = FbdOptions {
        mean_norm: a.mean_norm,
        fit: FitOptions {
            divisor: a.cov_divisor,
            ridge: a.cov_ridge,
        },
    };
    let value = fbd_from_sets(&real, &gen, &options)?;
    if a.json {
        let doc = json!({
            "metric": "fbd",
            "value": value,
            "n_real": real.len(),
            "n_gen": gen.len(),
            "dim": real.dim(),
            "mean_norm": a.mean_norm.to_string(),
            "cov_divisor": a.cov_divisor.to_string(),
        });
        Ok(format!("{doc}\n"))
    } else {
        Ok(format!("{value:.6}\n"))
    }
}

fn cmd_prd(a: &PrdArgs) -> Result<String> {
    let real = io::read_embedding_set(&a.real)?;
    let gen = io::read_embedding_set(&a.gen)?;
    let options = PrdOptions {
        clusters: a.k,
        angles: a.m,
        runs: a.runs,
        seed: Seed(a.seed),
    };
    let result = prd_from_sets(&real, &gen, &options)?;
    if !result.converged {
        eprintln!("warning: k-means did not converge in at least one run");
    }
    if let Some(path) = &a.curve_out {
        write_file(path, &result.curve.to_csv())?;
        if a.per_run_curves {
            for (i, curve) in result.runs.iter().enumerate() {
                write_file(&run_curve_path(path, i), &curve.to_csv())?;
            }
        }
    }
    if a.json {
        let doc = json!({
            "metric": "prd",
            "max_f1": result.max_f1,
            "curve_max_f1": result.curve.max_f1,
            "n_real": real.len(),
            "n_gen": gen.len(),
            "dim": real.dim(),
            "k": a.k,
            "m": a.m,
            "runs": a.runs,
            "seed": a.seed,
            "converged": result.converged,
        });
        Ok(format!("{doc}\n"))
    } else {
        Ok(format!("{:.6}\n", result.max_f1))
    }
}

/// `curves/prd.csv`, run 3 -> `curves/prd.run03.csv`.
pub fn run_curve_path(curve_out: &Path, run: usize) -> PathBuf {
    let stem = curve_out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "curve".into());
    curve_out.with_file_name(format!("{stem}.run{run:02}.csv"))
}

fn cmd_baseline(a: &BaselineArgs) -> Result<String> {
    let metric = a.metric;
    let usage = |what: &str| Error::Manifest(format!("metric '{metric}' needs {what}"));
    let (value, turns) = match metric {
        Metric::Fbd | Metric::Prd => {
            return Err(Error::Manifest(format!(
                "'{metric}' is a distribution metric; use the '{metric}' subcommand"
            )))
        }
        Metric::BertScore => {
            let hyp = io::read_token_archive(
                a.hyp_tokens.as_ref().ok_or_else(|| usage("--hyp-tokens"))?,
            )?;
            let refs = io::read_token_archive(
                a.ref_tokens.as_ref().ok_or_else(|| usage("--ref-tokens"))?,
            )?;
            let mut sum = 0.0;
            let mut turns = 0;
            for h in hyp.sentences() {
                if let Some(r) = refs.line(h.line()) {
                    sum += baselines::bertscore(h, r)?.f1;
                    turns += 1;
                }
            }
            if turns == 0 {
                return Err(Error::data("no line is present in both token archives"));
            }
            (sum / turns as f64, turns)
        }
        _ => {
            let hyp = io::read_lines(a.hyp.as_ref().ok_or_else(|| usage("--hyp"))?)?;
            let refs = io::read_lines(a.reference.as_ref().ok_or_else(|| usage("--ref"))?)?;
            let pairs = baselines::turn_pairs(&hyp, &refs)?;
            let value = match metric {
                Metric::Bleu => baselines::bleu(&pairs, a.max_n)?,
                Metric::RougeL => mean(pairs.iter().map(|p| Ok(baselines::rouge_l(p))))?,
                _ => {
                    let table = io::read_word_vectors(
                        a.word_vectors
                            .as_ref()
                            .ok_or_else(|| usage("--word-vectors"))?,
                    )?;
                    let score: fn(&TurnPair, &io::WordVectorTable) -> Result<f64> = match metric {
                        Metric::Average => baselines::embedding_average,
                        Metric::Extrema => baselines::vector_extrema,
                        _ => baselines::greedy_matching,
                    };
                    mean(pairs.iter().map(|p| score(p, &table)))?
                }
            };
            (value, pairs.len())
        }
    };
    if a.json {
        let doc = json!({
            "metric": metric.name(),
            "value": value,
            "turns": turns,
            "orientation": metric.orientation().as_str(),
        });
        Ok(format!("{doc}\n"))
    } else {
        Ok(format!("{value:.6}\n"))
    }
}

fn mean(values: impl Iterator<Item = Result<f64>>) -> Result<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for v in values {
        sum += v?;
        n += 1;
    }
    Ok(sum / n as f64)
}

fn cmd_study(a: &StudyArgs) -> Result<String> {
    let mut manifest = StudyManifest::load(&a.manifest)?;
    if let Some(seed) = a.seed {
        manifest.params.seed = seed;
    }
    let outcome = run_study(&manifest)?;
    let scores_out = a
        .scores_out
        .clone()
        .or_else(|| manifest.scores_out.clone())
        .unwrap_or_else(|| default_scores_path(&a.manifest));
    outcome.scores.write(&scores_out)?;
    for f in &outcome.failures {
        eprintln!(
            "warning: {} failed for system '{}': {}",
            f.metric, f.system_id, f.message
        );
    }
    render_report(&outcome.report, a.format)
}

/// `studies/run.json` -> `studies/run.scores.csv`.
pub fn default_scores_path(manifest: &Path) -> PathBuf {
    let stem = manifest
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "study".into());
    manifest.with_file_name(format!("{stem}.scores.csv"))
}

fn cmd_normality(a: &NormalityArgs) -> Result<String> {
    let set = io::read_embedding_set(&a.embeddings)?;
    let p = normality_profile(&set, Seed(a.seed))?;
    if a.json {
        let doc = json!({
            "mean_w": p.mean_w,
            "std_w": p.std_w,
            "dims_tested": p.dims_tested,
            "dims_excluded": p.dims_excluded,
            "rows_used": p.rows_used,
        });
        Ok(format!("{doc}\n"))
    } else {
        Ok(format!("{:.3}±{:.3}\n", p.mean_w, p.std_w))
    }
}

fn cmd_report(a: &ReportArgs) -> Result<String> {
    let scores = ScoreTable::read(&a.scores)?;
    let ratings = io::read_ratings(&a.ratings)?;
    let aspects = if a.aspects.is_empty() {
        ratings.aspects()
    } else {
        a.aspects.clone()
    };
    let mut report = CorrelationReport::default();
    for aspect in &aspects {
        report.extend(correlate(&scores, &ratings, aspect)?);
    }
    render_report(&report, a.format)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}
