//! Precision-recall distance between two embedding clouds.
//!
//! Both sets are discretized onto a shared finite state space (k-means
//! clusters of their union). With `R(v)` and `G(v)` the per-set cluster
//! masses, precision and recall at trade-off `lambda` are
//!
//! ```text
//! alpha(lambda) = sum_v min(lambda R(v), G(v))
//! beta(lambda)  = sum_v min(R(v), G(v) / lambda)
//! ```
//!
//! evaluated on the angular grid `lambda_i = tan(i / (m + 1) * pi / 2)`,
//! `i = 1..=m`. The summary score is the largest F1 along the curve.

pub mod kmeans;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::EmbeddingSet;
use crate::seed::Seed;

pub use kmeans::{kmeans, KMeans};

pub const DEFAULT_CLUSTERS: usize = 20;
pub const DEFAULT_ANGLES: usize = 1001;
pub const DEFAULT_RUNS: usize = 10;

/// Cluster masses of the real and generated sets over a shared state space.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramPair {
    pub r_mass: Vec<f64>,
    pub g_mass: Vec<f64>,
    pub assignments_r: Vec<usize>,
    pub assignments_g: Vec<usize>,
    /// False when k-means stopped at its iteration cap.
    pub converged: bool,
}

impl HistogramPair {
    /// Builds a pair from bare masses (no sample assignments).
    pub fn from_masses(r_mass: Vec<f64>, g_mass: Vec<f64>) -> Result<Self> {
        validate_masses(&r_mass, &g_mass)?;
        Ok(Self {
            r_mass,
            g_mass,
            assignments_r: Vec::new(),
            assignments_g: Vec::new(),
            converged: true,
        })
    }

    pub fn swapped(&self) -> Self {
        Self {
            r_mass: self.g_mass.clone(),
            g_mass: self.r_mass.clone(),
            assignments_r: self.assignments_g.clone(),
            assignments_g: self.assignments_r.clone(),
            converged: self.converged,
        }
    }
}

fn validate_masses(r: &[f64], g: &[f64]) -> Result<()> {
    if r.len() != g.len() {
        return Err(Error::Domain(format!(
            "histograms have {} and {} bins",
            r.len(),
            g.len()
        )));
    }
    if r.len() < 2 {
        return Err(Error::Domain("histograms need at least 2 bins".into()));
    }
    for (name, mass) in [("real", r), ("generated", g)] {
        if mass.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
            return Err(Error::Domain(format!(
                "{name} histogram has a negative or non-finite bin"
            )));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "{name} histogram sums to {total}, not 1"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrdCurve {
    pub lambdas: Vec<f64>,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    /// Largest `2 alpha beta / (alpha + beta)` over the stored grid.
    pub max_f1: f64,
}

impl PrdCurve {
    fn from_points(lambdas: Vec<f64>, precision: Vec<f64>, recall: Vec<f64>) -> Self {
        let max_f1 = precision
            .iter()
            .zip(&recall)
            .map(|(&a, &b)| f1(a, b))
            .fold(0.0, f64::max);
        Self {
            lambdas,
            precision,
            recall,
            max_f1,
        }
    }

    /// `lambda,precision,recall` CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,precision,recall\n");
        for ((l, p), r) in self.lambdas.iter().zip(&self.precision).zip(&self.recall) {
            let _ = writeln!(out, "{l},{p},{r}");
        }
        out
    }
}

fn f1(a: f64, b: f64) -> f64 {
    if a + b > 0.0 {
        2.0 * a * b / (a + b)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrdOptions {
    pub clusters: usize,
    pub angles: usize,
    pub runs: usize,
    pub seed: Seed,
}

impl Default for PrdOptions {
    fn default() -> Self {
        Self {
            clusters: DEFAULT_CLUSTERS,
            angles: DEFAULT_ANGLES,
            runs: DEFAULT_RUNS,
            seed: Seed::default(),
        }
    }
}

/// Run-averaged PRD.
#[derive(Debug, Clone, PartialEq)]
pub struct PrdResult {
    /// Mean of the per-run maximum F1 values.
    pub max_f1: f64,
    /// Pointwise mean of the per-run curves; its own `max_f1` is the
    /// maximum along this averaged curve.
    pub curve: PrdCurve,
    pub runs: Vec<PrdCurve>,
    pub converged: bool,
}

pub fn discretize(
    real: &EmbeddingSet,
    gen: &EmbeddingSet,
    k: usize,
    seed: Seed,
) -> Result<HistogramPair> {
    if k < 2 {
        return Err(Error::Domain(format!("need at least 2 clusters, got {k}")));
    }
    if real.dim() != gen.dim() {
        return Err(Error::Domain(format!(
            "dimension mismatch: {} vs {}",
            real.dim(),
            gen.dim()
        )));
    }
    if real.len() < k || gen.len() < k {
        return Err(Error::InsufficientData(format!(
            "{k} clusters need at least {k} samples per set, got {} real and {} generated",
            real.len(),
            gen.len()
        )));
    }
    let mut union = Vec::with_capacity(real.as_slice().len() + gen.as_slice().len());
    union.extend_from_slice(real.as_slice());
    union.extend_from_slice(gen.as_slice());
    let km = kmeans(
        &union,
        real.dim(),
        k,
        kmeans::DEFAULT_MAX_ITERATIONS,
        kmeans::DEFAULT_TOLERANCE,
        &mut seed.rng(),
    );
    let (assignments_r, assignments_g) = km.assignments.split_at(real.len());
    Ok(HistogramPair {
        r_mass: masses(assignments_r, k),
        g_mass: masses(assignments_g, k),
        assignments_r: assignments_r.to_vec(),
        assignments_g: assignments_g.to_vec(),
        converged: km.converged,
    })
}

fn masses(assignments: &[usize], k: usize) -> Vec<f64> {
    let mut counts = vec![0usize; k];
    for &a in assignments {
        counts[a] += 1;
    }
    let n = assignments.len() as f64;
    counts.into_iter().map(|c| c as f64 / n).collect()
}

/// `(sin, cos)` of the grid angles, mirrored so that entry `m + 1 - i` is
/// entry `i` with its components exchanged. This makes the curve of the
/// swapped pair the exact mirror image of the original.
fn angle_grid(m: usize) -> Vec<(f64, f64)> {
    let mut grid = vec![(0.0, 0.0); m];
    for i in 1..=m {
        let j = m + 1 - i;
        if i > j {
            break;
        }
        if i == j {
            grid[i - 1] = (FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        } else {
            let theta = i as f64 / (m + 1) as f64 * FRAC_PI_2;
            let (s, c) = theta.sin_cos();
            grid[i - 1] = (s, c);
            grid[j - 1] = (c, s);
        }
    }
    grid
}

pub fn prd_curve(h: &HistogramPair, m: usize) -> Result<PrdCurve> {
    if m < 1 {
        return Err(Error::Domain(
            "angular resolution must be at least 1".into(),
        ));
    }
    validate_masses(&h.r_mass, &h.g_mass)?;
    let grid = angle_grid(m);
    let mut lambdas = Vec::with_capacity(m);
    let mut precision = Vec::with_capacity(m);
    let mut recall = Vec::with_capacity(m);
    for &(s, c) in &grid {
        // sum_v min(sin R(v), cos G(v)) = cos * alpha = sin * beta
        let overlap: f64 = h
            .r_mass
            .iter()
            .zip(&h.g_mass)
            .map(|(&r, &g)| (s * r).min(c * g))
            .sum();
        lambdas.push(s / c);
        precision.push((overlap / c).min(1.0));
        recall.push((overlap / s).min(1.0));
    }
    Ok(PrdCurve::from_points(lambdas, precision, recall))
}

pub fn prd_from_sets(
    real: &EmbeddingSet,
    gen: &EmbeddingSet,
    options: &PrdOptions,
) -> Result<PrdResult> {
    if options.runs < 1 {
        return Err(Error::Domain("PRD needs at least one run".into()));
    }
    if options.angles < 1 {
        return Err(Error::Domain(
            "angular resolution must be at least 1".into(),
        ));
    }
    let runs: Vec<(PrdCurve, bool)> = (0..options.runs)
        .into_par_iter()
        .map(|r| {
            let h = discretize(real, gen, options.clusters, options.seed.derive(r as u64))?;
            Ok((prd_curve(&h, options.angles)?, h.converged))
        })
        .collect::<Result<_>>()?;

    let count = runs.len() as f64;
    let m = options.angles;
    let mut precision = vec![0.0; m];
    let mut recall = vec![0.0; m];
    let mut f1_sum = 0.0;
    for (curve, _) in &runs {
        for i in 0..m {
            precision[i] += curve.precision[i];
            recall[i] += curve.recall[i];
        }
        f1_sum += curve.max_f1;
    }
    precision
        .iter_mut()
        .chain(recall.iter_mut())
        .for_each(|v| *v /= count);
    let lambdas = runs[0].0.lambdas.clone();
    let converged = runs.iter().all(|(_, c)| *c);
    Ok(PrdResult {
        max_f1: f1_sum / count,
        curve: PrdCurve::from_points(lambdas, precision, recall),
        runs: runs.into_iter().map(|(c, _)| c).collect(),
        converged,
    })
}
