//! Fréchet distance between Gaussians fitted to two embedding sets.
//!
//! For `R ~ N(mu_r, S_r)` and `G ~ N(mu_g, S_g)`:
//!
//! ```text
//! d(R, G) = |mu_r - mu_g|^2 + Tr(S_r + S_g - 2 (S_r S_g)^{1/2})
//! ```
//!
//! The trace of `(S_r S_g)^{1/2}` is evaluated as the trace of the square
//! root of the symmetric PSD matrix `S_r^{1/2} S_g S_r^{1/2}`, which has the
//! same eigenvalues as `S_r S_g` but avoids a non-symmetric eigenproblem.
//! Embeddings are used as given; nothing is normalized before fitting.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::EmbeddingSet;

/// Relative symmetry tolerance for covariance inputs.
const SYMMETRY_TOL: f64 = 1e-9;
/// Eigenvalues below `-PSD_TOL * |A|_2` mean the matrix is not PSD.
const PSD_TOL: f64 = 1e-8;
/// Eigenvalues below `CLAMP_TOL * |A|_2` are treated as exact zeros.
const CLAMP_TOL: f64 = 1e-10;
/// Negative totals down to this (relative) size are round-off and clamp to zero.
const NEGATIVE_RESIDUE: f64 = 1e-6;
const MAX_EIGEN_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanNorm {
    /// `|mu_r - mu_g|^2`, the usual Fréchet / 2-Wasserstein convention.
    #[default]
    Squared,
    /// `|mu_r - mu_g|`, unsquared.
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CovDivisor {
    #[serde(rename = "n")]
    N,
    /// Unbiased sample covariance.
    #[default]
    #[serde(rename = "n-1")]
    NMinusOne,
}

impl std::fmt::Display for MeanNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MeanNorm::Squared => "squared",
            MeanNorm::Plain => "plain",
        })
    }
}

impl std::fmt::Display for CovDivisor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CovDivisor::N => "n",
            CovDivisor::NMinusOne => "n-1",
        })
    }
}

impl std::str::FromStr for MeanNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squared" => Ok(MeanNorm::Squared),
            "plain" => Ok(MeanNorm::Plain),
            other => Err(Error::Domain(format!(
                "unknown mean norm '{other}' (squared|plain)"
            ))),
        }
    }
}

impl std::str::FromStr for CovDivisor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(CovDivisor::N),
            "n-1" => Ok(CovDivisor::NMinusOne),
            other => Err(Error::Domain(format!(
                "unknown covariance divisor '{other}' (n|n-1)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FitOptions {
    pub divisor: CovDivisor,
    /// Added to the covariance diagonal; `0.0` fits the raw covariance.
    pub ridge: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FbdOptions {
    pub mean_norm: MeanNorm,
    pub fit: FitOptions,
}

/// Mean and covariance of one embedding set.
#[derive(Debug, Clone)]
pub struct GaussianSummary {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    n: usize,
}

impl GaussianSummary {
    /// Validates a user-supplied summary: finite, symmetric, PSD.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>, n: usize) -> Result<Self> {
        let d = mean.len();
        if d == 0 {
            return Err(Error::Domain("Gaussian summary has dimension zero".into()));
        }
        if cov.nrows() != d || cov.ncols() != d {
            return Err(Error::Domain(format!(
                "covariance is {}x{}, mean has length {d}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::data("Gaussian summary has non-finite entries"));
        }
        check_symmetric(&cov)?;
        let eig = symmetric_eigenvalues(&symmetrize(&cov))?;
        let norm = spectral_norm(&eig);
        if eig.iter().any(|&l| l < -PSD_TOL * norm) {
            return Err(Error::Domain(
                "covariance is not positive semidefinite".into(),
            ));
        }
        Ok(Self { mean, cov, n })
    }

    /// One-dimensional summary, handy for closed-form checks.
    pub fn univariate(mean: f64, variance: f64) -> Result<Self> {
        Self::new(
            DVector::from_element(1, mean),
            DMatrix::from_element(1, 1, variance),
            0,
        )
    }

    /// Summary with a diagonal covariance.
    pub fn diagonal(mean: &[f64], variances: &[f64]) -> Result<Self> {
        Self::new(
            DVector::from_column_slice(mean),
            DMatrix::from_diagonal(&DVector::from_column_slice(variances)),
            0,
        )
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Number of samples behind the fit (zero when constructed directly).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

pub fn fit_gaussian(set: &EmbeddingSet, options: &FitOptions) -> Result<GaussianSummary> {
    let n = set.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "covariance needs at least 2 samples, got {n}"
        )));
    }
    if !(options.ridge >= 0.0 && options.ridge.is_finite()) {
        return Err(Error::Domain(format!(
            "covariance ridge must be >= 0, got {}",
            options.ridge
        )));
    }
    let d = set.dim();
    let x = DMatrix::from_row_slice(n, d, set.as_slice());
    let mean = x.row_mean().transpose();
    let mut centered = x;
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    let divisor = match options.divisor {
        CovDivisor::N => n as f64,
        CovDivisor::NMinusOne => (n - 1) as f64,
    };
    let mut cov = centered.tr_mul(&centered) / divisor;
    cov = symmetrize(&cov);
    if options.ridge > 0.0 {
        for i in 0..d {
            cov[(i, i)] += options.ridge;
        }
    }
    Ok(GaussianSummary { mean, cov, n })
}

/// Symmetric square root of a symmetric positive semidefinite matrix.
///
/// Eigenvalues in `[-1e-8 |A|_2, 1e-10 |A|_2)` are clamped to zero; anything
/// more negative is rejected as not PSD.
pub fn sqrtm_psd(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let a = validated_symmetric(a)?;
    let eig = SymmetricEigen::try_new(a, f64::EPSILON, MAX_EIGEN_ITERATIONS)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
    let roots = clamped_roots(eig.eigenvalues.as_slice())?;
    let v = &eig.eigenvectors;
    let scaled = v * DMatrix::from_diagonal(&DVector::from_vec(roots));
    Ok(symmetrize(&(scaled * v.transpose())))
}

/// `Tr(A^{1/2})` for symmetric PSD `A`, from the eigenvalues alone.
fn trace_sqrtm_psd(a: &DMatrix<f64>) -> Result<f64> {
    let a = validated_symmetric(a)?;
    let eig = symmetric_eigenvalues(&a)?;
    Ok(clamped_roots(&eig)?.iter().sum())
}

pub fn fbd(real: &GaussianSummary, gen: &GaussianSummary, mean_norm: MeanNorm) -> Result<f64> {
    if real.dim() != gen.dim() {
        return Err(Error::Domain(format!(
            "dimension mismatch: {} vs {}",
            real.dim(),
            gen.dim()
        )));
    }
    let diff = &real.mean - &gen.mean;
    let mean_term = match mean_norm {
        MeanNorm::Squared => diff.norm_squared(),
        MeanNorm::Plain => diff.norm(),
    };
    let root_r = sqrtm_psd(&real.cov)?;
    let product = symmetrize(&(&root_r * &gen.cov * &root_r));
    let cross = trace_sqrtm_psd(&product)?;
    let traces = real.cov.trace() + gen.cov.trace();
    let total = mean_term + traces - 2.0 * cross;
    if total >= 0.0 {
        Ok(total)
    } else if total >= -NEGATIVE_RESIDUE * traces.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::Numerical(format!(
            "Fréchet distance evaluated to {total}, below round-off tolerance"
        )))
    }
}

pub fn fbd_from_sets(real: &EmbeddingSet, gen: &EmbeddingSet, options: &FbdOptions) -> Result<f64> {
    if real.dim() != gen.dim() {
        return Err(Error::Domain(format!(
            "dimension mismatch: real sets have {} columns, generated {}",
            real.dim(),
            gen.dim()
        )));
    }
    let r = fit_gaussian(real, &options.fit)?;
    let g = fit_gaussian(gen, &options.fit)?;
    fbd(&r, &g, options.mean_norm)
}

fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

fn check_symmetric(a: &DMatrix<f64>) -> Result<()> {
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let d = a.nrows();
    for i in 0..d {
        for j in (i + 1)..d {
            if (a[(i, j)] - a[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::Domain(format!(
                    "matrix is not symmetric at ({i}, {j}): {} vs {}",
                    a[(i, j)],
                    a[(j, i)]
                )));
            }
        }
    }
    Ok(())
}

fn validated_symmetric(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::Domain(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    check_symmetric(a)?;
    Ok(symmetrize(a))
}

fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, MAX_EIGEN_ITERATIONS)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
    Ok(eig.eigenvalues.as_slice().to_vec())
}

fn spectral_norm(eigenvalues: &[f64]) -> f64 {
    eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()))
}

fn clamped_roots(eigenvalues: &[f64]) -> Result<Vec<f64>> {
    let norm = spectral_norm(eigenvalues);
    eigenvalues
        .iter()
        .map(|&l| {
            if l < -PSD_TOL * norm {
                Err(Error::Domain(format!(
                    "matrix is not positive semidefinite (eigenvalue {l:e}, norm {norm:e})"
                )))
            } else if l < CLAMP_TOL * norm {
                Ok(0.0)
            } else {
                Ok(l.sqrt())
            }
        })
        .collect()
}
