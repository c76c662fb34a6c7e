//! Fréchet distance between Gaussian fits of two embedding sets.
//!
//! ```bash
//! cargo run --example fbd_basics
//! ```

use distmetric::frechet::{
    fbd, fbd_from_sets, fit_gaussian, CovDivisor, FbdOptions, FitOptions, GaussianSummary, MeanNorm,
};
use distmetric::EmbeddingSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn sample(rng: &mut ChaCha8Rng, n: usize, dim: usize, mean: f64, std: f64) -> EmbeddingSet {
    let normal = Normal::new(mean, std).unwrap();
    let data = (0..n * dim).map(|_| normal.sample(rng)).collect();
    EmbeddingSet::new(data, n, dim).unwrap()
}

fn main() -> distmetric::Result<()> {
    // Closed form in one dimension: (0 - 2)^2 + 1 + 4 - 2 * sqrt(1 * 4) = 5.
    let a = GaussianSummary::univariate(0.0, 1.0)?;
    let b = GaussianSummary::univariate(2.0, 4.0)?;
    println!(
        "N(0,1) vs N(2,4):        {:.6}",
        fbd(&a, &b, MeanNorm::Squared)?
    );
    println!(
        "  with an unsquared mean: {:.6}",
        fbd(&a, &b, MeanNorm::Plain)?
    );

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let real = sample(&mut rng, 2000, 16, 0.0, 1.0);
    let fit = fit_gaussian(&real, &FitOptions::default())?;
    println!(
        "fitted {} rows, trace of covariance {:.3}",
        fit.n(),
        fit.cov().trace()
    );

    for shift in [0.0, 0.1, 0.5, 1.0] {
        let gen = sample(&mut rng, 2000, 16, shift, 1.0);
        let value = fbd_from_sets(&real, &gen, &FbdOptions::default())?;
        println!("mean shift {shift:.1}: fbd {value:.4}");
    }

    // Fewer rows than columns: the covariance is singular, a small ridge
    // keeps the fit well conditioned.
    let few = sample(&mut rng, 10, 32, 0.0, 1.0);
    let other = sample(&mut rng, 10, 32, 0.0, 1.0);
    let options = FbdOptions {
        mean_norm: MeanNorm::Squared,
        fit: FitOptions {
            divisor: CovDivisor::N,
            ridge: 1e-6,
        },
    };
    println!(
        "N=10, D=32 with ridge: {:.4}",
        fbd_from_sets(&few, &other, &options)?
    );
    Ok(())
}
