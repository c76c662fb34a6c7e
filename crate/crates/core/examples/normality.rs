//! Shapiro-Wilk tests, one sample and per dimension.
//!
//! ```bash
//! cargo run --example normality
//! ```

use distmetric::harness::{normality_profile, shapiro_wilk};
use distmetric::{EmbeddingSet, Seed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

fn main() -> distmetric::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let normal: Vec<f64> = (0..200).map(|_| StandardNormal.sample(&mut rng)).collect();
    let skewed: Vec<f64> = (0..200)
        .map(|_| Exp::new(1.0).unwrap().sample(&mut rng))
        .collect();
    for (label, x) in [("normal", &normal), ("exponential", &skewed)] {
        let t = shapiro_wilk(x)?;
        println!("{label:>12}: W = {:.4}, p = {:.3e}", t.w, t.p);
    }

    // Six Gaussian columns, two uniform ones and a constant one.
    let (n, dim) = (800, 9);
    let mut data = Vec::with_capacity(n * dim);
    for _ in 0..n {
        for j in 0..dim {
            data.push(match j {
                0..=5 => StandardNormal.sample(&mut rng),
                6 | 7 => rng.random_range(-1.0..1.0),
                _ => 1.0,
            });
        }
    }
    let set = EmbeddingSet::new(data, n, dim)?;
    let p = normality_profile(&set, Seed::default())?;
    println!(
        "per-dimension W: {:.3}±{:.3} over {} dimensions ({} constant, skipped), {} rows",
        p.mean_w, p.std_w, p.dims_tested, p.dims_excluded, p.rows_used
    );
    Ok(())
}
