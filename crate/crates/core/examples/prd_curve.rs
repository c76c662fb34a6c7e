//! Precision-recall curves between two embedding sets, and directly between
//! two histograms.
//!
//! ```bash
//! cargo run --example prd_curve
//! ```

use distmetric::prd::{prd_curve, prd_from_sets, HistogramPair, PrdOptions};
use distmetric::{EmbeddingSet, Seed};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn cloud(rng: &mut ChaCha8Rng, n: usize, centers: &[f64]) -> EmbeddingSet {
    let dim = 4;
    let data = (0..n * dim)
        .map(|i| {
            let z: f64 = StandardNormal.sample(rng);
            z + centers[(i / dim) % centers.len()]
        })
        .collect();
    EmbeddingSet::new(data, n, dim).unwrap()
}

fn main() -> distmetric::Result<()> {
    // Two histograms over three states: generated mass sits on the first two.
    let h = HistogramPair::from_masses(vec![0.4, 0.4, 0.2], vec![0.5, 0.5, 0.0])?;
    let curve = prd_curve(&h, 1001)?;
    let best = curve.precision.iter().copied().fold(0.0, f64::max);
    println!(
        "histograms: max F1 {:.4}, best precision {best:.4}",
        curve.max_f1
    );

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let real = cloud(&mut rng, 1000, &[-6.0, 6.0]);
    let options = PrdOptions {
        runs: 5,
        seed: Seed(20210604),
        ..Default::default()
    };
    for (label, gen) in [
        ("both modes", cloud(&mut rng, 1000, &[-6.0, 6.0])),
        ("one mode", cloud(&mut rng, 1000, &[6.0])),
        ("elsewhere", cloud(&mut rng, 1000, &[30.0])),
    ] {
        let result = prd_from_sets(&real, &gen, &options)?;
        let recall = result.curve.recall.iter().copied().fold(0.0, f64::max);
        println!(
            "{label:>10}: max F1 {:.4}, max recall {recall:.4}, converged {}",
            result.max_f1, result.converged
        );
    }

    // First lines of the CSV written by `distmetric prd --curve-out`.
    for line in curve.to_csv().lines().take(3) {
        println!("{line}");
    }
    Ok(())
}
