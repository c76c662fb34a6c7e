#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use distmetric::io::{write_embedding_set_with, Precision};
use distmetric::EmbeddingSet;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn z(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn normal_matrix(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<f64> {
    (0..n * d).map(|_| z(rng)).collect()
}

/// `n x d` standard normal rows, scaled per column and shifted by `shift`.
pub fn gaussian_set(rng: &mut ChaCha8Rng, n: usize, d: usize, shift: f64) -> EmbeddingSet {
    let scales: Vec<f64> = (0..d).map(|_| rng.random_range(0.5..2.0)).collect();
    let mut data = normal_matrix(rng, n, d);
    for (i, v) in data.iter_mut().enumerate() {
        *v = *v * scales[i % d] + shift;
    }
    EmbeddingSet::new(data, n, d).unwrap()
}

/// `set` plus independent `N(0, sigma^2)` noise on every value.
pub fn perturbed(set: &EmbeddingSet, sigma: f64, rng: &mut ChaCha8Rng) -> EmbeddingSet {
    let data = set.as_slice().iter().map(|&v| v + sigma * z(rng)).collect();
    EmbeddingSet::new(data, set.len(), set.dim()).unwrap()
}

pub const STUDY_NOISE: [f64; 5] = [0.1, 0.3, 0.6, 1.2, 2.4];

/// Writes a synthetic study into `dir`: a real set, one noisier copy per
/// system, hypothesis/reference text and ratings that fall with the noise.
/// Returns the manifest path.
pub fn write_study(dir: &Path, noise: &[f64], metrics: &[&str], seed: u64) -> PathBuf {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let real = gaussian_set(&mut rng, 600, 8, 0.0);
    write_embedding_set_with(&real, dir.join("real.npy"), Precision::F64).unwrap();

    let words = [
        "hello", "there", "how", "are", "you", "today", "fine", "thanks", "good", "morning",
    ];
    let refs: Vec<String> = (0..40)
        .map(|i| {
            (0..6)
                .map(|j| words[(i * 3 + j * 7) % words.len()])
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    fs::write(dir.join("refs.txt"), refs.join("\n") + "\n").unwrap();

    let mut ratings = String::from("system_id,sample_id,aspect,score\n");
    let mut systems = Vec::new();
    for (s, &sigma) in noise.iter().enumerate() {
        let id = format!("sys{s}");
        let gen = perturbed(&real, sigma, &mut rng);
        write_embedding_set_with(&gen, dir.join(format!("{id}.npy")), Precision::F64).unwrap();
        // Replace a growing share of reference words.
        let hyps: Vec<String> = refs
            .iter()
            .map(|r| {
                r.split(' ')
                    .enumerate()
                    .map(|(j, w)| if j < s + 1 { "noise" } else { w })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        fs::write(dir.join(format!("{id}.txt")), hyps.join("\n") + "\n").unwrap();
        for sample in 0..4 {
            let score = 5.0 - s as f64 + 0.1 * sample as f64;
            ratings.push_str(&format!("{id},{sample},overall,{score}\n"));
            ratings.push_str(&format!("{id},{sample},fluency,{}\n", score * 0.5 + 1.0));
        }
        systems.push(format!(
            r#"{{"system_id": "{id}", "embeddings": "{id}.npy", "hypotheses": "{id}.txt"}}"#
        ));
    }
    fs::write(dir.join("ratings.csv"), ratings).unwrap();

    let metrics: Vec<String> = metrics.iter().map(|m| format!("\"{m}\"")).collect();
    let manifest = format!(
        r#"{{
  "real_embeddings": "real.npy",
  "references": "refs.txt",
  "ratings": "ratings.csv",
  "metrics": [{}],
  "params": {{"k": 10, "m": 1001, "runs": 5, "seed": 20210604}},
  "systems": [{}]
}}"#,
        metrics.join(", "),
        systems.join(",\n    ")
    );
    let path = dir.join("study.json");
    fs::write(&path, manifest).unwrap();
    path
}
