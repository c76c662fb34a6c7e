//! A synthetic correlation study: five systems whose generated embeddings
//! drift further from the real ones, rated lower the further they drift.
//!
//! ```bash
//! cargo run --example correlation_study
//! ```
//!
//! The same manifest runs from the command line with
//! `distmetric study <dir>/study.json`.

use std::fs;

use distmetric::harness::{render_report, ReportFormat};
use distmetric::io::{write_embedding_set_with, Precision};
use distmetric::study::{run_study, StudyManifest};
use distmetric::EmbeddingSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> distmetric::Result<()> {
    let dir = tempfile::tempdir().expect("temporary directory");
    let at = |name: &str| dir.path().join(name);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut z = move || -> f64 { StandardNormal.sample(&mut rng) };

    let (n, dim) = (500, 8);
    let real: Vec<f64> = (0..n * dim).map(|_| z()).collect();
    write_embedding_set_with(
        &EmbeddingSet::new(real.clone(), n, dim)?,
        at("real.npy"),
        Precision::F64,
    )?;
    fs::write(
        at("refs.txt"),
        "how are you today\nsee you soon\nthat sounds great\n",
    )
    .unwrap();

    let hypotheses = [
        "how are you today\nsee you soon\nthat sounds great\n",
        "how are you\nsee you soon\nthat sounds good\n",
        "how are things\nsee you\nsounds good\n",
        "what is up\nbye now\nokay\n",
        "no\nyes\nmaybe\n",
    ];
    let mut ratings = String::from("system_id,sample_id,aspect,score\n");
    let mut systems = Vec::new();
    for (i, sigma) in [0.1, 0.3, 0.6, 1.2, 2.4].into_iter().enumerate() {
        let id = format!("system{i}");
        let gen: Vec<f64> = real.iter().map(|v| v + sigma * z()).collect();
        write_embedding_set_with(
            &EmbeddingSet::new(gen, n, dim)?,
            at(&format!("{id}.npy")),
            Precision::F64,
        )?;
        fs::write(at(&format!("{id}.txt")), hypotheses[i]).unwrap();
        for (sample, jitter) in [0.0, 0.2, -0.1].iter().enumerate() {
            ratings.push_str(&format!(
                "{id},{sample},overall,{}\n",
                5.0 - i as f64 + jitter
            ));
        }
        systems.push(format!(
            r#"{{"system_id":"{id}","embeddings":"{id}.npy","hypotheses":"{id}.txt"}}"#
        ));
    }
    fs::write(at("ratings.csv"), ratings).unwrap();
    let manifest = format!(
        r#"{{"real_embeddings":"real.npy","references":"refs.txt","ratings":"ratings.csv",
            "metrics":["fbd","prd","bleu","rouge-l"],"params":{{"k":10,"runs":5}},
            "systems":[{}]}}"#,
        systems.join(",")
    );
    fs::write(at("study.json"), manifest).unwrap();

    let study = StudyManifest::load(at("study.json"))?;
    let outcome = run_study(&study)?;
    print!("{}", outcome.scores.to_csv());
    println!();
    print!(
        "{}",
        render_report(&outcome.report, ReportFormat::Markdown)?
    );
    Ok(())
}
