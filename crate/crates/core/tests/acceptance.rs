//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Every expected value comes from an oracle written here, not from
//! the library.

mod common;

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use distmetric::baselines::{
    bertscore, bleu, embedding_average, greedy_matching, rouge_l, vector_extrema, TurnPair,
};
use distmetric::cli::{self, Command, StudyArgs};
use distmetric::frechet::{fbd, fbd_from_sets, sqrtm_psd, FbdOptions, GaussianSummary, MeanNorm};
use distmetric::harness::{parse_report_csv, pearson, shapiro_wilk, spearman, Cell, ReportFormat};
use distmetric::io::{TokenMatrix, WordVectorTable};
use distmetric::prd::{prd_curve, prd_from_sets, HistogramPair, PrdOptions};
use distmetric::EmbeddingSet;
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

type Outcome = Result<String, String>;

struct Suite {
    failures: usize,
}

impl Suite {
    fn check(&mut self, name: &str, f: impl FnOnce() -> Outcome) {
        match f() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                self.failures += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn within_time(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(took)
}

fn fbd_identity() -> Outcome {
    let start = Instant::now();
    let mut r = rng(101);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = r.random_range(10..=2000);
        let d = r.random_range(2..=64);
        let shift = r.random_range(-5.0..5.0);
        let set = common::gaussian_set(&mut r, n, d, shift);
        let value = fbd_from_sets(&set, &set, &FbdOptions::default())
            .map_err(|e| format!("N={n} D={d}: {e}"))?;
        ensure(value <= 1e-6, || {
            format!("fbd(S, S) = {value:e} at N={n} D={d}")
        })?;
        worst = worst.max(value);
    }
    let took = within_time(start, Duration::from_secs(10))?;
    Ok(format!("50 sets, max fbd(S,S) = {worst:.2e}, {took:.2?}"))
}

fn fbd_closed_forms() -> Outcome {
    let a = GaussianSummary::univariate(0.0, 1.0).map_err(|e| e.to_string())?;
    let b = GaussianSummary::univariate(2.0, 4.0).map_err(|e| e.to_string())?;
    let one_d = fbd(&a, &b, MeanNorm::Squared).map_err(|e| e.to_string())?;
    ensure((one_d - 5.0).abs() <= 1e-8, || {
        format!("1-D case gave {one_d}")
    })?;

    let mut r = rng(102);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let d = r.random_range(1..=32);
        let (mu1, mu2): (Vec<f64>, Vec<f64>) = (0..d)
            .map(|_| (r.random_range(-3.0..3.0), r.random_range(-3.0..3.0)))
            .unzip();
        let (v1, v2): (Vec<f64>, Vec<f64>) = (0..d)
            .map(|_| (r.random_range(0.01..5.0), r.random_range(0.01..5.0)))
            .unzip();
        let oracle: f64 = (0..d)
            .map(|i| (mu1[i] - mu2[i]).powi(2) + (v1[i].sqrt() - v2[i].sqrt()).powi(2))
            .sum();
        let g1 = GaussianSummary::diagonal(&mu1, &v1).map_err(|e| e.to_string())?;
        let g2 = GaussianSummary::diagonal(&mu2, &v2).map_err(|e| e.to_string())?;
        let value = fbd(&g1, &g2, MeanNorm::Squared).map_err(|e| e.to_string())?;
        let rel = (value - oracle).abs() / oracle.abs().max(f64::MIN_POSITIVE);
        ensure(rel <= 1e-8, || format!("D={d}: {value} vs oracle {oracle}"))?;
        worst = worst.max(rel);
    }
    Ok(format!(
        "1-D = {one_d}, 20 diagonal cases, max rel err {worst:.2e}"
    ))
}

fn matrix_sqrt() -> Outcome {
    let mut r = rng(103);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let d = r.random_range(1..=32);
        let b = DMatrix::from_fn(d, d, |_, _| common::z(&mut r));
        // Condition numbers vary from mild to ~1e8.
        let jitter = 10f64.powf(r.random_range(-6.0..0.0));
        let a = &b * b.transpose() + DMatrix::identity(d, d) * jitter;
        let s = sqrtm_psd(&a).map_err(|e| format!("case {case}: {e}"))?;
        let rel = (&s * &s - &a).norm() / a.norm();
        ensure(rel <= 1e-6, || {
            format!("case {case} (D={d}): residual {rel:e}")
        })?;
        worst = worst.max(rel);
    }
    Ok(format!(
        "100 SPD matrices, max ||SS-A||/||A|| = {worst:.2e}"
    ))
}

fn fbd_monotonicity() -> Outcome {
    let sigmas = [0.1, 0.2, 0.4, 0.8];
    for trial in 0..10 {
        let mut r = rng(200 + trial);
        let real = common::gaussian_set(&mut r, 2000, 16, 0.0);
        let values: Vec<f64> = sigmas
            .iter()
            .map(|&s| {
                fbd_from_sets(
                    &real,
                    &common::perturbed(&real, s, &mut r),
                    &FbdOptions::default(),
                )
            })
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        ensure(values.windows(2).all(|w| w[0] < w[1]), || {
            format!("trial {trial}: {values:?}")
        })?;
    }
    Ok("strictly increasing in 10/10 trials".into())
}

fn prd_boundaries() -> Outcome {
    let options = PrdOptions::default();
    let run = |real: &EmbeddingSet, gen: &EmbeddingSet| {
        prd_from_sets(real, gen, &options).map_err(|e| e.to_string())
    };
    let mut r = rng(104);

    let real = common::gaussian_set(&mut r, 1000, 8, 0.0);
    let same = run(&real, &real)?.max_f1;
    ensure(same >= 0.99, || format!("R=G gave max F1 {same}"))?;

    let far = common::gaussian_set(&mut r, 1000, 8, 25.0);
    let separated = run(&real, &far)?.max_f1;
    ensure(separated <= 0.05, || {
        format!("separated clouds gave max F1 {separated}")
    })?;

    let left = common::gaussian_set(&mut r, 500, 8, -10.0);
    let right = common::gaussian_set(&mut r, 500, 8, 10.0);
    let mut both: Vec<&[f64]> = left.rows().chain(right.rows()).collect();
    both.shuffle(&mut r);
    let two_modes = EmbeddingSet::from_rows(&both).map_err(|e| e.to_string())?;
    let one_mode = common::gaussian_set(&mut r, 1000, 8, 10.0);
    let curve = run(&two_modes, &one_mode)?.curve;
    let precision = curve.precision.iter().copied().fold(0.0, f64::max);
    let recall = curve.recall.iter().copied().fold(0.0, f64::max);
    ensure(precision >= 0.95 && recall <= 0.6, || {
        format!("one mode: precision {precision}, recall {recall}")
    })?;
    Ok(format!(
        "R=G {same:.4}, separated {separated:.4}, one-of-two modes precision {precision:.4} recall {recall:.4}"
    ))
}

fn random_histograms(seed: u64, count: usize) -> Vec<HistogramPair> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let k = r.random_range(2..=8);
            let mut draw = || {
                // Some empty bins, so the supports differ.
                let raw: Vec<f64> = (0..k)
                    .map(|_| {
                        if r.random_bool(0.2) {
                            0.0
                        } else {
                            r.random_range(0.0..1.0)
                        }
                    })
                    .collect();
                let sum: f64 = raw.iter().sum();
                if sum == 0.0 {
                    let mut v = vec![0.0; k];
                    v[0] = 1.0;
                    v
                } else {
                    raw.iter().map(|v| v / sum).collect()
                }
            };
            let (a, b) = (draw(), draw());
            HistogramPair::from_masses(a, b).unwrap()
        })
        .collect()
}

/// Max F1 by direct evaluation of the precision/recall functionals on a
/// dense grid of angles.
fn dense_max_f1(h: &HistogramPair, points: usize) -> f64 {
    let mut best: f64 = 0.0;
    for i in 1..=points {
        let lambda = (i as f64 / (points + 1) as f64 * std::f64::consts::FRAC_PI_2).tan();
        let alpha: f64 = h
            .r_mass
            .iter()
            .zip(&h.g_mass)
            .map(|(r, g)| (lambda * r).min(*g))
            .sum();
        let beta = alpha / lambda;
        if alpha + beta > 0.0 {
            best = best.max(2.0 * alpha * beta / (alpha + beta));
        }
    }
    best
}

fn prd_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for (i, h) in random_histograms(105, 30).iter().enumerate() {
        let lib = prd_curve(h, 1001).map_err(|e| e.to_string())?.max_f1;
        let oracle = dense_max_f1(h, 1_000_000);
        ensure((lib - oracle).abs() <= 1e-3, || {
            format!("case {i}: {lib} vs dense {oracle}")
        })?;
        worst = worst.max((lib - oracle).abs());
    }
    Ok(format!(
        "30 histogram pairs, max |lib - dense| = {worst:.2e}"
    ))
}

fn prd_swap() -> Outcome {
    for (i, h) in random_histograms(106, 200).iter().enumerate() {
        for m in [1, 2, 10, 1001] {
            let a = prd_curve(h, m).map_err(|e| e.to_string())?.max_f1;
            let b = prd_curve(&h.swapped(), m)
                .map_err(|e| e.to_string())?
                .max_f1;
            ensure(a.to_bits() == b.to_bits(), || {
                format!("case {i} m={m}: {a} vs {b}")
            })?;
        }
    }
    Ok("200 histogram pairs x 4 grid sizes, bitwise equal".into())
}

fn oracle_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

/// Rank by counting: 1 + #smaller + (#equal others) / 2.
fn oracle_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(i, a)| {
            let smaller = x.iter().filter(|b| *b < a).count() as f64;
            let ties = x
                .iter()
                .enumerate()
                .filter(|(j, b)| *j != i && *b == a)
                .count() as f64;
            1.0 + smaller + ties / 2.0
        })
        .collect()
}

fn correlation_oracle() -> Outcome {
    let mut cases: Vec<(Vec<f64>, Vec<f64>)> = vec![
        (
            vec![1.0, 2.0, 3.0, 4.0, 5.0],
            vec![2.0, 4.0, 6.0, 8.0, 10.0],
        ),
        (vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![5.0, 4.0, 3.0, 2.0, 1.0]),
        (vec![1.0, 2.0, 2.0, 3.0], vec![1.0, 3.0, 2.0, 4.0]),
        (
            vec![3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0],
            vec![2.0, 7.0, 1.0, 8.0, 2.0, 8.0, 1.0, 8.0],
        ),
        (vec![0.5, 0.5, 0.5, 1.0], vec![1.0, 2.0, 3.0, 4.0]),
    ];
    let mut r = rng(107);
    while cases.len() < 20 {
        let n = r.random_range(3..=40);
        let x: Vec<f64> = (0..n)
            .map(|_| (r.random_range(-5.0..5.0) * 4.0f64).round() / 4.0)
            .collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| v * r.random_range(-1.0..2.0) + common::z(&mut r))
            .collect();
        cases.push((x, y));
    }
    let mut worst: f64 = 0.0;
    for (i, (x, y)) in cases.iter().enumerate() {
        let p = pearson(x, y).map_err(|e| format!("case {i}: {e}"))?;
        let s = spearman(x, y).map_err(|e| format!("case {i}: {e}"))?;
        let (po, so) = (
            oracle_pearson(x, y),
            oracle_pearson(&oracle_ranks(x), &oracle_ranks(y)),
        );
        ensure((p - po).abs() <= 1e-12 && (s - so).abs() <= 1e-12, || {
            format!("case {i}: pearson {p} vs {po}, spearman {s} vs {so}")
        })?;
        worst = worst.max((p - po).abs()).max((s - so).abs());

        let ex: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let cy: Vec<f64> = y.iter().map(|v| v.powi(3)).collect();
        let st = spearman(&ex, &cy).map_err(|e| e.to_string())?;
        ensure(st.to_bits() == s.to_bits(), || {
            format!("case {i}: transformed spearman {st} vs {s}")
        })?;
    }
    Ok(format!(
        "20 cases, max err {worst:.2e}; spearman exactly invariant under exp/cube"
    ))
}

#[derive(Deserialize)]
struct Golden {
    cases: Vec<GoldenCase>,
}

#[derive(Deserialize)]
struct GoldenCase {
    name: String,
    w: f64,
    p: f64,
    x: Vec<f64>,
}

fn shapiro_golden() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/shapiro_golden.json");
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let golden: Golden = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    ensure(golden.cases.len() == 20, || {
        format!("golden file has {} cases", golden.cases.len())
    })?;
    let (mut dw, mut dp): (f64, f64) = (0.0, 0.0);
    for c in &golden.cases {
        let got = shapiro_wilk(&c.x).map_err(|e| format!("{}: {e}", c.name))?;
        ensure(
            (got.w - c.w).abs() <= 1e-3 && (got.p - c.p).abs() <= 1e-3,
            || format!("{}: W {} vs {}, p {} vs {}", c.name, got.w, c.w, got.p, c.p),
        )?;
        dw = dw.max((got.w - c.w).abs());
        dp = dp.max((got.p - c.p).abs());
    }
    Ok(format!(
        "20 samples, max |dW| = {dw:.1e}, max |dp| = {dp:.1e}"
    ))
}

fn close(name: &str, got: f64, want: f64) -> Result<(), String> {
    ensure((got - want).abs() <= 1e-12, || {
        format!("{name}: {got} vs {want}")
    })
}

fn baselines() -> Outcome {
    let err = |e: distmetric::Error| e.to_string();
    let pair = |h: &str, r: &str| TurnPair::from_text(h, r).map_err(err);
    let mut table = WordVectorTable::new(2);
    for (w, v) in [
        ("a", [1.0, 0.0]),
        ("b", [0.0, 1.0]),
        ("c", [1.0, 1.0]),
        ("d", [3.0, 1.0]),
        ("e", [-3.0, 0.0]),
        ("f", [-1.0, 1.0]),
        ("g", [1.0, 0.0]),
    ] {
        table.insert(w, v.to_vec()).map_err(err)?;
    }
    let sentences = ["a b c d", "the quick brown fox jumps", "d c", "a"];
    for s in sentences {
        let p = pair(s, s)?;
        close("bleu identical", bleu(std::slice::from_ref(&p), 4).map_err(err)?, 1.0)?;
        close("rouge-l identical", rouge_l(&p), 1.0)?;
        if !s.starts_with("the") {
            close(
                "average identical",
                embedding_average(&p, &table).map_err(err)?,
                1.0,
            )?;
            close(
                "extrema identical",
                vector_extrema(&p, &table).map_err(err)?,
                1.0,
            )?;
            close(
                "greedy identical",
                greedy_matching(&p, &table).map_err(err)?,
                1.0,
            )?;
        }
    }
    let m = TokenMatrix::new(1, vec![0.3, -1.2, 2.0, 0.7, 0.0, 5.5], 2).map_err(err)?;
    let same = bertscore(&m, &m).map_err(err)?;
    for v in [same.precision, same.recall, same.f1] {
        close("bertscore identical", v, 1.0)?;
    }

    // Clipped counts: 2/4 unigrams, 1/3 bigrams, 0/2 trigrams, 0/1 4-grams,
    // zero matches floored at 1e-9 / total; hypothesis longer, so no penalty.
    let hand = ((0.5f64).ln() + (1.0f64 / 3.0).ln() + (1e-9f64 / 2.0).ln() + (1e-9f64).ln()) / 4.0;
    close(
        "bleu hand case",
        bleu(&[pair("the the the cat", "the cat sat")?], 4).map_err(err)?,
        hand.exp(),
    )?;
    let unigram = bleu(&[pair("the the the cat", "the cat sat")?], 1).map_err(err)?;
    close("bleu modified unigram precision", unigram, 0.5)?;
    let disjoint = bleu(&[pair("x y z w", "p q r s")?], 4).map_err(err)?;
    ensure(disjoint <= 1e-9, || format!("disjoint bleu {disjoint}"))?;

    close(
        "rouge-l hand case",
        rouge_l(&pair("a b c d", "a c d e")?),
        0.75,
    )?;
    close("rouge-l disjoint", rouge_l(&pair("a b", "c d")?), 0.0)?;

    let s2 = 0.5f64.sqrt();
    // means (1/2, 1/2) and (1, 1/2)
    let avg_hand = 0.75 / (s2 * 1.25f64.sqrt());
    close(
        "average hand case",
        embedding_average(&pair("a b", "c g")?, &table).map_err(err)?,
        avg_hand,
    )?;
    // means (1, 0) and (0, 1)
    close(
        "average orthogonal",
        embedding_average(&pair("g", "b")?, &table).map_err(err)?,
        0.0,
    )?;
    // extrema of {(1,0), (-3,0)} is (-3,0); against (-1,1) the cosine is 1/sqrt 2
    close(
        "extrema hand case",
        vector_extrema(&pair("a e", "f")?, &table).map_err(err)?,
        s2,
    )?;
    close(
        "extrema single token",
        vector_extrema(&pair("a", "c")?, &table).map_err(err)?,
        s2,
    )?;
    // a->max(1/sqrt2, 3/sqrt10), b->max(1/sqrt2, 1/sqrt10), and symmetric
    let s10 = 10f64.sqrt();
    let greedy_hand = ((3.0 / s10 + s2) / 2.0 + (s2 + 3.0 / s10) / 2.0) / 2.0;
    close(
        "greedy hand case",
        greedy_matching(&pair("a b", "c d")?, &table).map_err(err)?,
        greedy_hand,
    )?;
    close(
        "greedy single token",
        greedy_matching(&pair("a", "c")?, &table).map_err(err)?,
        s2,
    )?;

    let hyp = TokenMatrix::new(1, vec![1.0, 0.0, 0.0, 1.0], 2).map_err(err)?;
    let refs = TokenMatrix::new(1, vec![1.0, 0.0, 1.0, 1.0, 0.0, -1.0], 2).map_err(err)?;
    let got = bertscore(&hyp, &refs).map_err(err)?;
    let (p, r) = ((1.0 + s2) / 2.0, (1.0 + s2) / 3.0);
    close("bertscore precision", got.precision, p)?;
    close("bertscore recall", got.recall, r)?;
    close("bertscore f1", got.f1, 2.0 * p * r / (p + r))?;
    let ortho = bertscore(
        &TokenMatrix::new(1, vec![1.0, 0.0], 2).map_err(err)?,
        &TokenMatrix::new(1, vec![0.0, 2.0, 0.0, -1.0], 2).map_err(err)?,
    )
    .map_err(err)?;
    ensure(
        ortho.precision == 0.0 && ortho.recall == 0.0 && ortho.f1 == 0.0,
        || format!("orthogonal bertscore {ortho:?}"),
    )?;
    Ok("identity = 1.0 for all six metrics; 14 hand cases match".into())
}

fn end_to_end_study() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let manifest = common::write_study(dir.path(), &common::STUDY_NOISE, &["fbd", "prd"], 108);
    let study = || {
        cli::run(&Command::Study(StudyArgs {
            manifest: manifest.clone(),
            format: ReportFormat::Csv,
            scores_out: None,
            seed: None,
        }))
        .map_err(|e| e.to_string())
    };
    let first = study()?;
    let second = study()?;
    ensure(first == second, || "two runs differ".into())?;
    let report = parse_report_csv(&first).map_err(|e| e.to_string())?;
    for metric in ["fbd", "prd"] {
        for aspect in ["overall", "fluency"] {
            let row = report
                .find(metric, aspect)
                .ok_or_else(|| format!("no {metric}/{aspect} row"))?;
            match row.cell {
                Cell::Value { spearman, .. } if spearman == 1.0 && row.n_systems == 5 => {}
                ref other => return Err(format!("{metric}/{aspect}: {other:?}")),
            }
        }
    }
    let took = within_time(start, Duration::from_secs(60))?;
    Ok(format!(
        "5 systems: fbd and prd Spearman 1.0 on both aspects, deterministic, {took:.2?}"
    ))
}

fn main() -> ExitCode {
    let mut suite = Suite { failures: 0 };
    suite.check("fbd-identity", fbd_identity);
    suite.check("fbd-closed-forms", fbd_closed_forms);
    suite.check("matrix-sqrt", matrix_sqrt);
    suite.check("fbd-monotonicity", fbd_monotonicity);
    suite.check("prd-boundaries", prd_boundaries);
    suite.check("prd-dense-oracle", prd_oracle);
    suite.check("prd-swap-symmetry", prd_swap);
    suite.check("correlation-oracle", correlation_oracle);
    suite.check("shapiro-wilk-golden", shapiro_golden);
    suite.check("baselines", baselines);
    suite.check("end-to-end-study", end_to_end_study);
    if suite.failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", suite.failures);
        ExitCode::FAILURE
    }
}
