use super::{cosine, TurnPair};
use crate::error::{Error, Result};
use crate::io::WordVectorTable;

fn lookup<'a>(tokens: &[String], table: &'a WordVectorTable, side: &str) -> Result<Vec<&'a [f64]>> {
    let vectors: Vec<&[f64]> = tokens.iter().filter_map(|t| table.get(t)).collect();
    if vectors.is_empty() {
        return Err(Error::Coverage(format!(
            "no {side} token is in the word-vector vocabulary: '{}'",
            tokens.join(" ")
        )));
    }
    Ok(vectors)
}

fn mean(vectors: &[&[f64]]) -> Vec<f64> {
    let mut out = vec![0.0; vectors[0].len()];
    for v in vectors {
        out.iter_mut().zip(*v).for_each(|(o, x)| *o += x);
    }
    let n = vectors.len() as f64;
    out.iter_mut().for_each(|o| *o /= n);
    out
}

/// Per dimension, the value with the largest magnitude (positive on ties).
fn extrema(vectors: &[&[f64]]) -> Vec<f64> {
    (0..vectors[0].len())
        .map(|j| {
            let max = vectors
                .iter()
                .map(|v| v[j])
                .fold(f64::NEG_INFINITY, f64::max);
            let min = vectors.iter().map(|v| v[j]).fold(f64::INFINITY, f64::min);
            if max >= -min {
                max
            } else {
                min
            }
        })
        .collect()
}

/// Cosine between the mean word vectors of the two sides. Out-of-vocabulary
/// tokens are skipped.
pub fn embedding_average(pair: &TurnPair, table: &WordVectorTable) -> Result<f64> {
    let h = lookup(pair.hypothesis(), table, "hypothesis")?;
    let r = lookup(pair.reference(), table, "reference")?;
    Ok(cosine(&mean(&h), &mean(&r)))
}

pub fn vector_extrema(pair: &TurnPair, table: &WordVectorTable) -> Result<f64> {
    let h = lookup(pair.hypothesis(), table, "hypothesis")?;
    let r = lookup(pair.reference(), table, "reference")?;
    Ok(cosine(&extrema(&h), &extrema(&r)))
}

fn greedy_direction(from: &[&[f64]], to: &[&[f64]]) -> f64 {
    let total: f64 = from
        .iter()
        .map(|a| {
            to.iter()
                .map(|b| cosine(a, b))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum();
    total / from.len() as f64
}

/// Mean of the two directional greedy scores, each the average over tokens
/// of the best cosine match on the other side.
pub fn greedy_matching(pair: &TurnPair, table: &WordVectorTable) -> Result<f64> {
    let h = lookup(pair.hypothesis(), table, "hypothesis")?;
    let r = lookup(pair.reference(), table, "reference")?;
    Ok((greedy_direction(&h, &r) + greedy_direction(&r, &h)) / 2.0)
}
