use std::collections::HashMap;

use super::TurnPair;
use crate::error::{Error, Result};

pub const DEFAULT_BLEU_ORDER: usize = 4;
/// Added to the numerator of an n-gram precision with no matches.
const BLEU_EPSILON: f64 = 1e-9;
/// Recall weight of the LCS F-measure.
pub const ROUGE_BETA: f64 = 1.2;

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Corpus-level BLEU with uniform weights over orders `1..=max_n`.
///
/// Clipped n-gram matches and hypothesis n-gram totals are pooled over the
/// corpus before dividing. A precision with zero matches becomes
/// `1e-9 / total`. Orders for which no hypothesis is long enough to contain
/// an n-gram are left out of the geometric mean, so short identical
/// sentences still score 1.
pub fn bleu(pairs: &[TurnPair], max_n: usize) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::Domain("BLEU needs at least one turn".into()));
    }
    if max_n < 1 {
        return Err(Error::Domain("BLEU order must be at least 1".into()));
    }
    let mut matches = vec![0usize; max_n];
    let mut totals = vec![0usize; max_n];
    let (mut hyp_len, mut ref_len) = (0usize, 0usize);
    for pair in pairs {
        hyp_len += pair.hypothesis().len();
        ref_len += pair.reference().len();
        for n in 1..=max_n {
            let hyp = ngram_counts(pair.hypothesis(), n);
            let refs = ngram_counts(pair.reference(), n);
            matches[n - 1] += hyp
                .iter()
                .map(|(gram, &c)| c.min(refs.get(gram).copied().unwrap_or(0)))
                .sum::<usize>();
            totals[n - 1] += hyp.values().sum::<usize>();
        }
    }
    let log_precisions: Vec<f64> = matches
        .iter()
        .zip(&totals)
        .filter(|(_, &t)| t > 0)
        .map(|(&m, &t)| {
            let num = if m > 0 { m as f64 } else { BLEU_EPSILON };
            (num / t as f64).ln()
        })
        .collect();
    let log_mean = log_precisions.iter().sum::<f64>() / log_precisions.len() as f64;
    let brevity = if hyp_len > ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    };
    Ok(brevity * log_mean.exp())
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// LCS-based F-measure with recall weight `ROUGE_BETA`.
pub fn rouge_l(pair: &TurnPair) -> f64 {
    let lcs = lcs_len(pair.hypothesis(), pair.reference());
    if lcs == 0 {
        return 0.0;
    }
    let p = lcs as f64 / pair.hypothesis().len() as f64;
    let r = lcs as f64 / pair.reference().len() as f64;
    let b2 = ROUGE_BETA * ROUGE_BETA;
    (1.0 + b2) * p * r / (r + b2 * p)
}
