use super::cosine;
use crate::error::{Error, Result};
use crate::io::TokenMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BertScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Greedy max-cosine matching of contextual token embeddings.
pub fn bertscore(hypothesis: &TokenMatrix, reference: &TokenMatrix) -> Result<BertScore> {
    if hypothesis.dim() != reference.dim() {
        return Err(Error::Domain(format!(
            "token dimension mismatch: {} vs {}",
            hypothesis.dim(),
            reference.dim()
        )));
    }
    let best = |from: &TokenMatrix, to: &TokenMatrix| {
        from.tokens()
            .map(|a| {
                to.tokens()
                    .map(|b| cosine(a, b))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .sum::<f64>()
            / from.len() as f64
    };
    let precision = best(hypothesis, reference);
    let recall = best(reference, hypothesis);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(BertScore {
        precision,
        recall,
        f1,
    })
}
