//! Training-free turn-level baselines: word overlap (BLEU, ROUGE-L), static
//! word-vector similarity (Average, Extrema, Greedy) and a contextual
//! greedy-matching BERTScore without idf weighting or rescaling.

mod bertscore;
mod overlap;
mod tokenize;
mod word_vectors;

use crate::error::{Error, Result};
use crate::metric::{Metric, Orientation};

pub use bertscore::{bertscore, BertScore};
pub use overlap::{bleu, rouge_l, DEFAULT_BLEU_ORDER, ROUGE_BETA};
pub use tokenize::tokenize;
pub use word_vectors::{embedding_average, greedy_matching, vector_extrema};

/// A tokenized (hypothesis, reference) pair; both sides are non-empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TurnPair {
    hypothesis: Vec<String>,
    reference: Vec<String>,
}

impl TurnPair {
    pub fn new(hypothesis: Vec<String>, reference: Vec<String>) -> Result<Self> {
        if hypothesis.is_empty() || reference.is_empty() {
            return Err(Error::data(format!(
                "turn has an empty {}",
                if hypothesis.is_empty() {
                    "hypothesis"
                } else {
                    "reference"
                }
            )));
        }
        Ok(Self {
            hypothesis,
            reference,
        })
    }

    /// Tokenizes both sides with [`tokenize`].
    pub fn from_text(hypothesis: &str, reference: &str) -> Result<Self> {
        Self::new(tokenize(hypothesis), tokenize(reference))
    }

    pub fn hypothesis(&self) -> &[String] {
        &self.hypothesis
    }

    pub fn reference(&self) -> &[String] {
        &self.reference
    }
}

/// Builds turn pairs from line-aligned text, citing the (1-based) line of
/// any empty turn.
pub fn turn_pairs(hypotheses: &[String], references: &[String]) -> Result<Vec<TurnPair>> {
    if hypotheses.len() != references.len() {
        return Err(Error::data(format!(
            "{} hypotheses but {} references",
            hypotheses.len(),
            references.len()
        )));
    }
    hypotheses
        .iter()
        .zip(references)
        .enumerate()
        .map(|(i, (h, r))| {
            TurnPair::from_text(h, r).map_err(|e| match e {
                Error::Data { message, .. } => Error::Data {
                    row: Some(i + 1),
                    message,
                },
                other => other,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TurnScore {
    pub metric: String,
    pub value: f64,
    pub orientation: Orientation,
}

impl TurnScore {
    pub fn new(metric: Metric, value: f64) -> Self {
        Self {
            metric: metric.name().to_string(),
            value,
            orientation: metric.orientation(),
        }
    }
}

/// Cosine similarity; zero when either vector is zero.
pub(crate) fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na * nb)).clamp(-1.0, 1.0)
    }
}
