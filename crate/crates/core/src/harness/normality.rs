use rand::seq::index::sample;
use rayon::prelude::*;
use serde::Serialize;

use super::shapiro::{shapiro_wilk, MAX_SAMPLES, MIN_SAMPLES};
use crate::error::{Error, Result};
use crate::io::EmbeddingSet;
use crate::seed::Seed;

/// Sets with more rows are subsampled (without replacement) to this size.
pub const MAX_NORMALITY_SAMPLES: usize = MAX_SAMPLES;

/// Per-dimension Shapiro-Wilk W summarized across dimensions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalityProfile {
    pub mean_w: f64,
    /// Population standard deviation of W across the tested dimensions.
    pub std_w: f64,
    pub dims_tested: usize,
    /// Dimensions skipped because they are constant.
    pub dims_excluded: usize,
    pub rows_used: usize,
}

pub fn normality_profile(set: &EmbeddingSet, seed: Seed) -> Result<NormalityProfile> {
    if set.len() < MIN_SAMPLES {
        return Err(Error::Domain(format!(
            "normality needs at least {MIN_SAMPLES} rows, got {}",
            set.len()
        )));
    }
    let rows: Vec<usize> = if set.len() > MAX_NORMALITY_SAMPLES {
        let mut picked = sample(&mut seed.rng(), set.len(), MAX_NORMALITY_SAMPLES).into_vec();
        picked.sort_unstable();
        picked
    } else {
        (0..set.len()).collect()
    };

    let outcomes: Vec<Result<f64>> = (0..set.dim())
        .into_par_iter()
        .map(|j| {
            let column: Vec<f64> = rows.iter().map(|&i| set.row(i)[j]).collect();
            shapiro_wilk(&column).map(|r| r.w)
        })
        .collect();

    let mut ws = Vec::with_capacity(outcomes.len());
    let mut excluded = 0;
    for outcome in outcomes {
        match outcome {
            Ok(w) => ws.push(w),
            Err(Error::Data { .. }) => excluded += 1,
            Err(e) => return Err(e),
        }
    }
    if ws.is_empty() {
        return Err(Error::data(
            "every dimension is constant; normality is undefined",
        ));
    }
    let count = ws.len() as f64;
    let mean_w = ws.iter().sum::<f64>() / count;
    let std_w = (ws.iter().map(|w| (w - mean_w).powi(2)).sum::<f64>() / count).sqrt();
    Ok(NormalityProfile {
        mean_w,
        std_w,
        dims_tested: ws.len(),
        dims_excluded: excluded,
        rows_used: rows.len(),
    })
}
