use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GroundTruth, Label, Labeling};
use crate::sizes;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimateMetrics {
    pub sym_diff_t: usize,
    pub sym_diff_b: usize,
    pub queries_used: usize,
    /// `|T Δ T′| <= ⌊n/10⌋`.
    pub success_tenth: bool,
    /// `|T Δ T′|, |B Δ B′| <= ⌈6δn⌉`, when `δ` is given.
    pub success_six_delta: Option<bool>,
}

/// Compares `estimate` (with `B′` its complement) against `truth`.
pub fn evaluate_estimate(
    truth: &GroundTruth,
    estimate: &Labeling,
    delta: Option<f64>,
    queries_used: usize,
) -> Result<EstimateMetrics> {
    let n = truth.n();
    if estimate.len() != n {
        return Err(Error::param(format!("estimate has {} labels, truth has {n}", estimate.len())));
    }
    let mut sym_diff_t = 0;
    let mut sym_diff_b = 0;
    for v in 0..n {
        let (real, guess) = (truth.label(v), estimate.label(v));
        sym_diff_t += usize::from((real == Label::Truthful) != (guess == Label::Truthful));
        sym_diff_b += usize::from((real == Label::Corrupt) != (guess == Label::Corrupt));
    }
    let success_six_delta = delta.map(|d| {
        let cap = sizes::six_delta(d, n);
        sym_diff_t <= cap && sym_diff_b <= cap
    });
    Ok(EstimateMetrics {
        sym_diff_t,
        sym_diff_b,
        queries_used,
        success_tenth: sym_diff_t <= sizes::tenth(n),
        success_six_delta,
    })
}
