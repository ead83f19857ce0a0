use serde::{Deserialize, Serialize};

use super::solve::{ReductionResult, WeakResidual};
use crate::error::Result;

/// Point values of a reduced solution together with its residual report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub points: Vec<(f64, f64)>,
    pub values: Vec<f64>,
    pub h_norm: f64,
    pub weak_residual: WeakResidual,
}

/// Evaluate `u` for a solved problem at `(t, x)` points (`t` ignored in the
/// static case).
pub fn reconstruct_full_solution(result: &ReductionResult, points: &[(f64, f64)]) -> Result<Reconstruction> {
    let s = result.solution.synthesize(points)?;
    Ok(Reconstruction {
        points: points.to_vec(),
        values: s.values,
        h_norm: s.h_norm,
        weak_residual: result.weak_residual.clone(),
    })
}

/// `n` equally spaced points across `[0, L]`, endpoints included.
pub fn uniform_points(length: f64, t: f64, n: usize) -> Vec<(f64, f64)> {
    let d = (n.max(2) - 1) as f64;
    (0..n).map(|i| (t, length * (i as f64 / d).min(1.0))).collect()
}
