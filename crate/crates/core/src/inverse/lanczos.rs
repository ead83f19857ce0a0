use serde::{Deserialize, Serialize};

use super::jacobi::JacobiMatrix;
use super::spectrum::Spectrum;
use crate::error::{Error, Result};

/// Positive first components of the normalised eigenvectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    values: Vec<f64>,
}

impl WeightVector {
    /// Normalises `values` to unit sum of squares; entries must be positive.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("weight vector is empty"));
        }
        if let Some(w) = values.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::domain(format!("weights must be positive, got {w}")));
        }
        let norm = values.iter().map(|w| w * w).sum::<f64>().sqrt();
        Ok(Self { values: values.iter().map(|w| w / norm).collect() })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Weights of the unique persymmetric Jacobi matrix with spectrum `spec`:
/// `w_j^2` proportional to `1 / prod_{i != j} |lambda_j - lambda_i|`.
pub fn persymmetric_weights(spec: &Spectrum) -> Result<WeightVector> {
    let lam = spec.values();
    // logs keep the products in range for long spectra
    let logs: Vec<f64> = (0..lam.len())
        .map(|j| {
            -lam.iter()
                .enumerate()
                .filter(|(i, _)| *i != j)
                .map(|(_, li)| (lam[j] - li).abs().ln())
                .sum::<f64>()
        })
        .collect();
    if logs.iter().any(|l| !l.is_finite()) {
        return Err(Error::Degenerate("coincident eigenvalues".into()));
    }
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    WeightVector::new(logs.iter().map(|l| (0.5 * (l - top)).exp()).collect())
}

/// Lanczos recursion on `diag(spec)` started from `w`, with full
/// re-orthogonalisation. Returns the Jacobi matrix whose spectrum is `spec`
/// and whose eigenvectors have first components `w`.
pub fn lanczos_reconstruct(spec: &Spectrum, w: &WeightVector) -> Result<JacobiMatrix> {
    let lam = spec.values();
    let n = lam.len();
    if w.values().len() != n {
        return Err(Error::Dimension(format!("{n} eigenvalues but {} weights", w.values().len())));
    }
    let scale = lam.iter().fold(0.0f64, |m, l| m.max(l.abs())).max(f64::MIN_POSITIVE);
    let mut basis: Vec<Vec<f64>> = vec![w.values().to_vec()];
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        let q = &basis[i];
        let mut z: Vec<f64> = q.iter().zip(lam).map(|(q, l)| q * l).collect();
        let ai = dot(q, &z);
        a.push(ai);
        if i + 1 == n {
            break;
        }
        for _ in 0..2 {
            for prev in &basis {
                let c = dot(prev, &z);
                for (zk, pk) in z.iter_mut().zip(prev) {
                    *zk -= c * pk;
                }
            }
        }
        let bi = dot(&z, &z).sqrt();
        if bi <= 1e-14 * scale {
            return Err(Error::Breakdown { step: i + 1, norm: bi });
        }
        b.push(bi);
        basis.push(z.iter().map(|v| v / bi).collect());
    }
    JacobiMatrix::new(a, b)
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}
