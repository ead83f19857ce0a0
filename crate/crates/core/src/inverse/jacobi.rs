use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::spectrum::Spectrum;
use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix with diagonal `a` and codiagonal `-b`, `b > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiMatrix {
    diag: Vec<f64>,
    /// Magnitudes of the (negative) codiagonal.
    offdiag: Vec<f64>,
}

impl JacobiMatrix {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::Dimension(format!(
                "{} diagonal and {} off-diagonal entries",
                diag.len(),
                offdiag.len()
            )));
        }
        if diag.iter().chain(&offdiag).any(|v| !v.is_finite()) {
            return Err(Error::domain("Jacobi entries must be finite"));
        }
        if let Some(b) = offdiag.iter().find(|b| **b <= 0.0) {
            return Err(Error::domain(format!("codiagonal magnitudes must be positive, got {b}")));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Infinity norm.
    pub fn norm(&self) -> f64 {
        (0..self.n())
            .map(|i| {
                let left = if i > 0 { self.offdiag[i - 1] } else { 0.0 };
                let right = self.offdiag.get(i).copied().unwrap_or(0.0);
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for (i, b) in self.offdiag.iter().enumerate() {
            m[(i, i + 1)] = -b;
            m[(i + 1, i)] = -b;
        }
        m
    }

    /// Largest mirror mismatch `|a_i - a_{N+1-i}|`, `|b_i - b_{N-i}|`
    /// relative to the norm.
    pub fn persymmetry_defect(&self) -> f64 {
        let scale = self.norm().max(f64::MIN_POSITIVE);
        let d = mirror_defect(&self.diag);
        let o = mirror_defect(&self.offdiag);
        d.max(o) / scale
    }

    pub fn is_persymmetric(&self, tol: f64) -> bool {
        self.persymmetry_defect() <= tol
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt() * self.norm().max(1.0);
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.n() {
            if i > 0 {
                let b = self.offdiag[i - 1];
                q = self.diag[i] - x - b * b / q;
            }
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Eigenvalues by bisection on the Sturm count, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.n();
        let r = self.norm();
        let (lo0, hi0) = (-r - 1.0, r + 1.0);
        (0..n)
            .map(|k| {
                let (mut lo, mut hi) = (lo0, hi0);
                // k-th eigenvalue: count_below(x) <= k for x <= lambda_k
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.count_below(mid) > k {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }

    /// Fails when the smallest eigenvalue is below `-1e-12 * ||J||`.
    pub fn check_positive_semidefinite(&self) -> Result<()> {
        let tol = 1e-12 * self.norm();
        let below = self.count_below(-tol);
        if below > 0 {
            return Err(Error::domain(format!("Jacobi matrix has {below} eigenvalue(s) below {:.3e}", -tol)));
        }
        Ok(())
    }
}

fn mirror_defect(v: &[f64]) -> f64 {
    v.iter().zip(v.iter().rev()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Eigenvalues (bisection) and, optionally, orthonormal eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    /// Columns are eigenvectors, ordered with `values`, each with a positive
    /// first component.
    pub vectors: Option<DMatrix<f64>>,
}

impl EigenDecomposition {
    pub fn spectrum(&self) -> Result<Spectrum> {
        Spectrum::new(self.values.clone())
    }

    /// First component of each normalised eigenvector.
    pub fn first_components(&self) -> Option<Vec<f64>> {
        self.vectors.as_ref().map(|v| v.row(0).iter().copied().collect())
    }
}

/// Eigen-decomposition of a Jacobi matrix. Eigenvalues come from Sturm
/// bisection; eigenvectors from an implicit-shift QR sweep on the dense form.
pub fn eigen_tridiagonal(j: &JacobiMatrix, want_vectors: bool) -> EigenDecomposition {
    let values = j.eigenvalues();
    let vectors = want_vectors.then(|| {
        let eig = SymmetricEigen::new(j.to_dense());
        let mut order: Vec<usize> = (0..j.n()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut v = DMatrix::zeros(j.n(), j.n());
        for (c, &src) in order.iter().enumerate() {
            let mut col = eig.eigenvectors.column(src).into_owned();
            if let Some(first) = col.iter().find(|x| x.abs() > 1e-300) {
                if *first < 0.0 {
                    col.neg_mut();
                }
            }
            v.set_column(c, &col);
        }
        v
    });
    EigenDecomposition { values, vectors }
}
