use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inverse::{chain_to_jacobi, eigen_tridiagonal, SpringMassChain};

/// Isospectral change of coordinates `u = D^{-1} U q` of a chain.
///
/// Column `k` of `upsilon` is the displacement shape of mode `k`; columns are
/// mass-orthonormal and carry a positive first nonzero entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModalMap {
    upsilon: DMatrix<f64>,
    /// `U` itself, the orthonormal eigenvectors of `D^{-1} K D^{-1}`.
    orthogonal: DMatrix<f64>,
    sqrt_masses: Vec<f64>,
    eigenvalues: Vec<f64>,
}

pub fn build_modal_map(chain: &SpringMassChain) -> Result<ModalMap> {
    let j = chain_to_jacobi(chain)?;
    let eig = eigen_tridiagonal(&j, true);
    let u = eig.vectors.expect("vectors requested");
    let sqrt_masses: Vec<f64> = chain.masses().iter().map(|m| m.sqrt()).collect();
    let mut upsilon = u.clone();
    for (i, d) in sqrt_masses.iter().enumerate() {
        upsilon.row_mut(i).unscale_mut(*d);
    }
    Ok(ModalMap {
        upsilon,
        orthogonal: u,
        sqrt_masses,
        eigenvalues: eig.values,
    })
}

impl ModalMap {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn upsilon(&self) -> &DMatrix<f64> {
        &self.upsilon
    }

    /// Modal eigenvalues (squared frequencies), ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect()
    }

    /// Displacement shape of mode `k` (zero-based).
    pub fn mode_shape(&self, k: usize) -> Vec<f64> {
        self.upsilon.column(k).iter().copied().collect()
    }

    /// `q = U^T D u`.
    pub fn to_modal(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_len(u)?;
        let y = DVector::from_iterator(self.n(), u.iter().zip(&self.sqrt_masses).map(|(u, d)| u * d));
        Ok((self.orthogonal.transpose() * y).iter().copied().collect())
    }

    /// `u = D^{-1} U q`.
    pub fn from_modal(&self, q: &[f64]) -> Result<Vec<f64>> {
        self.check_len(q)?;
        Ok((&self.upsilon * DVector::from_column_slice(q)).iter().copied().collect())
    }

    /// `max |Y^T M Y - I|`.
    pub fn mass_orthonormality_defect(&self) -> f64 {
        let m = DMatrix::from_diagonal(&DVector::from_iterator(self.n(), self.sqrt_masses.iter().map(|d| d * d)));
        (self.upsilon.transpose() * m * &self.upsilon - DMatrix::identity(self.n(), self.n())).amax()
    }

    /// `max |Y^T K Y - diag(lambda)|` for the chain's stiffness `K`.
    pub fn stiffness_diagonality_defect(&self, chain: &SpringMassChain) -> f64 {
        let (d, o) = chain.stiffness();
        let n = self.n();
        let mut k = DMatrix::zeros(n, n);
        for i in 0..n {
            k[(i, i)] = d[i];
        }
        for (i, b) in o.iter().enumerate() {
            k[(i, i + 1)] = -b;
            k[(i + 1, i)] = -b;
        }
        let target = DMatrix::from_diagonal(&DVector::from_column_slice(&self.eigenvalues));
        (self.upsilon.transpose() * k * &self.upsilon - target).amax()
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.n() {
            return Err(Error::Dimension(format!("expected {} entries, got {}", self.n(), v.len())));
        }
        Ok(())
    }
}
