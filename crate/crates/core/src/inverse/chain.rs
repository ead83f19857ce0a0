use serde::{Deserialize, Serialize};

use super::jacobi::JacobiMatrix;
use super::lanczos::{lanczos_reconstruct, persymmetric_weights, WeightVector};
use super::spectrum::Spectrum;
use crate::error::{Error, Result};

/// Persymmetry tolerance for matrices and chains, relative to their scale.
pub const PERSYMMETRY_TOL: f64 = 1e-9;

/// `N` beads between two fixed walls, joined by `N + 1` springs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpringMassChain {
    masses: Vec<f64>,
    springs: Vec<f64>,
}

impl SpringMassChain {
    pub fn new(masses: Vec<f64>, springs: Vec<f64>) -> Result<Self> {
        if masses.is_empty() || springs.len() != masses.len() + 1 {
            return Err(Error::Dimension(format!("{} masses need {} springs, got {}", masses.len(), masses.len() + 1, springs.len())));
        }
        if let Some(v) = masses.iter().chain(&springs).find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::domain(format!("masses and springs must be positive, got {v}")));
        }
        Ok(Self { masses, springs })
    }

    /// `n` equal beads of mass `L/(n+1)` and springs `(n+1)/L`: the
    /// finite-difference string with unit density and tension.
    pub fn equal_mass(n: usize, length: f64) -> Result<Self> {
        if n == 0 || !(length > 0.0) {
            return Err(Error::domain("equal-mass chain needs n >= 1 and L > 0"));
        }
        let np1 = (n + 1) as f64;
        Self::new(vec![length / np1; n], vec![np1 / length; n + 1])
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn springs(&self) -> &[f64] {
        &self.springs
    }

    pub fn n(&self) -> usize {
        self.masses.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Largest relative mirror mismatch over masses and springs.
    pub fn persymmetry_defect(&self) -> f64 {
        let rel = |v: &[f64]| {
            let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            v.iter().zip(v.iter().rev()).map(|(a, b)| (a - b).abs() / scale).fold(0.0, f64::max)
        };
        rel(&self.masses).max(rel(&self.springs))
    }

    pub fn is_persymmetric(&self, tol: f64) -> bool {
        self.persymmetry_defect() <= tol
    }

    /// Stiffness matrix `K` as (diagonal, codiagonal magnitudes).
    pub fn stiffness(&self) -> (Vec<f64>, Vec<f64>) {
        let diag = self.springs.windows(2).map(|w| w[0] + w[1]).collect();
        let off = self.springs[1..self.n()].to_vec();
        (diag, off)
    }
}

/// `D^{-1} K D^{-1}` with `D = diag(sqrt(m_i))`.
pub fn chain_to_jacobi(chain: &SpringMassChain) -> Result<JacobiMatrix> {
    let m = chain.masses();
    let k = chain.springs();
    let diag = (0..chain.n()).map(|i| (k[i] + k[i + 1]) / m[i]).collect();
    let off = (0..chain.n() - 1).map(|i| k[i + 1] / (m[i] * m[i + 1]).sqrt()).collect();
    JacobiMatrix::new(diag, off)
}

/// The persymmetric chain with `chain_to_jacobi(chain) = j` and the given
/// total mass.
///
/// Writing `d = (sqrt(m_i))`, the row sums of `K` give
/// `J d = (k_1/d_1) e_1 + (k_{N+1}/d_N) e_N`, and persymmetry makes the two
/// coefficients equal, so `d` is proportional to `J^{-1}(e_1 + e_N)`. The
/// springs then follow from the codiagonal, `k_{i+1} = b_i d_i d_{i+1}`,
/// and from the first and last rows.
pub fn jacobi_to_chain(j: &JacobiMatrix, total_mass: f64) -> Result<SpringMassChain> {
    if !(total_mass.is_finite() && total_mass > 0.0) {
        return Err(Error::domain(format!("total mass must be positive, got {total_mass}")));
    }
    if !j.is_persymmetric(PERSYMMETRY_TOL) {
        return Err(Error::NotPersymmetric(format!(
            "relative mirror defect {:.3e} exceeds {PERSYMMETRY_TOL:.0e}; a fixed-fixed chain is not unique from one spectrum otherwise",
            j.persymmetry_defect()
        )));
    }
    let n = j.n();
    let (a, b) = (j.diag(), j.offdiag());
    if n == 1 {
        let half = 0.5 * a[0] * total_mass;
        if !(half > 0.0) {
            return Err(Error::Infeasible(format!("single bead needs a positive eigenvalue, got {}", a[0])));
        }
        return SpringMassChain::new(vec![total_mass], vec![half, half]);
    }

    let mut rhs = vec![0.0; n];
    rhs[0] = 1.0;
    rhs[n - 1] += 1.0;
    let x = solve_tridiagonal(a, b, &rhs)?;
    if let Some(i) = x.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::Infeasible(format!("nonpositive mass amplitude at bead {}", i + 1)));
    }
    let c = (total_mass / x.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let d: Vec<f64> = x.iter().map(|v| c * v).collect();

    let mut masses: Vec<f64> = d.iter().map(|v| v * v).collect();
    let mut springs = Vec::with_capacity(n + 1);
    springs.push(d[0] * (a[0] * d[0] - b[0] * d[1]));
    springs.extend((0..n - 1).map(|i| b[i] * d[i] * d[i + 1]));
    springs.push(d[n - 1] * (a[n - 1] * d[n - 1] - b[n - 2] * d[n - 2]));
    if let Some(i) = springs.iter().position(|k| !(*k > 0.0)) {
        return Err(Error::Infeasible(format!("spring {} came out nonpositive ({:.3e})", i + 1, springs[i])));
    }
    mirror_average(&mut masses);
    mirror_average(&mut springs);
    // restore the requested total after averaging
    let total: f64 = masses.iter().sum();
    let fix = total_mass / total;
    masses.iter_mut().for_each(|m| *m *= fix);
    springs.iter_mut().for_each(|k| *k *= fix);
    SpringMassChain::new(masses, springs)
}

fn mirror_average(v: &mut [f64]) {
    let n = v.len();
    for i in 0..n / 2 {
        let m = 0.5 * (v[i] + v[n - 1 - i]);
        v[i] = m;
        v[n - 1 - i] = m;
    }
}

/// Thomas algorithm for `J x = rhs` with codiagonal `-b`.
fn solve_tridiagonal(a: &[f64], b: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = a.len();
    let mut c = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut piv = a[0];
    for i in 0..n {
        if i > 0 {
            piv = a[i] - b[i - 1] * c[i - 1];
        }
        if !(piv > 0.0) {
            return Err(Error::Infeasible("Jacobi matrix is not positive definite".into()));
        }
        if i + 1 < n {
            c[i] = b[i] / piv;
        }
        y[i] = (rhs[i] + if i > 0 { b[i - 1] * y[i - 1] } else { 0.0 }) / piv;
    }
    for i in (0..n - 1).rev() {
        y[i] += c[i] * y[i + 1];
    }
    Ok(y)
}

/// Every intermediate of a spectrum-to-chain reconstruction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReconstruction {
    pub spectrum: Spectrum,
    pub weights: WeightVector,
    pub jacobi: JacobiMatrix,
    pub chain: SpringMassChain,
}

/// Spectrum -> weights -> Jacobi matrix -> chain.
///
/// A zero eigenvalue is rejected: with both ends fixed the stiffness matrix
/// is then singular and no chain exists.
pub fn reconstruct_chain(spectrum: &Spectrum, total_mass: f64) -> Result<ChainReconstruction> {
    if spectrum.values()[0] <= 0.0 {
        return Err(Error::Infeasible("a fixed-fixed chain cannot have a zero eigenvalue".into()));
    }
    let weights = persymmetric_weights(spectrum)?;
    let jacobi = lanczos_reconstruct(spectrum, &weights)?;
    let chain = jacobi_to_chain(&jacobi, total_mass)?;
    Ok(ChainReconstruction {
        spectrum: spectrum.clone(),
        weights,
        jacobi,
        chain,
    })
}
