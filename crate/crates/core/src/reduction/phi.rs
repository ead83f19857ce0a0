use serde::{Deserialize, Serialize};

use super::problem::{ProblemKind, ReductionProblem};
use super::tail::tail_fixed_point;
use crate::error::{Error, Result};
use crate::spectral::{Part, SpaceTimeField};

/// Right-hand sides `phi_k(mu, t)` of the reduced oscillator system
/// `mu_k'' + kappa_k^2 mu_k = phi_k`, sampled on a time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiTable {
    pub times: Vec<f64>,
    /// Spatial index and part of each core slot, in column order.
    pub slots: Vec<(usize, Part)>,
    /// `phi[a][s]`.
    pub phi: Vec<Vec<f64>>,
    /// `mu_k'' + kappa_k^2 mu_k - phi_k`, same layout.
    pub ode_residual: Vec<Vec<f64>>,
}

impl PhiTable {
    pub fn max_ode_residual(&self) -> f64 {
        self.ode_residual.iter().flatten().fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// Spatial coefficients of `F(mu + eta(mu))` on the core slots at each time
/// in `times`, with the oscillator residual of `mu` alongside.
pub fn reduced_rhs_phi(problem: &ReductionProblem, mu: &SpaceTimeField, times: &[f64]) -> Result<PhiTable> {
    if problem.kind() != ProblemKind::Wave {
        return Err(Error::domain("phi_k is defined for wave problems only"));
    }
    let geometry = problem.geometry();
    let horizon = geometry.horizon().unwrap_or(0.0);
    if let Some(t) = times.iter().find(|t| !(0.0..=horizon).contains(*t)) {
        return Err(Error::domain(format!("time {t} outside [0, {horizon}]")));
    }
    let (eta, _) = tail_fixed_point(problem, mu, problem.tolerances().fixed_point)?;
    let u = mu.add(&eta)?;

    let modes = problem.modes();
    let ns = modes.n_space();
    let ell = modes.ell();
    let tr = problem.transform();
    let nl = problem.nonlinearity();
    let slots: Vec<(usize, Part)> = (0..ell).map(|s| modes.space_slot(s)).collect();
    let kappa2: Vec<f64> = slots.iter().map(|(k, _)| geometry.spatial_frequency(*k).powi(2)).collect();

    let mut phi = Vec::with_capacity(times.len());
    let mut ode_residual = Vec::with_capacity(times.len());
    for &t in times {
        let sines: Vec<f64> = (1..=modes.j_max()).map(|j| (geometry.temporal_frequency(j) * t).sin()).collect();
        let omega2: Vec<f64> = (1..=modes.j_max()).map(|j| geometry.temporal_frequency(j).powi(2)).collect();
        let profile = |c: &[f64], s: usize| -> f64 { sines.iter().enumerate().map(|(j, sj)| sj * c[j * ns + s]).sum() };

        let line: Vec<f64> = (0..ns).map(|s| profile(u.coeffs(), s)).collect();
        let mut values = tr.synthesize_space_line(&line);
        for v in &mut values {
            *v = nl.eval(*v);
        }
        let f_coeffs = tr.project_space_line(&values);

        let row: Vec<f64> = f_coeffs[..ell].to_vec();
        let res: Vec<f64> = (0..ell)
            .map(|s| {
                let m: f64 = profile(mu.coeffs(), s);
                let m_tt: f64 = sines
                    .iter()
                    .enumerate()
                    .map(|(j, sj)| -omega2[j] * sj * mu.coeffs()[j * ns + s])
                    .sum();
                m_tt + kappa2[s] * m - row[s]
            })
            .collect();
        phi.push(row);
        ode_residual.push(res);
    }
    Ok(PhiTable {
        times: times.to_vec(),
        slots,
        phi,
        ode_residual,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::reduction::Nonlinearity;
    use crate::spectral::{Geometry, ModeSet, SpatialBasis};

    #[test]
    fn zero_and_constant() {
        let g = Geometry::wave(2.0 * PI, PI / 2f64.sqrt(), SpatialBasis::Periodic).unwrap();
        let m = ModeSet::wave(SpatialBasis::Periodic, 3, 4, 1).unwrap();
        let times = [0.0, 0.5, 1.0, 2.0];

        let p = ReductionProblem::new(&g, &m, Nonlinearity::zero()).unwrap();
        let table = reduced_rhs_phi(&p, &p.zero_field(), &times).unwrap();
        assert!(table.phi.iter().flatten().all(|v| *v == 0.0));

        let p = ReductionProblem::new(&g, &m, Nonlinearity::constant(0.6).unwrap()).unwrap();
        let table = reduced_rhs_phi(&p, &p.zero_field(), &times).unwrap();
        for row in &table.phi {
            assert!((row[0] - 0.6).abs() < 1e-14);
            assert!(row[1..].iter().all(|v| v.abs() < 1e-14));
        }
        assert!(reduced_rhs_phi(&p, &p.zero_field(), &[10.0]).is_err());
    }
}
