use serde::{Deserialize, Serialize};

use super::problem::{ProblemKind, ReductionProblem};
use super::tail::tail_fixed_point;
use crate::error::{Error, Result};
use crate::spectral::SpaceTimeField;

/// Quadratic part of the action, exact from the coefficients.
///
/// Static: `integral of u'^2 / 2`. Wave: mean of `(u_t^2 - u_x^2) / 2`, which
/// equals `-1/4 sum sigma c^2` in the unit-mean-square basis.
pub fn quadratic_action(problem: &ReductionProblem, u: &SpaceTimeField) -> f64 {
    let s = problem.symbol().values();
    match problem.kind() {
        // integral of u_k'^2 is 1/4 for every string mode
        ProblemKind::Static => 0.125 * u.coeffs().iter().map(|c| c * c).sum::<f64>(),
        ProblemKind::Wave => -0.25 * u.coeffs().iter().zip(s).map(|(c, s)| s * c * c).sum::<f64>(),
    }
}

/// The Euler–Lagrange functional whose critical points solve the problem.
///
/// Static: `integral over [0,L] of u'^2/2 - G(u)`. Wave: slab mean of
/// `u_t^2/2 - u_x^2/2 + G(u)`.
pub fn functional_j(problem: &ReductionProblem, u: &SpaceTimeField) -> Result<f64> {
    check_field(problem, u)?;
    let tr = problem.transform();
    let values = tr.synthesize(u.coeffs());
    let g: Vec<f64> = values.iter().map(|v| problem.nonlinearity().primitive(*v)).collect();
    let quad = quadratic_action(problem, u);
    Ok(match problem.kind() {
        ProblemKind::Static => quad - tr.integrate(&g),
        ProblemKind::Wave => quad + tr.integrate(&g) / tr.measure(),
    })
}

/// Reduced action `I[mu] = J[mu + eta(mu)]` split into its harmonic part and
/// the nonlinear coupling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedAction {
    /// `harmonic + coupling`.
    pub i: f64,
    /// Quadratic action of the core alone.
    pub harmonic: f64,
    /// Static: `-N`. Wave: time mean of `N(t)`.
    pub coupling: f64,
    /// `(t, N(t))`. `N(t)` is the spatial mean of `G(u) - F(u) eta_u / 2`
    /// for wave problems; static problems give one row with the integral of
    /// the same expression.
    pub n_of_t: Vec<(f64, f64)>,
    /// `J[mu + eta]` evaluated directly, for the identity check.
    pub direct: f64,
    pub eta: SpaceTimeField,
}

/// Evaluate `I[mu]` through the harmonic/coupling decomposition.
pub fn functional_i_and_n(problem: &ReductionProblem, mu: &SpaceTimeField) -> Result<ReducedAction> {
    let (eta, _) = tail_fixed_point(problem, mu, problem.tolerances().fixed_point)?;
    let mu_u = problem.to_solution(mu)?;
    let eta_u = problem.to_solution(&eta)?;
    let u = mu_u.add(&eta_u)?;

    let tr = problem.transform();
    let nl = problem.nonlinearity();
    let uv = tr.synthesize(u.coeffs());
    let ev = tr.synthesize(eta_u.coeffs());
    let density: Vec<f64> = uv
        .iter()
        .zip(&ev)
        .map(|(u, e)| nl.primitive(*u) - 0.5 * nl.eval(*u) * e)
        .collect();

    let harmonic = quadratic_action(problem, &mu_u);
    let nx = tr.n_space_nodes();
    let (coupling, n_of_t) = match problem.kind() {
        ProblemKind::Static => {
            let n = tr.integrate(&density);
            (-n, vec![(0.0, n)])
        }
        ProblemKind::Wave => {
            let length = problem.geometry().length();
            let horizon = problem.geometry().horizon().unwrap_or(1.0);
            let rows: Vec<(f64, f64)> = tr
                .times()
                .into_iter()
                .enumerate()
                .map(|(a, t)| {
                    let line = &density[a * nx..(a + 1) * nx];
                    let n: f64 = line.iter().enumerate().map(|(b, d)| tr.space_weight(b) * d).sum();
                    (t, n / length)
                })
                .collect();
            let mean = rows.iter().enumerate().map(|(a, (_, n))| tr.time_weight(a) * n).sum::<f64>() / horizon;
            (mean, rows)
        }
    };
    Ok(ReducedAction {
        i: harmonic + coupling,
        harmonic,
        coupling,
        n_of_t,
        direct: functional_j(problem, &u)?,
        eta,
    })
}

/// `I[mu]` alone, evaluated directly as `J[mu + eta(mu)]`.
pub fn reduced_action(problem: &ReductionProblem, mu: &SpaceTimeField) -> Result<f64> {
    let (eta, _) = tail_fixed_point(problem, mu, problem.tolerances().fixed_point)?;
    functional_j(problem, &problem.to_solution(&mu.add(&eta)?)?)
}

/// Central-difference gradient of `I` over the core coefficients.
pub fn reduced_gradient_fd(problem: &ReductionProblem, mu: &SpaceTimeField, step: f64) -> Result<Vec<f64>> {
    let core = problem.modes().core_indices();
    let mut grad = Vec::with_capacity(core.len());
    for i in core {
        let mut plus = mu.clone();
        plus.coeffs_mut()[i] += step;
        let mut minus = mu.clone();
        minus.coeffs_mut()[i] -= step;
        grad.push((reduced_action(problem, &plus)? - reduced_action(problem, &minus)?) / (2.0 * step));
    }
    Ok(grad)
}

fn check_field(problem: &ReductionProblem, u: &SpaceTimeField) -> Result<()> {
    if u.modes() != problem.modes() || u.geometry() != problem.geometry() {
        return Err(Error::Dimension("field does not live on the problem's modes".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::reduction::{solve_static_reduced, Nonlinearity};
    use crate::spectral::{Geometry, ModeSet};

    #[test]
    fn linear_source_action_in_closed_form() {
        // G(u) = 2u, and the integral of the k-th mode is sqrt(L/2) 2L / (pi k)^2
        // for odd k; the potential term is a trapezoid sum, second order in h
        let l = 2.0;
        let g = Geometry::interval(l).unwrap();
        let m = ModeSet::string(8, 2).unwrap();
        let p = ReductionProblem::with_grid(&g, &m, Nonlinearity::constant(2.0).unwrap(), 256, 1e-6).unwrap();
        let mut u = p.zero_field();
        u.coeffs_mut()[0] = 1.5;
        u.coeffs_mut()[2] = -0.5;
        let mode_integral = |k: f64| (l / 2.0).sqrt() * 2.0 * l / (PI * k).powi(2);
        let expected = (1.5f64.powi(2) + 0.25) / 8.0 - 2.0 * (1.5 * mode_integral(1.0) - 0.5 * mode_integral(3.0));
        let j = functional_j(&p, &u).unwrap();
        assert!((j - expected).abs() < 1e-6, "{j} vs {expected}");
    }

    #[test]
    fn decomposition_and_stationarity() {
        let g = Geometry::interval(PI).unwrap();
        let m = ModeSet::string(32, 2).unwrap();
        let p = ReductionProblem::new(&g, &m, Nonlinearity::scaled_sine_shifted(0.3, 0.5).unwrap()).unwrap();
        let mut mu = p.zero_field();
        mu.coeffs_mut()[0] = 0.7;
        mu.coeffs_mut()[1] = -0.2;
        let a = functional_i_and_n(&p, &mu).unwrap();
        assert!((a.i - a.direct).abs() < 1e-12, "{} vs {}", a.i, a.direct);
        assert!((reduced_action(&p, &mu).unwrap() - a.direct).abs() < 1e-14);

        let res = solve_static_reduced(&p).unwrap();
        let grad = reduced_gradient_fd(&p, &res.mu, 1e-4).unwrap();
        assert!(grad.iter().all(|g| g.abs() < 1e-7), "{grad:?}");
        let off = reduced_gradient_fd(&p, &mu, 1e-4).unwrap();
        assert!(off.iter().any(|g| g.abs() > 1e-3));
    }
}
