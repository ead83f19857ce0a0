use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::problem::{ProblemKind, ReductionProblem};
use super::tail::{tail_fixed_point, tail_fixed_point_from, tail_residual, FixedPointLog};
use crate::error::{Error, Result};
use crate::spectral::SpaceTimeField;

/// `mu - P_R(compose(mu + eta))`; zero exactly at reduced solutions.
pub fn bifurcation_residual(problem: &ReductionProblem, mu: &SpaceTimeField, eta: &SpaceTimeField) -> Result<SpaceTimeField> {
    let image = problem.compose(&mu.add(eta)?)?.core();
    mu.sub(&image)
}

/// Per-mode residual of the full truncated equation at `u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakResidual {
    /// L2 norm of `symbol * c - F(u)` over every retained mode.
    pub l2: f64,
    pub max_abs: f64,
}

/// Residual of `-u'' = f(u)` or `u_tt - u_xx = f(u)` tested against every
/// retained mode.
pub fn weak_residual(problem: &ReductionProblem, u: &SpaceTimeField) -> Result<WeakResidual> {
    let r = u.apply_operator(problem.symbol())?.sub(&problem.nemitski(u)?)?;
    Ok(WeakResidual {
        l2: r.l2_norm(),
        max_abs: r.max_abs(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    Newton,
    Picard,
}

/// Outcome of a reduced solve.
///
/// `mu` and `eta` are in the iteration variable of the problem kind (`v` for
/// static, `u` for wave); `solution` is always `u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionResult {
    pub kind: ProblemKind,
    pub mu: SpaceTimeField,
    pub eta: SpaceTimeField,
    pub solution: SpaceTimeField,
    pub residual_core: f64,
    pub residual_tail: f64,
    pub weak_residual: WeakResidual,
    pub iterations: usize,
    pub method: SolveMethod,
    /// Bifurcation residual norm after each outer iteration.
    pub trace: Vec<f64>,
    pub contraction_ratio_observed: f64,
    pub contraction_ratio_theoretical: f64,
    /// Cold-start tail iteration at the solution.
    pub tail_log: FixedPointLog,
    /// L2 norm of the tail restricted to the highest retained spatial index.
    pub last_band_norm: f64,
}

pub fn solve_static_reduced(problem: &ReductionProblem) -> Result<ReductionResult> {
    if problem.kind() != ProblemKind::Static {
        return Err(Error::domain("solve_static_reduced needs a static problem"));
    }
    solve_reduced(problem)
}

pub fn solve_wave_reduced(problem: &ReductionProblem) -> Result<ReductionResult> {
    if problem.kind() != ProblemKind::Wave {
        return Err(Error::domain("solve_wave_reduced needs a wave problem"));
    }
    solve_reduced(problem)
}

/// Solve the bifurcation equation of either kind.
pub fn solve_reduced(problem: &ReductionProblem) -> Result<ReductionResult> {
    let core = problem.modes().core_indices();
    let start = problem.initial_guess().cloned().unwrap_or_else(|| problem.zero_field());
    let mut trace = Vec::new();

    let (mu, method, iterations) = match newton(problem, &core, start.clone(), &mut trace) {
        Ok((mu, it)) => (mu, SolveMethod::Newton, it),
        Err(newton_err) => match picard(problem, start, &mut trace) {
            Ok((mu, it)) => (mu, SolveMethod::Picard, it),
            Err(_) => {
                return Err(Error::Solver {
                    message: format!("Newton and Picard both failed; Newton: {newton_err}"),
                    trace,
                })
            }
        },
    };
    finish(problem, mu, method, iterations, trace)
}

fn finish(
    problem: &ReductionProblem,
    mu: SpaceTimeField,
    method: SolveMethod,
    iterations: usize,
    trace: Vec<f64>,
) -> Result<ReductionResult> {
    let tol = problem.tolerances().fixed_point;
    let (eta, tail_log) = tail_fixed_point(problem, &mu, tol)?;
    let residual_core = bifurcation_residual(problem, &mu, &eta)?.l2_norm();
    let residual_tail = tail_residual(problem, &mu, &eta)?;
    let solution = problem.to_solution(&mu.add(&eta)?)?;
    let weak_residual = weak_residual(problem, &solution)?;
    let band = problem.modes().last_band_indices();
    let mut last = problem.zero_field();
    for &i in &band {
        last.coeffs_mut()[i] = eta.coeffs()[i];
    }
    Ok(ReductionResult {
        kind: problem.kind(),
        contraction_ratio_observed: tail_log.observed_ratio,
        contraction_ratio_theoretical: problem.contraction_ratio(),
        last_band_norm: last.l2_norm(),
        mu,
        eta,
        solution,
        residual_core,
        residual_tail,
        weak_residual,
        iterations,
        method,
        trace,
        tail_log,
    })
}

/// Residual and converged tail at the core vector `x`.
fn evaluate(
    problem: &ReductionProblem,
    core: &[usize],
    x: &DVector<f64>,
    warm: Option<&SpaceTimeField>,
) -> Result<(DVector<f64>, SpaceTimeField, f64)> {
    let mu = core_field(problem, core, x);
    let (eta, _) = tail_fixed_point_from(problem, &mu, problem.tolerances().fixed_point, warm)?;
    let r = bifurcation_residual(problem, &mu, &eta)?;
    let norm = r.l2_norm();
    Ok((DVector::from_iterator(core.len(), core.iter().map(|&i| r.coeffs()[i])), eta, norm))
}

fn newton(
    problem: &ReductionProblem,
    core: &[usize],
    start: SpaceTimeField,
    trace: &mut Vec<f64>,
) -> Result<(SpaceTimeField, usize)> {
    let tol = problem.tolerances().solver;
    let mut x = DVector::from_iterator(core.len(), core.iter().map(|&i| start.coeffs()[i]));
    let (mut r, mut eta, mut norm) = evaluate(problem, core, &x, None)?;
    trace.push(norm);
    for it in 0..problem.tolerances().max_newton_iterations {
        if norm <= tol {
            return Ok((core_field(problem, core, &x), it));
        }
        let n = core.len();
        let mut jac = DMatrix::zeros(n, n);
        for c in 0..n {
            let h = 1e-7 * x[c].abs().max(1.0);
            let mut xp = x.clone();
            xp[c] += h;
            let (rp, _, _) = evaluate(problem, core, &xp, Some(&eta))?;
            jac.set_column(c, &((rp - &r) / h));
        }
        let step = jac
            .lu()
            .solve(&(-&r))
            .ok_or_else(|| Error::Solver { message: "singular Newton Jacobian".into(), trace: trace.clone() })?;
        let mut damping = 1.0;
        loop {
            let trial = &x + &step * damping;
            match evaluate(problem, core, &trial, Some(&eta)) {
                Ok((rt, et, nt)) if nt < norm || nt <= tol => {
                    x = trial;
                    r = rt;
                    eta = et;
                    norm = nt;
                    break;
                }
                _ if damping > 1e-6 => damping *= 0.5,
                _ => {
                    return Err(Error::Solver {
                        message: "line search failed to reduce the residual".into(),
                        trace: trace.clone(),
                    })
                }
            }
        }
        trace.push(norm);
    }
    if norm <= tol {
        return Ok((core_field(problem, core, &x), problem.tolerances().max_newton_iterations));
    }
    Err(Error::Solver { message: "Newton iteration cap reached".into(), trace: trace.clone() })
}

/// Plain iteration `mu <- P_R(compose(mu + eta(mu)))`.
fn picard(problem: &ReductionProblem, start: SpaceTimeField, trace: &mut Vec<f64>) -> Result<(SpaceTimeField, usize)> {
    let tol = problem.tolerances().solver;
    let mut mu = start;
    let mut eta: Option<SpaceTimeField> = None;
    for it in 0..problem.tolerances().max_tail_iterations {
        let (e, _) = tail_fixed_point_from(problem, &mu, problem.tolerances().fixed_point, eta.as_ref())?;
        let r = bifurcation_residual(problem, &mu, &e)?;
        let norm = r.l2_norm();
        trace.push(norm);
        if norm <= tol {
            return Ok((mu, it));
        }
        if !norm.is_finite() {
            break;
        }
        mu = mu.sub(&r)?;
        eta = Some(e);
    }
    Err(Error::Solver { message: "Picard iteration did not converge".into(), trace: trace.clone() })
}

fn core_field(problem: &ReductionProblem, core: &[usize], x: &DVector<f64>) -> SpaceTimeField {
    let mut mu = problem.zero_field();
    for (&i, v) in core.iter().zip(x.iter()) {
        mu.coeffs_mut()[i] = *v;
    }
    mu
}
