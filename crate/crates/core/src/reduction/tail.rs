use serde::{Deserialize, Serialize};

use super::problem::ReductionProblem;
use crate::error::{Error, Result};
use crate::spectral::SpaceTimeField;

/// Step sizes below this are treated as round-off when forming ratios.
const RATIO_FLOOR: f64 = 1e-14;

/// History of one tail iteration.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FixedPointLog {
    pub iterations: usize,
    /// L2 norm of `eta_{n+1} - eta_n`, one entry per iteration.
    pub steps: Vec<f64>,
    /// `steps[n] / steps[n-1]` for `n >= 1`, omitted once the previous step
    /// is at round-off level.
    pub ratios: Vec<f64>,
    /// Largest ratio from the third iteration on.
    pub observed_ratio: f64,
    pub theoretical_ratio: f64,
    pub composition: String,
}

/// Unique tail `eta` with `eta = Q_R(compose(mu + eta))`, iterated from zero.
///
/// `mu` must be supported on the core modes. The iteration stops once a step
/// is at most `tol` in the L2 norm, where the contraction bound holds.
pub fn tail_fixed_point(problem: &ReductionProblem, mu: &SpaceTimeField, tol: f64) -> Result<(SpaceTimeField, FixedPointLog)> {
    tail_fixed_point_from(problem, mu, tol, None)
}

/// As [`tail_fixed_point`], starting from `warm` instead of zero.
pub fn tail_fixed_point_from(
    problem: &ReductionProblem,
    mu: &SpaceTimeField,
    tol: f64,
    warm: Option<&SpaceTimeField>,
) -> Result<(SpaceTimeField, FixedPointLog)> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("fixed-point tolerance must be positive, got {tol}")));
    }
    if mu.modes() != problem.modes() {
        return Err(Error::Dimension("core field lives on different modes".into()));
    }
    if mu.tail().max_abs() != 0.0 {
        return Err(Error::domain("mu must be supported on the core modes"));
    }
    problem.check_core_norm(mu)?;

    let mut log = FixedPointLog {
        theoretical_ratio: problem.contraction_ratio(),
        composition: problem.kind().composition().to_string(),
        ..Default::default()
    };
    let mut eta = match warm {
        Some(w) => w.tail(),
        None => problem.zero_field(),
    };
    let cap = problem.tolerances().max_tail_iterations;
    while log.iterations < cap {
        let next = problem.compose(&mu.add(&eta)?)?.tail();
        let step = next.sub(&eta)?.l2_norm();
        if let Some(&prev) = log.steps.last() {
            if prev > RATIO_FLOOR {
                let r = step / prev;
                if log.steps.len() >= 2 {
                    log.observed_ratio = log.observed_ratio.max(r);
                }
                log.ratios.push(r);
            }
        }
        log.steps.push(step);
        log.iterations += 1;
        eta = next;
        if !step.is_finite() {
            break;
        }
        if step <= tol {
            return Ok((eta, log));
        }
    }
    Err(Error::NonContraction {
        iterations: log.iterations,
        last_step: log.steps.last().copied().unwrap_or(f64::NAN),
        observed_ratio: log.observed_ratio,
        theoretical_ratio: log.theoretical_ratio,
    })
}

/// L2 norm of `eta - Q_R(compose(mu + eta))`.
pub fn tail_residual(problem: &ReductionProblem, mu: &SpaceTimeField, eta: &SpaceTimeField) -> Result<f64> {
    let image = problem.compose(&mu.add(eta)?)?.tail();
    Ok(eta.sub(&image)?.l2_norm())
}
