use serde::{Deserialize, Serialize};

use super::modal::ModalMap;
use super::simulate::{simulate_with_map, ChainState, SimulationOptions};
use crate::error::{Error, Result};
use crate::inverse::SpringMassChain;
use crate::reduction::{Nonlinearity, ProblemKind, ReductionResult};
use crate::spectral::SpatialBasis;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRow {
    /// One-based spatial mode index.
    pub mode: usize,
    pub chain: f64,
    /// Squared spatial frequency of the continuum mode.
    pub reference: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

/// Chain modal motion against the reduced core profiles `mu_k(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryDiscrepancy {
    pub times: Vec<f64>,
    /// `chain[a][k]`: modal coordinate of the linear chain.
    pub chain: Vec<Vec<f64>>,
    /// `reduced[a][k]`: `mu_k(t)` from the reduced solution.
    pub reduced: Vec<Vec<f64>>,
    /// `sup_t |chain - reduced|` per mode.
    pub per_mode_sup: Vec<f64>,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModalComparison {
    pub frequencies: Vec<FrequencyRow>,
    pub max_rel_frequency_error: f64,
    /// Present for wave results only.
    pub trajectory: Option<TrajectoryDiscrepancy>,
}

/// Compare a chain with the core of a reduced solution.
///
/// Frequencies: chain eigenvalues against `kappa_k^2` of the `ell` core
/// modes. Trajectories (wave results): the chain is released, without
/// nonlinearity, from `mu_k(0)` and `mu_k'(0)` in modal coordinates and its
/// modal motion is compared with `mu_k(t)`. The two agree for a linear
/// problem; otherwise the gap measures the nonlinear coupling.
pub fn modal_compare(chain: &SpringMassChain, reduced: &ReductionResult, map: &ModalMap) -> Result<ModalComparison> {
    let u = &reduced.solution;
    let modes = u.modes();
    let geometry = u.geometry();
    if reduced.kind == ProblemKind::Wave && modes.spatial() == SpatialBasis::Periodic {
        return Err(Error::domain(
            "periodic modes come in degenerate cos/sin pairs; a fixed-fixed chain has simple eigenvalues",
        ));
    }
    let ell = modes.ell();
    if chain.n() != ell || map.n() != ell {
        return Err(Error::Dimension(format!(
            "chain has {} beads but the reduced core has {ell} spatial modes",
            chain.n()
        )));
    }

    let frequencies: Vec<FrequencyRow> = (0..ell)
        .map(|s| {
            let (k, _) = modes.space_slot(s);
            let reference = geometry.spatial_frequency(k).powi(2);
            let value = map.eigenvalues()[s];
            let abs_err = (value - reference).abs();
            FrequencyRow { mode: k, chain: value, reference, abs_err, rel_err: abs_err / reference }
        })
        .collect();
    let max_rel_frequency_error = frequencies.iter().map(|r| r.rel_err).fold(0.0, f64::max);

    let trajectory = match reduced.kind {
        ProblemKind::Static => None,
        ProblemKind::Wave => Some(trajectory_discrepancy(chain, reduced, map)?),
    };
    Ok(ModalComparison { frequencies, max_rel_frequency_error, trajectory })
}

fn trajectory_discrepancy(chain: &SpringMassChain, reduced: &ReductionResult, map: &ModalMap) -> Result<TrajectoryDiscrepancy> {
    let mu = &reduced.mu;
    let modes = mu.modes();
    let geometry = mu.geometry();
    let horizon = geometry.horizon().unwrap_or(0.0);
    let ns = modes.n_space();
    let ell = modes.ell();
    let jmax = modes.j_max();
    let omega: Vec<f64> = (1..=jmax).map(|j| geometry.temporal_frequency(j)).collect();
    let profile = |s: usize, t: f64| -> f64 { (0..jmax).map(|j| mu.coeffs()[j * ns + s] * (omega[j] * t).sin()).sum() };

    let q0: Vec<f64> = (0..ell).map(|s| profile(s, 0.0)).collect();
    let p0: Vec<f64> = (0..ell)
        .map(|s| (0..jmax).map(|j| mu.coeffs()[j * ns + s] * omega[j]).sum())
        .collect();
    let init = ChainState { positions: map.from_modal(&q0)?, velocities: map.from_modal(&p0)? };

    let w_max = map.frequencies().into_iter().fold(0.0, f64::max);
    let target = (1e-3f64).min(0.25 / w_max.max(1e-12));
    let steps = ((horizon / target).ceil() as usize).max(1);
    let dt = horizon / steps as f64;
    let sample_every = (steps / 400).max(1);
    let opts = SimulationOptions { sample_every, ..SimulationOptions::new(dt, steps) };
    let rec = simulate_with_map(chain, map, &Nonlinearity::zero(), &init, &opts)?;

    let reduced_rows: Vec<Vec<f64>> = rec.times.iter().map(|t| (0..ell).map(|s| profile(s, *t)).collect()).collect();
    let mut per_mode_sup = vec![0.0f64; ell];
    for (c, r) in rec.modal.iter().zip(&reduced_rows) {
        for s in 0..ell {
            per_mode_sup[s] = per_mode_sup[s].max((c[s] - r[s]).abs());
        }
    }
    let max = per_mode_sup.iter().copied().fold(0.0, f64::max);
    Ok(TrajectoryDiscrepancy {
        times: rec.times,
        chain: rec.modal,
        reduced: reduced_rows,
        per_mode_sup,
        max,
    })
}
