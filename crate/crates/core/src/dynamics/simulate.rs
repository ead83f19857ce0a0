use serde::{Deserialize, Serialize};

use super::modal::{build_modal_map, ModalMap};
use crate::error::{Error, Result};
use crate::inverse::SpringMassChain;
use crate::reduction::Nonlinearity;

/// Largest admissible `dt * max frequency`.
pub const STEP_GUARD: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
}

impl ChainState {
    pub fn at_rest(n: usize) -> Self {
        Self {
            positions: vec![0.0; n],
            velocities: vec![0.0; n],
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.positions.len() != n || self.velocities.len() != n {
            return Err(Error::Dimension(format!(
                "state has {}/{} entries for a chain of {n}",
                self.positions.len(),
                self.velocities.len()
            )));
        }
        if self.positions.iter().chain(&self.velocities).any(|v| !v.is_finite()) {
            return Err(Error::domain("chain state must be finite"));
        }
        Ok(())
    }
}

/// Time stepping scheme for [`simulate_chain`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Half kick from the bead forces, exact linear flow in modal
    /// coordinates, half kick. Exact for linear chains.
    ModalSplit,
    /// Triple-jump (Yoshida) composition of three modal-split steps:
    /// fourth order, still symplectic and exact for linear chains.
    #[default]
    ModalSplit4,
    /// Kick-drift-kick with the full force.
    VelocityVerlet,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationOptions {
    pub dt: f64,
    pub steps: usize,
    /// Record every `sample_every`-th step (the initial state is always kept).
    pub sample_every: usize,
    pub integrator: Integrator,
}

impl SimulationOptions {
    pub fn new(dt: f64, steps: usize) -> Self {
        Self {
            dt,
            steps,
            sample_every: 1,
            integrator: Integrator::default(),
        }
    }
}

/// Sampled trajectory of a chain.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<ChainState>,
    pub energies: Vec<f64>,
    /// Modal coordinates `q` at each sample.
    pub modal: Vec<Vec<f64>>,
}

impl TrajectoryRecord {
    /// `max |E(t) - E(0)| / |E(0)|` (absolute when `E(0) = 0`).
    pub fn relative_energy_drift(&self) -> f64 {
        let Some(&e0) = self.energies.first() else { return 0.0 };
        let scale = if e0 == 0.0 { 1.0 } else { e0.abs() };
        self.energies.iter().map(|e| (e - e0).abs() / scale).fold(0.0, f64::max)
    }
}

/// Kinetic plus elastic energy, minus the primitive of the bead force.
pub fn total_energy(chain: &SpringMassChain, state: &ChainState, nl: &Nonlinearity) -> f64 {
    let m = chain.masses();
    let k = chain.springs();
    let u = &state.positions;
    let n = chain.n();
    let kinetic: f64 = 0.5 * m.iter().zip(&state.velocities).map(|(m, v)| m * v * v).sum::<f64>();
    // spring i joins bead i-1 to bead i, with walls at both ends
    let stretch = |i: usize| {
        let left = if i == 0 { 0.0 } else { u[i - 1] };
        let right = if i == n { 0.0 } else { u[i] };
        right - left
    };
    let elastic: f64 = 0.5 * (0..=n).map(|i| k[i] * stretch(i).powi(2)).sum::<f64>();
    let nonlinear: f64 = u.iter().map(|x| nl.primitive(*x)).sum();
    kinetic + elastic - nonlinear
}

/// Integrate `M u'' + K u = f(u)` with `f` applied bead by bead.
pub fn simulate_chain(
    chain: &SpringMassChain,
    nl: &Nonlinearity,
    initial: &ChainState,
    options: &SimulationOptions,
) -> Result<TrajectoryRecord> {
    let map = build_modal_map(chain)?;
    simulate_with_map(chain, &map, nl, initial, options)
}

/// As [`simulate_chain`] with a precomputed modal map.
pub fn simulate_with_map(
    chain: &SpringMassChain,
    map: &ModalMap,
    nl: &Nonlinearity,
    initial: &ChainState,
    options: &SimulationOptions,
) -> Result<TrajectoryRecord> {
    let n = chain.n();
    initial.check(n)?;
    if options.steps == 0 {
        return Err(Error::domain("simulation needs at least one step"));
    }
    if !(options.dt.is_finite() && options.dt > 0.0) {
        return Err(Error::domain(format!("time step must be positive, got {}", options.dt)));
    }
    let omega = map.frequencies();
    let product = options.dt * omega.iter().copied().fold(0.0, f64::max);
    if product > STEP_GUARD {
        return Err(Error::StepSize { product, limit: STEP_GUARD });
    }
    let every = options.sample_every.max(1);
    let dt = options.dt;
    let m = chain.masses();
    let (kd, ko) = chain.stiffness();
    let rotations = |h: f64| -> Vec<(f64, f64, f64)> {
        omega
            .iter()
            .map(|w| {
                let (s, c) = (w * h).sin_cos();
                // (cos, sin / w, w sin); the w -> 0 limit is a free drift
                let s_over_w = if *w > 0.0 { s / w } else { h };
                (c, s_over_w, w * s)
            })
            .collect()
    };
    let cbrt2 = 2f64.cbrt();
    let outer = 1.0 / (2.0 - cbrt2);
    let inner = 1.0 - 2.0 * outer;
    let substeps: Vec<(f64, Vec<(f64, f64, f64)>)> = match options.integrator {
        Integrator::ModalSplit => vec![(dt, rotations(dt))],
        Integrator::ModalSplit4 => [outer, inner, outer].iter().map(|w| (w * dt, rotations(w * dt))).collect(),
        Integrator::VelocityVerlet => Vec::new(),
    };

    let mut u = initial.positions.clone();
    let mut v = initial.velocities.clone();
    let mut record = TrajectoryRecord::default();
    let push = |t: f64, u: &[f64], v: &[f64], record: &mut TrajectoryRecord| -> Result<()> {
        let state = ChainState { positions: u.to_vec(), velocities: v.to_vec() };
        record.energies.push(total_energy(chain, &state, nl));
        record.modal.push(map.to_modal(u)?);
        record.states.push(state);
        record.times.push(t);
        Ok(())
    };
    push(0.0, &u, &v, &mut record)?;

    let kick = |u: &[f64], v: &mut [f64], h: f64, elastic: bool| {
        for i in 0..n {
            let mut f = nl.eval(u[i]);
            if elastic {
                f -= kd[i] * u[i];
                if i > 0 {
                    f += ko[i - 1] * u[i - 1];
                }
                if i + 1 < n {
                    f += ko[i] * u[i + 1];
                }
            }
            v[i] += h * f / m[i];
        }
    };

    for step in 1..=options.steps {
        match options.integrator {
            Integrator::ModalSplit | Integrator::ModalSplit4 => {
                for (h, rot) in &substeps {
                    kick(&u, &mut v, 0.5 * h, false);
                    let q = map.to_modal(&u)?;
                    let p = map.to_modal(&v)?;
                    let mut q2 = vec![0.0; n];
                    let mut p2 = vec![0.0; n];
                    for k in 0..n {
                        let (c, s_w, w_s) = rot[k];
                        q2[k] = c * q[k] + s_w * p[k];
                        p2[k] = c * p[k] - w_s * q[k];
                    }
                    u = map.from_modal(&q2)?;
                    v = map.from_modal(&p2)?;
                    kick(&u, &mut v, 0.5 * h, false);
                }
            }
            Integrator::VelocityVerlet => {
                kick(&u, &mut v, 0.5 * dt, true);
                for i in 0..n {
                    u[i] += dt * v[i];
                }
                kick(&u, &mut v, 0.5 * dt, true);
            }
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::Solver {
                message: format!("chain state diverged at step {step}"),
                trace: record.energies.clone(),
            });
        }
        if step % every == 0 || step == options.steps {
            push(step as f64 * dt, &u, &v, &mut record)?;
        }
    }
    Ok(record)
}
