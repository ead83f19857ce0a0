//! Independent reference solvers for the integration and acceptance tests.
//!
//! The oracles solve the full truncated Galerkin system on every retained
//! mode at once, with their own basis functions, their own trapezoidal
//! weights and an assembled Jacobian. Nothing here goes through the core/tail
//! split.

#![allow(dead_code)]

use std::f64::consts::PI;

use finite_proxy::reduction::Nonlinearity;
use finite_proxy::spectral::{ModeSet, Part, SpatialBasis};
use nalgebra::{DMatrix, DVector};

/// `f'` by central differences; enough for Newton to converge quadratically
/// up to the difference error, and the root itself does not depend on it.
fn derivative(nl: &Nonlinearity, u: f64) -> f64 {
    let h = 1e-6 * u.abs().max(1.0);
    (nl.eval(u + h) - nl.eval(u - h)) / (2.0 * h)
}

/// Trapezoid nodes and weights on `[0, len]` with `m` intervals.
fn closed_rule(len: f64, m: usize) -> (Vec<f64>, Vec<f64>) {
    let h = len / m as f64;
    let xs = (0..=m).map(|i| i as f64 * h).collect();
    let ws = (0..=m).map(|i| if i == 0 || i == m { 0.5 * h } else { h }).collect();
    (xs, ws)
}

/// Periodic rectangle rule on `[0, len)`.
fn periodic_rule(len: f64, m: usize) -> (Vec<f64>, Vec<f64>) {
    let h = len / m as f64;
    ((0..m).map(|i| i as f64 * h).collect(), vec![h; m])
}

pub struct Oracle {
    /// Basis functions sampled at the nodes, one column per unknown.
    basis: DMatrix<f64>,
    weights: DVector<f64>,
    /// Diagonal of the linear part of the residual.
    linear: DVector<f64>,
    /// Scale applied to the projected source.
    source_scale: f64,
}

pub struct OracleSolution {
    pub coeffs: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

impl Oracle {
    /// `-u'' = f(u)` on `[0, L]` with `u = sum c_k sqrt(L/2)/(pi k) sin(pi k x / L)`.
    /// Weak form: `c_k / 4 = integral of f(u) u_k`.
    pub fn static_problem(length: f64, k_max: usize, intervals: usize) -> Self {
        let (xs, ws) = closed_rule(length, intervals);
        let basis = DMatrix::from_fn(xs.len(), k_max, |i, k| {
            let kk = (k + 1) as f64;
            (length / 2.0).sqrt() / (PI * kk) * (PI * kk * xs[i] / length).sin()
        });
        Self {
            basis,
            weights: DVector::from_vec(ws),
            linear: DVector::from_element(k_max, 0.25),
            source_scale: 1.0,
        }
    }

    /// `u_tt - u_xx = f(u)` on `[0, T] x [0, L]`, with `u` vanishing at
    /// `t = 0, T`. Unknowns follow the time-major layout of `modes`. Weak
    /// form on the slab mean: `sigma c / 2 = mean of f(u) phi`.
    pub fn wave_problem(length: f64, horizon: f64, modes: &ModeSet, time_intervals: usize, space_intervals: usize) -> Self {
        let (ts, wt) = closed_rule(horizon, time_intervals);
        let (xs, wx) = match modes.spatial() {
            SpatialBasis::Fixed => closed_rule(length, space_intervals),
            SpatialBasis::Periodic => periodic_rule(length, space_intervals),
        };
        let ns = modes.n_space();
        let nt = modes.n_time();
        let space_fn = |s: usize, x: f64| -> (f64, f64) {
            let (k, part) = modes.space_slot(s);
            let kk = k as f64;
            match modes.spatial() {
                SpatialBasis::Fixed => (2f64.sqrt() * (PI * kk * x / length).sin(), PI * kk / length),
                SpatialBasis::Periodic => {
                    let w = 2.0 * PI * kk / length;
                    let v = match (k, part) {
                        (0, _) => 1.0,
                        (_, Part::Cos) => 2f64.sqrt() * (w * x).cos(),
                        (_, Part::Sin) => 2f64.sqrt() * (w * x).sin(),
                    };
                    (v, w)
                }
            }
        };
        let n_nodes = ts.len() * xs.len();
        let mut basis = DMatrix::zeros(n_nodes, nt * ns);
        let mut linear = DVector::zeros(nt * ns);
        for j in 0..nt {
            let omega = PI * (j + 1) as f64 / horizon;
            for s in 0..ns {
                let col = j * ns + s;
                let (_, kappa) = space_fn(s, 0.0);
                linear[col] = 0.5 * (kappa * kappa - omega * omega);
                for (a, t) in ts.iter().enumerate() {
                    let st = (omega * t).sin();
                    for (b, x) in xs.iter().enumerate() {
                        basis[(a * xs.len() + b, col)] = st * space_fn(s, *x).0;
                    }
                }
            }
        }
        let weights = DVector::from_iterator(n_nodes, wt.iter().flat_map(|a| wx.iter().map(move |b| a * b)));
        Self {
            basis,
            weights,
            linear,
            source_scale: 1.0 / (horizon * length),
        }
    }

    pub fn len(&self) -> usize {
        self.linear.len()
    }

    pub fn residual(&self, nl: &Nonlinearity, c: &DVector<f64>) -> DVector<f64> {
        let u = &self.basis * c;
        let fw = DVector::from_iterator(u.len(), u.iter().zip(self.weights.iter()).map(|(u, w)| nl.eval(*u) * w));
        self.linear.component_mul(c) - self.basis.tr_mul(&fw) * self.source_scale
    }

    fn jacobian(&self, nl: &Nonlinearity, c: &DVector<f64>) -> DMatrix<f64> {
        let u = &self.basis * c;
        let mut scaled = self.basis.clone();
        for (i, mut row) in scaled.row_iter_mut().enumerate() {
            row *= derivative(nl, u[i]) * self.weights[i] * self.source_scale;
        }
        DMatrix::from_diagonal(&self.linear) - self.basis.tr_mul(&scaled)
    }

    /// Damped Newton from `start` until the residual is below `tol`.
    pub fn solve(&self, nl: &Nonlinearity, start: &[f64], tol: f64) -> OracleSolution {
        let mut c = DVector::from_column_slice(start);
        let mut r = self.residual(nl, &c);
        let mut iterations = 0;
        while r.norm() > tol && iterations < 100 {
            let step = self.jacobian(nl, &c).lu().solve(&r).expect("oracle Jacobian is singular");
            let mut t = 1.0;
            loop {
                let trial = &c - &step * t;
                let rt = self.residual(nl, &trial);
                if rt.norm() < r.norm() || t < 1e-6 {
                    c = trial;
                    r = rt;
                    break;
                }
                t *= 0.5;
            }
            iterations += 1;
        }
        OracleSolution {
            coeffs: c.iter().copied().collect(),
            residual: r.norm(),
            iterations,
        }
    }

    /// `u` at the oracle's own nodes.
    pub fn synthesize(&self, c: &[f64]) -> Vec<f64> {
        (&self.basis * DVector::from_column_slice(c)).iter().copied().collect()
    }
}

/// Euclidean distance between two coefficient vectors.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Strictly increasing positive spectrum with gaps in `[0.05, 1]` and first
/// value in `[0.1, 1]`.
pub fn random_spectrum(rng: &mut impl rand::Rng, n: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(n);
    let mut x: f64 = rng.gen_range(0.1..1.0);
    for _ in 0..n {
        v.push(x);
        x += rng.gen_range(0.05..1.0);
    }
    v
}
