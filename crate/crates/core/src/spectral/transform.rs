//! Uniform-grid synthesis and projection for truncated sine/torus bases.
//!
//! Projections use the trapezoidal rule. On a uniform grid the rule is exact
//! for products of two retained modes as long as the grid resolves twice the
//! highest frequency, so projecting a band-limited field recovers its
//! coefficients to round-off.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::geometry::{Geometry, SpatialBasis};
use super::modes::{ModeSet, Part};
use crate::error::{Error, Result};

/// Minimum grid intervals per retained mode index.
pub const MIN_OVERSAMPLING: usize = 4;

/// Grid intervals along each axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub space: usize,
    /// Ignored for static fields.
    pub time: usize,
}

impl Resolution {
    /// `factor` grid intervals per retained mode index on each axis.
    pub fn with_factor(modes: &ModeSet, factor: usize) -> Self {
        Self {
            space: factor * modes.k_max(),
            time: factor * modes.j_max(),
        }
    }

    /// Anti-aliasing guard: at least four intervals per retained mode index.
    pub fn check(&self, modes: &ModeSet) -> Result<()> {
        let need_space = MIN_OVERSAMPLING * modes.k_max();
        if self.space < need_space {
            return Err(Error::Resolution(format!(
                "space resolution {} below {need_space} (4 x k_max)",
                self.space
            )));
        }
        if modes.is_wave() {
            let need_time = MIN_OVERSAMPLING * modes.j_max();
            if self.time < need_time {
                return Err(Error::Resolution(format!(
                    "time resolution {} below {need_time} (4 x j_max)",
                    self.time
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum AxisKind {
    /// `[0, len]`, nodes `0..=M`, zero at both ends.
    Sine,
    /// `[0, len)`, nodes `0..M`.
    Periodic,
}

#[derive(Clone, Copy, Debug)]
struct AxisSlot {
    freq: usize,
    part: Part,
    scale: f64,
}

/// One-dimensional basis sampled on a uniform grid.
#[derive(Clone, Debug)]
pub(crate) struct Axis {
    kind: AxisKind,
    length: f64,
    intervals: usize,
    slots: Vec<AxisSlot>,
    /// `sin(pi p / M)` and `cos(pi p / M)` for `p in 0..2M`.
    sin_table: Vec<f64>,
    cos_table: Vec<f64>,
}

impl Axis {
    fn new(kind: AxisKind, length: f64, intervals: usize, slots: Vec<AxisSlot>) -> Self {
        let period = 2 * intervals;
        let (sin_table, cos_table) = (0..period)
            .map(|p| {
                let a = PI * p as f64 / intervals as f64;
                (a.sin(), a.cos())
            })
            .unzip();
        Self {
            kind,
            length,
            intervals,
            slots,
            sin_table,
            cos_table,
        }
    }

    fn n_nodes(&self) -> usize {
        match self.kind {
            AxisKind::Sine => self.intervals + 1,
            AxisKind::Periodic => self.intervals,
        }
    }

    fn node(&self, i: usize) -> f64 {
        self.length * i as f64 / self.intervals as f64
    }

    fn weight(&self, i: usize) -> f64 {
        let h = self.length / self.intervals as f64;
        match self.kind {
            AxisKind::Sine if i == 0 || i == self.intervals => 0.5 * h,
            _ => h,
        }
    }

    #[inline]
    fn value(&self, slot: &AxisSlot, i: usize) -> f64 {
        let period = 2 * self.intervals;
        let p = match self.kind {
            AxisKind::Sine => (slot.freq * i) % period,
            AxisKind::Periodic => (2 * slot.freq * i) % period,
        };
        let t = match slot.part {
            Part::Sin => self.sin_table[p],
            Part::Cos => self.cos_table[p],
        };
        slot.scale * t
    }

    /// Exact `integral of basis^2` over the axis.
    fn norm_sq(&self, slot: &AxisSlot) -> f64 {
        let s2 = slot.scale * slot.scale;
        match (self.kind, slot.freq) {
            (AxisKind::Periodic, 0) => s2 * self.length,
            _ => s2 * self.length / 2.0,
        }
    }

    /// Coefficients -> nodal values, applied along a strided dimension.
    fn synthesize_into(&self, coeffs: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self
                .slots
                .iter()
                .zip(coeffs)
                .map(|(s, c)| c * self.value(s, i))
                .sum();
        }
    }

    /// Nodal values -> coefficients.
    fn project_into(&self, values: &[f64], out: &mut [f64]) {
        for (slot, o) in self.slots.iter().zip(out.iter_mut()) {
            let acc: f64 = values
                .iter()
                .enumerate()
                .map(|(i, v)| self.weight(i) * v * self.value(slot, i))
                .sum();
            *o = acc / self.norm_sq(slot);
        }
    }
}

/// Time axis: `sin(j pi t / T)`, `j = 1..=J`, unit scale.
fn time_axis(horizon: f64, modes: &ModeSet, intervals: usize) -> Axis {
    let slots = (1..=modes.j_max())
        .map(|j| AxisSlot { freq: j, part: Part::Sin, scale: 1.0 })
        .collect();
    Axis::new(AxisKind::Sine, horizon, intervals, slots)
}

fn space_scale(modes: &ModeSet, length: f64, k: usize) -> f64 {
    if !modes.is_wave() {
        (length / 2.0).sqrt() / (PI * k as f64)
    } else if k == 0 {
        1.0
    } else {
        SQRT_2
    }
}

/// Spatial axis. Static fields use the string modes
/// `sqrt(L/2)/(pi k) sin(pi k x / L)`; wave fields use bases with unit mean
/// square so that each spatial coefficient is a unit-mass oscillator.
fn space_axis(geometry: &Geometry, modes: &ModeSet, intervals: usize) -> Axis {
    let length = geometry.length();
    let slots: Vec<AxisSlot> = (0..modes.n_space())
        .map(|s| {
            let (k, part) = modes.space_slot(s);
            AxisSlot { freq: k, part, scale: space_scale(modes, length, k) }
        })
        .collect();
    let kind = match modes.spatial() {
        SpatialBasis::Fixed => AxisKind::Sine,
        SpatialBasis::Periodic => AxisKind::Periodic,
    };
    Axis::new(kind, length, intervals, slots)
}

/// Nodal values on a uniform tensor grid, time-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GridValues {
    pub times: Vec<f64>,
    pub xs: Vec<f64>,
    /// `values[a * xs.len() + b]` at `(times[a], xs[b])`.
    pub values: Vec<f64>,
}

impl GridValues {
    pub fn at(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.xs.len() + b]
    }
}

/// Synthesis/projection between coefficients and a uniform grid.
#[derive(Clone, Debug)]
pub struct Transform {
    modes: ModeSet,
    time: Option<Axis>,
    space: Axis,
    resolution: Resolution,
}

impl Transform {
    pub fn new(geometry: &Geometry, modes: &ModeSet, resolution: Resolution) -> Result<Self> {
        if geometry.is_wave() != modes.is_wave() {
            return Err(Error::domain("geometry and mode set disagree on static/wave"));
        }
        if modes.is_wave() && geometry.spatial() != modes.spatial() {
            return Err(Error::domain("geometry and mode set disagree on the spatial basis"));
        }
        resolution.check(modes)?;
        let time = geometry
            .horizon()
            .map(|t| time_axis(t, modes, resolution.time));
        let space = space_axis(geometry, modes, resolution.space);
        Ok(Self {
            modes: *modes,
            time,
            space,
            resolution,
        })
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn n_time_nodes(&self) -> usize {
        self.time.as_ref().map_or(1, Axis::n_nodes)
    }

    pub fn n_space_nodes(&self) -> usize {
        self.space.n_nodes()
    }

    pub fn n_nodes(&self) -> usize {
        self.n_time_nodes() * self.n_space_nodes()
    }

    pub fn times(&self) -> Vec<f64> {
        match &self.time {
            Some(ax) => (0..ax.n_nodes()).map(|i| ax.node(i)).collect(),
            None => vec![0.0],
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.space.n_nodes()).map(|i| self.space.node(i)).collect()
    }

    /// Trapezoidal weight of grid node `(a, b)` (integral, not mean).
    pub fn weight(&self, a: usize, b: usize) -> f64 {
        let wt = self.time.as_ref().map_or(1.0, |ax| ax.weight(a));
        wt * self.space.weight(b)
    }

    /// Trapezoidal weight of time node `a` (1 for static transforms).
    pub fn time_weight(&self, a: usize) -> f64 {
        self.time.as_ref().map_or(1.0, |ax| ax.weight(a))
    }

    pub fn space_weight(&self, b: usize) -> f64 {
        self.space.weight(b)
    }

    /// Measure of the domain: `L` (static) or `T L` (wave).
    pub fn measure(&self) -> f64 {
        self.space.length * self.time.as_ref().map_or(1.0, |ax| ax.length)
    }

    /// Trapezoidal integral of nodal values over the domain.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        let ns = self.n_space_nodes();
        values
            .iter()
            .enumerate()
            .map(|(idx, v)| self.weight(idx / ns, idx % ns) * v)
            .sum()
    }

    /// Values of the field on the grid.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let ns_slots = self.modes.n_space();
        let nx = self.n_space_nodes();
        match &self.time {
            None => {
                let mut out = vec![0.0; nx];
                self.space.synthesize_into(coeffs, &mut out);
                out
            }
            Some(tax) => {
                let nt_slots = self.modes.n_time();
                let nt = tax.n_nodes();
                // time pass: tmp[a][s] = sum_j T[a][j] c[j][s]
                let mut tmp = vec![0.0; nt * ns_slots];
                let mut col = vec![0.0; nt_slots];
                let mut col_out = vec![0.0; nt];
                for s in 0..ns_slots {
                    for j in 0..nt_slots {
                        col[j] = coeffs[j * ns_slots + s];
                    }
                    tax.synthesize_into(&col, &mut col_out);
                    for a in 0..nt {
                        tmp[a * ns_slots + s] = col_out[a];
                    }
                }
                let mut out = vec![0.0; nt * nx];
                for a in 0..nt {
                    self.space.synthesize_into(
                        &tmp[a * ns_slots..(a + 1) * ns_slots],
                        &mut out[a * nx..(a + 1) * nx],
                    );
                }
                out
            }
        }
    }

    pub fn synthesize_grid(&self, coeffs: &[f64]) -> GridValues {
        GridValues {
            times: self.times(),
            xs: self.xs(),
            values: self.synthesize(coeffs),
        }
    }

    /// L2 projection of nodal values onto the retained modes.
    pub fn project(&self, values: &[f64]) -> Vec<f64> {
        let ns_slots = self.modes.n_space();
        let nx = self.n_space_nodes();
        match &self.time {
            None => {
                let mut out = vec![0.0; ns_slots];
                self.space.project_into(values, &mut out);
                out
            }
            Some(tax) => {
                let nt_slots = self.modes.n_time();
                let nt = tax.n_nodes();
                let mut tmp = vec![0.0; nt * ns_slots];
                for a in 0..nt {
                    self.space.project_into(
                        &values[a * nx..(a + 1) * nx],
                        &mut tmp[a * ns_slots..(a + 1) * ns_slots],
                    );
                }
                let mut out = vec![0.0; nt_slots * ns_slots];
                let mut col = vec![0.0; nt];
                let mut col_out = vec![0.0; nt_slots];
                for s in 0..ns_slots {
                    for a in 0..nt {
                        col[a] = tmp[a * ns_slots + s];
                    }
                    tax.project_into(&col, &mut col_out);
                    for j in 0..nt_slots {
                        out[j * ns_slots + s] = col_out[j];
                    }
                }
                out
            }
        }
    }

    /// Values on the spatial nodes of a single time slice with spatial
    /// coefficients `slot_coeffs`.
    pub fn synthesize_space_line(&self, slot_coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_space_nodes()];
        self.space.synthesize_into(slot_coeffs, &mut out);
        out
    }

    /// Spatial coefficients of one time slice of nodal values.
    pub fn project_space_line(&self, values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.modes.n_space()];
        self.space.project_into(values, &mut out);
        out
    }

    /// Spatial coefficients at every time node (`[a][s]`), i.e. the time
    /// profiles `mu_k(t_a)` of a field sampled on the grid.
    pub fn project_space_only(&self, values: &[f64]) -> Vec<f64> {
        let ns_slots = self.modes.n_space();
        let nx = self.n_space_nodes();
        let nt = self.n_time_nodes();
        let mut out = vec![0.0; nt * ns_slots];
        for a in 0..nt {
            self.space.project_into(
                &values[a * nx..(a + 1) * nx],
                &mut out[a * ns_slots..(a + 1) * ns_slots],
            );
        }
        out
    }
}

/// Pointwise evaluation of the retained basis at arbitrary `(t, x)`.
pub(crate) fn eval_basis(geometry: &Geometry, modes: &ModeSet, t: f64, x: f64) -> Vec<f64> {
    let length = geometry.length();
    let ns = modes.n_space();
    let spatial: Vec<f64> = (0..ns)
        .map(|s| {
            let (k, part) = modes.space_slot(s);
            let w = geometry.spatial_frequency(k) * x;
            let trig = match part {
                Part::Sin => w.sin(),
                Part::Cos => w.cos(),
            };
            space_scale(modes, length, k) * trig
        })
        .collect();
    if !modes.is_wave() {
        return spatial;
    }
    let mut out = Vec::with_capacity(modes.len());
    for j in 1..=modes.j_max() {
        let tj = (geometry.temporal_frequency(j) * t).sin();
        out.extend(spatial.iter().map(|v| tj * v));
    }
    out
}

/// Mean square of a unit-coefficient wave basis element over the slab.
pub(crate) const WAVE_BASIS_MEAN_SQ: f64 = 0.5;
