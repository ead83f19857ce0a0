use serde::{Deserialize, Serialize};

use super::geometry::{Geometry, SpatialBasis};
use crate::error::{Error, Result};

/// Trigonometric part of a spatial mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Part {
    Sin,
    Cos,
}

/// Label of one retained basis function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mode {
    /// Temporal index `j >= 1`; `None` for static fields.
    pub j: Option<usize>,
    /// Spatial index `k`.
    pub k: usize,
    pub part: Part,
}

/// Retained modes of a truncated field and the core/tail cutoff `R`.
///
/// Coefficients are stored time-major: index `jslot * n_space + sslot`.
/// Spatial slots are `k = 1..=K` for fixed ends; on the torus slot 0 is the
/// constant mode and each `k >= 1` contributes a cosine then a sine slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeSet {
    spatial: SpatialBasis,
    k_max: usize,
    /// Zero for static fields.
    j_max: usize,
    cutoff: usize,
}

impl ModeSet {
    /// Sine modes `k = 1..=k_max` of the static interval.
    pub fn string(k_max: usize, cutoff: usize) -> Result<Self> {
        Self::build(SpatialBasis::Fixed, k_max, 0, cutoff)
    }

    pub fn wave(spatial: SpatialBasis, k_max: usize, j_max: usize, cutoff: usize) -> Result<Self> {
        if j_max == 0 {
            return Err(Error::domain("wave mode sets need j_max >= 1"));
        }
        Self::build(spatial, k_max, j_max, cutoff)
    }

    /// Mode set matching `geometry` (static when the geometry has no horizon).
    pub fn for_geometry(geometry: &Geometry, k_max: usize, j_max: usize, cutoff: usize) -> Result<Self> {
        if geometry.is_wave() {
            Self::wave(geometry.spatial(), k_max, j_max, cutoff)
        } else {
            Self::string(k_max, cutoff)
        }
    }

    fn build(spatial: SpatialBasis, k_max: usize, j_max: usize, cutoff: usize) -> Result<Self> {
        let lowest = spatial.lowest_index();
        if k_max < lowest.max(1) {
            return Err(Error::domain(format!("k_max must be at least 1, got {k_max}")));
        }
        if cutoff < lowest {
            return Err(Error::domain(format!(
                "cutoff R = {cutoff} below the lowest spatial index {lowest}"
            )));
        }
        if cutoff > k_max {
            return Err(Error::Capacity(format!("cutoff R = {cutoff} exceeds k_max = {k_max}")));
        }
        Ok(Self {
            spatial,
            k_max,
            j_max,
            cutoff,
        })
    }

    /// Same retained modes with a different cutoff.
    pub fn with_cutoff(&self, cutoff: usize) -> Result<Self> {
        Self::build(self.spatial, self.k_max, self.j_max, cutoff)
    }

    pub fn spatial(&self) -> SpatialBasis {
        self.spatial
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn is_wave(&self) -> bool {
        self.j_max > 0
    }

    /// Number of spatial slots.
    pub fn n_space(&self) -> usize {
        match self.spatial {
            SpatialBasis::Fixed => self.k_max,
            SpatialBasis::Periodic => 2 * self.k_max + 1,
        }
    }

    /// Number of temporal slots (1 for static fields).
    pub fn n_time(&self) -> usize {
        self.j_max.max(1)
    }

    pub fn len(&self) -> usize {
        self.n_time() * self.n_space()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Spatial index and part of spatial slot `s`.
    pub fn space_slot(&self, s: usize) -> (usize, Part) {
        match self.spatial {
            SpatialBasis::Fixed => (s + 1, Part::Sin),
            SpatialBasis::Periodic => {
                if s == 0 {
                    (0, Part::Cos)
                } else {
                    let k = (s + 1) / 2;
                    (k, if s % 2 == 1 { Part::Cos } else { Part::Sin })
                }
            }
        }
    }

    /// Number of spatial slots with spatial index `<= r`.
    pub fn space_slots_upto(&self, r: usize) -> usize {
        match self.spatial {
            SpatialBasis::Fixed => r.min(self.k_max),
            SpatialBasis::Periodic => 2 * r.min(self.k_max) + 1,
        }
    }

    /// Core dimension in space, `ell = #{k : |k| <= R}`.
    pub fn ell(&self) -> usize {
        self.space_slots_upto(self.cutoff)
    }

    pub fn mode(&self, index: usize) -> Mode {
        let ns = self.n_space();
        let (k, part) = self.space_slot(index % ns);
        let j = if self.is_wave() { Some(index / ns + 1) } else { None };
        Mode { j, k, part }
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        (0..self.len()).map(move |i| self.mode(i))
    }

    pub fn is_core(&self, index: usize) -> bool {
        index % self.n_space() < self.ell()
    }

    pub fn core_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_core(i)).collect()
    }

    pub fn tail_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.is_core(i)).collect()
    }

    /// Indices of the highest retained spatial index, used to report tail
    /// truncation.
    pub fn last_band_indices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.mode(i).k == self.k_max)
            .collect()
    }
}
