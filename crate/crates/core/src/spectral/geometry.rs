use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spatial boundary treatment of a wave problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpatialBasis {
    /// Fixed ends at `x = 0` and `x = L` (sine modes, the elastic string).
    Fixed,
    /// One-dimensional torus of circumference `L` (cosine/sine modes).
    Periodic,
}

impl SpatialBasis {
    /// Smallest spatial mode index carried by this basis.
    pub fn lowest_index(self) -> usize {
        match self {
            SpatialBasis::Fixed => 1,
            SpatialBasis::Periodic => 0,
        }
    }
}

/// Rectangular domain `[0,L]` (static) or `[0,T] x [0,L]` (wave).
///
/// Time boundary conditions are always homogeneous Dirichlet at `t = 0` and
/// `t = T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    length: f64,
    horizon: Option<f64>,
    spatial: SpatialBasis,
}

impl Geometry {
    /// Static fixed–fixed interval `[0, length]`.
    pub fn interval(length: f64) -> Result<Self> {
        check_positive("length L", length)?;
        Ok(Self {
            length,
            horizon: None,
            spatial: SpatialBasis::Fixed,
        })
    }

    /// Space-time slab `[0, horizon] x [0, length]`.
    pub fn wave(length: f64, horizon: f64, spatial: SpatialBasis) -> Result<Self> {
        check_positive("length L", length)?;
        check_positive("horizon T", horizon)?;
        Ok(Self {
            length,
            horizon: Some(horizon),
            spatial,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn horizon(&self) -> Option<f64> {
        self.horizon
    }

    pub fn spatial(&self) -> SpatialBasis {
        self.spatial
    }

    pub fn is_wave(&self) -> bool {
        self.horizon.is_some()
    }

    /// Eigenfrequency of spatial mode `k`: `pi k / L` for fixed ends,
    /// `2 pi k / L` on the torus.
    pub fn spatial_frequency(&self, k: usize) -> f64 {
        let k = k as f64;
        match self.spatial {
            SpatialBasis::Fixed => PI * k / self.length,
            SpatialBasis::Periodic => 2.0 * PI * k / self.length,
        }
    }

    /// Temporal frequency `j pi / T` of time mode `j` (zero for static geometries).
    pub fn temporal_frequency(&self, j: usize) -> f64 {
        match self.horizon {
            Some(t) => PI * j as f64 / t,
            None => 0.0,
        }
    }

    /// Whether `(t, x)` lies in the closed domain. `t` is ignored for static
    /// geometries.
    pub fn contains(&self, t: f64, x: f64) -> bool {
        let in_space = (0.0..=self.length).contains(&x);
        match self.horizon {
            Some(h) => in_space && (0.0..=h).contains(&t),
            None => in_space,
        }
    }
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {value}")))
    }
}
