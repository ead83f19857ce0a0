use serde::{Deserialize, Serialize};

use super::geometry::Geometry;
use super::modes::ModeSet;
use super::symbol::OperatorSymbol;
use super::transform::{eval_basis, WAVE_BASIS_MEAN_SQ};
use crate::error::{Error, Result};

/// Truncated spectral expansion of a function on `[0,L]` or `[0,T] x [0,L]`.
///
/// Static fields are expanded in the string modes
/// `u_k(x) = sqrt(L/2)/(pi k) sin(pi k x/L)` and their norms are integrals
/// over `[0, L]`. Wave fields are expanded in `sin(j pi t/T) phi_k(x)` with
/// `phi_k` of unit mean square, and their norms are means over the slab.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeField {
    geometry: Geometry,
    modes: ModeSet,
    coeffs: Vec<f64>,
}

/// Point values of a field plus its Parseval norm.
#[derive(Clone, Debug, PartialEq)]
pub struct Synthesis {
    pub values: Vec<f64>,
    pub h_norm: f64,
}

impl SpaceTimeField {
    pub fn zeros(geometry: &Geometry, modes: &ModeSet) -> Result<Self> {
        check_compatible(geometry, modes)?;
        Ok(Self {
            geometry: *geometry,
            modes: *modes,
            coeffs: vec![0.0; modes.len()],
        })
    }

    pub fn from_coeffs(geometry: &Geometry, modes: &ModeSet, coeffs: Vec<f64>) -> Result<Self> {
        check_compatible(geometry, modes)?;
        if coeffs.len() != modes.len() {
            return Err(Error::Dimension(format!(
                "expected {} coefficients, got {}",
                modes.len(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("field coefficients must be finite"));
        }
        Ok(Self {
            geometry: *geometry,
            modes: *modes,
            coeffs,
        })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Same field with new coefficients.
    pub(crate) fn with_coeffs(&self, coeffs: Vec<f64>) -> Self {
        debug_assert_eq!(coeffs.len(), self.coeffs.len());
        Self {
            geometry: self.geometry,
            modes: self.modes,
            coeffs,
        }
    }

    /// `||basis_i||^2` in L2 (integral for static, mean for wave).
    pub fn l2_weights(&self) -> Vec<f64> {
        l2_weights(&self.geometry, &self.modes)
    }

    /// `||basis_i||^2` in H: `u^2 + |u_x|^2` (+ `|u_t|^2` for wave fields).
    pub fn h_weights(&self) -> Vec<f64> {
        let g = &self.geometry;
        self.modes
            .modes()
            .map(|m| {
                let kx2 = g.spatial_frequency(m.k).powi(2);
                match m.j {
                    // integral of u_k^2 = 1/(4 lambda_k), of u_k'^2 = 1/4
                    None => 0.25 / kx2 + 0.25,
                    Some(j) => WAVE_BASIS_MEAN_SQ * (1.0 + g.temporal_frequency(j).powi(2) + kx2),
                }
            })
            .collect()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        weighted_dot(&self.coeffs, &self.coeffs, &self.l2_weights())
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn h_norm_sq(&self) -> f64 {
        weighted_dot(&self.coeffs, &self.coeffs, &self.h_weights())
    }

    pub fn h_norm(&self) -> f64 {
        self.h_norm_sq().sqrt()
    }

    pub fn inner_h(&self, other: &Self) -> Result<f64> {
        self.check_same_space(other)?;
        Ok(weighted_dot(&self.coeffs, &other.coeffs, &self.h_weights()))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(self.with_coeffs(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(self.with_coeffs(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect()))
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// `P_R` / `Q_R` splitting at the mode set's cutoff.
    pub fn split(&self) -> (Self, Self) {
        let mut core = self.coeffs.clone();
        let mut tail = self.coeffs.clone();
        for i in 0..self.coeffs.len() {
            if self.modes.is_core(i) {
                tail[i] = 0.0;
            } else {
                core[i] = 0.0;
            }
        }
        (self.with_coeffs(core), self.with_coeffs(tail))
    }

    /// Split at an explicit cutoff `R` instead of the field's own.
    pub fn split_at(&self, cutoff: usize) -> Result<(Self, Self)> {
        let modes = self.modes.with_cutoff(cutoff)?;
        let relabelled = Self {
            modes,
            ..self.clone()
        };
        let (core, tail) = relabelled.split();
        Ok((
            Self { modes: self.modes, ..core },
            Self { modes: self.modes, ..tail },
        ))
    }

    pub fn core(&self) -> Self {
        self.split().0
    }

    pub fn tail(&self) -> Self {
        self.split().1
    }

    /// Divide every coefficient by its symbol value.
    pub fn apply_inverse_operator(&self, symbol: &OperatorSymbol) -> Result<Self> {
        self.check_symbol(symbol)?;
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (i, (c, s)) in self.coeffs.iter().zip(symbol.values()).enumerate() {
            if *s == 0.0 {
                let m = self.modes.mode(i);
                return Err(Error::Nonresonance {
                    j: m.j.unwrap_or(0),
                    k: m.k,
                    sigma: 0.0,
                    floor: 0.0,
                    horizon: self.geometry.horizon().unwrap_or(f64::NAN),
                    suggestion: self.geometry.horizon().unwrap_or(f64::NAN) * 1.01,
                });
            }
            out.push(c / s);
        }
        Ok(self.with_coeffs(out))
    }

    /// Multiply every coefficient by its symbol value.
    pub fn apply_operator(&self, symbol: &OperatorSymbol) -> Result<Self> {
        self.check_symbol(symbol)?;
        Ok(self.with_coeffs(self.coeffs.iter().zip(symbol.values()).map(|(c, s)| c * s).collect()))
    }

    /// Evaluate at `(t, x)` points (`t` ignored for static fields).
    pub fn synthesize(&self, points: &[(f64, f64)]) -> Result<Synthesis> {
        let mut values = Vec::with_capacity(points.len());
        for &(t, x) in points {
            values.push(self.eval(t, x)?);
        }
        Ok(Synthesis {
            values,
            h_norm: self.h_norm(),
        })
    }

    pub fn eval(&self, t: f64, x: f64) -> Result<f64> {
        if !self.geometry.contains(t, x) {
            return Err(Error::domain(format!("point (t={t}, x={x}) outside the domain")));
        }
        let basis = eval_basis(&self.geometry, &self.modes, t, x);
        Ok(basis.iter().zip(&self.coeffs).map(|(b, c)| b * c).sum())
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.modes != other.modes || self.geometry != other.geometry {
            return Err(Error::Dimension("fields live on different mode sets".into()));
        }
        Ok(())
    }

    fn check_symbol(&self, symbol: &OperatorSymbol) -> Result<()> {
        let (a, b) = (symbol.modes(), &self.modes);
        if a.k_max() != b.k_max() || a.j_max() != b.j_max() || a.spatial() != b.spatial() {
            return Err(Error::Dimension("symbol and field have different retained modes".into()));
        }
        Ok(())
    }
}

pub(crate) fn l2_weights(geometry: &Geometry, modes: &ModeSet) -> Vec<f64> {
    modes
        .modes()
        .map(|m| match m.j {
            None => 0.25 / geometry.spatial_frequency(m.k).powi(2),
            Some(_) => WAVE_BASIS_MEAN_SQ,
        })
        .collect()
}

pub(crate) fn weighted_dot(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    a.iter().zip(b).zip(w).map(|((x, y), w)| x * y * w).sum()
}

fn check_compatible(geometry: &Geometry, modes: &ModeSet) -> Result<()> {
    if geometry.is_wave() != modes.is_wave() {
        return Err(Error::domain("geometry and mode set disagree on static/wave"));
    }
    if modes.is_wave() && geometry.spatial() != modes.spatial() {
        return Err(Error::domain("geometry and mode set disagree on the spatial basis"));
    }
    Ok(())
}
