use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::geometry::Geometry;
use super::modes::ModeSet;
use crate::error::{Error, Result};

/// Default nonresonance floor for d'Alembertian symbols.
pub const DEFAULT_SIGMA_MIN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolKind {
    /// `-d^2/dx^2` on the fixed interval.
    Laplacian,
    /// `d^2/dt^2 - d^2/dx^2` on the space-time slab.
    Dalembertian,
}

/// Eigenvalues of the linear operator on every retained mode, laid out like
/// the field coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSymbol {
    kind: SymbolKind,
    modes: ModeSet,
    values: Vec<f64>,
}

impl OperatorSymbol {
    /// `lambda_k = (pi k / L)^2` on a static mode set.
    pub fn laplacian(geometry: &Geometry, modes: &ModeSet) -> Result<Self> {
        if geometry.is_wave() || modes.is_wave() {
            return Err(Error::domain("the Laplacian symbol needs a static geometry and mode set"));
        }
        let values = modes
            .modes()
            .map(|m| geometry.spatial_frequency(m.k).powi(2))
            .collect();
        Ok(Self {
            kind: SymbolKind::Laplacian,
            modes: *modes,
            values,
        })
    }

    /// `sigma_{j,k} = kappa_k^2 - (j pi / T)^2`, rejecting any retained mode
    /// with `|sigma| < sigma_min`.
    pub fn dalembertian(geometry: &Geometry, modes: &ModeSet, sigma_min: f64) -> Result<Self> {
        if !geometry.is_wave() || !modes.is_wave() || geometry.spatial() != modes.spatial() {
            return Err(Error::domain(
                "the d'Alembertian symbol needs matching wave geometry and mode set",
            ));
        }
        let mut values = Vec::with_capacity(modes.len());
        for m in modes.modes() {
            let j = m.j.expect("wave modes carry a time index");
            values.push(dalembert_symbol(j, m.k, geometry, sigma_min).map_err(|e| match e {
                Error::Nonresonance { j, k, sigma, floor, horizon, .. } => Error::Nonresonance {
                    j,
                    k,
                    sigma,
                    floor,
                    horizon,
                    suggestion: suggest_horizon(geometry, modes, sigma_min),
                },
                other => other,
            })?);
        }
        Ok(Self {
            kind: SymbolKind::Dalembertian,
            modes: *modes,
            values,
        })
    }

    /// Laplacian for static geometries, d'Alembertian for wave geometries.
    pub fn for_geometry(geometry: &Geometry, modes: &ModeSet, sigma_min: f64) -> Result<Self> {
        if geometry.is_wave() {
            Self::dalembertian(geometry, modes, sigma_min)
        } else {
            Self::laplacian(geometry, modes)
        }
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Smallest `|symbol|` over modes with spatial index `> cutoff`, or `None`
    /// when that tail is empty.
    pub fn smallest_tail_magnitude(&self, cutoff: usize) -> Option<f64> {
        self.modes
            .modes()
            .zip(&self.values)
            .filter(|(m, _)| m.k > cutoff)
            .map(|(_, v)| v.abs())
            .reduce(f64::min)
    }

    /// Smallest `|symbol|` over every retained mode.
    pub fn smallest_magnitude(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min)
    }
}

/// Evaluable string mode shape `sqrt(L/2) / (pi k) * sin(pi k x / L)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StringMode {
    pub k: usize,
    pub length: f64,
}

impl StringMode {
    pub fn amplitude(&self) -> f64 {
        (self.length / 2.0).sqrt() / (PI * self.k as f64)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.amplitude() * (PI * self.k as f64 * x / self.length).sin()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.amplitude() * (PI * self.k as f64 / self.length) * (PI * self.k as f64 * x / self.length).cos()
    }
}

/// Eigenpair of `-d^2/dx^2` on `[0, L]` with fixed ends.
pub fn string_eigenpair(k: usize, length: f64) -> Result<(f64, StringMode)> {
    if k < 1 {
        return Err(Error::domain("string modes start at k = 1"));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::domain(format!("length must be positive, got {length}")));
    }
    let lambda = (PI * k as f64 / length).powi(2);
    Ok((lambda, StringMode { k, length }))
}

/// Symbol of the d'Alembertian on the `(j, k)` product basis element.
pub fn dalembert_symbol(j: usize, k: usize, geometry: &Geometry, sigma_min: f64) -> Result<f64> {
    let horizon = geometry
        .horizon()
        .ok_or_else(|| Error::domain("d'Alembertian symbol needs a time horizon"))?;
    if j < 1 {
        return Err(Error::domain("temporal modes start at j = 1"));
    }
    let sigma = geometry.spatial_frequency(k).powi(2) - geometry.temporal_frequency(j).powi(2);
    if sigma.abs() < sigma_min {
        return Err(Error::Nonresonance {
            j,
            k,
            sigma,
            floor: sigma_min,
            horizon,
            suggestion: horizon * 1.01,
        });
    }
    Ok(sigma)
}

/// Nearby horizon clearing the nonresonance floor on every retained mode.
fn suggest_horizon(geometry: &Geometry, modes: &ModeSet, sigma_min: f64) -> f64 {
    let horizon = geometry.horizon().unwrap_or(1.0);
    let clears = |t: f64| {
        let g = match Geometry::wave(geometry.length(), t, geometry.spatial()) {
            Ok(g) => g,
            Err(_) => return false,
        };
        modes
            .modes()
            .all(|m| dalembert_symbol(m.j.unwrap_or(1), m.k, &g, sigma_min).is_ok())
    };
    for step in 1..=1000 {
        let t = horizon * (1.0 + 1e-3 * step as f64 * 1.618_033_988_749_895);
        if clears(t) {
            return t;
        }
    }
    horizon * 1.01
}

/// Smallest cutoff `R` with `C / (smallest tail |symbol|) <= margin`.
///
/// The scan runs over the spatial indices of the symbol's mode set; a
/// non-positive `lipschitz` returns the lowest admissible cutoff.
pub fn select_cutoff(lipschitz: f64, symbol: &OperatorSymbol, margin: f64) -> Result<usize> {
    if !(margin > 0.0 && margin <= 1.0) {
        return Err(Error::domain(format!("contraction margin must lie in (0, 1], got {margin}")));
    }
    if !(lipschitz.is_finite() && lipschitz >= 0.0) {
        return Err(Error::domain(format!("Lipschitz constant must be finite and >= 0, got {lipschitz}")));
    }
    let modes = symbol.modes();
    let lowest = modes.spatial().lowest_index().max(if modes.is_wave() { 0 } else { 1 });
    if lipschitz == 0.0 {
        return Ok(lowest);
    }
    for r in lowest..modes.k_max() {
        if let Some(min_tail) = symbol.smallest_tail_magnitude(r) {
            if lipschitz / min_tail <= margin {
                return Ok(r);
            }
        }
    }
    Err(Error::Capacity(format!(
        "no cutoff R < k_max = {} achieves C / |tail symbol| <= {margin} for C = {lipschitz}",
        modes.k_max()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpatialBasis;

    #[test]
    fn string_eigenpairs() {
        let (l1, m1) = string_eigenpair(1, PI).unwrap();
        assert!((l1 - 1.0).abs() < 1e-14);
        let x = 0.7;
        assert!((m1.eval(x) - (PI / 2.0).sqrt() / PI * x.sin()).abs() < 1e-15);
        assert_eq!(m1.eval(0.0), 0.0);
        assert!(m1.eval(PI).abs() < 1e-16);
        let (l2, _) = string_eigenpair(2, 1.0).unwrap();
        assert!((l2 - 4.0 * PI * PI).abs() < 1e-12);
        let (l5, _) = string_eigenpair(5, 1.0).unwrap();
        assert!((l5 - 246.740_110_027_233_96).abs() < 1e-9);
        assert!(string_eigenpair(0, 1.0).is_err());
        assert!(string_eigenpair(1, 0.0).is_err());
    }

    #[test]
    fn dalembert_examples() {
        let g = Geometry::wave(2.0 * PI, 1.0, SpatialBasis::Periodic).unwrap();
        let s = dalembert_symbol(1, 2, &g, DEFAULT_SIGMA_MIN).unwrap();
        assert!((s - (4.0 - PI * PI)).abs() < 1e-13);
        let g2 = Geometry::wave(2.0 * PI, 2.0, SpatialBasis::Periodic).unwrap();
        let s0 = dalembert_symbol(1, 0, &g2, DEFAULT_SIGMA_MIN).unwrap();
        assert!((s0 + PI * PI / 4.0).abs() < 1e-14);
        // T = pi makes j = k resonant on the unit-frequency torus.
        let g3 = Geometry::wave(2.0 * PI, PI, SpatialBasis::Periodic).unwrap();
        match dalembert_symbol(3, 3, &g3, DEFAULT_SIGMA_MIN) {
            Err(Error::Nonresonance { j: 3, k: 3, .. }) => {}
            other => panic!("expected nonresonance error, got {other:?}"),
        }
    }

    #[test]
    fn resonant_symbol_suggests_clearing_horizon() {
        let g = Geometry::wave(2.0 * PI, PI, SpatialBasis::Periodic).unwrap();
        let modes = ModeSet::wave(SpatialBasis::Periodic, 4, 4, 1).unwrap();
        let err = OperatorSymbol::dalembertian(&g, &modes, DEFAULT_SIGMA_MIN).unwrap_err();
        let Error::Nonresonance { suggestion, .. } = err else {
            panic!("wrong error {err:?}");
        };
        let g2 = Geometry::wave(2.0 * PI, suggestion, SpatialBasis::Periodic).unwrap();
        assert!(OperatorSymbol::dalembertian(&g2, &modes, DEFAULT_SIGMA_MIN).is_ok());
    }

    #[test]
    fn laplacian_is_positive_and_increasing() {
        let g = Geometry::interval(1.3).unwrap();
        let modes = ModeSet::string(40, 1).unwrap();
        let sym = OperatorSymbol::laplacian(&g, &modes).unwrap();
        assert!(sym.values()[0] > 0.0);
        assert!(sym.values().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn cutoff_examples() {
        let g = Geometry::interval(PI).unwrap();
        let modes = ModeSet::string(64, 1).unwrap();
        let sym = OperatorSymbol::laplacian(&g, &modes).unwrap();
        assert_eq!(select_cutoff(3.0, &sym, 1.0).unwrap(), 1);
        assert_eq!(select_cutoff(3.0, &sym, 0.5).unwrap(), 2);

        // Oracle: scan k until 100 L^2 / (pi^2 (R+1)^2) <= 0.9 with L = 1.
        let g1 = Geometry::interval(1.0).unwrap();
        let sym1 = OperatorSymbol::laplacian(&g1, &modes).unwrap();
        let expected = (1..)
            .find(|&r: &usize| 100.0 / (PI * PI * ((r + 1) as f64).powi(2)) <= 0.9)
            .unwrap();
        assert_eq!(select_cutoff(100.0, &sym1, 0.9).unwrap(), expected);
        assert_eq!(expected, 3);
    }

    #[test]
    fn cutoff_capacity_error() {
        let g = Geometry::interval(1.0).unwrap();
        let modes = ModeSet::string(3, 1).unwrap();
        let sym = OperatorSymbol::laplacian(&g, &modes).unwrap();
        assert!(matches!(select_cutoff(1e6, &sym, 0.5), Err(Error::Capacity(_))));
    }
}
