use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing, nonnegative eigenvalues (squared frequencies).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("spectrum must contain at least one value"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::domain(format!("eigenvalues must be finite and nonnegative, got {v}")));
        }
        for (i, w) in values.windows(2).enumerate() {
            if w[1] == w[0] {
                return Err(Error::Degenerate(format!("eigenvalue {} repeated at positions {} and {}", w[0], i + 1, i + 2)));
            }
            if w[1] < w[0] {
                return Err(Error::domain(format!("spectrum not increasing at position {}", i + 2)));
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest relative deviation `|a - b| / |b|` against a reference.
    pub fn max_relative_error(&self, reference: &Spectrum) -> Result<f64> {
        if self.len() != reference.len() {
            return Err(Error::Dimension(format!("spectra of length {} and {}", self.len(), reference.len())));
        }
        Ok(self
            .values
            .iter()
            .zip(&reference.values)
            .map(|(a, b)| if *b == 0.0 { a.abs() } else { ((a - b) / b).abs() })
            .fold(0.0, f64::max))
    }
}

impl TryFrom<Vec<f64>> for Spectrum {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<Spectrum> for Vec<f64> {
    fn from(s: Spectrum) -> Self {
        s.values
    }
}

/// Fixed-string eigenvalues `(pi k / L)^2`, `k = 1..=n`.
pub fn string_spectrum(n: usize, length: f64) -> Result<Spectrum> {
    check_size(n, length)?;
    Spectrum::new((1..=n).map(|k| (PI * k as f64 / length).powi(2)).collect())
}

/// Eigenvalues of `n` equal beads on a string of length `L`:
/// `(4 (n+1)^2 / L^2) sin^2(pi k / (2 (n+1)))`.
pub fn equal_mass_chain_spectrum(n: usize, length: f64) -> Result<Spectrum> {
    check_size(n, length)?;
    let np1 = (n + 1) as f64;
    let scale = 4.0 * np1 * np1 / (length * length);
    Spectrum::new(
        (1..=n)
            .map(|k| scale * (PI * k as f64 / (2.0 * np1)).sin().powi(2))
            .collect(),
    )
}

fn check_size(n: usize, length: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("need at least one eigenvalue"));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::domain(format!("length must be positive, got {length}")));
    }
    Ok(())
}
