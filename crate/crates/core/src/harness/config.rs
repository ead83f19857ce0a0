use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::Integrator;
use crate::error::{Error, Result};
use crate::reduction::{Discretisation, Nonlinearity, ReductionProblem, Tolerances};
use crate::spectral::{Geometry, SpatialBasis};

/// Domain of the continuum problems. The wave stage needs `horizon`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub length: f64,
    #[serde(default)]
    pub horizon: Option<f64>,
    #[serde(default = "default_spatial")]
    pub spatial: SpatialBasis,
}

fn default_spatial() -> SpatialBasis {
    SpatialBasis::Fixed
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainConfig {
    /// Number of beads.
    pub n: usize,
    pub total_mass: f64,
    /// String length whose spectrum is matched; defaults to the geometry length.
    pub length: Option<f64>,
    /// Explicit target spectrum, replacing the string eigenvalues.
    pub spectrum: Option<Vec<f64>>,
    pub dt: f64,
    pub steps: usize,
    pub sample_every: usize,
    pub integrator: Integrator,
    /// One-based mode excited at `t = 0`.
    pub initial_mode: usize,
    pub amplitude: f64,
    /// Ignore the nonlinearity when simulating.
    pub linear: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            n: 5,
            total_mass: 1.0,
            length: None,
            spectrum: None,
            dt: 1e-3,
            steps: 100_000,
            sample_every: 100,
            integrator: Integrator::default(),
            initial_mode: 1,
            amplitude: 0.1,
            linear: true,
        }
    }
}

/// Starting core coefficients for the bifurcation solve, in the iteration
/// variable (`-u''` for static problems, `u` for wave problems), listed in
/// core-slot order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialGuess {
    pub static_core: Option<Vec<f64>>,
    pub wave_core: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    /// Chain sizes for the string against equal-mass comparison.
    pub sizes: Vec<usize>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self { sizes: vec![5, 25, 200] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Plotdata,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("finite-proxy-out"),
            formats: vec![Format::Json, Format::Csv, Format::Plotdata],
        }
    }
}

/// Everything a pipeline run reads. Parsed from one JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    #[serde(default = "Nonlinearity::zero")]
    pub nonlinearity: Nonlinearity,
    #[serde(default)]
    pub discretisation: Discretisation,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub initial_guess: InitialGuess,
    #[serde(default)]
    pub chain: ChainConfig,
    #[serde(default)]
    pub compare: CompareConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
    /// Random core points drawn for the action identity check.
    #[serde(default = "default_samples")]
    pub property_samples: usize,
    /// Accept a pinned cutoff whose contraction ratio exceeds the margin.
    #[serde(default)]
    pub force: bool,
}

fn default_samples() -> usize {
    20
}

impl RunConfig {
    /// A config with every default and the given length.
    pub fn with_length(length: f64) -> Self {
        serde_json::from_value(serde_json::json!({ "geometry": { "length": length } })).expect("minimal config parses")
    }

    pub fn static_geometry(&self) -> Result<Geometry> {
        Geometry::interval(self.geometry.length)
    }

    pub fn wave_geometry(&self) -> Result<Geometry> {
        let t = self
            .geometry
            .horizon
            .ok_or_else(|| Error::Config("geometry.horizon is required for the wave stage".into()))?;
        Geometry::wave(self.geometry.length, t, self.geometry.spatial)
    }

    pub fn chain_length(&self) -> f64 {
        self.chain.length.unwrap_or(self.geometry.length)
    }

    /// Build the static or wave problem, enforcing the margin on a pinned
    /// cutoff unless `force` is set.
    pub fn problem(&self, geometry: &Geometry) -> Result<ReductionProblem> {
        let mut p = ReductionProblem::auto(geometry, self.nonlinearity.clone(), &self.discretisation)?
            .with_tolerances(self.tolerances);
        let ratio = p.contraction_ratio();
        if self.discretisation.cutoff.is_some() && ratio > self.discretisation.margin && !self.force {
            return Err(Error::Config(format!(
                "discretisation.cutoff: pinned R = {} gives contraction ratio {ratio:.4} above the margin {} (use --force)",
                p.modes().cutoff(),
                self.discretisation.margin
            )));
        }
        let (field, guess) = if geometry.is_wave() {
            ("initial_guess.wave_core", &self.initial_guess.wave_core)
        } else {
            ("initial_guess.static_core", &self.initial_guess.static_core)
        };
        if let Some(values) = guess {
            let core = p.modes().core_indices();
            if values.len() != core.len() {
                return Err(Error::Config(format!("{field} has {} values but the core has {} slots", values.len(), core.len())));
            }
            let mut start = p.zero_field();
            for (i, v) in core.iter().zip(values) {
                start.coeffs_mut()[*i] = *v;
            }
            p = p.with_initial_guess(start)?;
        }
        Ok(p)
    }

    /// Field-level checks, then the problems the config describes.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("geometry.length", self.geometry.length)?;
        if let Some(t) = self.geometry.horizon {
            positive("geometry.horizon", t)?;
        }
        let tol = &self.tolerances;
        positive("tolerances.fixed_point", tol.fixed_point)?;
        positive("tolerances.solver", tol.solver)?;
        positive("tolerances.max_core_norm", tol.max_core_norm)?;
        if tol.max_tail_iterations == 0 || tol.max_newton_iterations == 0 {
            return Err(Error::Config("tolerances: iteration caps must be at least 1".into()));
        }
        let d = &self.discretisation;
        if !(d.margin > 0.0 && d.margin < 1.0) {
            return Err(Error::Config(format!("discretisation.margin must lie in (0, 1), got {}", d.margin)));
        }
        positive("discretisation.sigma_min", d.sigma_min)?;
        if d.oversampling < 2 {
            return Err(Error::Config("discretisation.oversampling must be at least 2".into()));
        }
        let c = &self.chain;
        if c.n == 0 {
            return Err(Error::Config("chain.n must be at least 1".into()));
        }
        positive("chain.total_mass", c.total_mass)?;
        if let Some(l) = c.length {
            positive("chain.length", l)?;
        }
        if let Some(s) = &c.spectrum {
            if s.len() != c.n {
                return Err(Error::Config(format!("chain.spectrum has {} values but chain.n = {}", s.len(), c.n)));
            }
        }
        positive("chain.dt", c.dt)?;
        if c.steps == 0 || c.sample_every == 0 {
            return Err(Error::Config("chain.steps and chain.sample_every must be at least 1".into()));
        }
        if c.initial_mode == 0 || c.initial_mode > c.n {
            return Err(Error::Config(format!("chain.initial_mode must lie in 1..={}", c.n)));
        }
        if !c.amplitude.is_finite() {
            return Err(Error::Config("chain.amplitude must be finite".into()));
        }
        if self.compare.sizes.contains(&0) {
            return Err(Error::Config("compare.sizes entries must be at least 1".into()));
        }

        self.problem(&self.static_geometry()?)?;
        if self.geometry.horizon.is_some() {
            self.problem(&self.wave_geometry()?)?;
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form, ignoring the output location.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut canonical = self.clone();
        canonical.output = OutputConfig::default();
        let bytes = serde_json::to_vec(&canonical).expect("config serialises");
        Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Parse a JSON config. Unknown keys and malformed values are reported with
/// their line and column; semantic errors name the offending field.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let config = parse_config(&text)?;
    config.validate()?;
    Ok(config)
}

/// [`load_config`] without the file read or validation.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    serde_json::from_str(text)
        .map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))
}
