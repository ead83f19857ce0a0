use serde::{Deserialize, Serialize};

use super::nonlinearity::Nonlinearity;
use crate::error::{Error, Result};
use crate::spectral::{
    select_cutoff, Geometry, ModeSet, OperatorSymbol, Resolution, SpaceTimeField, Transform, DEFAULT_SIGMA_MIN,
};

/// Which of the two reductions a problem uses.
///
/// Static problems work with `v = -u''` and iterate `v = F(g(v))`; wave
/// problems work with `u` itself and iterate `u = g(F(u))`, where `g` is the
/// inverse of the linear operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    Static,
    Wave,
}

impl ProblemKind {
    pub fn composition(self) -> &'static str {
        match self {
            ProblemKind::Static => "F(g(v))",
            ProblemKind::Wave => "g(F(u))",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Exit threshold on the L2 step of the tail iteration.
    pub fixed_point: f64,
    /// Exit threshold on the L2 norm of the bifurcation residual.
    pub solver: f64,
    pub max_tail_iterations: usize,
    pub max_newton_iterations: usize,
    /// Core coefficient vectors above this Euclidean norm are rejected.
    pub max_core_norm: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            fixed_point: 1e-12,
            solver: 1e-10,
            max_tail_iterations: 200,
            max_newton_iterations: 60,
            max_core_norm: 1e6,
        }
    }
}

/// Discretisation choices for [`ReductionProblem::auto`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Discretisation {
    /// Highest retained spatial index; static problems default to `max(8R, 16)`.
    pub k_max: Option<usize>,
    /// Number of time modes (wave only).
    pub j_max: usize,
    /// Pinned cutoff; otherwise the smallest `R` meeting `margin`.
    pub cutoff: Option<usize>,
    pub margin: f64,
    /// Grid intervals per retained mode along each axis.
    pub oversampling: usize,
    pub sigma_min: f64,
}

impl Default for Discretisation {
    fn default() -> Self {
        Self {
            k_max: None,
            j_max: 16,
            cutoff: None,
            margin: 0.5,
            oversampling: 4,
            sigma_min: DEFAULT_SIGMA_MIN,
        }
    }
}

/// Wave problems without an explicit `k_max` use this many spatial modes.
pub const DEFAULT_WAVE_K_MAX: usize = 16;
/// Provisional mode count used to pick `R` before `k_max` is known.
const PROVISIONAL_K: usize = 4096;

/// A static or wave problem together with its cached symbol and grid.
#[derive(Clone, Debug)]
pub struct ReductionProblem {
    geometry: Geometry,
    modes: ModeSet,
    nonlinearity: Nonlinearity,
    kind: ProblemKind,
    symbol: OperatorSymbol,
    transform: Transform,
    tolerances: Tolerances,
    contraction_ratio: f64,
    initial_guess: Option<SpaceTimeField>,
}

impl ReductionProblem {
    /// Problem on explicit modes with 4x oversampling.
    pub fn new(geometry: &Geometry, modes: &ModeSet, nonlinearity: Nonlinearity) -> Result<Self> {
        Self::with_grid(geometry, modes, nonlinearity, 4, DEFAULT_SIGMA_MIN)
    }

    pub fn with_grid(
        geometry: &Geometry,
        modes: &ModeSet,
        nonlinearity: Nonlinearity,
        oversampling: usize,
        sigma_min: f64,
    ) -> Result<Self> {
        let kind = if geometry.is_wave() { ProblemKind::Wave } else { ProblemKind::Static };
        let symbol = OperatorSymbol::for_geometry(geometry, modes, sigma_min)?;
        let transform = Transform::new(geometry, modes, Resolution::with_factor(modes, oversampling))?;
        let c = nonlinearity.lipschitz();
        let contraction_ratio = match symbol.smallest_tail_magnitude(modes.cutoff()) {
            Some(s) => c / s,
            None => 0.0,
        };
        if contraction_ratio >= 1.0 {
            return Err(Error::Capacity(format!(
                "tail map is not a contraction: C / |tail symbol| = {contraction_ratio:.4} at R = {}",
                modes.cutoff()
            )));
        }
        Ok(Self {
            geometry: *geometry,
            modes: *modes,
            nonlinearity,
            kind,
            symbol,
            transform,
            tolerances: Tolerances::default(),
            contraction_ratio,
            initial_guess: None,
        })
    }

    /// Choose `R` (and the static `k_max`) from the Lipschitz constant.
    pub fn auto(geometry: &Geometry, nonlinearity: Nonlinearity, disc: &Discretisation) -> Result<Self> {
        let c = nonlinearity.lipschitz();
        let modes = if geometry.is_wave() {
            let k_max = disc.k_max.unwrap_or(DEFAULT_WAVE_K_MAX);
            let lowest = geometry.spatial().lowest_index();
            let probe = ModeSet::wave(geometry.spatial(), k_max, disc.j_max, lowest)?;
            let cutoff = match disc.cutoff {
                Some(r) => r,
                None => select_cutoff(c, &OperatorSymbol::for_geometry(geometry, &probe, disc.sigma_min)?, disc.margin)?,
            };
            probe.with_cutoff(cutoff)?
        } else {
            let cutoff = match disc.cutoff {
                Some(r) => r,
                None => {
                    let probe = ModeSet::string(disc.k_max.unwrap_or(PROVISIONAL_K), 1)?;
                    select_cutoff(c, &OperatorSymbol::laplacian(geometry, &probe)?, disc.margin)?
                }
            };
            let k_max = disc.k_max.unwrap_or((8 * cutoff).max(16));
            ModeSet::string(k_max, cutoff)?
        };
        Self::with_grid(geometry, &modes, nonlinearity, disc.oversampling, disc.sigma_min)
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    /// Starting core point for the bifurcation solve (tail entries ignored).
    pub fn with_initial_guess(mut self, guess: SpaceTimeField) -> Result<Self> {
        if guess.modes() != &self.modes || guess.geometry() != &self.geometry {
            return Err(Error::Dimension("initial guess lives on different modes".into()));
        }
        self.initial_guess = Some(guess.core());
        Ok(self)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nonlinearity
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn symbol(&self) -> &OperatorSymbol {
        &self.symbol
    }

    pub fn transform(&self) -> &Transform {
        &self.transform
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    /// `C / (smallest tail |symbol|)`, the proven contraction factor.
    pub fn contraction_ratio(&self) -> f64 {
        self.contraction_ratio
    }

    pub fn initial_guess(&self) -> Option<&SpaceTimeField> {
        self.initial_guess.as_ref()
    }

    pub fn zero_field(&self) -> SpaceTimeField {
        SpaceTimeField::zeros(&self.geometry, &self.modes).expect("problem modes match geometry")
    }

    pub fn field(&self, coeffs: Vec<f64>) -> Result<SpaceTimeField> {
        SpaceTimeField::from_coeffs(&self.geometry, &self.modes, coeffs)
    }

    /// Map the iteration variable to `u`: `g(v)` for static problems, the
    /// identity for wave problems.
    pub fn to_solution(&self, x: &SpaceTimeField) -> Result<SpaceTimeField> {
        match self.kind {
            ProblemKind::Static => x.apply_inverse_operator(&self.symbol),
            ProblemKind::Wave => Ok(x.clone()),
        }
    }

    /// Inverse of [`to_solution`](Self::to_solution).
    pub fn from_solution(&self, u: &SpaceTimeField) -> Result<SpaceTimeField> {
        match self.kind {
            ProblemKind::Static => u.apply_operator(&self.symbol),
            ProblemKind::Wave => Ok(u.clone()),
        }
    }

    /// The map whose fixed points are solutions: `F(g(v))` or `g(F(u))`.
    pub fn compose(&self, x: &SpaceTimeField) -> Result<SpaceTimeField> {
        match self.kind {
            ProblemKind::Static => self.nemitski(&x.apply_inverse_operator(&self.symbol)?),
            ProblemKind::Wave => self.nemitski(x)?.apply_inverse_operator(&self.symbol),
        }
    }

    /// Projection of `f(u)` onto the retained modes using the cached grid.
    pub fn nemitski(&self, u: &SpaceTimeField) -> Result<SpaceTimeField> {
        super::nemitski::nemitski_on(&self.nonlinearity, u, &self.transform)
    }

    pub(crate) fn check_core_norm(&self, mu: &SpaceTimeField) -> Result<()> {
        let n = mu.coeff_norm();
        if !(n <= self.tolerances.max_core_norm) {
            return Err(Error::domain(format!(
                "core coefficients have norm {n:.3e}, above the limit {:.1e}",
                self.tolerances.max_core_norm
            )));
        }
        Ok(())
    }
}
