use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar nonlinearity `f` generating the Nemitski operator `u -> f(u)`.
///
/// Every variant carries a global Lipschitz constant and a primitive
/// `G(u) = integral of f from 0 to u`. The built-ins have exact constants; a
/// table spline reports the largest slope of its interpolant, flagged as an
/// estimate since the underlying data is only known at the knots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NonlinearitySpec", into = "NonlinearitySpec")]
pub struct Nonlinearity {
    kind: Kind,
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Zero,
    Constant(f64),
    ScaledSine { epsilon: f64, phase: f64 },
    SaturatingCubic { epsilon: f64, scale: f64 },
    Table(Pchip),
}

/// Serialized form of a [`Nonlinearity`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NonlinearitySpec {
    Zero,
    Constant {
        value: f64,
    },
    /// `epsilon * sin(u + phase)`.
    ScaledSine {
        epsilon: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `epsilon * u / (1 + (u/scale)^2)`.
    SaturatingCubic {
        epsilon: f64,
        #[serde(default = "unit")]
        scale: f64,
    },
    /// Monotone cubic through `(u, f)` knots, constant outside them.
    TableSpline {
        knots: Vec<[f64; 2]>,
    },
}

fn unit() -> f64 {
    1.0
}

impl TryFrom<NonlinearitySpec> for Nonlinearity {
    type Error = Error;

    fn try_from(spec: NonlinearitySpec) -> Result<Self> {
        match spec {
            NonlinearitySpec::Zero => Ok(Self::zero()),
            NonlinearitySpec::Constant { value } => Self::constant(value),
            NonlinearitySpec::ScaledSine { epsilon, phase } => Self::scaled_sine_shifted(epsilon, phase),
            NonlinearitySpec::SaturatingCubic { epsilon, scale } => Self::saturating_cubic(epsilon, scale),
            NonlinearitySpec::TableSpline { knots } => Self::table_spline(&knots),
        }
    }
}

impl From<Nonlinearity> for NonlinearitySpec {
    fn from(nl: Nonlinearity) -> Self {
        match nl.kind {
            Kind::Zero => NonlinearitySpec::Zero,
            Kind::Constant(value) => NonlinearitySpec::Constant { value },
            Kind::ScaledSine { epsilon, phase } => NonlinearitySpec::ScaledSine { epsilon, phase },
            Kind::SaturatingCubic { epsilon, scale } => NonlinearitySpec::SaturatingCubic { epsilon, scale },
            Kind::Table(p) => NonlinearitySpec::TableSpline {
                knots: p.xs.iter().zip(&p.ys).map(|(x, y)| [*x, *y]).collect(),
            },
        }
    }
}

impl Nonlinearity {
    pub fn zero() -> Self {
        Self { kind: Kind::Zero }
    }

    pub fn constant(value: f64) -> Result<Self> {
        finite("constant value", value)?;
        Ok(Self { kind: Kind::Constant(value) })
    }

    /// `epsilon * sin(u)`.
    pub fn scaled_sine(epsilon: f64) -> Result<Self> {
        Self::scaled_sine_shifted(epsilon, 0.0)
    }

    /// `epsilon * sin(u + phase)`; a nonzero phase gives `f(0) != 0` and
    /// hence nontrivial solutions in the contractive regime.
    pub fn scaled_sine_shifted(epsilon: f64, phase: f64) -> Result<Self> {
        finite("epsilon", epsilon)?;
        finite("phase", phase)?;
        Ok(Self { kind: Kind::ScaledSine { epsilon, phase } })
    }

    pub fn saturating_cubic(epsilon: f64, scale: f64) -> Result<Self> {
        finite("epsilon", epsilon)?;
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::domain(format!("saturation scale must be positive, got {scale}")));
        }
        Ok(Self { kind: Kind::SaturatingCubic { epsilon, scale } })
    }

    /// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes)
    /// through `knots`, held constant beyond the first and last knot.
    pub fn table_spline(knots: &[[f64; 2]]) -> Result<Self> {
        Ok(Self { kind: Kind::Table(Pchip::new(knots)?) })
    }

    pub fn tag(&self) -> &'static str {
        match self.kind {
            Kind::Zero => "zero",
            Kind::Constant(_) => "constant",
            Kind::ScaledSine { .. } => "scaled-sine",
            Kind::SaturatingCubic { .. } => "saturating-cubic",
            Kind::Table(_) => "table-spline",
        }
    }

    /// `f(u)`.
    pub fn eval(&self, u: f64) -> f64 {
        match &self.kind {
            Kind::Zero => 0.0,
            Kind::Constant(c) => *c,
            Kind::ScaledSine { epsilon, phase } => epsilon * (u + phase).sin(),
            Kind::SaturatingCubic { epsilon, scale } => {
                let r = u / scale;
                epsilon * u / (1.0 + r * r)
            }
            Kind::Table(p) => p.eval(u),
        }
    }

    /// `G(u)`, the primitive with `G(0) = 0`.
    pub fn primitive(&self, u: f64) -> f64 {
        match &self.kind {
            Kind::Zero => 0.0,
            Kind::Constant(c) => c * u,
            Kind::ScaledSine { epsilon, phase } => epsilon * (phase.cos() - (u + phase).cos()),
            Kind::SaturatingCubic { epsilon, scale } => {
                let r = u / scale;
                0.5 * epsilon * scale * scale * (r * r).ln_1p()
            }
            Kind::Table(p) => p.antiderivative(u) - p.antiderivative(0.0),
        }
    }

    /// Global Lipschitz constant of `f`.
    pub fn lipschitz(&self) -> f64 {
        match &self.kind {
            Kind::Zero | Kind::Constant(_) => 0.0,
            Kind::ScaledSine { epsilon, .. } => epsilon.abs(),
            // sup |d/du u/(1+u^2)| = 1, attained at u = 0
            Kind::SaturatingCubic { epsilon, .. } => epsilon.abs(),
            Kind::Table(p) => p.max_slope,
        }
    }

    /// True when [`lipschitz`](Self::lipschitz) comes from tabulated data.
    pub fn lipschitz_is_estimated(&self) -> bool {
        matches!(self.kind, Kind::Table(_))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite, got {v}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
    /// Antiderivative at each knot, measured from the first knot.
    cumulative: Vec<f64>,
    max_slope: f64,
}

impl Pchip {
    fn new(knots: &[[f64; 2]]) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::domain("table spline needs at least two knots"));
        }
        if knots.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::domain("table spline knots must be finite"));
        }
        if knots.windows(2).any(|w| w[1][0] <= w[0][0]) {
            return Err(Error::domain("table spline abscissae must be strictly increasing"));
        }
        let xs: Vec<f64> = knots.iter().map(|k| k[0]).collect();
        let ys: Vec<f64> = knots.iter().map(|k| k[1]).collect();
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();

        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes = vec![delta[0]; 2];
        } else {
            for i in 1..n - 1 {
                let (a, b) = (delta[i - 1], delta[i]);
                if a * b > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    slopes[i] = (w1 + w2) / (w1 / a + w2 / b);
                }
            }
            slopes[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            slopes[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }

        let mut cumulative = vec![0.0; n];
        for i in 0..n - 1 {
            cumulative[i + 1] = cumulative[i] + segment_integral(ys[i], ys[i + 1], slopes[i], slopes[i + 1], h[i], 1.0);
        }

        let mut p = Self {
            xs,
            ys,
            slopes,
            cumulative,
            max_slope: 0.0,
        };
        p.max_slope = p.max_abs_slope();
        Ok(p)
    }

    fn segment(&self, u: f64) -> usize {
        match self.xs.partition_point(|x| *x <= u) {
            0 => 0,
            i => (i - 1).min(self.xs.len() - 2),
        }
    }

    fn eval(&self, u: f64) -> f64 {
        let n = self.xs.len();
        if u <= self.xs[0] {
            return self.ys[0];
        }
        if u >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = self.segment(u);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (u - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        self.ys[i] * (2.0 * t3 - 3.0 * t2 + 1.0)
            + h * self.slopes[i] * (t3 - 2.0 * t2 + t)
            + self.ys[i + 1] * (3.0 * t2 - 2.0 * t3)
            + h * self.slopes[i + 1] * (t3 - t2)
    }

    fn derivative(&self, i: usize, t: f64) -> f64 {
        let h = self.xs[i + 1] - self.xs[i];
        let t2 = t * t;
        (self.ys[i] * (6.0 * t2 - 6.0 * t) + self.ys[i + 1] * (6.0 * t - 6.0 * t2)) / h
            + self.slopes[i] * (3.0 * t2 - 4.0 * t + 1.0)
            + self.slopes[i + 1] * (3.0 * t2 - 2.0 * t)
    }

    /// Largest `|p'|` over all segments. `p'` is quadratic on each segment,
    /// so checking the ends and the vertex suffices.
    fn max_abs_slope(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.xs.len() - 1 {
            let h = self.xs[i + 1] - self.xs[i];
            let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
            let jump = 6.0 * (self.ys[i + 1] - self.ys[i]) / h;
            let a = 3.0 * (d0 + d1) - jump;
            let b = jump - 4.0 * d0 - 2.0 * d1;
            m = m.max(self.derivative(i, 0.0).abs()).max(self.derivative(i, 1.0).abs());
            if a != 0.0 {
                let t = -b / (2.0 * a);
                if (0.0..=1.0).contains(&t) {
                    m = m.max(self.derivative(i, t).abs());
                }
            }
        }
        m
    }

    /// Antiderivative measured from the first knot.
    fn antiderivative(&self, u: f64) -> f64 {
        let n = self.xs.len();
        if u <= self.xs[0] {
            return self.ys[0] * (u - self.xs[0]);
        }
        if u >= self.xs[n - 1] {
            return self.cumulative[n - 1] + self.ys[n - 1] * (u - self.xs[n - 1]);
        }
        let i = self.segment(u);
        let h = self.xs[i + 1] - self.xs[i];
        let s = (u - self.xs[i]) / h;
        self.cumulative[i] + segment_integral(self.ys[i], self.ys[i + 1], self.slopes[i], self.slopes[i + 1], h, s)
    }
}

/// Three-point end slope, limited to keep the end segment monotone.
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Integral of the Hermite cubic over the first fraction `s` of a segment.
fn segment_integral(y0: f64, y1: f64, d0: f64, d1: f64, h: f64, s: f64) -> f64 {
    let (s2, s3, s4) = (s * s, s * s * s, s * s * s * s);
    h * (y0 * (0.5 * s4 - s3 + s)
        + h * d0 * (0.25 * s4 - 2.0 * s3 / 3.0 + 0.5 * s2)
        + y1 * (s3 - 0.5 * s4)
        + h * d1 * (0.25 * s4 - s3 / 3.0))
}
