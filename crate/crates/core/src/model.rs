//! Model coefficients, their admissibility hypotheses, the piezoelectric
//! parameter mapping and initial data.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid1D};
use crate::solver::State;

/// Upper end (exclusive) of the admissible growth exponent range.
pub const ALPHA_MAX: f64 = 5.0 / 6.0;

type ScalarClosure = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type SpaceTimeClosure = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A function of the temperature variable `zeta >= 0` (used for gamma and f).
#[derive(Clone)]
pub enum ThetaFn {
    Constant(f64),
    /// `limit - drop / (1 + zeta)`.
    SaturatingGamma { limit: f64, drop: f64 },
    /// `coef * ((1 + zeta)^exponent - 1)`.
    PowerF { coef: f64, exponent: f64 },
    Tabulated(MonotoneCubic),
    Custom(ScalarClosure),
}

impl fmt::Debug for ThetaFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "constant({c})"),
            Self::SaturatingGamma { limit, drop } => {
                write!(f, "saturating_gamma(limit={limit}, drop={drop})")
            }
            Self::PowerF { coef, exponent } => write!(f, "power_f(coef={coef}, exponent={exponent})"),
            Self::Tabulated(t) => write!(f, "table({} nodes)", t.xs.len()),
            Self::Custom(_) => write!(f, "custom"),
        }
    }
}

impl ThetaFn {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom(Arc::new(f))
    }

    pub fn eval(&self, z: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::SaturatingGamma { limit, drop } => limit - drop / (1.0 + z),
            Self::PowerF { coef, exponent } => coef * ((1.0 + z).powf(*exponent) - 1.0),
            Self::Tabulated(t) => t.eval(z),
            Self::Custom(f) => f(z),
        }
    }

    pub fn deriv(&self, z: f64) -> f64 {
        match self {
            Self::Constant(_) => 0.0,
            Self::SaturatingGamma { drop, .. } => drop / ((1.0 + z) * (1.0 + z)),
            Self::PowerF { coef, exponent } => coef * exponent * (1.0 + z).powf(exponent - 1.0),
            Self::Tabulated(t) => t.deriv(z),
            Self::Custom(f) => {
                let h = 1e-6 * (1.0 + z.abs());
                (f(z + h) - f(z - h)) / (2.0 * h)
            }
        }
    }
}

/// The stiffness field `a(x, t)`.
#[derive(Clone)]
pub enum SpaceTimeFn {
    Constant(f64),
    /// `base + amp * sin(modes * pi * x) * exp(-decay * t)`.
    Sinusoidal { base: f64, amp: f64, modes: f64, decay: f64 },
    Custom(SpaceTimeClosure),
}

impl fmt::Debug for SpaceTimeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "constant({c})"),
            Self::Sinusoidal { base, amp, modes, decay } => write!(
                f,
                "sinusoidal_a(base={base}, amp={amp}, modes={modes}, decay={decay})"
            ),
            Self::Custom(_) => write!(f, "custom"),
        }
    }
}

impl SpaceTimeFn {
    pub fn custom(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom(Arc::new(f))
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Sinusoidal { base, amp, modes, decay } => {
                base + amp * (modes * std::f64::consts::PI * x).sin() * (-decay * t).exp()
            }
            Self::Custom(f) => f(x, t),
        }
    }

    pub fn dx(&self, x: f64, t: f64) -> f64 {
        match self {
            Self::Constant(_) => 0.0,
            Self::Sinusoidal { amp, modes, decay, .. } => {
                let k = modes * std::f64::consts::PI;
                amp * k * (k * x).cos() * (-decay * t).exp()
            }
            Self::Custom(f) => {
                let h = 1e-6 * (1.0 + x.abs());
                (f(x + h, t) - f(x - h, t)) / (2.0 * h)
            }
        }
    }

    pub fn dt(&self, x: f64, t: f64) -> f64 {
        match self {
            Self::Constant(_) => 0.0,
            Self::Sinusoidal { amp, modes, decay, .. } => {
                -decay * amp * (modes * std::f64::consts::PI * x).sin() * (-decay * t).exp()
            }
            Self::Custom(f) => {
                let h = 1e-6 * (1.0 + t.abs());
                (f(x, t + h) - f(x, t - h)) / (2.0 * h)
            }
        }
    }

    pub fn is_time_independent(&self) -> bool {
        match self {
            Self::Constant(_) => true,
            Self::Sinusoidal { amp, decay, .. } => *amp == 0.0 || *decay == 0.0,
            Self::Custom(_) => false,
        }
    }
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
/// Outside the table the end values are held constant.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidConfiguration(
                "a table needs at least two (zeta, value) pairs".into(),
            ));
        }
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfiguration("table entries must be finite".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfiguration(
                "table abscissae must be strictly increasing".into(),
            ));
        }
        let n = xs.len();
        let secants: Vec<f64> = (0..n - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            slopes[i] = if secants[i - 1] * secants[i] <= 0.0 {
                0.0
            } else {
                0.5 * (secants[i - 1] + secants[i])
            };
        }
        for i in 0..n - 1 {
            if secants[i] == 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
                continue;
            }
            let a = slopes[i] / secants[i];
            let b = slopes[i + 1] / secants[i];
            let s = a * a + b * b;
            if s > 9.0 {
                let tau = 3.0 / s.sqrt();
                slopes[i] = tau * a * secants[i];
                slopes[i + 1] = tau * b * secants[i];
            }
        }
        Ok(Self { xs, ys, slopes })
    }

    fn interval(&self, x: f64) -> Option<usize> {
        let n = self.xs.len();
        if x <= self.xs[0] || x >= self.xs[n - 1] {
            return None;
        }
        Some(self.xs.partition_point(|&v| v <= x) - 1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        match self.interval(x) {
            None if x <= self.xs[0] => self.ys[0],
            None => self.ys[n - 1],
            Some(i) => {
                let h = self.xs[i + 1] - self.xs[i];
                let s = (x - self.xs[i]) / h;
                let s2 = s * s;
                let s3 = s2 * s;
                (2.0 * s3 - 3.0 * s2 + 1.0) * self.ys[i]
                    + (s3 - 2.0 * s2 + s) * h * self.slopes[i]
                    + (-2.0 * s3 + 3.0 * s2) * self.ys[i + 1]
                    + (s3 - s2) * h * self.slopes[i + 1]
            }
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match self.interval(x) {
            None => 0.0,
            Some(i) => {
                let h = self.xs[i + 1] - self.xs[i];
                let s = (x - self.xs[i]) / h;
                let s2 = s * s;
                (6.0 * s2 - 6.0 * s) * self.ys[i] / h
                    + (3.0 * s2 - 4.0 * s + 1.0) * self.slopes[i]
                    + (-6.0 * s2 + 6.0 * s) * self.ys[i + 1] / h
                    + (3.0 * s2 - 2.0 * s) * self.slopes[i + 1]
            }
        }
    }
}

/// Model functions plus the constants of the admissibility hypotheses.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    pub gamma: ThetaFn,
    pub a: SpaceTimeFn,
    pub f: ThetaFn,
    /// Lower viscosity bound `c_gamma`.
    pub gamma_lower: f64,
    /// Upper viscosity bound `C_gamma`.
    pub gamma_upper: f64,
    /// Coupling-growth constant `C_f`.
    pub f_bound: f64,
    pub alpha: f64,
    pub diffusivity: f64,
    /// Set when the coefficients are known to violate a hypothesis of the
    /// global existence result. Such sets are still runnable.
    pub outside_theorem: bool,
}

impl CoefficientSet {
    /// Viscous heating `gamma(theta) * v_x^2`.
    pub fn dissipation(&self, theta: f64, vx: f64) -> f64 {
        self.gamma.eval(theta) * vx * vx
    }

    /// Re-evaluates the hypotheses on the default lattice and sets
    /// `outside_theorem` accordingly. Returns the report.
    pub fn flag_from_validation(&mut self, lattice: &Lattice) -> Result<ValidationReport> {
        let report = validate_coefficients(self, lattice)?;
        self.outside_theorem = self.outside_theorem || !report.passed();
        Ok(report)
    }
}

/// Sample points for [`validate_coefficients`].
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub zetas: Vec<f64>,
    pub x_left: f64,
    pub x_right: f64,
    pub t_max: f64,
    /// Points per axis of the space-time lattice used for `a`.
    pub space_time_points: usize,
}

impl Lattice {
    pub fn uniform(zeta_max: f64, points: usize) -> Self {
        let zetas = (0..points)
            .map(|i| zeta_max * i as f64 / (points - 1) as f64)
            .collect();
        Self {
            zetas,
            x_left: 0.0,
            x_right: 1.0,
            t_max: 10.0,
            space_time_points: 33,
        }
    }

    pub fn with_domain(mut self, x_left: f64, x_right: f64, t_max: f64) -> Self {
        self.x_left = x_left;
        self.x_right = x_right;
        self.t_max = t_max;
        self
    }

    pub fn zeta_max(&self) -> f64 {
        self.zetas.iter().copied().fold(0.0, f64::max)
    }
}

impl Default for Lattice {
    fn default() -> Self {
        Self::uniform(100.0, 201)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// `0 < c_gamma < 1 < C_gamma`, `C_f > 1`.
    ConstantOrder,
    /// `c_gamma < gamma(zeta) < C_gamma`.
    GammaBounds,
    /// `gamma'' <= 0`.
    GammaConcave,
    /// `f(0) = 0`.
    FZero,
    /// `|f'| <= C_f`.
    FSlope,
    /// `|f(zeta)| <= C_f (1 + zeta)^alpha`.
    FGrowth,
    /// `0 < alpha < 5/6`.
    AlphaRange,
    /// `a > 0` with finite first and second differences.
    StiffnessPositive,
    /// `D > 0`.
    Diffusivity,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 9] = [
        Hypothesis::ConstantOrder,
        Hypothesis::GammaBounds,
        Hypothesis::GammaConcave,
        Hypothesis::FZero,
        Hypothesis::FSlope,
        Hypothesis::FGrowth,
        Hypothesis::AlphaRange,
        Hypothesis::StiffnessPositive,
        Hypothesis::Diffusivity,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Self::ConstantOrder => "constant-order",
            Self::GammaBounds => "gamma-bounds",
            Self::GammaConcave => "gamma-concave",
            Self::FZero => "f-zero",
            Self::FSlope => "f-slope",
            Self::FGrowth => "f-growth",
            Self::AlphaRange => "alpha-range",
            Self::StiffnessPositive => "stiffness-positive",
            Self::Diffusivity => "diffusivity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleLocation {
    Constants,
    Zeta(f64),
    SpaceTime { x: f64, t: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub hypothesis: Hypothesis,
    pub passed: bool,
    /// Largest violation amount (positive means violated) and where it occurred.
    pub worst: Option<(SampleLocation, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<HypothesisCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, h: Hypothesis) -> &HypothesisCheck {
        self.checks
            .iter()
            .find(|c| c.hypothesis == h)
            .expect("every hypothesis is checked")
    }

    pub fn failed(&self) -> impl Iterator<Item = Hypothesis> + '_ {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.hypothesis)
    }
}

/// Tracks the worst sample of one hypothesis.
struct Worst {
    hypothesis: Hypothesis,
    worst: Option<(SampleLocation, f64)>,
}

impl Worst {
    fn new(hypothesis: Hypothesis) -> Self {
        Self { hypothesis, worst: None }
    }

    /// `excess > 0` is a violation.
    fn record(&mut self, at: SampleLocation, excess: f64) {
        if self.worst.is_none_or(|(_, w)| excess > w) {
            self.worst = Some((at, excess));
        }
    }

    fn finish(self) -> HypothesisCheck {
        HypothesisCheck {
            hypothesis: self.hypothesis,
            passed: self.worst.is_none_or(|(_, w)| w <= 0.0),
            worst: self.worst,
        }
    }
}

fn finite_at(v: f64, zeta: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::CoefficientEvaluation { zeta })
    }
}

/// Checks the hypotheses by sampling. Derivatives use central differences
/// with step `1e-4 (1 + zeta)`; near `zeta = 0` the stencil is shifted right so
/// that no negative temperature is evaluated.
pub fn validate_coefficients(coeffs: &CoefficientSet, lattice: &Lattice) -> Result<ValidationReport> {
    if lattice.zetas.len() < 100 || lattice.zeta_max() < 100.0 {
        return Err(Error::InvalidConfiguration(format!(
            "validation lattice needs >= 100 points up to zeta >= 100 (got {} points up to {})",
            lattice.zetas.len(),
            lattice.zeta_max()
        )));
    }
    let c = coeffs;
    let mut constants = Worst::new(Hypothesis::ConstantOrder);
    let order_excess = [
        -c.gamma_lower,
        c.gamma_lower - 1.0,
        1.0 - c.gamma_upper,
        1.0 - c.f_bound,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    // strict inequalities: equality counts as violation
    constants.record(
        SampleLocation::Constants,
        if order_excess >= 0.0 { order_excess.max(f64::MIN_POSITIVE) } else { order_excess },
    );

    let mut alpha = Worst::new(Hypothesis::AlphaRange);
    let alpha_excess = (-c.alpha).max(c.alpha - ALPHA_MAX);
    alpha.record(
        SampleLocation::Constants,
        if alpha_excess >= 0.0 { alpha_excess.max(f64::MIN_POSITIVE) } else { alpha_excess },
    );

    let mut diff = Worst::new(Hypothesis::Diffusivity);
    diff.record(
        SampleLocation::Constants,
        if c.diffusivity > 0.0 { -c.diffusivity } else { f64::MIN_POSITIVE - c.diffusivity },
    );

    let mut bounds = Worst::new(Hypothesis::GammaBounds);
    let mut concave = Worst::new(Hypothesis::GammaConcave);
    let mut f_slope = Worst::new(Hypothesis::FSlope);
    let mut f_growth = Worst::new(Hypothesis::FGrowth);
    let mut f_zero = Worst::new(Hypothesis::FZero);

    let f0 = finite_at(c.f.eval(0.0), 0.0)?;
    f_zero.record(SampleLocation::Zeta(0.0), f0.abs() - 1e-12 * c.f_bound.abs().max(1.0));

    for &z in &lattice.zetas {
        let at = SampleLocation::Zeta(z);
        let h = 1e-4 * (1.0 + z);
        let zc = z.max(h);
        let gamma = |w: f64| finite_at(c.gamma.eval(w), w);
        let f = |w: f64| finite_at(c.f.eval(w), w);
        let g = gamma(z)?;
        let (gm, g0, gp) = (gamma(zc - h)?, gamma(zc)?, gamma(zc + h)?);
        let strict = |e: f64| if e >= 0.0 { e.max(f64::MIN_POSITIVE) } else { e };
        bounds.record(at, strict((c.gamma_lower - g).max(g - c.gamma_upper)));
        let g2 = (gp - 2.0 * g0 + gm) / (h * h);
        let roundoff = 64.0 * f64::EPSILON * (gm.abs() + g0.abs() + gp.abs()) / (h * h);
        concave.record(at, g2 - roundoff);

        let fv = f(z)?;
        let (fm, fp) = (f(zc - h)?, f(zc + h)?);
        let f1 = (fp - fm) / (2.0 * h);
        let slope_tol = 1e-9 * c.f_bound.abs().max(1.0) + 8.0 * f64::EPSILON * (fp.abs() + fm.abs()) / h;
        f_slope.record(at, f1.abs() - c.f_bound - slope_tol);
        let cap = c.f_bound * (1.0 + z).powf(c.alpha);
        f_growth.record(at, fv.abs() - cap * (1.0 + 1e-12));
    }

    let mut stiff = Worst::new(Hypothesis::StiffnessPositive);
    let m = lattice.space_time_points.max(2);
    let lx = lattice.x_right - lattice.x_left;
    let hx = 1e-4 * lx;
    let ht = 1e-4 * (1.0 + lattice.t_max);
    for ix in 0..m {
        let x = lattice.x_left + lx * ix as f64 / (m - 1) as f64;
        // keep the stencil inside the closed domain
        let xc = x.clamp(lattice.x_left + hx, lattice.x_right - hx);
        for it in 0..m {
            let t = lattice.t_max * it as f64 / (m - 1) as f64;
            let tc = t.max(ht);
            let at = SampleLocation::SpaceTime { x, t };
            let av = c.a.eval(x, t);
            let stencil = [
                c.a.eval(xc - hx, tc),
                c.a.eval(xc, tc),
                c.a.eval(xc + hx, tc),
                c.a.eval(xc, tc - ht),
                c.a.eval(xc, tc + ht),
            ];
            if !av.is_finite() || stencil.iter().any(|v| !v.is_finite()) {
                return Err(Error::CoefficientEvaluationAt { x, t });
            }
            let axx = (stencil[2] - 2.0 * stencil[1] + stencil[0]) / (hx * hx);
            let att = (stencil[4] - 2.0 * stencil[1] + stencil[3]) / (ht * ht);
            let excess = if !(axx.is_finite() && att.is_finite()) {
                f64::INFINITY
            } else if av > 0.0 {
                -av
            } else {
                f64::MIN_POSITIVE - av
            };
            stiff.record(at, excess);
        }
    }

    Ok(ValidationReport {
        checks: vec![
            constants.finish(),
            bounds.finish(),
            concave.finish(),
            f_zero.finish(),
            f_slope.finish(),
            f_growth.finish(),
            alpha.finish(),
            stiff.finish(),
            diff.finish(),
        ],
    })
}

/// Scalar piezoelectric material parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiezoParams {
    pub rho: f64,
    /// Viscosity.
    pub d: f64,
    pub c_elastic: f64,
    /// Thermal dilation.
    pub b: f64,
    /// Piezoelectric coupling.
    pub e: f64,
    /// Permittivity.
    pub eps: f64,
}

/// Maps material parameters to model coefficients: `gamma = d / rho`,
/// `a = C / rho + e^2 / (eps rho)`, `f(zeta) = zeta C B / rho`.
///
/// The linear coupling has growth exponent 1, so the result is always flagged
/// as outside the global existence result.
pub fn piezo_to_coefficients(p: &PiezoParams, diffusivity: f64) -> Result<CoefficientSet> {
    let strictly = [("rho", p.rho), ("d", p.d), ("C", p.c_elastic), ("eps", p.eps), ("D", diffusivity)];
    for (name, value) in strictly {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidPhysicalParameter { name, value });
        }
    }
    for (name, value) in [("B", p.b), ("e", p.e)] {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::InvalidPhysicalParameter { name, value });
        }
    }
    let gamma = p.d / p.rho;
    let a = p.c_elastic / p.rho + p.e * p.e / (p.eps * p.rho);
    let coupling = p.c_elastic * p.b / p.rho;
    Ok(CoefficientSet {
        gamma: ThetaFn::Constant(gamma),
        a: SpaceTimeFn::Constant(a),
        f: ThetaFn::PowerF { coef: coupling, exponent: 1.0 },
        gamma_lower: gamma - 1e-6,
        gamma_upper: gamma + 1e-6,
        f_bound: coupling + 1.0,
        alpha: 1.0,
        diffusivity,
        outside_theorem: true,
    })
}

/// A function of `x` used for initial data.
#[derive(Clone)]
pub enum Profile {
    Constant(f64),
    /// `offset + amp * cos(modes * pi * x)`.
    Cosine { offset: f64, amp: f64, modes: f64 },
    /// `offset + amp * cos^2(modes * pi * x)`.
    CosineSquared { offset: f64, amp: f64, modes: f64 },
    /// `intercept + slope * x`.
    Linear { intercept: f64, slope: f64 },
    Custom(ScalarClosure),
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "constant({c})"),
            Self::Cosine { offset, amp, modes } => {
                write!(f, "cosine(offset={offset}, amp={amp}, modes={modes})")
            }
            Self::CosineSquared { offset, amp, modes } => {
                write!(f, "cos_squared(offset={offset}, amp={amp}, modes={modes})")
            }
            Self::Linear { intercept, slope } => write!(f, "linear(intercept={intercept}, slope={slope})"),
            Self::Custom(_) => write!(f, "custom"),
        }
    }
}

impl Profile {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom(Arc::new(f))
    }

    pub fn eval(&self, x: f64) -> f64 {
        use std::f64::consts::PI;
        match self {
            Self::Constant(c) => *c,
            Self::Cosine { offset, amp, modes } => offset + amp * (modes * PI * x).cos(),
            Self::CosineSquared { offset, amp, modes } => {
                let c = (modes * PI * x).cos();
                offset + amp * c * c
            }
            Self::Linear { intercept, slope } => intercept + slope * x,
            Self::Custom(f) => f(x),
        }
    }
}

#[derive(Debug, Clone)]
pub struct InitialData {
    pub u0: Profile,
    pub u0t: Profile,
    pub theta0: Profile,
}

/// One-sided second-order estimates of `phi_x` at the two boundary points,
/// from the three cells nearest each end.
pub fn boundary_derivatives(phi: &Field) -> (f64, f64) {
    let v = phi.values();
    let n = v.len();
    let dx = phi.grid().dx();
    let left = (-2.0 * v[0] + 3.0 * v[1] - v[2]) / dx;
    let right = (2.0 * v[n - 1] - 3.0 * v[n - 2] + v[n - 3]) / dx;
    (left, right)
}

/// Samples the initial data at cell centres and checks compatibility:
/// nonnegative temperature and vanishing boundary derivatives (tolerance
/// `10 dx^2`).
pub fn build_initial_data(init: &InitialData, grid: &Grid1D) -> Result<State> {
    let u = Field::from_fn(*grid, |x| init.u0.eval(x));
    let v = Field::from_fn(*grid, |x| init.u0t.eval(x));
    let theta = Field::from_fn(*grid, |x| init.theta0.eval(x));

    for (x, &th) in grid.centers().zip(theta.values()) {
        if !th.is_finite() {
            return Err(Error::InvalidConfiguration(format!("theta0 not finite at x = {x}")));
        }
        if th < 0.0 {
            return Err(Error::InitialTemperatureNegative { x, value: th });
        }
    }
    let tol = 10.0 * grid.dx() * grid.dx();
    for (name, field) in [("u0", &u), ("u0t", &v), ("theta0", &theta)] {
        if !field.is_finite() {
            return Err(Error::InvalidConfiguration(format!("{name} not finite on the grid")));
        }
        let (l, r) = boundary_derivatives(field);
        for (x, d) in [(grid.x_left(), l), (grid.x_right(), r)] {
            if d.abs() > tol {
                return Err(Error::IncompatibleInitialData { field: name, x, derivative: d });
            }
        }
    }
    Ok(State::new(0.0, u, v, theta))
}
