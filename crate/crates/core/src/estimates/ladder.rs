//! Time-integrated and pointwise-in-time temperature and velocity bounds.
//!
//! Time integrals are left Riemann sums over the recorded states, so with
//! uniform spacing every sample carries weight `dt * stride`.

use crate::error::{Error, Result};
use crate::grid::{gradient, integrate, lp_norm};
use crate::solver::{State, Trajectory};

use super::{relative_drift, NOISE_FLOOR};

/// A running time integral with the saturation heuristic: the increment over
/// the last quarter of the samples may exceed the first-quarter increment by
/// at most a factor 10.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningIntegral {
    /// `(t, integral up to t)`.
    pub running: Vec<(f64, f64)>,
    pub value: f64,
    pub first_quarter: f64,
    pub last_quarter: f64,
}

impl RunningIntegral {
    fn from_integrand(states: &[State], integrand: impl Fn(&State) -> f64) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::InsufficientSamples { needed: 2, got: states.len() });
        }
        let mut running = Vec::with_capacity(states.len());
        let mut acc = 0.0;
        running.push((states[0].t, 0.0));
        for w in states.windows(2) {
            acc += integrand(&w[0]) * (w[1].t - w[0].t);
            running.push((w[1].t, acc));
        }
        let m = running.len() - 1;
        let q = (m / 4).max(1);
        let first_quarter = running[q].1 - running[0].1;
        let last_quarter = running[m].1 - running[m - q].1;
        Ok(Self { running, value: acc, first_quarter, last_quarter })
    }

    pub fn finite(&self) -> bool {
        self.value.is_finite()
    }

    pub fn saturating(&self) -> bool {
        self.last_quarter <= 10.0 * self.first_quarter || self.last_quarter < NOISE_FLOOR
    }

    pub fn passed(&self) -> bool {
        self.finite() && self.saturating()
    }
}

/// `int_0^T int (theta + 1)^{p-2} theta_x^2`, for `0 < p < 1`.
pub fn weighted_theta_dissipation(states: &[State], p: f64) -> Result<RunningIntegral> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidConfiguration(format!("weight exponent p must lie in (0, 1), got {p}")));
    }
    RunningIntegral::from_integrand(states, |s| {
        let tx = gradient(&s.theta);
        integrate(&s.theta.zip_map(&tx, |z, w| (z + 1.0).max(f64::MIN_POSITIVE).powf(p - 2.0) * w * w))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LqIntegral {
    pub integral: RunningIntegral,
    /// `r < 2q / (q - 1)`.
    pub in_theorem: bool,
}

/// `int_0^T ||theta + 1||_{L^q}^r`.
pub fn theta_lq_time_integral(states: &[State], q: f64, r: f64) -> Result<LqIntegral> {
    if !(q > 1.0 && q.is_finite() && r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidConfiguration(format!("need q > 1 and r > 0, got q = {q}, r = {r}")));
    }
    let integral = RunningIntegral::from_integrand(states, |s| {
        lp_norm(&s.theta.map(|z| z + 1.0), q).powf(r)
    })?;
    Ok(LqIntegral { integral, in_theorem: r < 2.0 * q / (q - 1.0) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefinementVerdict {
    Pass,
    Fail,
    /// No companion run was supplied.
    Unverified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupVelocity {
    pub series: Vec<(f64, f64)>,
    pub max: f64,
    /// Relative change of `max` against the companion run.
    pub drift: Option<f64>,
    pub verdict: RefinementVerdict,
}

/// `||v(t)||_inf` at every record. With a companion at double resolution the
/// check passes iff the maxima differ by less than 5%.
pub fn sup_velocity_series(traj: &Trajectory, companion: Option<&Trajectory>) -> SupVelocity {
    let series: Vec<(f64, f64)> = traj.records.iter().map(|r| (r.t, r.v_sup)).collect();
    let max = series.iter().fold(0.0, |m: f64, s| m.max(s.1));
    let finite = series.iter().all(|s| s.1.is_finite());
    let drift = companion.map(|c| {
        let cm = c.records.iter().fold(0.0, |m: f64, r| m.max(r.v_sup));
        relative_drift(max, cm)
    });
    let verdict = match (finite, drift) {
        (false, _) => RefinementVerdict::Fail,
        (true, None) => RefinementVerdict::Unverified,
        (true, Some(d)) if d < 0.05 => RefinementVerdict::Pass,
        (true, Some(_)) => RefinementVerdict::Fail,
    };
    SupVelocity { series, max, drift, verdict }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaH1 {
    pub series: Vec<(f64, f64)>,
    pub max: f64,
    /// Envelope `c e^{rate t}` containing the series.
    pub c: f64,
    pub rate: f64,
    pub passed: bool,
}

/// `int theta_x^2` at every record, enclosed by a fitted exponential envelope.
/// The rate is the nonnegative least-squares slope of `log` of the series;
/// `c` is the smallest prefactor that then contains every sample.
pub fn theta_h1_series(traj: &Trajectory) -> ThetaH1 {
    let series: Vec<(f64, f64)> = traj.records.iter().map(|r| (r.t, r.theta_x_sq)).collect();
    let max = series.iter().fold(0.0, |m: f64, s| m.max(s.1));
    let positive: Vec<(f64, f64)> = series
        .iter()
        .filter(|s| s.1 > 0.0 && s.1.is_finite())
        .map(|s| (s.0, s.1.ln()))
        .collect();
    let rate = if positive.len() >= 2 {
        let n = positive.len() as f64;
        let mt = positive.iter().map(|s| s.0).sum::<f64>() / n;
        let my = positive.iter().map(|s| s.1).sum::<f64>() / n;
        let sxx: f64 = positive.iter().map(|s| (s.0 - mt).powi(2)).sum();
        let sxy: f64 = positive.iter().map(|s| (s.0 - mt) * (s.1 - my)).sum();
        if sxx > 0.0 { (sxy / sxx).max(0.0) } else { 0.0 }
    } else {
        0.0
    };
    let c = series
        .iter()
        .fold(0.0, |m: f64, s| m.max(s.1 * (-rate * s.0).exp()));
    let passed = series.iter().all(|s| s.1.is_finite()) && c.is_finite() && rate.is_finite();
    ThetaH1 { series, max, c, rate, passed }
}
