//! Empirical Hölder modulus of a space-time field from dyadic structure
//! functions.

use crate::error::{Error, Result};
use crate::solver::State;

pub const MIN_SNAPSHOTS: usize = 16;
pub const MIN_CELLS: usize = 64;

/// Number of dyadic scales used in the log-log fit.
const FIT_SCALES: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct HoelderFit {
    /// Spatial exponent, clamped to `(0, 1]`.
    pub beta_hat: f64,
    pub mu_hat: f64,
    /// Coefficient of determination of the spatial log-log fit.
    pub r_squared: f64,
    /// `(h, S(h))` for `h = 2^j dx`.
    pub spatial: Vec<(f64, f64)>,
    /// `(tau, S_t(tau))` for lags `tau = 2^j` snapshot spacings.
    pub temporal: Vec<(f64, f64)>,
    /// Prefactor of the temporal fit `S_t(tau) ~ c tau^{beta_hat / 2}`.
    pub temporal_prefactor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HoelderOutcome {
    Fitted(HoelderFit),
    /// All spatial increments vanish; the exponent is undefined.
    FieldConstant,
}

/// Least-squares slope, intercept and R^2 of `y` against `x`.
fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, my - slope * mx, r2)
}

/// Indices of the `FIT_SCALES` central entries of a table of length `len`.
fn middle(len: usize) -> std::ops::Range<usize> {
    let k = FIT_SCALES.min(len);
    let start = (len - k) / 2;
    start..start + k
}

/// Fits the field `samples[t][x]` on a grid of spacing `dx` with snapshots
/// `dt` apart.
///
/// `S(h) = max |v(x + h, t) - v(x, t)|` over dyadic `h`; the exponent is the
/// log-log slope over the central scales. The temporal table is fitted with
/// the exponent `beta_hat / 2` held fixed. `mu_hat` is the largest ratio
/// `|dv| / (h^beta + tau^{beta/2})` over every tabulated increment.
pub fn hoelder_fit(samples: &[Vec<f64>], dx: f64, dt: f64) -> Result<HoelderOutcome> {
    if samples.len() < MIN_SNAPSHOTS {
        return Err(Error::InsufficientSamples { needed: MIN_SNAPSHOTS, got: samples.len() });
    }
    let n = samples[0].len();
    if n < MIN_CELLS {
        return Err(Error::InsufficientSamples { needed: MIN_CELLS, got: n });
    }
    if samples.iter().any(|row| row.len() != n) {
        return Err(Error::LengthMismatch { expected: n, got: samples.iter().map(Vec::len).find(|&l| l != n).unwrap_or(n) });
    }

    let mut spatial = Vec::new();
    let mut shift = 1;
    while 2 * shift <= n {
        let s = samples
            .iter()
            .flat_map(|row| row.windows(shift + 1).map(|w| (w[shift] - w[0]).abs()))
            .fold(0.0, f64::max);
        spatial.push((shift as f64 * dx, s));
        shift *= 2;
    }
    let mut temporal = Vec::new();
    let mut lag = 1;
    while 2 * lag <= samples.len() {
        let s = samples
            .windows(lag + 1)
            .flat_map(|w| w[0].iter().zip(&w[lag]).map(|(a, b)| (b - a).abs()))
            .fold(0.0, f64::max);
        temporal.push((lag as f64 * dt, s));
        lag *= 2;
    }

    if spatial.iter().all(|p| p.1 == 0.0) {
        return Ok(HoelderOutcome::FieldConstant);
    }

    let window: Vec<(f64, f64)> = spatial[middle(spatial.len())]
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    let (slope, r_squared) = if window.len() >= 2 {
        let (s, _, r2) = linear_fit(&window);
        (s, r2)
    } else {
        (1.0, 0.0)
    };
    let beta_hat = slope.clamp(1e-6, 1.0);

    let temporal_logs: Vec<f64> = temporal
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|p| p.1.ln() - 0.5 * beta_hat * p.0.ln())
        .collect();
    let temporal_prefactor = if temporal_logs.is_empty() {
        0.0
    } else {
        (temporal_logs.iter().sum::<f64>() / temporal_logs.len() as f64).exp()
    };

    let mu_space = spatial.iter().map(|p| p.1 / p.0.powf(beta_hat)).fold(0.0, f64::max);
    let mu_time = temporal.iter().map(|p| p.1 / p.0.powf(0.5 * beta_hat)).fold(0.0, f64::max);

    Ok(HoelderOutcome::Fitted(HoelderFit {
        beta_hat,
        mu_hat: mu_space.max(mu_time),
        r_squared,
        spatial,
        temporal,
        temporal_prefactor,
    }))
}

/// [`hoelder_fit`] applied to the velocity of recorded states.
pub fn hoelder_fit_states(states: &[State]) -> Result<HoelderOutcome> {
    if states.len() < 2 {
        return Err(Error::InsufficientSamples { needed: MIN_SNAPSHOTS, got: states.len() });
    }
    let samples: Vec<Vec<f64>> = states.iter().map(|s| s.v.values().to_vec()).collect();
    let dx = states[0].grid().dx();
    let dt = states[1].t - states[0].t;
    hoelder_fit(&samples, dx, dt)
}
