//! Numerical probes of the Ehrling-type absorption inequality and of the
//! Gagliardo-Nirenberg interpolation steps.

use crate::error::{Error, Result};
use crate::grid::{gradient, integrate, lp_norm, second_difference, sup_norm, Field, Grid1D};

/// Smallest `C` with `int |phi_x|^{2p+2} <= eta int |phi_x|^{2p-2} phi_xx^2 + C ||phi||_inf^{2p+2}`
/// for this particular field.
pub fn ehrling_probe(phi: &Field, p: f64, eta: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite() && eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidConfiguration(format!("need p >= 1 and eta > 0, got p = {p}, eta = {eta}")));
    }
    let sup = sup_norm(phi);
    if sup == 0.0 {
        return Ok(0.0);
    }
    let px = gradient(phi);
    let pxx = second_difference(phi);
    let lhs = integrate(&px.map(|w| w.abs().powf(2.0 * p + 2.0)));
    let rhs = integrate(&px.zip_map(&pxx, |w, z| w.abs().powf(2.0 * p - 2.0) * z * z));
    Ok(((lhs - eta * rhs) / sup.powf(2.0 * p + 2.0)).max(0.0))
}

/// Empirical constant `||phi||_p / (||phi_x||_2^lambda ||phi||_q^{1-lambda} + ||phi||_q)`.
pub fn gn_probe(phi: &Field, p: f64, q: f64, lambda: f64) -> Result<f64> {
    if !(p >= 1.0 && q >= 1.0 && p.is_finite() && q.is_finite() && lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidConfiguration(format!(
            "need p, q >= 1 and lambda in (0, 1), got p = {p}, q = {q}, lambda = {lambda}"
        )));
    }
    let nq = lp_norm(phi, q);
    let denom = lp_norm(&gradient(phi), 2.0).powf(lambda) * nq.powf(1.0 - lambda) + nq;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(lp_norm(phi, p) / denom)
}

/// The one-dimensional interpolation exponent with
/// `||phi||_p <= c ||phi_x||_2^lambda ||phi||_q^{1-lambda} + c ||phi||_q`:
/// `lambda = (1/q - 1/p) / (1/q + 1/2)`.
pub fn gn_lambda(p: f64, q: f64) -> f64 {
    (1.0 / q - 1.0 / p) / (1.0 / q + 0.5)
}

/// An interpolation step: the norms involved and the exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnExponents {
    pub p: f64,
    pub q: f64,
    pub lambda: f64,
}

impl GnExponents {
    fn new(p: f64, q: f64, lambda: f64) -> Self {
        Self { p, q, lambda }
    }
}

/// Weighted dissipation estimate, `phi = (theta + 1)^{p/2}`:
/// `L^{2(p+1)/p}` against `L^{2/p}`, `lambda = p^2 / (p+1)^2`.
pub fn gn_weighted_dissipation(p: f64) -> GnExponents {
    GnExponents::new(2.0 * (p + 1.0) / p, 2.0 / p, p * p / ((p + 1.0) * (p + 1.0)))
}

/// `L^q`-in-time estimate, `phi = (theta + 1)^{p/2}`:
/// `L^{2q/p}` against `L^{2/p}`, `lambda = p (q-1) / ((p+1) q)`.
pub fn gn_theta_lq(p: f64, q: f64) -> GnExponents {
    GnExponents::new(2.0 * q / p, 2.0 / p, p * (q - 1.0) / ((p + 1.0) * q))
}

/// Velocity cascade step: `L^{2q/(q-2)}` against `L^1`, `lambda = (q+2) / (3q)`.
pub fn gn_velocity_cascade(q: f64) -> GnExponents {
    GnExponents::new(2.0 * q / (q - 2.0), 1.0, (q + 2.0) / (3.0 * q))
}

/// Temperature gradient step: `L^{4 alpha0}` against `L^1`,
/// `lambda = (4 alpha0 - 1) / (6 alpha0)`.
pub fn gn_theta_gradient(alpha0: f64) -> GnExponents {
    GnExponents::new(4.0 * alpha0, 1.0, (4.0 * alpha0 - 1.0) / (6.0 * alpha0))
}

/// One row of a probe over `cos(m pi x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRow {
    pub m: usize,
    pub ehrling: f64,
    pub gn: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSettings {
    pub ehrling_p: f64,
    pub eta: f64,
    pub gn: GnExponents,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        Self {
            ehrling_p: 1.0,
            eta: 10.0,
            gn: GnExponents::new(4.0, 2.0, gn_lambda(4.0, 2.0)),
        }
    }
}

/// Evaluates both probes on `cos(m pi x)` for `m = 1..=m_max`.
pub fn cosine_family(grid: &Grid1D, m_max: usize, settings: &ProbeSettings) -> Result<Vec<ProbeRow>> {
    (1..=m_max)
        .map(|m| {
            let x0 = grid.x_left();
            let len = grid.length();
            let phi = Field::from_fn(*grid, |x| (m as f64 * std::f64::consts::PI * (x - x0) / len).cos());
            Ok(ProbeRow {
                m,
                ehrling: ehrling_probe(&phi, settings.ehrling_p, settings.eta)?,
                gn: gn_probe(&phi, settings.gn.p, settings.gn.q, settings.gn.lambda)?,
            })
        })
        .collect()
}
