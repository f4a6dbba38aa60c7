//! Mechanical energy `y = 1/2 int v^2 + 1/2 int a u_x^2 + int theta`, its
//! balance law and the exponential envelope.

use crate::error::{Error, Result};
use crate::grid::{gradient, integrate, Field};
use crate::model::CoefficientSet;
use crate::solver::{State, Trajectory};

pub fn mechanical_energy(s: &State, coeffs: &CoefficientSet, t: f64) -> f64 {
    let ux = gradient(&s.u);
    let a = Field::from_fn(*s.grid(), |x| coeffs.a.eval(x, t));
    0.5 * integrate(&s.v.map(|w| w * w))
        + 0.5 * integrate(&a.zip_map(&ux, |p, q| p * q * q))
        + integrate(&s.theta)
}

/// Residuals of `dy/dt = 1/2 int a_t u_x^2 + W`, with `W = [v f(theta)]` the
/// boundary work of the coupling term, at interior record times.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyResidual {
    pub times: Vec<f64>,
    /// Residual including the boundary work.
    pub full: Vec<f64>,
    /// Residual of `dy/dt = 1/2 int a_t u_x^2` alone.
    pub without_boundary: Vec<f64>,
}

impl EnergyResidual {
    pub fn max_abs(&self) -> f64 {
        self.full.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn max_abs_without_boundary(&self) -> f64 {
        self.without_boundary.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// `r(t_n) = (y_{n+1} - y_{n-1}) / (2 stride dt) - 1/2 int a_t u_x^2 - W`.
pub fn energy_identity_residual(traj: &Trajectory) -> Result<EnergyResidual> {
    let recs = &traj.records;
    if recs.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: recs.len() });
    }
    let h = traj.record_spacing();
    let mut out = EnergyResidual {
        times: Vec::with_capacity(recs.len() - 2),
        full: Vec::with_capacity(recs.len() - 2),
        without_boundary: Vec::with_capacity(recs.len() - 2),
    };
    for w in recs.windows(3) {
        let dydt = (w[2].energy() - w[0].energy()) / (2.0 * h);
        let r = dydt - w[1].a_t_term;
        out.times.push(w[1].t);
        out.without_boundary.push(r);
        out.full.push(r - w[1].boundary_work);
    }
    Ok(out)
}

/// Largest `|y(t) - y(0)| / y(0)` over the records, and the same after
/// subtracting the time integral of the balance terms (trapezoidal rule).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyDrift {
    pub raw: f64,
    pub balanced: f64,
}

pub fn energy_drift(traj: &Trajectory) -> EnergyDrift {
    let recs = &traj.records;
    let y0 = recs.first().map_or(0.0, |r| r.energy());
    let scale = if y0 == 0.0 { 1.0 } else { y0.abs() };
    let mut raw: f64 = 0.0;
    let mut balanced: f64 = 0.0;
    let mut source = 0.0;
    for (i, r) in recs.iter().enumerate() {
        if i > 0 {
            let p = &recs[i - 1];
            let rate = |q: &crate::solver::FunctionalRecord| q.a_t_term + q.boundary_work;
            source += 0.5 * (rate(p) + rate(r)) * (r.t - p.t);
        }
        raw = raw.max((r.energy() - y0).abs() / scale);
        balanced = balanced.max((r.energy() - y0 - source).abs() / scale);
    }
    EnergyDrift { raw, balanced }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GronwallReport {
    /// `max(sup |a_t|, sup a, sup 1/a)` over cell centres and record times.
    pub c1: f64,
    pub passed: bool,
    /// Smallest `1 - y(t) / (y(0) e^{c1^2 t})` over the records after `t = 0`.
    pub margin: f64,
    /// Largest `y(t) / (y(0) e^{c1^2 t})`.
    pub max_ratio: f64,
    /// `max |y(t) - y(0)| / y(0)`; only meaningful when `a` is time-independent.
    pub conservation_drift: f64,
}

/// Checks `y(t) <= y(0) e^{c1^2 t} (1 + 1e-6)` at every record.
pub fn gronwall_check(traj: &Trajectory) -> GronwallReport {
    let coeffs = &traj.coeffs;
    let mut c1: f64 = 0.0;
    for r in &traj.records {
        for x in traj.grid.centers() {
            let a = coeffs.a.eval(x, r.t);
            c1 = c1.max(coeffs.a.dt(x, r.t).abs()).max(a).max(1.0 / a);
        }
    }
    let y0 = traj.records.first().map_or(0.0, |r| r.energy());
    let mut passed = true;
    let mut max_ratio: f64 = 0.0;
    let mut margin = f64::INFINITY;
    for r in &traj.records {
        let bound = y0 * (c1 * c1 * r.t).exp();
        let y = r.energy();
        if y > bound * (1.0 + 1e-6) || !y.is_finite() {
            passed = false;
        }
        let ratio = if bound > 0.0 {
            y / bound
        } else if y > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        max_ratio = max_ratio.max(ratio);
        if r.t > 0.0 {
            margin = margin.min(1.0 - ratio);
        }
    }
    GronwallReport {
        c1,
        passed,
        margin: if margin.is_finite() { margin } else { 1.0 - max_ratio },
        max_ratio,
        conservation_drift: energy_drift(traj).raw,
    }
}
