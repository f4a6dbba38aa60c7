//! Manufactured solutions and convergence studies.
//!
//! Both cases use `u* = A cos(pi x) e^{-t}` and `theta* = 2 + A cos(pi x) e^{-t}`
//! with `gamma = 1 - 1/(2(1+zeta))` and `f = 2((1+zeta)^{1/2} - 1)`. The
//! sources are the residuals of the exact pair substituted into the system.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{lp_norm, Field, Grid1D};
use crate::model::{CoefficientSet, InitialData, Profile, SpaceTimeFn, ThetaFn};
use crate::solver::{run, SimConfig, SourceTerms};

pub const CASES: [&str; 2] = ["trig-constant-coeff", "trig-variable-a"];

/// Tolerance of the finite-difference self-check of the sources.
pub const SELF_CHECK_TOLERANCE: f64 = 1e-6;
const SELF_CHECK_POINTS: usize = 20;
const SELF_CHECK_SEED: u64 = 0x6d6d73;

#[derive(Debug, Clone)]
pub struct MmsCase {
    pub id: String,
    pub amplitude: f64,
    pub coeffs: CoefficientSet,
}

impl MmsCase {
    fn build(id: &str, amplitude: f64, a: SpaceTimeFn) -> Self {
        Self {
            id: id.to_string(),
            amplitude,
            coeffs: CoefficientSet {
                gamma: ThetaFn::SaturatingGamma { limit: 1.0, drop: 0.5 },
                a,
                f: ThetaFn::PowerF { coef: 2.0, exponent: 0.5 },
                gamma_lower: 0.49,
                gamma_upper: 1.01,
                f_bound: 2.0,
                alpha: 0.5,
                diffusivity: 1.0,
                outside_theorem: false,
            },
        }
    }

    /// `u* = 0`, `theta* = 2`: the scheme reproduces it to round-off.
    pub fn zero_amplitude() -> Self {
        Self::build("zero-amplitude", 0.0, SpaceTimeFn::Constant(1.0))
    }

    pub fn u(&self, x: f64, t: f64) -> f64 {
        self.amplitude * (PI * x).cos() * (-t).exp()
    }

    pub fn v(&self, x: f64, t: f64) -> f64 {
        -self.u(x, t)
    }

    pub fn theta(&self, x: f64, t: f64) -> f64 {
        2.0 + self.u(x, t)
    }

    /// Analytic derivatives `(u_x, u_xx, u_xt, u_xxt)` and `(theta_x, theta_xx, theta_t)`.
    fn derivatives(&self, x: f64, t: f64) -> ([f64; 4], [f64; 3]) {
        let e = self.amplitude * (-t).exp();
        let (s, c) = (PI * x).sin_cos();
        let ux = -PI * s * e;
        let uxx = -PI * PI * c * e;
        (
            [ux, uxx, -ux, -uxx],
            [ux, uxx, -c * e],
        )
    }

    pub fn initial_data(&self) -> InitialData {
        InitialData {
            u0: Profile::Cosine { offset: 0.0, amp: self.amplitude, modes: 1.0 },
            u0t: Profile::Cosine { offset: 0.0, amp: -self.amplitude, modes: 1.0 },
            theta0: Profile::Cosine { offset: 2.0, amp: self.amplitude, modes: 1.0 },
        }
    }

    /// Solver configuration on the unit interval with this case's sources.
    pub fn config(&self, n: usize, dt: f64, horizon: f64) -> Result<SimConfig> {
        let mut cfg = SimConfig::new(Grid1D::unit(n)?, self.coeffs.clone(), self.initial_data(), horizon);
        cfg.dt = Some(dt);
        let steps = cfg.steps();
        cfg.snapshot_stride = Some(steps);
        cfg.functional_stride = steps;
        cfg.sources = Some(Arc::new(self.clone()));
        Ok(cfg)
    }

    /// Compares the analytic sources with a sixth-order finite-difference
    /// substitution of the exact pair at pseudo-random points.
    pub fn self_check(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(SELF_CHECK_SEED);
        for _ in 0..SELF_CHECK_POINTS {
            let x: f64 = rng.gen_range(0.0..1.0);
            let t: f64 = rng.gen_range(0.0..1.0);
            let (mom, heat) = fd_residuals(self, x, t);
            for (equation, exact, approx) in [("momentum", self.momentum(x, t), mom), ("heat", self.heat(x, t), heat)] {
                let difference = (exact - approx).abs();
                if !(difference <= SELF_CHECK_TOLERANCE) {
                    return Err(Error::MmsSourceDerivation { equation, x, t, difference });
                }
            }
        }
        Ok(())
    }
}

impl SourceTerms for MmsCase {
    /// `u_tt - (gamma(theta) u_xt)_x - (a u_x)_x - f(theta)_x`.
    fn momentum(&self, x: f64, t: f64) -> f64 {
        let c = &self.coeffs;
        let ([ux, uxx, uxt, uxxt], [thx, _, _]) = self.derivatives(x, t);
        let th = self.theta(x, t);
        let utt = self.u(x, t);
        let viscous = c.gamma.deriv(th) * thx * uxt + c.gamma.eval(th) * uxxt;
        let elastic = c.a.dx(x, t) * ux + c.a.eval(x, t) * uxx;
        let coupling = c.f.deriv(th) * thx;
        utt - viscous - elastic - coupling
    }

    /// `theta_t - D theta_xx - gamma(theta) u_xt^2 - f(theta) u_xt`.
    fn heat(&self, x: f64, t: f64) -> f64 {
        let c = &self.coeffs;
        let ([_, _, uxt, _], [_, thxx, tht]) = self.derivatives(x, t);
        let th = self.theta(x, t);
        tht - c.diffusivity * thxx - c.gamma.eval(th) * uxt * uxt - c.f.eval(th) * uxt
    }
}

/// Sixth-order central first derivative.
fn d1(f: impl Fn(f64) -> f64, z: f64, h: f64) -> f64 {
    (-f(z - 3.0 * h) + 9.0 * f(z - 2.0 * h) - 45.0 * f(z - h) + 45.0 * f(z + h) - 9.0 * f(z + 2.0 * h)
        + f(z + 3.0 * h))
        / (60.0 * h)
}

/// Sixth-order central second derivative.
fn d2(f: impl Fn(f64) -> f64, z: f64, h: f64) -> f64 {
    (2.0 * f(z - 3.0 * h) - 27.0 * f(z - 2.0 * h) + 270.0 * f(z - h) - 490.0 * f(z) + 270.0 * f(z + h)
        - 27.0 * f(z + 2.0 * h)
        + 2.0 * f(z + 3.0 * h))
        / (180.0 * h * h)
}

/// Residuals of the exact pair from nested finite differences only; the
/// analytic derivative code is not used.
fn fd_residuals(case: &MmsCase, x: f64, t: f64) -> (f64, f64) {
    const H: f64 = 1e-2;
    let c = &case.coeffs;
    let u = |x: f64, t: f64| case.u(x, t);
    let th = |x: f64, t: f64| case.theta(x, t);
    let u_xt = |x: f64, t: f64| d1(|s| d1(|y| u(y, s), x, H), t, H);

    let utt = d2(|s| u(x, s), t, H);
    let viscous = d1(|y| c.gamma.eval(th(y, t)) * u_xt(y, t), x, H);
    let elastic = d1(|y| c.a.eval(y, t) * d1(|z| u(z, t), y, H), x, H);
    let coupling = d1(|y| c.f.eval(th(y, t)), x, H);
    let momentum = utt - viscous - elastic - coupling;

    let w = u_xt(x, t);
    let theta = th(x, t);
    let heat = d1(|s| th(x, s), t, H) - c.diffusivity * d2(|y| th(y, t), x, H)
        - c.gamma.eval(theta) * w * w
        - c.f.eval(theta) * w;
    (momentum, heat)
}

/// Builds a named case and verifies its sources.
pub fn make_mms_case(id: &str) -> Result<MmsCase> {
    let case = match id {
        "trig-constant-coeff" => MmsCase::build(id, 1.0, SpaceTimeFn::Constant(1.0)),
        "trig-variable-a" => MmsCase::build(
            id,
            1.0,
            SpaceTimeFn::Sinusoidal { base: 2.0, amp: 1.0, modes: 1.0, decay: 1.0 },
        ),
        "zero-amplitude" => MmsCase::zero_amplitude(),
        other => return Err(Error::UnknownMmsCase(other.to_string())),
    };
    case.self_check()?;
    Ok(case)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub dt: f64,
    pub err_u: f64,
    pub err_v: f64,
    pub err_theta: f64,
}

impl ConvergenceRow {
    fn errors(&self) -> [f64; 3] {
        [self.err_u, self.err_v, self.err_theta]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyStatus {
    Converging,
    /// Some error failed to decrease under refinement.
    NonConverging,
    /// All errors are at round-off level.
    Exact,
}

/// Errors below this are treated as round-off.
pub const ROUNDOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub status: StudyStatus,
}

impl ConvergenceTable {
    fn from_rows(rows: Vec<ConvergenceRow>) -> Self {
        let all = rows.iter().flat_map(|r| r.errors());
        let status = if all.clone().all(|e| e < ROUNDOFF) {
            StudyStatus::Exact
        } else if rows
            .windows(2)
            .all(|w| (0..3).all(|k| w[1].errors()[k] < w[0].errors()[k]))
        {
            StudyStatus::Converging
        } else {
            StudyStatus::NonConverging
        };
        Self { rows, status }
    }

    /// `log2` of successive error ratios, per field `(u, v, theta)`; row `i`
    /// compares rows `i` and `i + 1`.
    pub fn orders(&self) -> Vec<[f64; 3]> {
        self.rows
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0].errors(), w[1].errors());
                [0, 1, 2].map(|k| (a[k] / b[k]).log2())
            })
            .collect()
    }

    /// Whether every observed order lies in `[lo, hi]`.
    pub fn orders_within(&self, lo: f64, hi: f64) -> bool {
        self.status == StudyStatus::Converging
            && self.orders().iter().flatten().all(|&o| o >= lo && o <= hi)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "n,dt,err_u,err_v,err_theta,order_u,order_v,order_theta")?;
        let orders = self.orders();
        for (i, r) in self.rows.iter().enumerate() {
            let o = if i == 0 {
                ",,".to_string()
            } else {
                let o = orders[i - 1];
                format!("{:.6},{:.6},{:.6}", o[0], o[1], o[2])
            };
            writeln!(w, "{},{:.10e},{:.10e},{:.10e},{:.10e},{}", r.n, r.dt, r.err_u, r.err_v, r.err_theta, o)?;
        }
        Ok(())
    }
}

fn measure(case: &MmsCase, n: usize, dt: f64, horizon: f64) -> Result<ConvergenceRow> {
    let traj = run(&case.config(n, dt, horizon)?)?;
    let s = &traj.final_state;
    let g = traj.grid;
    let err = |field: &Field, exact: &dyn Fn(f64) -> f64| {
        lp_norm(&field.zip_map(&Field::from_fn(g, exact), |a, b| a - b), 2.0)
    };
    Ok(ConvergenceRow {
        n,
        dt,
        err_u: err(&s.u, &|x| case.u(x, s.t)),
        err_v: err(&s.v, &|x| case.v(x, s.t)),
        err_theta: err(&s.theta, &|x| case.theta(x, s.t)),
    })
}

/// Spatial study with `dt = 0.25 dx^2`, resolutions run in parallel.
pub fn convergence_study(case: &MmsCase, resolutions: &[usize], horizon: f64) -> Result<ConvergenceTable> {
    if resolutions.len() < 3 || resolutions.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::InvalidConfiguration(
            "a convergence study needs at least three successively doubled resolutions".into(),
        ));
    }
    let rows = resolutions
        .par_iter()
        .map(|&n| {
            let dx = 1.0 / n as f64;
            measure(case, n, 0.25 * dx * dx, horizon)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable::from_rows(rows))
}

/// Temporal study at fixed `n` over successively halved steps.
pub fn temporal_study(case: &MmsCase, n: usize, dts: &[f64], horizon: f64) -> Result<ConvergenceTable> {
    if dts.len() < 3 || dts.windows(2).any(|w| (w[1] - 0.5 * w[0]).abs() > 1e-12 * w[0]) {
        return Err(Error::InvalidConfiguration(
            "a temporal study needs at least three successively halved steps".into(),
        ));
    }
    let rows = dts
        .par_iter()
        .map(|&dt| measure(case, n, dt, horizon))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_cases_pass_self_check() {
        for id in CASES {
            make_mms_case(id).unwrap();
        }
        assert!(matches!(make_mms_case("nope"), Err(Error::UnknownMmsCase(_))));
    }

    #[test]
    fn corrupted_source_is_caught() {
        let mut case = make_mms_case("trig-variable-a").unwrap();
        // sources now disagree with the manufactured pair
        case.coeffs.diffusivity = 1.01;
        let exact = case.heat(0.3, 0.2);
        case.coeffs.diffusivity = 1.0;
        let (_, fd) = fd_residuals(&case, 0.3, 0.2);
        assert!((exact - fd).abs() > SELF_CHECK_TOLERANCE);
    }

    #[test]
    fn exact_pair_has_expected_ranges() {
        let case = make_mms_case("trig-constant-coeff").unwrap();
        for i in 0..=50 {
            for j in 0..=20 {
                let (x, t) = (i as f64 / 50.0, j as f64 * 0.25);
                assert!(case.theta(x, t) >= 1.0 - 1e-15);
            }
        }
        for t in [0.0, 0.3, 2.0] {
            let ([ux0, ..], [tx0, ..]) = case.derivatives(0.0, t);
            let ([ux1, ..], [tx1, ..]) = case.derivatives(1.0, t);
            for d in [ux0, tx0, ux1, tx1] {
                assert!(d.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_amplitude_is_exact() {
        let case = make_mms_case("zero-amplitude").unwrap();
        let table = convergence_study(&case, &[16, 32, 64], 0.05).unwrap();
        assert_eq!(table.status, StudyStatus::Exact);
    }

    #[test]
    fn study_needs_doubling() {
        let case = MmsCase::zero_amplitude();
        assert!(convergence_study(&case, &[16, 32], 0.1).is_err());
        assert!(convergence_study(&case, &[16, 30, 60], 0.1).is_err());
    }
}
