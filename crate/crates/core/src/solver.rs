//! IMEX time stepping for the coupled system, trajectory recording and the
//! blow-up monitor.

use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{div_flux_unchecked, gradient, integrate, sup_norm, FaceField, Field, Grid1D};
use crate::model::{build_initial_data, CoefficientSet, InitialData};
use crate::tridiag::solve_implicit_diffusion;

/// Default blow-up threshold on the `W^{1,2}` norm of the temperature.
pub const DEFAULT_THRESHOLD: f64 = 1e6;

/// Unknowns at one time instant.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub u: Field,
    pub v: Field,
    pub theta: Field,
    pub diverged: bool,
}

impl State {
    pub fn new(t: f64, u: Field, v: Field, theta: Field) -> Self {
        let diverged = !(u.is_finite() && v.is_finite() && theta.is_finite());
        Self { t, u, v, theta, diverged }
    }

    pub fn grid(&self) -> &Grid1D {
        self.u.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.u.is_finite() && self.v.is_finite() && self.theta.is_finite()
    }

    /// Positivity tolerance `1e-8 (1 + sup theta)`.
    pub fn positivity_tolerance(&self) -> f64 {
        1e-8 * (1.0 + self.theta.max().max(0.0))
    }
}

/// Additive source fields for the momentum and heat equations.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceFields {
    pub momentum: Field,
    pub heat: Field,
}

/// Pointwise source terms, sampled at cell centres at the new time level.
pub trait SourceTerms: Send + Sync {
    fn momentum(&self, x: f64, t: f64) -> f64;
    fn heat(&self, x: f64, t: f64) -> f64;

    fn fields(&self, grid: &Grid1D, t: f64) -> SourceFields {
        SourceFields {
            momentum: Field::from_fn(*grid, |x| self.momentum(x, t)),
            heat: Field::from_fn(*grid, |x| self.heat(x, t)),
        }
    }
}

/// One IMEX step. Viscosity and coupling are lagged at `theta^n`; the
/// viscous and diffusive terms are implicit, everything else explicit.
pub fn step_imex(
    s: &State,
    dt: f64,
    coeffs: &CoefficientSet,
    sources: Option<&SourceFields>,
) -> Result<State> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidConfiguration(format!("dt must be positive, got {dt}")));
    }
    let grid = *s.grid();
    let t_new = s.t + dt;

    let gamma_cells = s.theta.map(|z| coeffs.gamma.eval(z));
    let f_cells = s.theta.map(|z| coeffs.f.eval(z));
    let a_cells = Field::from_fn(grid, |x| coeffs.a.eval(x, t_new));

    let elastic = div_flux_unchecked(&FaceField::from_cells(&a_cells), &s.u);
    let coupling = gradient(&f_cells);
    let mut rhs_v = s.v.clone();
    {
        let r = rhs_v.values_mut();
        for i in 0..r.len() {
            let src = sources.map_or(0.0, |q| q.momentum.values()[i]);
            r[i] += dt * (elastic.values()[i] + coupling.values()[i] + src);
        }
    }
    let v_new = solve_implicit_diffusion(&FaceField::from_cells(&gamma_cells), dt, &rhs_v)?;

    let u_new = s.u.lin_comb(1.0, &v_new, dt);

    let vx = gradient(&v_new);
    let mut rhs_theta = s.theta.clone();
    {
        let r = rhs_theta.values_mut();
        for i in 0..r.len() {
            let w = vx.values()[i];
            let src = sources.map_or(0.0, |q| q.heat.values()[i]);
            r[i] += dt * (gamma_cells.values()[i] * w * w + f_cells.values()[i] * w + src);
        }
    }
    let heat = FaceField::constant(&grid, coeffs.diffusivity);
    let theta_new = solve_implicit_diffusion(&heat, dt, &rhs_theta)?;

    Ok(State::new(t_new, u_new, v_new, theta_new))
}

/// `(int theta^2 + int theta_x^2)^{1/2}`.
pub fn blowup_indicator(s: &State) -> f64 {
    let th = &s.theta;
    let tx = gradient(th);
    let l2 = integrate(&th.map(|z| z * z));
    let h1 = integrate(&tx.map(|z| z * z));
    (l2 + h1).sqrt()
}

/// Everything needed for a run.
#[derive(Clone)]
pub struct SimConfig {
    pub grid: Grid1D,
    pub coeffs: CoefficientSet,
    pub init: InitialData,
    pub horizon: f64,
    /// Defaults to `0.25 dx`.
    pub dt: Option<f64>,
    /// Defaults to roughly 250 snapshots over the run.
    pub snapshot_stride: Option<usize>,
    pub functional_stride: usize,
    pub threshold: f64,
    pub sources: Option<Arc<dyn SourceTerms>>,
}

impl fmt::Debug for SimConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimConfig")
            .field("grid", &self.grid)
            .field("coeffs", &self.coeffs)
            .field("init", &self.init)
            .field("horizon", &self.horizon)
            .field("dt", &self.dt)
            .field("snapshot_stride", &self.snapshot_stride)
            .field("functional_stride", &self.functional_stride)
            .field("threshold", &self.threshold)
            .field("sources", &self.sources.as_ref().map(|_| "injected"))
            .finish()
    }
}

impl SimConfig {
    pub fn new(grid: Grid1D, coeffs: CoefficientSet, init: InitialData, horizon: f64) -> Self {
        Self {
            grid,
            coeffs,
            init,
            horizon,
            dt: None,
            snapshot_stride: None,
            functional_stride: 1,
            threshold: DEFAULT_THRESHOLD,
            sources: None,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or(0.25 * self.grid.dx())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt() - 1e-9).ceil().max(1.0) as usize
    }

    pub fn snapshot_stride(&self) -> usize {
        self.snapshot_stride
            .unwrap_or_else(|| self.steps().div_ceil(250).max(1))
    }

    /// The same run with `n` doubled, `dt` halved and strides doubled, so
    /// that records and snapshots land on the same times.
    pub fn refined(&self) -> Result<Self> {
        let grid = Grid1D::new(self.grid.x_left(), self.grid.x_right(), 2 * self.grid.n())?;
        let mut out = self.clone();
        out.grid = grid;
        out.dt = Some(0.5 * self.dt());
        out.functional_stride = 2 * self.functional_stride;
        out.snapshot_stride = Some(2 * self.snapshot_stride());
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        let dt = self.dt();
        let bad = |what: String| Err(Error::InvalidConfiguration(what));
        if !(dt > 0.0 && dt.is_finite()) {
            return bad(format!("dt must be positive, got {dt}"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon T must be positive, got {}", self.horizon));
        }
        if self.functional_stride == 0 || self.snapshot_stride == Some(0) {
            return bad("strides must be at least 1".into());
        }
        if !(self.threshold > 0.0) {
            return bad(format!("blow-up threshold must be positive, got {}", self.threshold));
        }
        if !(self.coeffs.diffusivity > 0.0 && self.coeffs.diffusivity.is_finite()) {
            return bad(format!("diffusivity D must be positive, got {}", self.coeffs.diffusivity));
        }
        Ok(())
    }
}

/// Scalar functionals sampled at one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalRecord {
    pub step: usize,
    pub t: f64,
    /// `1/2 int v^2`.
    pub kinetic: f64,
    /// `1/2 int a u_x^2`.
    pub elastic: f64,
    /// `int theta`.
    pub thermal: f64,
    /// `1/2 int a_t u_x^2`, with `a_t` by a central difference of step `dt`
    /// (forward at `t < dt`).
    pub a_t_term: f64,
    /// `[v f(theta)]` across the boundary, from the outermost cells.
    pub boundary_work: f64,
    /// `int gamma(theta) v_x^2`.
    pub dissipation: f64,
    pub blowup: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub v_sup: f64,
    /// `int theta_x^2`.
    pub theta_x_sq: f64,
}

impl FunctionalRecord {
    pub const CSV_HEADER: &'static str = "t,kinetic,elastic,thermal,energy,a_t_term,boundary_work,dissipation,blowup,theta_min,theta_max,v_sup,theta_x_sq";

    pub fn evaluate(step: usize, s: &State, coeffs: &CoefficientSet, dt: f64) -> Self {
        let grid = *s.grid();
        let ux = gradient(&s.u);
        let vx = gradient(&s.v);
        let tx = gradient(&s.theta);
        let ux2 = ux.map(|w| w * w);
        let a = Field::from_fn(grid, |x| coeffs.a.eval(x, s.t));
        let t_lo = (s.t - dt).max(0.0);
        let t_hi = s.t + dt;
        let a_t = Field::from_fn(grid, |x| {
            (coeffs.a.eval(x, t_hi) - coeffs.a.eval(x, t_lo)) / (t_hi - t_lo)
        });
        let v = s.v.values();
        let th = s.theta.values();
        let n = v.len();
        Self {
            step,
            t: s.t,
            kinetic: 0.5 * integrate(&s.v.map(|w| w * w)),
            elastic: 0.5 * integrate(&a.zip_map(&ux2, |p, q| p * q)),
            thermal: integrate(&s.theta),
            a_t_term: 0.5 * integrate(&a_t.zip_map(&ux2, |p, q| p * q)),
            boundary_work: v[n - 1] * coeffs.f.eval(th[n - 1]) - v[0] * coeffs.f.eval(th[0]),
            dissipation: integrate(&s.theta.zip_map(&vx, |z, w| coeffs.gamma.eval(z) * w * w)),
            blowup: blowup_indicator(s),
            theta_min: s.theta.min(),
            theta_max: s.theta.max(),
            v_sup: sup_norm(&s.v),
            theta_x_sq: integrate(&tx.map(|w| w * w)),
        }
    }

    /// `y = kinetic + elastic + thermal`.
    pub fn energy(&self) -> f64 {
        self.kinetic + self.elastic + self.thermal
    }

    /// Amount by which `theta_min` undercuts `-1e-8 (1 + sup theta)`.
    pub fn positivity_violation(&self) -> f64 {
        -self.theta_min - 1e-8 * (1.0 + self.theta_max.max(0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Completed,
    /// Monitor exceeded or a field became non-finite at `t_est`.
    Diverged { t_est: f64 },
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: Grid1D,
    pub coeffs: CoefficientSet,
    pub dt: f64,
    pub horizon: f64,
    pub threshold: f64,
    pub snapshot_stride: usize,
    pub functional_stride: usize,
    /// States at multiples of `snapshot_stride`, starting with `t = 0`.
    pub snapshots: Vec<State>,
    /// Functionals at multiples of `functional_stride`, starting with `t = 0`.
    pub records: Vec<FunctionalRecord>,
    pub final_state: State,
    pub termination: Termination,
}

impl Trajectory {
    pub fn completed(&self) -> bool {
        self.termination == Termination::Completed
    }

    /// Time between consecutive functional records.
    pub fn record_spacing(&self) -> f64 {
        self.dt * self.functional_stride as f64
    }

    /// Time between consecutive snapshots.
    pub fn snapshot_spacing(&self) -> f64 {
        self.dt * self.snapshot_stride as f64
    }

    /// Largest positivity violation over the records (`<= 0` means none).
    pub fn worst_positivity_violation(&self) -> f64 {
        self.records
            .iter()
            .map(FunctionalRecord::positivity_violation)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_blowup(&self) -> f64 {
        self.records.iter().map(|r| r.blowup).fold(0.0, f64::max)
    }

    /// Snapshots as CSV `t,x,u,v,theta`, 17 significant digits.
    pub fn write_snapshots_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,x,u,v,theta")?;
        for s in &self.snapshots {
            for (i, x) in self.grid.centers().enumerate() {
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    s.t,
                    x,
                    s.u.values()[i],
                    s.v.values()[i],
                    s.theta.values()[i]
                )?;
            }
        }
        Ok(())
    }

    pub fn write_functionals_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", FunctionalRecord::CSV_HEADER)?;
        for r in &self.records {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.t,
                r.kinetic,
                r.elastic,
                r.thermal,
                r.energy(),
                r.a_t_term,
                r.boundary_work,
                r.dissipation,
                r.blowup,
                r.theta_min,
                r.theta_max,
                r.v_sup,
                r.theta_x_sq
            )?;
        }
        Ok(())
    }
}

/// Advances from `t = 0` with a fixed step. Step `n` lands exactly on
/// `t = n dt`; the run takes `ceil(T / dt)` steps.
pub fn run(config: &SimConfig) -> Result<Trajectory> {
    config.validate()?;
    let dt = config.dt();
    let steps = config.steps();
    let ss = config.snapshot_stride();
    let fs = config.functional_stride;
    let coeffs = &config.coeffs;

    let mut state = build_initial_data(&config.init, &config.grid)?;
    let mut snapshots = vec![state.clone()];
    let mut records = vec![FunctionalRecord::evaluate(0, &state, coeffs, dt)];
    let mut termination = Termination::Completed;

    for n in 1..=steps {
        let t_new = n as f64 * dt;
        let sources = config.sources.as_ref().map(|s| s.fields(&config.grid, t_new));
        let mut next = step_imex(&state, dt, coeffs, sources.as_ref())?;
        next.t = t_new;
        let monitor = if next.diverged { f64::INFINITY } else { blowup_indicator(&next) };
        let diverged = next.diverged || !(monitor <= config.threshold);
        state = next;
        if diverged {
            if state.is_finite() {
                records.push(FunctionalRecord::evaluate(n, &state, coeffs, dt));
                snapshots.push(state.clone());
            }
            termination = Termination::Diverged { t_est: t_new };
            break;
        }
        if n % fs == 0 {
            records.push(FunctionalRecord::evaluate(n, &state, coeffs, dt));
        }
        if n % ss == 0 {
            snapshots.push(state.clone());
        }
    }

    Ok(Trajectory {
        grid: config.grid,
        coeffs: coeffs.clone(),
        dt,
        horizon: config.horizon,
        threshold: config.threshold,
        snapshot_stride: ss,
        functional_stride: fs,
        snapshots,
        records,
        final_state: state,
        termination,
    })
}
