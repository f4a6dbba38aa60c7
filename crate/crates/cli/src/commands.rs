use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use kvtherm::estimates::probes::cosine_family;
use kvtherm::estimates::{build_ledger, moser_property_trial, EstimateLedger};
use kvtherm::grid::Grid1D;
use kvtherm::mms::{convergence_study, make_mms_case, temporal_study, ConvergenceTable};
use kvtherm::solver::{run, SimConfig, Termination, Trajectory};

use crate::config::{check_params, parse_config, resolve, CheckParams, Config, ConfigError, RawConfig};

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_CHECK_FAILURE: i32 = 1;
pub const EXIT_CONFIG_ERROR: i32 = 2;

/// Spatial orders must fall in this interval.
pub const SPATIAL_ORDER: (f64, f64) = (1.8, 2.2);
/// Temporal orders must fall in this interval.
pub const TEMPORAL_ORDER: (f64, f64) = (0.9, 1.1);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Verify,
    Mms,
    Sweep,
    MoserCheck,
    Probe,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Run => "run",
            Self::Verify => "verify",
            Self::Mms => "mms",
            Self::Sweep => "sweep",
            Self::MoserCheck => "moser-check",
            Self::Probe => "probe",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub overrides: Vec<String>,
}

impl Default for Options {
    fn default() -> Self {
        Self { config: None, out: PathBuf::from("out"), seed: None, trials: None, overrides: Vec::new() }
    }
}

/// Why a command stopped early.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Check(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<kvtherm::Error> for Failure {
    fn from(e: kvtherm::Error) -> Self {
        use kvtherm::Error as E;
        match e {
            E::SchemeBreakdown { .. } | E::NonElliptic { .. } | E::InsufficientSamples { .. } => {
                Self::Check(e.to_string())
            }
            other => Self::Config(other.to_string()),
        }
    }
}

fn io_failure(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::Config(format!("cannot write {}: {e}", path.display()))
}

/// What a command produced.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: &'static str,
    pub config: Option<SimConfig>,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub exit_status: i32,
    pub seed: Option<u64>,
    pub notes: Vec<String>,
}

impl RunManifest {
    fn new(command: Command, out_dir: &Path, config: Option<SimConfig>, seed: Option<u64>) -> Self {
        Self {
            command: command.name(),
            config,
            out_dir: out_dir.to_path_buf(),
            files: Vec::new(),
            exit_status: EXIT_SUCCESS,
            seed,
            notes: Vec::new(),
        }
    }

    /// Creates `name` in the output directory and records it.
    fn emit(&mut self, name: &str, body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<(), Failure> {
        let path = self.out_dir.join(name);
        let mut w = BufWriter::new(File::create(&path).map_err(io_failure(&path))?);
        body(&mut w).and_then(|_| w.flush()).map_err(io_failure(&path))?;
        self.files.push(PathBuf::from(name));
        Ok(())
    }

    /// Writes `manifest.txt`, which lists itself.
    fn finish(mut self) -> Result<Self, Failure> {
        self.files.push(PathBuf::from("manifest.txt"));
        let mut text = String::new();
        let _ = writeln!(text, "command = {}", self.command);
        let _ = writeln!(text, "out_dir = {}", self.out_dir.display());
        if let Some(seed) = self.seed {
            let _ = writeln!(text, "seed = {seed}");
        }
        let _ = writeln!(text, "exit_status = {}", self.exit_status);
        for note in &self.notes {
            let _ = writeln!(text, "note = {note}");
        }
        text.push_str("[files]\n");
        for f in &self.files {
            let _ = writeln!(text, "{}", f.display());
        }
        if let Some(cfg) = &self.config {
            let _ = writeln!(text, "[config]\n{cfg:#?}");
        }
        let path = self.out_dir.join("manifest.txt");
        fs::write(&path, text).map_err(io_failure(&path))?;
        Ok(self)
    }
}

fn termination_text(t: &Termination) -> String {
    match t {
        Termination::Completed => "completed".into(),
        Termination::Diverged { t_est } => format!("diverged at t = {t_est}"),
    }
}

fn load(opts: &Options) -> Result<Config, Failure> {
    let path = opts
        .config
        .as_ref()
        .ok_or_else(|| Failure::Config("--config is required for this subcommand".into()))?;
    let cfg = parse_config(path, &opts.overrides)?;
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

/// Check settings only, for subcommands that do not simulate the configured run.
fn load_checks(opts: &Options) -> Result<CheckParams, Failure> {
    let Some(path) = &opts.config else {
        let mut raw = RawConfig::default();
        for o in &opts.overrides {
            raw.apply_override(o)?;
        }
        return Ok(check_params(&raw)?);
    };
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut raw = RawConfig::parse(&text)?;
    for o in &opts.overrides {
        raw.apply_override(o)?;
    }
    Ok(check_params(&raw)?)
}

fn prepare_out(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))
}

fn emit_trajectory(m: &mut RunManifest, traj: &Trajectory) -> Result<(), Failure> {
    m.emit("snapshots.csv", |w| traj.write_snapshots_csv(w))?;
    m.emit("functionals.csv", |w| traj.write_functionals_csv(w))
}

/// Runs `cmd` and returns the process exit code. Diagnostics go to stderr.
pub fn execute(cmd: Command, opts: &Options) -> i32 {
    let result = match cmd {
        Command::Run => cmd_run(opts),
        Command::Verify => cmd_verify(opts),
        Command::Mms => cmd_mms(opts),
        Command::Sweep => cmd_sweep(opts),
        Command::MoserCheck => cmd_moser(opts),
        Command::Probe => cmd_probe(opts),
    };
    match result {
        Ok(m) => m.exit_status,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            EXIT_CONFIG_ERROR
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failure: {msg}");
            EXIT_CHECK_FAILURE
        }
    }
}

pub fn cmd_run(opts: &Options) -> Result<RunManifest, Failure> {
    let cfg = load(opts)?;
    prepare_out(&opts.out)?;
    let traj = run(&cfg.sim)?;
    let mut m = RunManifest::new(Command::Run, &opts.out, Some(cfg.sim.clone()), opts.seed);
    emit_trajectory(&mut m, &traj)?;
    let term = termination_text(&traj.termination);
    println!("termination: {term}");
    println!("max blow-up indicator: {:.6e}", traj.max_blowup());
    m.notes.push(format!("termination: {term}"));
    m.notes.extend(cfg.warnings);
    m.finish()
}

pub fn cmd_verify(opts: &Options) -> Result<RunManifest, Failure> {
    let cfg = load(opts)?;
    prepare_out(&opts.out)?;
    let (traj, companion) = if cfg.checks.companion {
        let fine = cfg.sim.refined()?;
        let (a, b) = rayon::join(|| run(&cfg.sim), || run(&fine));
        (a?, Some(b?))
    } else {
        (run(&cfg.sim)?, None)
    };
    let ledger = build_ledger(&traj, &cfg.checks.ledger, companion.as_ref());
    let mut m = RunManifest::new(Command::Verify, &opts.out, Some(cfg.sim.clone()), opts.seed);
    emit_trajectory(&mut m, &traj)?;
    m.emit("ledger.csv", |w| ledger.write_csv(w))?;
    let summary = ledger.summary();
    m.emit("ledger.txt", |w| w.write_all(summary.as_bytes()))?;
    print!("{summary}");
    m.notes.push(format!("termination: {}", termination_text(&traj.termination)));
    m.notes.extend(cfg.warnings);
    m.exit_status = if ledger.overall_pass() && traj.completed() { EXIT_SUCCESS } else { EXIT_CHECK_FAILURE };
    m.finish()
}

fn print_table(label: &str, t: &ConvergenceTable) {
    println!("{label} ({:?})", t.status);
    let orders = t.orders();
    for (i, r) in t.rows.iter().enumerate() {
        let o = if i == 0 {
            String::new()
        } else {
            let o = orders[i - 1];
            format!("  orders {:.3} {:.3} {:.3}", o[0], o[1], o[2])
        };
        println!("  n={:<5} dt={:<10.3e} err u={:.3e} v={:.3e} theta={:.3e}{o}", r.n, r.dt, r.err_u, r.err_v, r.err_theta);
    }
}

pub fn cmd_mms(opts: &Options) -> Result<RunManifest, Failure> {
    let checks = load_checks(opts)?;
    prepare_out(&opts.out)?;
    let mut m = RunManifest::new(Command::Mms, &opts.out, None, opts.seed);
    let mut ok = true;
    for id in &checks.mms_cases {
        let case = make_mms_case(id)?;
        let space = convergence_study(&case, &checks.mms_resolutions, checks.mms_horizon)?;
        let time = temporal_study(&case, checks.mms_time_n, &checks.mms_dts, checks.mms_horizon)?;
        print_table(&format!("{id} spatial"), &space);
        print_table(&format!("{id} temporal"), &time);
        m.emit(&format!("mms_{id}_space.csv"), |w| space.write_csv(w))?;
        m.emit(&format!("mms_{id}_time.csv"), |w| time.write_csv(w))?;
        let case_ok = space.orders_within(SPATIAL_ORDER.0, SPATIAL_ORDER.1)
            && time.orders_within(TEMPORAL_ORDER.0, TEMPORAL_ORDER.1);
        if !case_ok {
            m.notes.push(format!("{id}: orders outside the pinned intervals"));
        }
        ok &= case_ok;
    }
    println!("overall: {}", if ok { "PASS" } else { "FAIL" });
    m.exit_status = if ok { EXIT_SUCCESS } else { EXIT_CHECK_FAILURE };
    m.finish()
}

struct SweepRow {
    value: String,
    traj: Trajectory,
    ledger: EstimateLedger,
}

pub fn cmd_sweep(opts: &Options) -> Result<RunManifest, Failure> {
    let cfg = load(opts)?;
    let (param, values) = cfg
        .checks
        .sweep
        .clone()
        .ok_or_else(|| Failure::Config("sweep needs [checks] sweep_param and sweep_values".into()))?;
    let configs = values
        .iter()
        .map(|v| {
            let mut raw = cfg.raw.clone();
            raw.set(&param, v)?;
            Ok((v.clone(), resolve(raw)?))
        })
        .collect::<Result<Vec<(String, Config)>, ConfigError>>()?;
    prepare_out(&opts.out)?;
    let rows = configs
        .par_iter()
        .map(|(v, c)| {
            let traj = run(&c.sim)?;
            let ledger = build_ledger(&traj, &c.checks.ledger, None);
            Ok(SweepRow { value: v.clone(), traj, ledger })
        })
        .collect::<Result<Vec<_>, kvtherm::Error>>()?;
    let mut m = RunManifest::new(Command::Sweep, &opts.out, Some(cfg.sim.clone()), opts.seed);
    m.emit("sweep.csv", |w| {
        writeln!(w, "{param},termination,t_end,max_indicator,max_energy,min_theta,outside_theorem,ledger")?;
        for r in &rows {
            let t_end = match r.traj.termination {
                Termination::Completed => r.traj.final_state.t,
                Termination::Diverged { t_est } => t_est,
            };
            let max_energy = r.traj.records.iter().fold(0.0, |a: f64, x| a.max(x.energy()));
            let min_theta = r.traj.records.iter().fold(f64::INFINITY, |a: f64, x| a.min(x.theta_min));
            writeln!(
                w,
                "{},{},{:.10e},{:.10e},{:.10e},{:.10e},{},{}",
                r.value,
                if r.traj.completed() { "completed" } else { "diverged" },
                t_end,
                r.traj.max_blowup(),
                max_energy,
                min_theta,
                r.ledger.outside_theorem,
                if r.ledger.overall_pass() { "pass" } else { "fail" },
            )?;
        }
        Ok(())
    })?;
    for r in &rows {
        println!(
            "{param} = {:<10} {:<28} ledger {}",
            r.value,
            termination_text(&r.traj.termination),
            if r.ledger.overall_pass() { "pass" } else { "fail" }
        );
    }
    m.finish()
}

pub fn cmd_moser(opts: &Options) -> Result<RunManifest, Failure> {
    let trials = opts.trials.unwrap_or(10_000);
    let seed = opts.seed.unwrap_or(0);
    prepare_out(&opts.out)?;
    let s = moser_property_trial(trials, seed);
    let mut m = RunManifest::new(Command::MoserCheck, &opts.out, None, Some(seed));
    m.emit("moser_check.csv", |w| {
        writeln!(w, "trials,seed,violations,violations_without_root")?;
        writeln!(w, "{},{seed},{},{}", s.trials, s.violations, s.violations_without_root)
    })?;
    println!(
        "trials: {}, seed: {seed}, violations: {}, without the root term: {}",
        s.trials, s.violations, s.violations_without_root
    );
    m.exit_status = if s.violations == 0 { EXIT_SUCCESS } else { EXIT_CHECK_FAILURE };
    m.finish()
}

pub fn cmd_probe(opts: &Options) -> Result<RunManifest, Failure> {
    let checks = load_checks(opts)?;
    prepare_out(&opts.out)?;
    let grid = Grid1D::unit(checks.probe_n)?;
    let rows = cosine_family(&grid, checks.probe_m_max, &checks.probe)?;
    let mut m = RunManifest::new(Command::Probe, &opts.out, None, opts.seed);
    let (e1, g1) = rows.first().map_or((0.0, 0.0), |r| (r.ehrling, r.gn));
    let ratio = |v: f64, base: f64| if base == 0.0 { if v == 0.0 { 1.0 } else { f64::INFINITY } } else { v / base };
    m.emit("probes.csv", |w| {
        writeln!(w, "m,ehrling,gn,ehrling_ratio,gn_ratio")?;
        for r in &rows {
            writeln!(w, "{},{:.10e},{:.10e},{:.10e},{:.10e}", r.m, r.ehrling, r.gn, ratio(r.ehrling, e1), ratio(r.gn, g1))?;
        }
        Ok(())
    })?;
    let s = &checks.probe;
    println!(
        "cosine family on n = {}: ehrling p = {}, eta = {}; gn p = {}, q = {}, lambda = {:.6}",
        checks.probe_n, s.ehrling_p, s.eta, s.gn.p, s.gn.q, s.gn.lambda
    );
    println!("{:>3}  {:>14}  {:>14}  {:>10}", "m", "C_needed", "gn", "gn/gn(1)");
    for r in &rows {
        println!("{:>3}  {:>14.6e}  {:>14.6e}  {:>10.4}", r.m, r.ehrling, r.gn, ratio(r.gn, g1));
    }
    m.finish()
}
