//! Sectioned `key = value` configuration files.
//!
//! ```text
//! [grid]
//! n = 128
//! [run]
//! scenario = standard
//! ```
//!
//! Functions are written `name(k=v, ...)`: `saturating(limit, drop)` and
//! `power(coef, exponent)` for `gamma` and `f`, `sinusoidal(base, amp, modes,
//! decay)` for `a`, `cosine(offset, amp, modes)`, `cos_squared(offset, amp,
//! modes)` and `linear(intercept, slope)` for initial profiles, and
//! `table(z:v, ...)` for tabulated `gamma` or `f`. A bare number is a constant.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use kvtherm::estimates::probes::{gn_lambda, GnExponents, ProbeSettings};
use kvtherm::estimates::LedgerParams;
use kvtherm::grid::Grid1D;
use kvtherm::mms::CASES;
use kvtherm::model::{
    build_initial_data, piezo_to_coefficients, CoefficientSet, Lattice, MonotoneCubic,
    PiezoParams, Profile, SpaceTimeFn, ThetaFn,
};
use kvtherm::scenario;
use kvtherm::solver::SimConfig;

/// Recognised keys per section.
pub const KEYS: [(&str, &[&str]); 5] = [
    ("grid", &["n", "x_left", "x_right"]),
    (
        "coefficients",
        &["gamma", "a", "f", "gamma_lower", "gamma_upper", "f_bound", "alpha", "diffusivity", "piezo"],
    ),
    ("initial", &["u0", "u0t", "theta0"]),
    ("run", &["scenario", "horizon", "dt", "snapshot_stride", "functional_stride", "threshold"]),
    (
        "checks",
        &[
            "k_max",
            "p",
            "q",
            "r",
            "companion",
            "sweep_param",
            "sweep_values",
            "mms_case",
            "mms_resolutions",
            "mms_horizon",
            "mms_time_n",
            "mms_dts",
            "probe_n",
            "probe_m_max",
            "ehrling_p",
            "eta",
            "gn_p",
            "gn_q",
        ],
    ),
];

/// Keys that must be present when no `scenario` is given.
const REQUIRED: [(&str, &str); 8] = [
    ("grid", "n"),
    ("coefficients", "gamma"),
    ("coefficients", "a"),
    ("coefficients", "f"),
    ("initial", "u0"),
    ("initial", "u0t"),
    ("initial", "theta0"),
    ("run", "horizon"),
];

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Io { path: String, message: String },
    Syntax { line: usize, message: String },
    UnknownSection { line: usize, section: String },
    UnknownKey { section: String, key: String },
    DuplicateKey { section: String, key: String },
    MissingKey { section: String, key: String },
    BadValue { key: String, value: String, expected: &'static str },
    Model(kvtherm::Error),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io { path, message } => write!(f, "cannot read {path}: {message}"),
            Self::Syntax { line, message } => write!(f, "line {line}: {message}"),
            Self::UnknownSection { line, section } => write!(f, "line {line}: unknown section [{section}]"),
            Self::UnknownKey { section, key } => write!(f, "unknown key '{key}' in [{section}]"),
            Self::DuplicateKey { section, key } => write!(f, "key '{key}' given twice in [{section}]"),
            Self::MissingKey { section, key } => {
                write!(f, "missing required key '{key}' in [{section}] (or set [run] scenario)")
            }
            Self::BadValue { key, value, expected } => {
                write!(f, "cannot parse '{value}' for '{key}': expected {expected}")
            }
            Self::Model(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<kvtherm::Error> for ConfigError {
    fn from(e: kvtherm::Error) -> Self {
        Self::Model(e)
    }
}

pub type ConfigResult<T> = std::result::Result<T, ConfigError>;

/// Raw `(section, key) -> value` entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<(String, String), String>,
}

fn section_keys(section: &str) -> Option<&'static [&'static str]> {
    KEYS.iter().find(|(s, _)| *s == section).map(|(_, k)| *k)
}

/// Resolves `section.key` or a bare key that occurs in exactly one section.
pub fn resolve_key(name: &str) -> ConfigResult<(String, String)> {
    if let Some((section, key)) = name.split_once('.') {
        let keys = section_keys(section).ok_or_else(|| ConfigError::UnknownKey {
            section: section.into(),
            key: key.into(),
        })?;
        if !keys.contains(&key) {
            return Err(ConfigError::UnknownKey { section: section.into(), key: key.into() });
        }
        return Ok((section.into(), key.into()));
    }
    let owners: Vec<&str> = KEYS.iter().filter(|(_, k)| k.contains(&name)).map(|(s, _)| *s).collect();
    match owners.as_slice() {
        [s] => Ok((s.to_string(), name.to_string())),
        _ => Err(ConfigError::UnknownKey { section: "?".into(), key: name.into() }),
    }
}

impl RawConfig {
    pub fn parse(text: &str) -> ConfigResult<Self> {
        let mut out = Self::default();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                    line: line_no,
                    message: format!("malformed section header '{line}'"),
                })?;
                let name = name.trim();
                if section_keys(name).is_none() {
                    return Err(ConfigError::UnknownSection { line: line_no, section: name.into() });
                }
                section = Some(name.into());
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                message: format!("expected key = value, got '{line}'"),
            })?;
            let sec = section.clone().ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                message: "key outside of any section".into(),
            })?;
            let key = key.trim();
            if !section_keys(&sec).unwrap_or(&[]).contains(&key) {
                return Err(ConfigError::UnknownKey { section: sec, key: key.into() });
            }
            if out.entries.insert((sec.clone(), key.into()), value.trim().into()).is_some() {
                return Err(ConfigError::DuplicateKey { section: sec, key: key.into() });
            }
        }
        Ok(out)
    }

    /// Applies `KEY=VALUE`, where `KEY` is `section.key` or an unambiguous bare key.
    pub fn apply_override(&mut self, spec: &str) -> ConfigResult<()> {
        let (name, value) = spec.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: 0,
            message: format!("override '{spec}' is not KEY=VALUE"),
        })?;
        self.set(name.trim(), value.trim())
    }

    pub fn set(&mut self, name: &str, value: &str) -> ConfigResult<()> {
        let key = resolve_key(name)?;
        self.entries.insert(key, value.into());
        Ok(())
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.entries.get(&(section.to_string(), key.to_string())).map(String::as_str)
    }

    fn number(&self, section: &str, key: &str) -> ConfigResult<Option<f64>> {
        self.get(section, key).map(|v| parse_f64(key, v)).transpose()
    }

    fn integer(&self, section: &str, key: &str) -> ConfigResult<Option<usize>> {
        self.get(section, key)
            .map(|v| {
                v.parse::<usize>().map_err(|_| ConfigError::BadValue {
                    key: key.into(),
                    value: v.into(),
                    expected: "a nonnegative integer",
                })
            })
            .transpose()
    }
}

fn parse_f64(key: &str, v: &str) -> ConfigResult<f64> {
    v.trim().parse::<f64>().map_err(|_| ConfigError::BadValue {
        key: key.into(),
        value: v.into(),
        expected: "a number",
    })
}

/// A parsed `name(k=v, ...)` call; a bare number becomes `constant(value=x)`.
struct Call<'a> {
    key: &'a str,
    raw: &'a str,
    name: String,
    args: Vec<(String, String)>,
}

impl<'a> Call<'a> {
    fn parse(key: &'a str, raw: &'a str) -> ConfigResult<Self> {
        let bad = || ConfigError::BadValue { key: key.into(), value: raw.into(), expected: "name(k=v, ...) or a number" };
        if let Ok(x) = raw.parse::<f64>() {
            return Ok(Self { key, raw, name: "constant".into(), args: vec![("value".into(), x.to_string())] });
        }
        let open = raw.find('(').ok_or_else(bad)?;
        let body = raw[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let name = raw[..open].trim().to_string();
        if name == "constant" {
            return Ok(Self { key, raw, name, args: vec![("value".into(), body.trim().into())] });
        }
        let mut args = Vec::new();
        for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').or_else(|| part.split_once(':')).ok_or_else(bad)?;
            args.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(Self { key, raw, name, args })
    }

    fn unexpected(&self, expected: &'static str) -> ConfigError {
        ConfigError::BadValue { key: self.key.into(), value: self.raw.into(), expected }
    }

    /// Named arguments, each exactly once, no extras.
    fn named(&self, names: &[&str], expected: &'static str) -> ConfigResult<Vec<f64>> {
        let given: BTreeSet<&str> = self.args.iter().map(|a| a.0.as_str()).collect();
        if given.len() != self.args.len() || given != names.iter().copied().collect() {
            return Err(self.unexpected(expected));
        }
        names
            .iter()
            .map(|n| {
                let v = &self.args.iter().find(|a| a.0 == *n).expect("checked above").1;
                parse_f64(self.key, v)
            })
            .collect()
    }

    /// `constant(x)`, also written as a bare number.
    fn constant(&self) -> ConfigResult<f64> {
        match self.args.as_slice() {
            [(_, v)] => parse_f64(self.key, v),
            _ => Err(self.unexpected("constant(x)")),
        }
    }

    fn table(&self) -> ConfigResult<Vec<(f64, f64)>> {
        self.args
            .iter()
            .map(|(z, v)| Ok((parse_f64(self.key, z)?, parse_f64(self.key, v)?)))
            .collect()
    }
}

fn theta_fn(key: &str, raw: &str) -> ConfigResult<ThetaFn> {
    let call = Call::parse(key, raw)?;
    const EXPECTED: &str = "constant(x), saturating(limit, drop), power(coef, exponent) or table(z:v, ...)";
    match call.name.as_str() {
        "constant" => Ok(ThetaFn::Constant(call.constant()?)),
        "saturating" => {
            let v = call.named(&["limit", "drop"], "saturating(limit=.., drop=..)")?;
            Ok(ThetaFn::SaturatingGamma { limit: v[0], drop: v[1] })
        }
        "power" => {
            let v = call.named(&["coef", "exponent"], "power(coef=.., exponent=..)")?;
            Ok(ThetaFn::PowerF { coef: v[0], exponent: v[1] })
        }
        "table" => Ok(ThetaFn::Tabulated(MonotoneCubic::new(&call.table()?)?)),
        _ => Err(call.unexpected(EXPECTED)),
    }
}

fn space_time_fn(key: &str, raw: &str) -> ConfigResult<SpaceTimeFn> {
    let call = Call::parse(key, raw)?;
    match call.name.as_str() {
        "constant" => Ok(SpaceTimeFn::Constant(call.constant()?)),
        "sinusoidal" => {
            let v = call.named(&["base", "amp", "modes", "decay"], "sinusoidal(base, amp, modes, decay)")?;
            Ok(SpaceTimeFn::Sinusoidal { base: v[0], amp: v[1], modes: v[2], decay: v[3] })
        }
        _ => Err(call.unexpected("constant(x) or sinusoidal(base, amp, modes, decay)")),
    }
}

fn profile(key: &str, raw: &str) -> ConfigResult<Profile> {
    let call = Call::parse(key, raw)?;
    let trig = ["offset", "amp", "modes"];
    match call.name.as_str() {
        "constant" => Ok(Profile::Constant(call.constant()?)),
        "cosine" => {
            let v = call.named(&trig, "cosine(offset, amp, modes)")?;
            Ok(Profile::Cosine { offset: v[0], amp: v[1], modes: v[2] })
        }
        "cos_squared" => {
            let v = call.named(&trig, "cos_squared(offset, amp, modes)")?;
            Ok(Profile::CosineSquared { offset: v[0], amp: v[1], modes: v[2] })
        }
        "linear" => {
            let v = call.named(&["intercept", "slope"], "linear(intercept, slope)")?;
            Ok(Profile::Linear { intercept: v[0], slope: v[1] })
        }
        _ => Err(call.unexpected("constant(x), cosine(..), cos_squared(..) or linear(..)")),
    }
}

fn piezo(raw: &str) -> ConfigResult<PiezoParams> {
    let call = Call::parse("piezo", raw)?;
    if call.name != "piezo" {
        return Err(call.unexpected("piezo(rho, d, c, b, e, eps)"));
    }
    let v = call.named(&["rho", "d", "c", "b", "e", "eps"], "piezo(rho, d, c, b, e, eps)")?;
    Ok(PiezoParams { rho: v[0], d: v[1], c_elastic: v[2], b: v[3], e: v[4], eps: v[5] })
}

fn list<T>(key: &str, raw: &str, item: impl Fn(&str) -> Option<T>, expected: &'static str) -> ConfigResult<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            item(s).ok_or_else(|| ConfigError::BadValue { key: key.into(), value: raw.into(), expected })
        })
        .collect()
}

/// Settings of the checking subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckParams {
    pub ledger: LedgerParams,
    /// Run a companion at double resolution under `verify`.
    pub companion: bool,
    pub sweep: Option<(String, Vec<String>)>,
    pub mms_cases: Vec<String>,
    pub mms_resolutions: Vec<usize>,
    pub mms_horizon: f64,
    pub mms_time_n: usize,
    pub mms_dts: Vec<f64>,
    pub probe_n: usize,
    pub probe_m_max: usize,
    pub probe: ProbeSettings,
}

impl Default for CheckParams {
    fn default() -> Self {
        Self {
            ledger: LedgerParams::default(),
            companion: true,
            sweep: None,
            mms_cases: CASES.iter().map(|s| s.to_string()).collect(),
            mms_resolutions: vec![64, 128, 256],
            mms_horizon: 0.5,
            mms_time_n: 512,
            mms_dts: vec![4e-3, 2e-3, 1e-3],
            probe_n: 2048,
            probe_m_max: 8,
            probe: ProbeSettings::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Config {
    pub sim: SimConfig,
    pub checks: CheckParams,
    pub scenario: Option<String>,
    /// Hypothesis violations and similar non-fatal findings.
    pub warnings: Vec<String>,
    pub raw: RawConfig,
}

/// Reads and resolves a configuration file, applying `overrides` on top.
pub fn parse_config(path: &Path, overrides: &[String]) -> ConfigResult<Config> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config_str(&text, overrides)
}

pub fn parse_config_str(text: &str, overrides: &[String]) -> ConfigResult<Config> {
    let mut raw = RawConfig::parse(text)?;
    for o in overrides {
        raw.apply_override(o)?;
    }
    resolve(raw)
}

/// Builds the configuration from raw entries.
pub fn resolve(raw: RawConfig) -> ConfigResult<Config> {
    let scenario_name = raw.get("run", "scenario").map(str::to_string);
    let mut sim = match &scenario_name {
        Some(name) => scenario::by_name(name)?,
        None => {
            for (section, key) in REQUIRED {
                if raw.get(section, key).is_none() {
                    return Err(ConfigError::MissingKey { section: section.into(), key: key.into() });
                }
            }
            SimConfig::new(
                Grid1D::unit(16)?,
                scenario::standard_coefficients(),
                scenario::standard_initial_data(),
                1.0,
            )
        }
    };
    // A scenario's step was chosen for its own grid; a new grid falls back to
    // the default unless dt is given explicitly.
    let n = raw.integer("grid", "n")?;
    let x_left = raw.number("grid", "x_left")?.unwrap_or(sim.grid.x_left());
    let x_right = raw.number("grid", "x_right")?.unwrap_or(sim.grid.x_right());
    let grid = Grid1D::new(x_left, x_right, n.unwrap_or(sim.grid.n()))?;
    if grid != sim.grid {
        sim.dt = None;
    }
    sim.grid = grid;

    let diffusivity = raw.number("coefficients", "diffusivity")?;
    if let Some(p) = raw.get("coefficients", "piezo") {
        sim.coeffs = piezo_to_coefficients(&piezo(p)?, diffusivity.unwrap_or(sim.coeffs.diffusivity))?;
    }
    apply_coefficients(&raw, &mut sim.coeffs)?;
    if let Some(d) = diffusivity {
        sim.coeffs.diffusivity = d;
    }

    let init = &mut sim.init;
    for (key, slot) in [("u0", &mut init.u0), ("u0t", &mut init.u0t), ("theta0", &mut init.theta0)] {
        if let Some(v) = raw.get("initial", key) {
            *slot = profile(key, v)?;
        }
    }

    if let Some(t) = raw.number("run", "horizon")? {
        sim.horizon = t;
    }
    if let Some(dt) = raw.number("run", "dt")? {
        sim.dt = Some(dt);
    }
    if let Some(s) = raw.integer("run", "snapshot_stride")? {
        sim.snapshot_stride = Some(s);
    }
    if let Some(s) = raw.integer("run", "functional_stride")? {
        sim.functional_stride = s;
    }
    if let Some(l) = raw.number("run", "threshold")? {
        sim.threshold = l;
    }
    sim.validate()?;

    let mut warnings = Vec::new();
    let lattice = Lattice::default().with_domain(sim.grid.x_left(), sim.grid.x_right(), sim.horizon);
    let report = sim.coeffs.flag_from_validation(&lattice)?;
    if !report.passed() {
        let tags: Vec<&str> = report.failed().map(|h| h.tag()).collect();
        warnings.push(format!(
            "coefficients violate [{}]; run flagged outside-theorem",
            tags.join(", ")
        ));
    }
    build_initial_data(&sim.init, &sim.grid)?;

    let checks = check_params(&raw)?;
    Ok(Config { sim, checks, scenario: scenario_name, warnings, raw })
}

fn apply_coefficients(raw: &RawConfig, c: &mut CoefficientSet) -> ConfigResult<()> {
    if let Some(v) = raw.get("coefficients", "gamma") {
        c.gamma = theta_fn("gamma", v)?;
    }
    if let Some(v) = raw.get("coefficients", "f") {
        c.f = theta_fn("f", v)?;
    }
    if let Some(v) = raw.get("coefficients", "a") {
        c.a = space_time_fn("a", v)?;
    }
    for (key, slot) in [
        ("gamma_lower", &mut c.gamma_lower),
        ("gamma_upper", &mut c.gamma_upper),
        ("f_bound", &mut c.f_bound),
        ("alpha", &mut c.alpha),
    ] {
        if let Some(v) = raw.number("coefficients", key)? {
            *slot = v;
        }
    }
    Ok(())
}

pub fn check_params(raw: &RawConfig) -> ConfigResult<CheckParams> {
    let mut out = CheckParams::default();
    let l = &mut out.ledger;
    if let Some(k) = raw.integer("checks", "k_max")? {
        l.k_max = k;
    }
    for (key, slot) in [("p", &mut l.p), ("q", &mut l.q), ("r", &mut l.r)] {
        if let Some(v) = raw.number("checks", key)? {
            *slot = v;
        }
    }
    if let Some(v) = raw.get("checks", "companion") {
        out.companion = match v {
            "true" | "yes" | "1" => true,
            "false" | "no" | "0" => false,
            _ => {
                return Err(ConfigError::BadValue { key: "companion".into(), value: v.into(), expected: "true or false" })
            }
        };
    }
    match (raw.get("checks", "sweep_param"), raw.get("checks", "sweep_values")) {
        (Some(p), Some(v)) => {
            resolve_key(p)?;
            let values = list("sweep_values", v, |s| Some(s.to_string()), "a comma-separated list")?;
            out.sweep = Some((p.to_string(), values));
        }
        (None, None) => {}
        (Some(_), None) => {
            return Err(ConfigError::MissingKey { section: "checks".into(), key: "sweep_values".into() })
        }
        (None, Some(_)) => {
            return Err(ConfigError::MissingKey { section: "checks".into(), key: "sweep_param".into() })
        }
    }
    if let Some(v) = raw.get("checks", "mms_case") {
        out.mms_cases = list("mms_case", v, |s| Some(s.to_string()), "a comma-separated list of case ids")?;
    }
    if let Some(v) = raw.get("checks", "mms_resolutions") {
        out.mms_resolutions = list("mms_resolutions", v, |s| s.parse().ok(), "a comma-separated list of integers")?;
    }
    if let Some(v) = raw.get("checks", "mms_dts") {
        out.mms_dts = list("mms_dts", v, |s| s.parse().ok(), "a comma-separated list of numbers")?;
    }
    if let Some(v) = raw.number("checks", "mms_horizon")? {
        out.mms_horizon = v;
    }
    if let Some(v) = raw.integer("checks", "mms_time_n")? {
        out.mms_time_n = v;
    }
    if let Some(v) = raw.integer("checks", "probe_n")? {
        out.probe_n = v;
    }
    if let Some(v) = raw.integer("checks", "probe_m_max")? {
        out.probe_m_max = v;
    }
    let pr = &mut out.probe;
    if let Some(v) = raw.number("checks", "ehrling_p")? {
        pr.ehrling_p = v;
    }
    if let Some(v) = raw.number("checks", "eta")? {
        pr.eta = v;
    }
    let gn_p = raw.number("checks", "gn_p")?.unwrap_or(pr.gn.p);
    let gn_q = raw.number("checks", "gn_q")?.unwrap_or(pr.gn.q);
    pr.gn = GnExponents { p: gn_p, q: gn_q, lambda: gn_lambda(gn_p, gn_q) };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[grid]\nn = 128\n[run]\nscenario = standard\n";

    #[test]
    fn minimal_scenario_config_takes_defaults() {
        let c = parse_config_str(MINIMAL, &[]).unwrap();
        assert_eq!(c.sim.grid.n(), 128);
        assert_eq!(c.sim.dt, None);
        assert!((c.sim.dt() - 0.25 / 128.0).abs() < 1e-15);
        assert_eq!(c.sim.threshold, 1e6);
        assert_eq!(c.checks.ledger, LedgerParams { p: 0.5, q: 3.0, r: 2.0, k_max: 6 });
        assert!(!c.sim.coeffs.outside_theorem);
        assert!(c.warnings.is_empty());
    }

    #[test]
    fn alpha_above_limit_is_flagged_not_rejected() {
        let c = parse_config_str(&format!("{MINIMAL}[coefficients]\nalpha = 0.9\n"), &[]).unwrap();
        assert!(c.sim.coeffs.outside_theorem);
        assert!(c.warnings[0].contains("alpha-range"), "{:?}", c.warnings);
    }

    #[test]
    fn tiny_grid_is_rejected() {
        let e = parse_config_str("[grid]\nn = 4\n[run]\nscenario = standard\n", &[]).unwrap_err();
        assert!(e.to_string().contains("n below minimum 8"), "{e}");
    }

    #[test]
    fn unknown_keys_and_sections_are_errors() {
        assert!(matches!(
            parse_config_str(&format!("{MINIMAL}[grid]\nm = 3\n"), &[]),
            Err(ConfigError::UnknownKey { .. })
        ));
        assert!(matches!(parse_config_str("[mesh]\nn = 3\n", &[]), Err(ConfigError::UnknownSection { .. })));
        assert!(matches!(
            parse_config_str(MINIMAL, &["grid.m=3".into()]),
            Err(ConfigError::UnknownKey { .. })
        ));
    }

    #[test]
    fn missing_keys_without_scenario() {
        let e = parse_config_str("[grid]\nn = 64\n", &[]).unwrap_err();
        assert_eq!(e, ConfigError::MissingKey { section: "coefficients".into(), key: "gamma".into() });
    }

    #[test]
    fn unparsable_numbers() {
        let e = parse_config_str(&format!("{MINIMAL}[run]\n"), &["horizon=abc".into()]).unwrap_err();
        assert!(matches!(e, ConfigError::BadValue { .. }), "{e}");
    }

    #[test]
    fn explicit_config_round_trip() {
        let text = "
[grid]
n = 128
[coefficients]
gamma = saturating(limit=1, drop=0.5)
a = sinusoidal(base=2, amp=1, modes=1, decay=1)
f = power(coef=2, exponent=0.5)
gamma_lower = 0.49
gamma_upper = 1.01
f_bound = 2
alpha = 0.5
diffusivity = 1
[initial]
u0 = cosine(offset=0, amp=0.1, modes=1)
u0t = 0
theta0 = cos_squared(offset=1, amp=1, modes=1)
[run]
horizon = 0.5
[checks]
k_max = 4
";
        let c = parse_config_str(text, &[]).unwrap();
        assert!(!c.sim.coeffs.outside_theorem, "{:?}", c.warnings);
        assert_eq!(c.checks.ledger.k_max, 4);
        assert_eq!(c.sim.horizon, 0.5);
        assert!(matches!(c.sim.init.u0t, Profile::Constant(z) if z == 0.0));
    }

    #[test]
    fn overrides_take_precedence() {
        let c = parse_config_str(MINIMAL, &["n=96".into(), "run.horizon=0.25".into()]).unwrap();
        assert_eq!(c.sim.grid.n(), 96);
        assert_eq!(c.sim.horizon, 0.25);
    }

    #[test]
    fn piezo_mapping_is_flagged() {
        let c = parse_config_str(
            &format!("{MINIMAL}[coefficients]\npiezo = piezo(rho=1, d=1, c=1, b=1, e=0, eps=1)\n"),
            &[],
        )
        .unwrap();
        assert!(c.sim.coeffs.outside_theorem);
        let e = parse_config_str(
            &format!("{MINIMAL}[coefficients]\npiezo = piezo(rho=0, d=1, c=1, b=1, e=0, eps=1)\n"),
            &[],
        )
        .unwrap_err();
        assert!(matches!(e, ConfigError::Model(kvtherm::Error::InvalidPhysicalParameter { .. })));
    }

    #[test]
    fn tabulated_gamma() {
        let c = parse_config_str(&format!("{MINIMAL}[coefficients]\ngamma = table(0:0.5, 1:0.75, 10:1)\n"), &[]).unwrap();
        assert!((c.sim.coeffs.gamma.eval(1.0) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn incompatible_initial_data_rejected() {
        let e = parse_config_str(&format!("{MINIMAL}[initial]\nu0 = linear(intercept=0, slope=1)\n"), &[]).unwrap_err();
        assert!(matches!(e, ConfigError::Model(kvtherm::Error::IncompatibleInitialData { .. })), "{e}");
    }

    #[test]
    fn sweep_keys_must_pair() {
        assert!(parse_config_str(&format!("{MINIMAL}[checks]\nsweep_param = alpha\n"), &[]).is_err());
        let c = parse_config_str(
            &format!("{MINIMAL}[checks]\nsweep_param = alpha\nsweep_values = 0.3, 0.5\n"),
            &[],
        )
        .unwrap();
        assert_eq!(c.checks.sweep, Some(("alpha".into(), vec!["0.3".into(), "0.5".into()])));
    }
}
