//! Aggregates every estimate check of a trajectory into one report.

use std::fmt;
use std::io::{self, Write};

use crate::model::{validate_coefficients, Hypothesis, Lattice};
use crate::solver::{Termination, Trajectory};

use super::energy::{energy_identity_residual, gronwall_check};
use super::hoelder::{hoelder_fit_states, HoelderOutcome};
use super::ladder::{
    sup_velocity_series, theta_h1_series, theta_lq_time_integral, weighted_theta_dissipation,
    RefinementVerdict,
};
use super::moser::{check_moser_recursion_log, moser_cascade};
use super::relative_drift;

/// Allowed relative change of a bounded functional under one refinement.
pub const REFINEMENT_TOLERANCE: f64 = 0.05;
/// Allowed relative change of the Hölder prefactor under one refinement.
pub const HOELDER_TOLERANCE: f64 = 0.2;
/// Allowed gap between the Moser plateau and the sup norm.
pub const PLATEAU_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
    /// Needs a companion run at double resolution.
    Unverified,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::NotApplicable => "not-applicable",
            Self::Unverified => "unverified-single-resolution",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LedgerCheck {
    pub name: &'static str,
    pub anchor: &'static str,
    pub verdict: Verdict,
    pub max_value: f64,
    pub bound: f64,
    pub margin: f64,
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerParams {
    /// Weight exponent of the dissipation integral.
    pub p: f64,
    pub q: f64,
    pub r: f64,
    /// Depth of the Moser cascade.
    pub k_max: usize,
}

impl Default for LedgerParams {
    fn default() -> Self {
        Self { p: 0.5, q: 3.0, r: 2.0, k_max: 6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateLedger {
    pub checks: Vec<LedgerCheck>,
    pub termination: Termination,
    pub outside_theorem: bool,
}

impl EstimateLedger {
    /// All applicable, verified checks pass and the run completed.
    pub fn overall_pass(&self) -> bool {
        self.termination == Termination::Completed
            && self.checks.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&LedgerCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "check,anchor,verdict,max_value,bound,margin")?;
        for c in &self.checks {
            writeln!(
                w,
                "{},{},{},{:.10e},{:.10e},{:.10e}",
                c.name, c.anchor, c.verdict, c.max_value, c.bound, c.margin
            )?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            out.push_str(&format!(
                "{:<width$}  {:<28}  max={:<12.5e} bound={:<12.5e} margin={:<12.5e} {}\n",
                c.name,
                c.verdict.to_string(),
                c.max_value,
                c.bound,
                c.margin,
                c.note,
            ));
        }
        let term = match self.termination {
            Termination::Completed => "completed".to_string(),
            Termination::Diverged { t_est } => format!("diverged at t = {t_est}"),
        };
        out.push_str(&format!(
            "termination: {term}{}\noverall: {}\n",
            if self.outside_theorem { " (coefficients outside theorem)" } else { "" },
            if self.overall_pass() { "PASS" } else { "FAIL" }
        ));
        out
    }
}

fn check(name: &'static str, anchor: &'static str) -> LedgerCheck {
    LedgerCheck {
        name,
        anchor,
        verdict: Verdict::Pass,
        max_value: 0.0,
        bound: 0.0,
        margin: 0.0,
        note: String::new(),
    }
}

fn refinement(verdict: RefinementVerdict) -> Verdict {
    match verdict {
        RefinementVerdict::Pass => Verdict::Pass,
        RefinementVerdict::Fail => Verdict::Fail,
        RefinementVerdict::Unverified => Verdict::Unverified,
    }
}

/// Runs every check. `companion` is the same run at double resolution; checks
/// that need it are reported unverified when it is absent.
pub fn build_ledger(traj: &Trajectory, params: &LedgerParams, companion: Option<&Trajectory>) -> EstimateLedger {
    let coeffs = &traj.coeffs;
    let mut checks = Vec::new();

    let lattice = Lattice::default().with_domain(
        traj.grid.x_left(),
        traj.grid.x_right(),
        traj.horizon.max(10.0),
    );
    let mut hyp = check(
        "hypotheses",
        "c_gamma < gamma < C_gamma; gamma'' <= 0; f(0) = 0; |f'| <= C_f; |f| <= C_f (1+zeta)^alpha; 0 < alpha < 5/6; a > 0",
    );
    let mut f_zero_ok = true;
    let outside = match validate_coefficients(coeffs, &lattice) {
        Ok(report) => {
            f_zero_ok = report.get(Hypothesis::FZero).passed;
            let worst = report
                .checks
                .iter()
                .filter_map(|c| c.worst.map(|w| w.1))
                .fold(f64::NEG_INFINITY, f64::max);
            hyp.max_value = worst;
            hyp.margin = -worst;
            if !report.passed() {
                hyp.verdict = Verdict::NotApplicable;
                let tags: Vec<&str> = report.failed().map(|h| h.tag()).collect();
                hyp.note = format!("violated: {}", tags.join(" "));
            }
            coeffs.outside_theorem || !report.passed()
        }
        Err(e) => {
            hyp.verdict = Verdict::Fail;
            hyp.note = e.to_string();
            true
        }
    };
    checks.push(hyp);

    let mut energy = check("energy-identity", "dy/dt = 1/2 int a_t u_x^2 + [u_t f(theta)]");
    match energy_identity_residual(traj) {
        Ok(res) => {
            let scale = traj.records.iter().fold(0.0, |m: f64, r| m.max(r.a_t_term.abs()))
                + traj.records.iter().fold(0.0, |m: f64, r| m.max(r.boundary_work.abs()))
                + traj.records.iter().fold(0.0, |m: f64, r| m.max(r.dissipation.abs()));
            energy.max_value = res.max_abs();
            energy.bound = 0.01 * scale;
            energy.margin = energy.bound - energy.max_value;
            energy.verdict = if energy.max_value <= energy.bound { Verdict::Pass } else { Verdict::Fail };
            energy.note = format!("without boundary work: {:.3e}", res.max_abs_without_boundary());
        }
        Err(e) => {
            energy.verdict = Verdict::Fail;
            energy.note = e.to_string();
        }
    }
    checks.push(energy);

    let g = gronwall_check(traj);
    let mut gron = check("gronwall-envelope", "y(t) <= y(0) exp(c1^2 t)");
    gron.max_value = g.max_ratio;
    gron.bound = 1.0;
    gron.margin = g.margin;
    gron.verdict = if g.passed { Verdict::Pass } else { Verdict::Fail };
    gron.note = format!("c1 = {:.4}", g.c1);
    checks.push(gron);

    let mut pos = check("theta-positivity", "theta >= -1e-8 (1 + sup theta)");
    let worst = traj.worst_positivity_violation();
    pos.max_value = traj.records.iter().fold(0.0, |m: f64, r| m.max(-r.theta_min));
    pos.bound = traj
        .records
        .iter()
        .fold(f64::INFINITY, |m: f64, r| m.min(1e-8 * (1.0 + r.theta_max.max(0.0))));
    pos.margin = -worst;
    pos.verdict = if !f_zero_ok {
        Verdict::NotApplicable
    } else if worst <= 0.0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    checks.push(pos);

    let states = &traj.snapshots;
    let comp_states = companion.map(|c| &c.snapshots);

    let mut wd = check("weighted-dissipation", "int_0^T int (theta+1)^(p-2) theta_x^2 <= C");
    match weighted_theta_dissipation(states, params.p) {
        Ok(w) => {
            wd.max_value = w.value;
            wd.bound = 10.0 * w.first_quarter;
            wd.margin = wd.bound - w.last_quarter;
            wd.verdict = if w.passed() { Verdict::Pass } else { Verdict::Fail };
            wd.note = format!("p = {}", params.p);
            if let Some(Ok(cw)) = comp_states.map(|cs| weighted_theta_dissipation(cs, params.p)) {
                let d = relative_drift(w.value, cw.value);
                wd.note.push_str(&format!("; refinement drift {d:.3e}"));
                if d >= REFINEMENT_TOLERANCE {
                    wd.verdict = Verdict::Fail;
                }
            }
        }
        Err(e) => {
            wd.verdict = Verdict::Fail;
            wd.note = e.to_string();
        }
    }
    checks.push(wd);

    let mut lq = check("theta-lq-integral", "int_0^T ||theta+1||_q^r <= C with r < 2q/(q-1)");
    match theta_lq_time_integral(states, params.q, params.r) {
        Ok(l) => {
            lq.max_value = l.integral.value;
            lq.bound = 10.0 * l.integral.first_quarter;
            lq.margin = lq.bound - l.integral.last_quarter;
            lq.verdict = if l.integral.passed() { Verdict::Pass } else { Verdict::Fail };
            lq.note = format!("q = {}, r = {}", params.q, params.r);
            if !l.in_theorem {
                lq.verdict = Verdict::NotApplicable;
                lq.note.push_str("; r >= 2q/(q-1)");
            }
            if let Some(Ok(cl)) = comp_states.map(|cs| theta_lq_time_integral(cs, params.q, params.r)) {
                let d = relative_drift(l.integral.value, cl.integral.value);
                lq.note.push_str(&format!("; refinement drift {d:.3e}"));
                if d >= REFINEMENT_TOLERANCE && lq.verdict == Verdict::Pass {
                    lq.verdict = Verdict::Fail;
                }
            }
        }
        Err(e) => {
            lq.verdict = Verdict::Fail;
            lq.note = e.to_string();
        }
    }
    checks.push(lq);

    let mut mo = check("moser-cascade", "M_k <= max{A^(2^k); B^k M_(k-1)^2} and M_K^(1/2^K) ~ sup |u_t|");
    match moser_cascade(states, params.k_max) {
        Ok(seq) => {
            mo.max_value = seq.plateau();
            mo.bound = seq.sup_velocity;
            mo.margin = PLATEAU_TOLERANCE - seq.plateau_gap();
            let logic = if seq.log_m.iter().all(|l| l.is_finite()) {
                check_moser_recursion_log(seq.a, seq.b, &seq.log_m).ok()
            } else {
                None
            };
            let logic_ok = logic.is_none_or(|c| !c.premise_holds || c.conclusion_holds);
            mo.verdict = if logic_ok && seq.plateau_gap() <= PLATEAU_TOLERANCE {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            mo.note = format!("A = {:.4}, B = {:.4}, plateau gap {:.3e}", seq.a, seq.b, seq.plateau_gap());
        }
        Err(e) => {
            mo.verdict = Verdict::Fail;
            mo.note = e.to_string();
        }
    }
    checks.push(mo);

    let sv = sup_velocity_series(traj, companion);
    let mut sup = check("sup-velocity", "||u_t(t)||_inf <= C");
    sup.max_value = sv.max;
    sup.bound = sv.max * (1.0 + REFINEMENT_TOLERANCE);
    sup.margin = REFINEMENT_TOLERANCE - sv.drift.unwrap_or(0.0);
    sup.verdict = refinement(sv.verdict);
    if let Some(d) = sv.drift {
        sup.note = format!("refinement drift {d:.3e}");
    }
    checks.push(sup);

    let mut ho = check("hoelder-modulus", "|u_t(x1 t1) - u_t(x2 t2)| <= C (|dx|^beta + |dt|^(beta/2))");
    match hoelder_fit_states(states) {
        Ok(HoelderOutcome::FieldConstant) => {
            ho.note = "field constant".into();
        }
        Ok(HoelderOutcome::Fitted(fit)) => {
            ho.max_value = fit.mu_hat;
            ho.bound = fit.mu_hat;
            let sane = fit.beta_hat > 0.0 && fit.beta_hat <= 1.0 && fit.mu_hat.is_finite();
            ho.note = format!("beta = {:.4}, R^2 = {:.4}", fit.beta_hat, fit.r_squared);
            ho.verdict = if !sane { Verdict::Fail } else { Verdict::Unverified };
            match comp_states.map(|cs| hoelder_fit_states(cs)) {
                Some(Ok(HoelderOutcome::Fitted(cf))) if sane => {
                    let d = relative_drift(fit.mu_hat, cf.mu_hat);
                    ho.bound = cf.mu_hat;
                    ho.margin = HOELDER_TOLERANCE - d;
                    ho.note.push_str(&format!("; mu drift {d:.3e}"));
                    ho.verdict = if d < HOELDER_TOLERANCE { Verdict::Pass } else { Verdict::Fail };
                }
                Some(Ok(HoelderOutcome::FieldConstant)) if sane => ho.verdict = Verdict::Fail,
                _ => {}
            }
        }
        Err(e) => {
            ho.verdict = Verdict::Unverified;
            ho.note = e.to_string();
        }
    }
    checks.push(ho);

    let h1 = theta_h1_series(traj);
    let mut th1 = check("theta-h1", "int theta_x^2 <= C");
    th1.max_value = h1.max;
    th1.bound = h1.c * (h1.rate * traj.horizon).exp();
    th1.margin = th1.bound - th1.max_value;
    th1.verdict = if h1.passed { Verdict::Pass } else { Verdict::Fail };
    th1.note = format!("envelope {:.4e} exp({:.4} t)", h1.c, h1.rate);
    if let Some(c) = companion {
        let d = relative_drift(h1.max, theta_h1_series(c).max);
        th1.note.push_str(&format!("; refinement drift {d:.3e}"));
        if d >= REFINEMENT_TOLERANCE {
            th1.verdict = Verdict::Fail;
        }
    }
    checks.push(th1);

    let mut ext = check("extensibility", "||theta||_W12 stays below the blow-up threshold");
    ext.max_value = traj.max_blowup();
    ext.bound = traj.threshold;
    ext.margin = ext.bound - ext.max_value;
    ext.verdict = match traj.termination {
        Termination::Completed => Verdict::Pass,
        Termination::Diverged { t_est } => {
            ext.note = format!("diverged at t = {t_est}");
            Verdict::Fail
        }
    };
    checks.push(ext);

    if outside {
        for c in checks.iter_mut() {
            if matches!(
                c.name,
                "weighted-dissipation" | "theta-lq-integral" | "moser-cascade" | "sup-velocity" | "hoelder-modulus" | "theta-h1"
            ) {
                c.note = format!("outside theorem, measured {}: {}", c.verdict, c.note);
                c.verdict = Verdict::NotApplicable;
            }
        }
    }

    EstimateLedger { checks, termination: traj.termination, outside_theorem: outside }
}
