//! The abstract Moser recursion `M_k <= max{A^{2^k}, B^k M_{k-1}^2}` and the
//! cascade `M_k = sup_t int v^{2^k}` measured on trajectories. Everything is
//! carried in log-space because `2^k` overflows quickly.

use crate::error::{Error, Result};
use crate::grid::{sup_norm, Field};
use crate::solver::State;

/// `ln int |phi|^p`, computed as `p ln sup|phi| + ln int (|phi| / sup)^p`.
pub fn log_lp_integral(phi: &Field, p: f64) -> f64 {
    let sup = sup_norm(phi);
    if sup == 0.0 {
        return f64::NEG_INFINITY;
    }
    let dx = phi.grid().dx();
    let s: f64 = phi.values().iter().map(|v| (v.abs() / sup).powf(p)).sum();
    p * sup.ln() + (s * dx).ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoserSequence {
    /// `ln M_k` for `k = 1..=K` (`-inf` when `M_k = 0`).
    pub log_m: Vec<f64>,
    pub a: f64,
    pub b: f64,
    /// `sup_t ||v(t)||_inf` over the same states.
    pub sup_velocity: f64,
}

impl MoserSequence {
    pub fn k_max(&self) -> usize {
        self.log_m.len()
    }

    /// `M_k^{1/2^k}` for `k = 1..=K`.
    pub fn roots(&self) -> Vec<f64> {
        self.log_m
            .iter()
            .enumerate()
            .map(|(i, l)| (l / 2f64.powi(i as i32 + 1)).exp())
            .collect()
    }

    /// `M_K^{1/2^K}`, the estimate of the `L^inf` bound.
    pub fn plateau(&self) -> f64 {
        *self.roots().last().expect("K >= 2")
    }

    /// `|plateau - sup| / sup`, zero for a vanishing velocity.
    pub fn plateau_gap(&self) -> f64 {
        if self.sup_velocity == 0.0 {
            0.0
        } else {
            (self.plateau() - self.sup_velocity).abs() / self.sup_velocity
        }
    }
}

/// Measures `M_1..M_K` on the given states with `A = (1 + |Omega|) sup ||v||_inf + 2`
/// and fits the smallest `B >= 1` for which the recursion premise holds.
pub fn moser_cascade(states: &[State], k_max: usize) -> Result<MoserSequence> {
    if k_max < 2 {
        return Err(Error::InvalidConfiguration(format!("K must be at least 2, got {k_max}")));
    }
    let first = states
        .first()
        .ok_or(Error::InsufficientSamples { needed: 1, got: 0 })?;
    let omega = first.grid().length();
    let sup_velocity = states.iter().fold(0.0, |m: f64, s| m.max(sup_norm(&s.v)));
    let log_m: Vec<f64> = (1..=k_max)
        .map(|k| {
            let p = 2f64.powi(k as i32);
            states
                .iter()
                .map(|s| log_lp_integral(&s.v, p))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let a = (1.0 + omega) * sup_velocity + 2.0;
    let ln_a = a.ln();
    let mut ln_b: f64 = 0.0;
    for k in 2..=k_max {
        let (lk, lprev) = (log_m[k - 1], log_m[k - 2]);
        if lk == f64::NEG_INFINITY || lk <= 2f64.powi(k as i32) * ln_a {
            continue;
        }
        ln_b = ln_b.max((lk - 2.0 * lprev) / k as f64);
    }
    Ok(MoserSequence { log_m, a, b: ln_b.exp(), sup_velocity })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoserCheck {
    pub premise_holds: bool,
    /// `M_k^{1/2^k} <= B^2 max{A, M_1, M_1^{1/2}}` for all `k`.
    pub conclusion_holds: bool,
    /// The same bound without the `M_1^{1/2}` term. It can fail under the
    /// premise when `A < M_1^{1/2} < 1`.
    pub conclusion_without_root_holds: bool,
}

/// Checks a positive sequence `M_1..M_K` against the recursion.
pub fn check_moser_recursion(a: f64, b: f64, m: &[f64]) -> Result<MoserCheck> {
    for (i, &v) in m.iter().enumerate() {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidSequence { index: i + 1, value: v });
        }
    }
    let logs: Vec<f64> = m.iter().map(|v| v.ln()).collect();
    check_moser_recursion_log(a, b, &logs)
}

/// [`check_moser_recursion`] with the sequence given as `ln M_k`.
pub fn check_moser_recursion_log(a: f64, b: f64, log_m: &[f64]) -> Result<MoserCheck> {
    if log_m.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: log_m.len() });
    }
    if !(a >= 0.0 && a.is_finite() && b >= 1.0 && b.is_finite()) {
        return Err(Error::InvalidConfiguration(format!("need A >= 0 and B >= 1, got A = {a}, B = {b}")));
    }
    for (i, &l) in log_m.iter().enumerate() {
        if !l.is_finite() {
            return Err(Error::InvalidSequence { index: i + 1, value: l.exp() });
        }
    }
    let ln_a = a.ln();
    let ln_b = b.ln();
    let slack = |rhs: f64| 1e-12 * (1.0 + rhs.abs());

    let premise_holds = (2..=log_m.len()).all(|k| {
        let rhs = (2f64.powi(k as i32) * ln_a).max(k as f64 * ln_b + 2.0 * log_m[k - 2]);
        log_m[k - 1] <= rhs + slack(rhs)
    });

    let l1 = log_m[0];
    let bound_with_root = 2.0 * ln_b + ln_a.max(l1).max(0.5 * l1);
    let bound_without_root = 2.0 * ln_b + ln_a.max(l1);
    let holds = |bound: f64| {
        log_m.iter().enumerate().all(|(i, l)| {
            let root = l / 2f64.powi(i as i32 + 1);
            root <= bound + 1e-12 * (1.0 + bound.abs())
        })
    };
    Ok(MoserCheck {
        premise_holds,
        conclusion_holds: holds(bound_with_root),
        conclusion_without_root_holds: holds(bound_without_root),
    })
}

/// A random `(A, B, ln M)` triple satisfying the recursion premise: each
/// `ln M_k` sits a random nonnegative amount below the premise bound.
/// `M_1` ranges over `e^{-12}..e^{12}` so both sides of `M_1 = 1` are covered,
/// and about a fifth of the draws use `A = 0`.
pub fn random_premise_triple<R: rand::Rng + ?Sized>(rng: &mut R) -> (f64, f64, Vec<f64>) {
    let k_max = rng.gen_range(2..=8);
    let a: f64 = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..10.0) };
    let b: f64 = rng.gen_range(1.0..5.0);
    let (ln_a, ln_b) = (a.ln(), b.ln());
    let mut log_m = vec![rng.gen_range(-12.0..12.0)];
    for k in 2..=k_max {
        let prev = log_m[k - 2];
        let rhs = (2f64.powi(k as i32) * ln_a).max(k as f64 * ln_b + 2.0 * prev);
        let gap = if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.0..4.0) };
        log_m.push(rhs - gap);
    }
    (a, b, log_m)
}

/// Outcome of a randomized trial of the Moser recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialSummary {
    pub trials: usize,
    /// Premise held but the conclusion failed.
    pub violations: usize,
    /// Premise held but the bound without the `M_1^{1/2}` term failed.
    pub violations_without_root: usize,
}

pub fn moser_property_trial(trials: usize, seed: u64) -> TrialSummary {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = TrialSummary { trials, violations: 0, violations_without_root: 0 };
    for _ in 0..trials {
        let (a, b, log_m) = random_premise_triple(&mut rng);
        let c = check_moser_recursion_log(a, b, &log_m).expect("generated triples are valid");
        debug_assert!(c.premise_holds);
        if c.premise_holds && !c.conclusion_holds {
            out.violations += 1;
        }
        if c.premise_holds && !c.conclusion_without_root_holds {
            out.violations_without_root += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;

    #[test]
    fn constant_sequence_holds_with_equality() {
        let c = check_moser_recursion(0.0, 1.0, &[1.0; 6]).unwrap();
        assert!(c.premise_holds && c.conclusion_holds && c.conclusion_without_root_holds);
    }

    #[test]
    fn unrolled_recursion_satisfies_conclusion() {
        let (a, b) = (2.0_f64, 3.0_f64);
        let mut m = vec![1.0_f64];
        for k in 2..=6 {
            let prev = *m.last().unwrap();
            m.push(b.powi(k) * prev * prev);
        }
        let logs: Vec<f64> = m.iter().map(|v| v.ln()).collect();
        let c = check_moser_recursion_log(a, b, &logs).unwrap();
        assert!(c.premise_holds && c.conclusion_holds);
        for (i, l) in logs.iter().enumerate() {
            assert!((l / 2f64.powi(i as i32 + 1)).exp() <= 18.0);
        }
    }

    #[test]
    fn constructed_violation_breaks_premise() {
        let c = check_moser_recursion(0.0, 1.0, &[1.0, 5.0]).unwrap();
        assert!(!c.premise_holds);
    }

    #[test]
    fn root_term_is_needed_for_small_first_moment() {
        // A = 0, B = 1, M_1 = 1/4 and M_k = M_{k-1}^2 satisfies the premise,
        // yet M_k^{1/2^k} = 1/2 exceeds B^2 max{A, M_1} = 1/4.
        let mut m = vec![0.25_f64];
        for _ in 1..5 {
            let prev = *m.last().unwrap();
            m.push(prev * prev);
        }
        let c = check_moser_recursion(0.0, 1.0, &m).unwrap();
        assert!(c.premise_holds);
        assert!(c.conclusion_holds);
        assert!(!c.conclusion_without_root_holds);
    }

    #[test]
    fn generated_triples_satisfy_premise() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let (a, b, m) = random_premise_triple(&mut rng);
            assert!(check_moser_recursion_log(a, b, &m).unwrap().premise_holds);
        }
    }

    #[test]
    fn nonpositive_entries_rejected() {
        assert_eq!(
            check_moser_recursion(1.0, 1.0, &[1.0, 0.0, 2.0]),
            Err(Error::InvalidSequence { index: 2, value: 0.0 })
        );
        assert!(check_moser_recursion(1.0, 1.0, &[1.0]).is_err());
        assert!(check_moser_recursion(1.0, 0.5, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn constant_velocity_plateau_is_exact() {
        let g = Grid1D::unit(64).unwrap();
        let s = State::new(0.0, Field::zeros(g), Field::constant(g, 0.7), Field::zeros(g));
        let seq = moser_cascade(&[s], 6).unwrap();
        for r in seq.roots() {
            assert!((r - 0.7).abs() < 1e-12);
        }
        assert!(seq.plateau_gap() < 1e-12);
    }

    #[test]
    fn zero_velocity_plateau_is_zero() {
        let g = Grid1D::unit(64).unwrap();
        let s = State::new(0.0, Field::zeros(g), Field::zeros(g), Field::zeros(g));
        let seq = moser_cascade(&[s], 6).unwrap();
        assert_eq!(seq.plateau(), 0.0);
        assert_eq!(seq.b, 1.0);
    }

    #[test]
    fn log_space_survives_large_powers() {
        let g = Grid1D::unit(64).unwrap();
        let v = Field::constant(g, 1e10);
        let l = log_lp_integral(&v, 64.0);
        assert!((l - 64.0 * 1e10_f64.ln()).abs() < 1e-9);
    }
}
