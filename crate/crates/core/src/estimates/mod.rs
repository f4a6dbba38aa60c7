//! Functionals of the global existence argument evaluated on trajectories,
//! the abstract Moser recursion, Hölder fitting, interpolation probes and the
//! aggregated ledger.

pub mod energy;
pub mod hoelder;
pub mod ladder;
pub mod ledger;
pub mod moser;
pub mod probes;

pub use energy::{energy_identity_residual, gronwall_check, mechanical_energy};
pub use hoelder::{hoelder_fit, hoelder_fit_states, HoelderFit, HoelderOutcome};
pub use ladder::{
    sup_velocity_series, theta_h1_series, theta_lq_time_integral, weighted_theta_dissipation,
};
pub use ledger::{build_ledger, EstimateLedger, LedgerParams, Verdict};
pub use moser::{check_moser_recursion, moser_cascade, moser_property_trial, MoserSequence};
pub use probes::{ehrling_probe, gn_lambda, gn_probe};

/// Magnitudes below this are round-off for the refinement and saturation
/// heuristics.
pub const NOISE_FLOOR: f64 = 1e-12;

/// Relative difference `|a - b| / max(|a|, |b|)`; zero when both are below
/// [`NOISE_FLOOR`].
pub fn relative_drift(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < NOISE_FLOOR {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
