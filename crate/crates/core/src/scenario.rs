//! Built-in scenarios.

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::model::{piezo_to_coefficients, CoefficientSet, InitialData, PiezoParams, Profile, SpaceTimeFn, ThetaFn};
use crate::solver::SimConfig;

pub const NAMES: [&str; 6] = ["standard", "standard-static", "zero", "decoupled", "blowup-probe", "piezo-linear"];

/// `gamma = 1 - 1/(2(1+zeta))`, `a = 2 + sin(pi x) e^{-t}`,
/// `f = 2((1+zeta)^{1/2} - 1)`, `alpha = 1/2`, `D = 1`.
pub fn standard_coefficients() -> CoefficientSet {
    CoefficientSet {
        gamma: ThetaFn::SaturatingGamma { limit: 1.0, drop: 0.5 },
        a: SpaceTimeFn::Sinusoidal { base: 2.0, amp: 1.0, modes: 1.0, decay: 1.0 },
        f: ThetaFn::PowerF { coef: 2.0, exponent: 0.5 },
        gamma_lower: 0.49,
        gamma_upper: 1.01,
        f_bound: 2.0,
        alpha: 0.5,
        diffusivity: 1.0,
        outside_theorem: false,
    }
}

/// `u0 = cos(pi x)`, `u0t = 0`, `theta0 = 1 + cos^2(pi x)`.
pub fn standard_initial_data() -> InitialData {
    InitialData {
        u0: Profile::Cosine { offset: 0.0, amp: 1.0, modes: 1.0 },
        u0t: Profile::Constant(0.0),
        theta0: Profile::CosineSquared { offset: 1.0, amp: 1.0, modes: 1.0 },
    }
}

/// `n = 256`, `T = 5`, `dt = 2.5e-4`.
pub fn standard() -> SimConfig {
    let mut cfg = SimConfig::new(
        Grid1D::unit(256).expect("valid grid"),
        standard_coefficients(),
        standard_initial_data(),
        5.0,
    );
    cfg.dt = Some(2.5e-4);
    cfg
}

/// The standard scenario with the time-independent stiffness `2 + sin(pi x)`.
pub fn standard_static() -> SimConfig {
    let mut cfg = standard();
    cfg.coeffs.a = SpaceTimeFn::Sinusoidal { base: 2.0, amp: 1.0, modes: 1.0, decay: 0.0 };
    cfg
}

/// Zero displacement and velocity, constant temperature, no coupling.
pub fn zero() -> SimConfig {
    let mut cfg = standard();
    cfg.coeffs.f = ThetaFn::Constant(0.0);
    cfg.init = InitialData {
        u0: Profile::Constant(0.0),
        u0t: Profile::Constant(0.0),
        theta0: Profile::Constant(1.0),
    };
    cfg.horizon = 1.0;
    cfg
}

/// Damped wave equation: `gamma = 1`, `a = 1`, `f = 0`, `theta0 = 0`.
pub fn decoupled() -> SimConfig {
    let mut cfg = standard();
    cfg.coeffs = CoefficientSet {
        gamma: ThetaFn::Constant(1.0),
        a: SpaceTimeFn::Constant(1.0),
        f: ThetaFn::Constant(0.0),
        gamma_lower: 0.99,
        gamma_upper: 1.01,
        f_bound: 2.0,
        alpha: 0.5,
        diffusivity: 1.0,
        outside_theorem: false,
    };
    cfg.init = InitialData {
        u0: Profile::Cosine { offset: 0.0, amp: 1.0, modes: 1.0 },
        u0t: Profile::Constant(0.0),
        theta0: Profile::Constant(0.0),
    };
    cfg.horizon = 2.0;
    cfg
}

/// The standard scenario with the growth exponent `0.9` in the coupling,
/// outside the admissible range.
pub fn blowup_probe() -> SimConfig {
    let mut cfg = standard();
    cfg.coeffs.f = ThetaFn::PowerF { coef: 2.0, exponent: 0.9 };
    cfg.coeffs.alpha = 0.9;
    cfg.coeffs.outside_theorem = true;
    cfg
}

/// Unit piezoelectric parameters with `B = 1`, giving `f(zeta) = zeta`.
pub fn piezo_linear() -> SimConfig {
    let p = PiezoParams { rho: 1.0, d: 1.0, c_elastic: 1.0, b: 1.0, e: 0.0, eps: 1.0 };
    let mut cfg = standard();
    cfg.coeffs = piezo_to_coefficients(&p, 1.0).expect("positive parameters");
    cfg.horizon = 2.0;
    cfg
}

pub fn by_name(name: &str) -> Result<SimConfig> {
    match name {
        "standard" => Ok(standard()),
        "standard-static" => Ok(standard_static()),
        "zero" => Ok(zero()),
        "decoupled" => Ok(decoupled()),
        "blowup-probe" => Ok(blowup_probe()),
        "piezo-linear" => Ok(piezo_linear()),
        other => Err(Error::InvalidConfiguration(format!(
            "unknown scenario '{other}' (known: {})",
            NAMES.join(", ")
        ))),
    }
}
