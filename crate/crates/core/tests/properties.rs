use proptest::prelude::*;

use kvtherm::estimates::hoelder::{hoelder_fit, HoelderOutcome};
use kvtherm::estimates::moser::{check_moser_recursion_log, random_premise_triple};
use kvtherm::grid::{div_flux, gradient, integrate, lp_norm, FaceField, Field, Grid1D};
use kvtherm::model::{
    build_initial_data, piezo_to_coefficients, validate_coefficients, InitialData, Lattice, PiezoParams,
    Profile, SpaceTimeFn, ThetaFn,
};
use kvtherm::scenario;
use kvtherm::solver::{step_imex, State};
use kvtherm::tridiag::SymTridiag;
use rand::SeedableRng;

fn field(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, n)
}

fn positive(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01..10.0f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn div_flux_telescopes(phi in field(24), kappa in positive(25)) {
        let g = Grid1D::unit(24).unwrap();
        let phi = Field::from_values(g, phi).unwrap();
        let kappa = FaceField::from_values(&g, kappa).unwrap();
        let d = div_flux(&kappa, &phi).unwrap();
        let scale: f64 = d.values().iter().map(|v| v.abs()).sum::<f64>() * g.dx() + 1.0;
        prop_assert!(integrate(&d).abs() <= 1e-12 * scale);
    }

    #[test]
    fn operators_are_linear(phi in field(16), psi in field(16), kappa in positive(17), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let g = Grid1D::unit(16).unwrap();
        let phi = Field::from_values(g, phi).unwrap();
        let psi = Field::from_values(g, psi).unwrap();
        let kappa = FaceField::from_values(&g, kappa).unwrap();
        let comb = phi.lin_comb(a, &psi, b);
        let lhs_g = gradient(&comb);
        let rhs_g = gradient(&phi).lin_comb(a, &gradient(&psi), b);
        let lhs_d = div_flux(&kappa, &comb).unwrap();
        let rhs_d = div_flux(&kappa, &phi).unwrap().lin_comb(a, &div_flux(&kappa, &psi).unwrap(), b);
        for (x, y) in lhs_g.values().iter().zip(rhs_g.values()).chain(lhs_d.values().iter().zip(rhs_d.values())) {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn lp_norms_increase_with_p(phi in field(32), p in 1.0..8.0f64, dq in 0.0..8.0f64) {
        let g = Grid1D::unit(32).unwrap();
        let phi = Field::from_values(g, phi).unwrap();
        prop_assert!(lp_norm(&phi, p) <= lp_norm(&phi, p + dq) + 1e-12 * (1.0 + lp_norm(&phi, p + dq)));
    }

    #[test]
    fn thomas_inverts_diagonally_dominant(kappa in positive(17), tau in 1e-4..10.0f64, x in field(16)) {
        let g = Grid1D::unit(16).unwrap();
        let k = FaceField::from_values(&g, kappa).unwrap();
        let m = SymTridiag::implicit_diffusion(&k, g.dx(), tau).unwrap();
        let b = m.apply(&x);
        let y = m.solve(&b).unwrap();
        for (a, c) in x.iter().zip(&y) {
            prop_assert!((a - c).abs() <= 1e-8 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn momentum_is_conserved_without_coupling(u in field(20), v in field(20), th in positive(20), steps in 1usize..20) {
        let g = Grid1D::unit(20).unwrap();
        let mut coeffs = scenario::standard_coefficients();
        coeffs.f = ThetaFn::Constant(0.0);
        let mut s = State::new(
            0.0,
            Field::from_values(g, u).unwrap(),
            Field::from_values(g, v).unwrap(),
            Field::from_values(g, th).unwrap(),
        );
        let m0 = integrate(&s.v);
        for _ in 0..steps {
            s = step_imex(&s, 1e-3, &coeffs, None).unwrap();
        }
        prop_assert!((integrate(&s.v) - m0).abs() <= 1e-10 * (1.0 + m0.abs()));
    }

    #[test]
    fn piezo_heat_source_is_viscous_power(rho in 0.1..10.0f64, d in 0.1..10.0f64, c in 0.1..10.0f64,
                                          b in 0.0..5.0f64, e in 0.0..5.0f64, eps in 0.1..10.0f64,
                                          theta in 0.0..100.0f64, vx in -10.0..10.0f64) {
        let p = PiezoParams { rho, d, c_elastic: c, b, e, eps };
        let coeffs = piezo_to_coefficients(&p, 1.0).unwrap();
        let q = d * vx * vx;
        prop_assert!((coeffs.dissipation(theta, vx) - q / rho).abs() <= 1e-12 * (1.0 + q / rho));
        prop_assert!(coeffs.outside_theorem);
    }

    #[test]
    fn resampling_is_bitwise_identical(amp in -2.0..2.0f64, modes in 1u32..6, off in 0.0..3.0f64, n in 64usize..300) {
        let g = Grid1D::unit(n).unwrap();
        let init = InitialData {
            u0: Profile::Cosine { offset: 0.0, amp, modes: modes as f64 },
            u0t: Profile::Constant(0.0),
            theta0: Profile::Cosine { offset: off + 0.2, amp: 0.1, modes: modes as f64 },
        };
        if let Ok(a) = build_initial_data(&init, &g) {
            prop_assert_eq!(a, build_initial_data(&init, &g).unwrap());
        }
    }

    #[test]
    fn fitted_exponent_in_unit_interval(rows in prop::collection::vec(field(64), 16..20)) {
        match hoelder_fit(&rows, 1.0 / 64.0, 0.1).unwrap() {
            HoelderOutcome::Fitted(fit) => {
                prop_assert!(fit.beta_hat > 0.0 && fit.beta_hat <= 1.0);
                prop_assert!(fit.mu_hat.is_finite());
            }
            HoelderOutcome::FieldConstant => {}
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// A set failing on a coarse lattice fails on every finer superset.
    #[test]
    fn validation_is_monotone_in_refinement(limit in 0.3..1.5f64, drop in 0.0..1.0f64, coef in 0.0..3.0f64,
                                            exponent in 0.1..1.2f64, alpha in 0.1..1.2f64, refine in 2usize..5) {
        let mut c = scenario::standard_coefficients();
        c.gamma = ThetaFn::SaturatingGamma { limit, drop };
        c.f = ThetaFn::PowerF { coef, exponent };
        c.alpha = alpha;
        c.a = SpaceTimeFn::Constant(1.0);
        let coarse = Lattice::uniform(100.0, 101);
        let fine = Lattice::uniform(100.0, 100 * refine + 1);
        let rc = validate_coefficients(&c, &coarse).unwrap();
        let rf = validate_coefficients(&c, &fine).unwrap();
        for h in rc.failed() {
            prop_assert!(!rf.get(h).passed, "{:?}", h);
        }
    }

    /// Premise implies conclusion for arbitrary premise-satisfying triples.
    #[test]
    fn moser_premise_implies_conclusion(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..64 {
            let (a, b, m) = random_premise_triple(&mut rng);
            let c = check_moser_recursion_log(a, b, &m).unwrap();
            prop_assert!(c.premise_holds);
            prop_assert!(c.conclusion_holds, "A = {}, B = {}, ln M = {:?}", a, b, m);
        }
    }
}
