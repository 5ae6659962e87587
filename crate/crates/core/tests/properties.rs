use proptest::prelude::*;
use softplast::domain::ElasticDomain;
use softplast::homogeneous::{
    integrate_eps_ode, quasistatic_assemble, slow_fast_coefficients, uniform_times, HomogeneousProblem,
    HomogeneousState, LoadingProgram,
};
use softplast::incremental::{run_incremental_homogeneous, run_incremental_1d, SolverOptions, TimeGrid};
use softplast::shear1d::{integrate_reduced, localization_z0, Grid1D, ReducedProblem};
use softplast::softening::SofteningPotential;
use softplast::tensor::{shear_embed, IsotropicElasticity};

const MU0: f64 = 0.012958870447;
const ALPHA0: f64 = 0.863957167604;

fn ball_problem(mu: f64, s: f64, eps: f64) -> HomogeneousProblem {
    HomogeneousProblem::new(
        IsotropicElasticity::new(mu, 1.0).unwrap(),
        ElasticDomain::ball(1.0).unwrap(),
        SofteningPotential::Sqrt,
        LoadingProgram::linear(*shear_embed(s, 2).unwrap().as_sym()).unwrap(),
        eps,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn slow_fast_roots_bracket_alpha0(frac in 0.05f64..0.98, s in 0.2f64..30.0) {
        let dec = slow_fast_coefficients(frac * MU0, s, &SofteningPotential::Sqrt).unwrap();
        let (a, b) = dec.roots.expect("μ < μ0 has roots");
        prop_assert!(0.0 < a && a < ALPHA0 && ALPHA0 < b);
        let scale = dec.b0(0.5 * (a + b)).abs().max(1.0);
        prop_assert!(dec.b0(a).abs() <= 1e-10 * scale, "B0(α) = {:e}", dec.b0(a));
        prop_assert!(dec.b0(b).abs() <= 1e-10 * scale, "B0(β) = {:e}", dec.b0(b));
        for k in 1..20 {
            let t = a + (b - a) * k as f64 / 20.0;
            prop_assert!(dec.b0(t) < 0.0);
        }
    }

    #[test]
    fn no_roots_above_mu0(frac in 1.02f64..50.0, s in 0.2f64..30.0) {
        let dec = slow_fast_coefficients(frac * MU0, s, &SofteningPotential::Sqrt).unwrap();
        prop_assert!(dec.roots.is_none());
    }

    #[test]
    fn quasistatic_theta_is_monotone(frac in 0.1f64..3.0, theta0 in 0.05f64..2.5) {
        let s = 20.0;
        let dec = slow_fast_coefficients(frac * MU0, s, &SofteningPotential::Sqrt).unwrap();
        let q = quasistatic_assemble(&dec, theta0, 10.0, 200).unwrap();
        prop_assert!(q.samples.windows(2).all(|w| w[1].t >= w[0].t && w[1].theta >= w[0].theta - 1e-12));
        for smp in q.samples.iter().filter(|x| x.t <= q.t0) {
            prop_assert_eq!(smp.psi, 0.0);
            prop_assert_eq!(q.psi_at(smp.t), 0.0);
        }
        if let Some(j) = &q.jump {
            prop_assert!(j.theta_plus > j.theta_minus);
            prop_assert!((q.theta_at(j.tau) - j.theta_minus).abs() < 1e-12);
        }
    }

    #[test]
    fn eps_ode_plastic_part_is_deviatoric(mu in 0.05f64..2.0, s in 0.5f64..2.0, eps in 5e-3f64..5e-2) {
        let pb = ball_problem(mu, s, eps);
        let init = HomogeneousState::initial(&pb.loading, 0.0, 0.5);
        let run = integrate_eps_ode(&pb, &init, 3.0, 1e-9, &uniform_times(0.0, 3.0, 30)).unwrap();
        for smp in &run.samples {
            let st = &smp.state;
            let xi = pb.loading.value(st.t);
            prop_assert!(st.xi_p.as_sym().trace().abs() <= 1e-12 * (1.0 + st.xi_p.norm()));
            prop_assert!((xi - st.xi_e - *st.xi_p.as_sym()).norm() <= 1e-7 * (1.0 + xi.norm()));
        }
    }

    #[test]
    fn incremental_steps_meet_kkt_tolerance(mu in 0.1f64..1.5, eps in 5e-3f64..5e-2, k in 2.0f64..8.0) {
        let pb = ball_problem(mu, 1.0, eps);
        let init = HomogeneousState::initial(&pb.loading, 0.0, 0.5);
        let opts = SolverOptions::default();
        let grid = TimeGrid::uniform(2.0, eps / (k * pb.potential.curvature_bound())).unwrap();
        let run = run_incremental_homogeneous(&pb, &init, &grid, &opts).unwrap();
        prop_assert!(run.steps.iter().all(|s| s.kkt_residual <= opts.kkt_tol));
        prop_assert!(run.steps.windows(2).all(|w| w[1].state.theta >= w[0].state.theta - 1e-12));
    }

    #[test]
    fn step_rule_is_enforced(eps in 1e-3f64..1e-1, r in 1.0f64..4.0) {
        let pb = ball_problem(1.0, 1.0, eps);
        let init = HomogeneousState::initial(&pb.loading, 0.0, 0.5);
        let m = pb.potential.curvature_bound();
        let grid = TimeGrid::uniform(1.0, r * eps / m).unwrap();
        prop_assume!(grid.tau_max() * m >= eps);
        prop_assert!(run_incremental_homogeneous(&pb, &init, &grid, &SolverOptions::default()).is_err());
    }

    #[test]
    fn uniform_grid_respects_step(t_end in 0.1f64..20.0, tau in 1e-3f64..1.0) {
        let g = TimeGrid::uniform(t_end, tau).unwrap();
        prop_assert!(g.tau_max() <= tau * (1.0 + 1e-12));
        prop_assert_eq!(g.t_end(), t_end);
        prop_assert_eq!(g.knots()[0], 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn reduced_kinematics_hold(eps in 2e-3f64..2e-2, n in 40usize..120) {
        let grid = Grid1D::new(n).unwrap();
        let pb = ReducedProblem::shear_band_problem(eps, grid.clone(), localization_z0(&grid)).unwrap();
        let run = integrate_reduced(&pb, 3.0, 1e-8, &uniform_times(0.0, 3.0, 12)).unwrap();
        for smp in &run.samples {
            let span = pb.span(smp.state.t);
            prop_assert!((smp.state.kinematic_span(&grid) - span).abs() <= 1e-6 * (1.0 + span.abs()));
        }
    }

    #[test]
    fn incremental_1d_meets_kkt_tolerance(eps in 4e-3f64..2e-2, k in 2.0f64..6.0) {
        let grid = Grid1D::new(60).unwrap();
        let pb = ReducedProblem::shear_band_problem(eps, grid.clone(), localization_z0(&grid)).unwrap();
        let opts = SolverOptions::default();
        let tg = TimeGrid::uniform(2.5, eps / (k * pb.potential.curvature_bound())).unwrap();
        let run = run_incremental_1d(&pb, &tg, &opts).unwrap();
        prop_assert!(run.steps.iter().all(|s| s.kkt_residual <= opts.kkt_tol));
        for s in &run.steps {
            let span = pb.span(s.state.t);
            prop_assert!((s.state.kinematic_span(&grid) - span).abs() <= 1e-8 * (1.0 + span.abs()));
        }
    }
}
