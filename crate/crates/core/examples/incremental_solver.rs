//! Implicit-Euler incremental minimization compared against the ε-ODE, with
//! step-wise optimality checks and the discrete energy estimate.

use softplast::homogeneous::HomogeneousState;
use softplast::incremental::{
    discrete_energy_estimate_homogeneous, run_incremental_homogeneous, sup_error_vs_ode_homogeneous,
    verify_euler_homogeneous, SolverOptions, TimeGrid,
};
use softplast::scenario::builtin;

fn main() -> softplast::Result<()> {
    let cfg = builtin("incremental").unwrap();
    let eps = cfg.eps[0];
    let pb = cfg.homogeneous_problem(eps)?;
    let init = HomogeneousState::initial(&pb.loading, 0.0, 0.5);
    let opts = SolverOptions::default();
    for tau in cfg.taus(eps) {
        let grid = TimeGrid::uniform(cfg.t_end, tau)?;
        let run = run_incremental_homogeneous(&pb, &init, &grid, &opts)?;
        let err = sup_error_vs_ode_homogeneous(&pb, &run, 1e-10, 400)?;
        let bad = (1..=run.steps.len())
            .filter(|&i| !verify_euler_homogeneous(&pb, run.state(i - 1), run.state(i), 1e-8).passed)
            .count();
        let est = discrete_energy_estimate_homogeneous(&pb, &run, 1e-9);
        println!(
            "τ = {tau:.3e}: {} steps, sup error {err:.3e}, failed checks {bad}, energy estimate holds {} (max excess {:.2e})",
            run.steps.len(),
            est.holds,
            est.max_excess
        );
    }
    Ok(())
}
