//! Oscillating initial data: the limit is a two-atom Young measure whose
//! barycentre violates the energy balance that the measure itself meets.

use softplast::homogeneous::uniform_times;
use softplast::shear1d::{energy_gap_report, integrate_reduced, oscillation_z0, Grid1D, ReducedProblem, ReducedTrajectory};

fn main() -> softplast::Result<()> {
    let grid = Grid1D::new(400)?;
    let times = uniform_times(0.0, 3.0, 300);
    let mut runs: Vec<ReducedTrajectory> = vec![];
    let mut pb = None;
    for eps in [4e-3, 2e-3, 1e-3, 5e-4] {
        let p = ReducedProblem::shear_band_problem(eps, grid.clone(), oscillation_z0(&grid))?;
        runs.push(integrate_reduced(&p, 3.0, 1e-8, &times)?);
        pb = Some(p);
    }
    let pb = pb.unwrap();
    let refs: Vec<&ReducedTrajectory> = runs.iter().collect();
    let (limit, per) = energy_gap_report(&refs, pb.mu, &pb.domain, &pb.potential, 3.0)?;
    for (r, g) in runs.iter().zip(&per) {
        println!("ε = {:.1e}: barycentre gap {:.5}, measure residual {:.3e}", r.eps, g.barycentre_gap, g.measure_residual);
    }
    println!("extrapolated: barycentre gap {:.5}, measure residual {:.3e}", limit.barycentre_gap, limit.measure_residual);
    Ok(())
}
