//! Localization in the reduced shear problem: the plastic strain collects
//! in a shrinking neighbourhood of y = 0.

use softplast::homogeneous::uniform_times;
use softplast::shear1d::{integrate_reduced, localization_diagnostics, localization_z0, Grid1D, ReducedProblem};

fn main() -> softplast::Result<()> {
    let grid = Grid1D::new(400)?;
    let times = uniform_times(0.0, 3.0, 300);
    for eps in [4e-3, 2e-3, 1e-3] {
        let pb = ReducedProblem::shear_band_problem(eps, grid.clone(), localization_z0(&grid))?;
        let run = integrate_reduced(&pb, 3.0, 1e-8, &times)?;
        let rep = localization_diagnostics(&run);
        println!(
            "ε = {eps:.0e}: sup|e − t∧1| = {:.4}, mass at T = {:.4}, active radius {:.4}, radius monotone {}",
            rep.e_gap,
            rep.mass_at(3.0).unwrap_or(f64::NAN),
            rep.final_radius(),
            rep.radius_monotone
        );
    }
    Ok(())
}
