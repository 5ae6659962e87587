//! Threshold constants, case classification and fast orbits for the
//! `√(1+θ²)` potential on the unit ball.

use softplast::homogeneous::{fast_orbit, slow_fast_coefficients};
use softplast::softening::SofteningPotential;

fn main() -> softplast::Result<()> {
    let v = SofteningPotential::Sqrt;
    let dec = slow_fast_coefficients(1.0, 1.0, &v)?;
    println!("μ0 = {:.12}, α0 = {:.12}", dec.mu0, dec.alpha0);

    for frac in [2.0, 0.9, 0.5, 0.1] {
        let mu = frac * dec.mu0;
        let dec = slow_fast_coefficients(mu, 1.0, &v)?;
        match dec.roots {
            None => println!("μ = {mu:.6}: no unstable range, every θ0 softens smoothly"),
            Some((a, b)) => {
                let orbit = fast_orbit(&dec, a)?;
                println!("μ = {mu:.6}: α = {a:.6}, β = {b:.6}, Φ(α) = {:.6}, orbit dissipation {:.6}", orbit.phi, orbit.dissipation);
                for theta0 in [0.5 * a, 0.5 * (a + b), 1.5 * b] {
                    println!("    θ0 = {theta0:.4} -> case {:?}", dec.classify(theta0));
                }
            }
        }
    }
    Ok(())
}
