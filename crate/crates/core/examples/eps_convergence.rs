//! Distance between the viscous runs and the quasistatic evolution as ε
//! decreases, for a smooth case and a case with a jump.

use softplast::homogeneous::verify_eps_convergence;
use softplast::scenario::{builtin, scenario_quasistatic};

fn main() -> softplast::Result<()> {
    for name in ["fig-a", "fig-c"] {
        let cfg = builtin(name).unwrap();
        let q = scenario_quasistatic(&cfg)?;
        let pb = cfg.homogeneous_problem(1e-2)?;
        let delta = if q.has_jump() { 0.2 } else { 0.0 };
        let eps = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
        let rep = verify_eps_convergence(&eps, &q, &pb, (0.0, q.t_end), delta, 1e-9, 400)?;
        println!("{name} (case {:?}):", q.case);
        for r in &rep.rows {
            println!("  ε = {:.3e}  sup|θ_ε − θ| = {:.4e}  steps {}", r.eps, r.sup_err, r.steps);
        }
        println!("  monotone: {}", rep.monotone());
    }
    Ok(())
}
