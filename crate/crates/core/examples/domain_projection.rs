//! Projections onto the built-in elastic domains, the support function and
//! the viscous flow `N_K^ε` in the shear plane.

use softplast::domain::{project, support, visco_flow, ElasticDomain, FlowDirection, StressPoint};
use softplast::tensor::{shear_embed, DevMatrix};

fn main() -> softplast::Result<()> {
    let domains = [
        ("ball(1)", ElasticDomain::ball(1.0)?, 2),
        ("diamond(2)", ElasticDomain::diamond(2.0)?, 1),
        ("hexagon", ElasticDomain::hexagon(), 1),
    ];
    let eps = 0.1;
    for (name, k, d) in &domains {
        println!("{name}");
        for (a, z) in [(0.3, 0.2), (3.0, 0.0), (-2.0, 2.5), (0.0, -4.0)] {
            let sigma = if *d == 1 { DevMatrix::scalar(a) } else { shear_embed(a, *d)? };
            let x = StressPoint::new(sigma, z);
            let p = project(k, &x);
            let n = visco_flow(k, &x, eps)?;
            let h = support(k, &FlowDirection::new(n.xi, n.theta));
            println!(
                "  x = ({a:5.2}, {z:5.2})  P_K x = ({:8.5}, {:8.5})  |N^ε| = {:8.4}  H(N^ε) = {:8.4}",
                p.sigma.as_sym().get(0, d - 1) * if *d == 1 { 1.0 } else { std::f64::consts::SQRT_2 },
                p.zeta,
                (n.xi.dot(&n.xi) + n.theta * n.theta).sqrt(),
                h
            );
        }
    }
    Ok(())
}
