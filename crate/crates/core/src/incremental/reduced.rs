use super::{check_tau, IncrementalRun, SolverOptions, StepResult, TimeGrid};
use crate::domain::visco_flow_planar;
use crate::error::{Error, Result};
use crate::roots::illinois;
use crate::shear1d::{ReducedProblem, ReducedState};

/// Per-node implicit update at fixed stress `σ`: solves
/// `Δz = τ N²(σ, −V'(z⁰ + Δz))`, then `Δp = τ N¹(σ, −V'(z⁰ + Δz))`.
/// The residual in `Δz` has slope at least `1 − τM/ε > 0`.
pub(crate) fn node_update(pb: &ReducedProblem, tau: f64, sigma: f64, z0: f64) -> (f64, f64) {
    let k = &pb.domain;
    let v = &pb.potential;
    let eps = pb.eps;
    let (n1, n2) = visco_flow_planar(k, sigma, -v.deriv(z0), eps);
    if n1 == 0.0 && n2 == 0.0 {
        return (0.0, 0.0);
    }
    let r = |dz: f64| dz - tau * visco_flow_planar(k, sigma, -v.deriv(z0 + dz), eps).1;
    let r0 = -tau * n2;
    let dz = if r0 == 0.0 {
        0.0
    } else {
        let slope = 1.0 - tau * v.curvature_bound() / eps;
        let far = -r0 / slope;
        let scale = tau / eps * (1.0 + sigma.abs() + z0.abs());
        illinois(r, 0.0, r0, far, r(far), 1e-16 * scale, 1e-17 * scale, 200).map_or(far, |s| s.0)
    };
    let n1 = visco_flow_planar(k, sigma, -v.deriv(z0 + dz), eps).0;
    (tau * n1, dz)
}

/// One implicit-Euler step of the reduced problem to span `span_new` at
/// `prev.t + tau`. Outer root-find on the (constant) stress of
/// `R(σ) = σ − 2μ(span − ∫p¹(σ))`, inner per-node solves.
pub fn incremental_step_1d(
    pb: &ReducedProblem,
    tau: f64,
    prev: &ReducedState,
    span_new: f64,
    opts: &SolverOptions,
) -> Result<StepResult<ReducedState>> {
    check_tau(tau, pb.eps, pb.potential.curvature_bound())?;
    let g = pb.grid;
    let n = g.len();
    if prev.p.len() != n || prev.z.len() != n {
        return Err(Error::param("prev", "state does not match the grid"));
    }
    let mu2 = 2.0 * pb.mu;
    let mass0 = g.integrate(&prev.p);
    let dp_mass = |sigma: f64| -> f64 {
        g.h() * prev.z.iter().map(|&z| node_update(pb, tau, sigma, z).0).sum::<f64>()
    };
    let resid = |sigma: f64| sigma - mu2 * (span_new - mass0 - dp_mass(sigma));
    let fail = |reason: String| Error::StepFailure { t: prev.t + tau, reason };

    let s_tr = mu2 * (span_new - mass0);
    let r_tr = resid(s_tr);
    let mut iterations = 1;
    let sigma = if r_tr == 0.0 {
        s_tr
    } else {
        // R' ≥ 1, so the root lies within |R(σ_tr)| of σ_tr; widen if that
        // fails numerically.
        let mut width = r_tr.abs();
        let mut other = s_tr - r_tr;
        let mut r_other = resid(other);
        let mut tries = 0;
        while r_other.signum() == r_tr.signum() {
            tries += 1;
            if tries > 50 {
                return Err(fail("could not bracket the stress".into()));
            }
            width *= 2.0;
            other = s_tr - r_tr.signum() * width;
            r_other = resid(other);
        }
        let scale = 1.0 + s_tr.abs();
        let (s, k) = illinois(resid, s_tr, r_tr, other, r_other, 1e-16 * scale, 1e-15 * scale, opts.max_iter.min(500))
            .ok_or_else(|| fail("stress iteration did not converge".into()))?;
        iterations += k;
        s
    };

    let mut p = prev.p.clone();
    let mut z = prev.z.clone();
    let mut kkt = 0.0f64;
    let mut gap = vec![0.0; n];
    for i in 0..n {
        let (dp, dz) = node_update(pb, tau, sigma, prev.z[i]);
        p[i] += dp;
        z[i] += dz;
        let zeta = -pb.potential.deriv(z[i]);
        let (n1, n2) = visco_flow_planar(&pb.domain, sigma, zeta, pb.eps);
        kkt = kkt.max((dp / tau - n1).hypot(dz / tau - n2));
        let (r1, r2) = (dp / tau, dz / tau);
        let (pa, pz) = pb.domain.project_planar(sigma, zeta);
        let dist2 = (sigma - pa).powi(2) + (zeta - pz).powi(2);
        gap[i] = pb.domain.support_planar(r1, r2) + 0.5 * pb.eps * (r1 * r1 + r2 * r2) + dist2 / (2.0 * pb.eps)
            - (sigma * r1 + zeta * r2);
    }
    let e = span_new - g.integrate(&p);
    kkt = kkt.max((mu2 * e - sigma).abs() / (mu2 * tau));
    if kkt > opts.kkt_tol {
        return Err(fail(format!("residual {kkt:.3e} above tolerance")));
    }
    Ok(StepResult {
        state: ReducedState { t: prev.t + tau, e, p, z },
        kkt_residual: kkt,
        dual_gap: g.integrate(&gap),
        iterations,
    })
}

/// Runs the scheme on `grid` from the initial state of `pb`.
pub fn run_incremental_1d(pb: &ReducedProblem, grid: &TimeGrid, opts: &SolverOptions) -> Result<IncrementalRun<ReducedState>> {
    grid.check_window(pb.eps, pb.potential.curvature_bound())?;
    let init = pb.initial_state();
    let mut steps: Vec<StepResult<ReducedState>> = Vec::with_capacity(grid.len());
    for w in grid.knots().windows(2) {
        let prev = steps.last().map_or(&init, |s| &s.state);
        let mut r = incremental_step_1d(pb, w[1] - w[0], prev, pb.span(w[1]), opts)?;
        r.state.t = w[1];
        steps.push(r);
    }
    Ok(IncrementalRun { eps: pb.eps, grid: grid.clone(), initial: init, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shear1d::{localization_z0, Grid1D};

    fn pb(eps: f64, n: usize) -> ReducedProblem {
        let g = Grid1D::new(n).unwrap();
        ReducedProblem::shear_band_problem(eps, g, localization_z0(&g)).unwrap()
    }

    #[test]
    fn elastic_regime() {
        let p = pb(1e-2, 20);
        let prev = p.initial_state();
        let r = incremental_step_1d(&p, 5e-3, &prev, 0.5, &SolverOptions::default()).unwrap();
        assert_eq!(r.state.p, prev.p);
        assert_eq!(r.state.z, prev.z);
        assert!((2.0 * p.mu * r.state.e - 0.5).abs() < 1e-15);
    }

    #[test]
    fn diamond_face_update_is_linear() {
        // Plateau z > 1 gives ζ = 1; on the face α + ζ = 2 the flow is
        // ((σ + ζ − 2)/(2ε))(1, 1), so the backward Euler update is explicit.
        let p = pb(1e-2, 20);
        let (tau, sigma) = (4e-3, 1.2);
        let (dp, dz) = node_update(&p, tau, sigma, 1.5);
        let expected = tau * (sigma + 1.0 - 2.0) / (2.0 * p.eps);
        assert!((dp - expected).abs() < 1e-15 && (dz - expected).abs() < 1e-15, "{dp} {dz} {expected}");
        assert_eq!(node_update(&p, tau, 0.5, 0.2), (0.0, 0.0));
    }

    #[test]
    fn plastic_step_balances() {
        let p = pb(1e-2, 40);
        let mut prev = p.initial_state();
        prev.t = 1.2;
        prev.e = 1.2;
        let r = incremental_step_1d(&p, 5e-3, &prev, 1.205, &SolverOptions::default()).unwrap();
        assert!(r.kkt_residual < 1e-9);
        assert!(r.dual_gap.abs() < 1e-9);
        assert!((r.state.kinematic_span(&p.grid) - 1.205).abs() < 1e-13);
        assert!(r.state.e < 1.205);
    }
}
