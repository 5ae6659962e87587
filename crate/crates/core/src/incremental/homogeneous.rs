use super::{check_tau, IncrementalRun, SolverOptions, StepResult, TimeGrid};
use crate::domain::{self, FlowDirection, StressPoint};
use crate::error::{Error, Result};
use crate::homogeneous::{HomogeneousProblem, HomogeneousState};
use crate::tensor::{deviator_split, elastic_energy, DevMatrix, SymMatrix};

// Increment (Δp, Δz).
#[derive(Debug, Clone, Copy)]
struct Inc {
    p: DevMatrix,
    z: f64,
}

impl Inc {
    fn axpy(&self, a: f64, o: &Inc) -> Inc {
        Inc { p: self.p + o.p * a, z: self.z + a * o.z }
    }

    fn dot(&self, o: &Inc) -> f64 {
        self.p.dot(&o.p) + self.z * o.z
    }
}

struct Step<'a> {
    pb: &'a HomogeneousProblem,
    tau: f64,
    // ξ_s¹ − ξ_p⁰
    trial: SymMatrix,
    theta0: f64,
}

impl Step<'_> {
    fn stress(&self, x: &Inc) -> StressPoint {
        let (dev, _) = deviator_split(&(self.trial - *x.p.as_sym()));
        StressPoint::new(dev * (2.0 * self.pb.elasticity.mu()), -self.pb.potential.deriv(self.theta0 + x.z))
    }

    // Q(ξ_s¹ − ξ_p⁰ − Δp) + V(θ⁰ + Δz) + (ε/2τ)|x|²
    fn smooth(&self, x: &Inc) -> f64 {
        elastic_energy(&self.pb.elasticity, &(self.trial - *x.p.as_sym()))
            + self.pb.potential.eval(self.theta0 + x.z)
            + 0.5 * self.pb.eps / self.tau * x.dot(x)
    }

    fn grad(&self, x: &Inc) -> Inc {
        let s = self.stress(x);
        let c = self.pb.eps / self.tau;
        Inc { p: x.p * c - s.sigma, z: c * x.z - s.zeta }
    }

    // prox of λH: v − λ P_K(v/λ)
    fn prox(&self, v: &Inc, lambda: f64) -> Inc {
        let q = domain::project(&self.pb.domain, &StressPoint::new(v.p * (1.0 / lambda), v.z / lambda));
        Inc { p: v.p - q.sigma * lambda, z: v.z - lambda * q.zeta }
    }

    fn kkt(&self, x: &Inc) -> f64 {
        let n = domain::visco_flow(&self.pb.domain, &self.stress(x), self.pb.eps).expect("eps validated");
        let r = Inc { p: x.p * (1.0 / self.tau) - n.xi, z: x.z / self.tau - n.theta };
        r.dot(&r).sqrt()
    }

    fn fenchel_gap(&self, x: &Inc) -> f64 {
        let rate = FlowDirection::new(x.p * (1.0 / self.tau), x.z / self.tau);
        let s = self.stress(x);
        let k = &self.pb.domain;
        let eps = self.pb.eps;
        domain::hepsilon(k, &rate, eps).unwrap() + domain::hepsilon_conjugate(k, &s, eps).unwrap() - s.pair(&rate)
    }
}

/// One implicit-Euler step from `prev` to `xi_s_new` at `prev.t + tau`,
/// starting the inner iteration at zero increment.
pub fn incremental_step_homogeneous(
    pb: &HomogeneousProblem,
    tau: f64,
    prev: &HomogeneousState,
    xi_s_new: &SymMatrix,
    opts: &SolverOptions,
) -> Result<StepResult<HomogeneousState>> {
    let z = DevMatrix::zeros(prev.xi_e.dim())?;
    incremental_step_homogeneous_from(pb, tau, prev, xi_s_new, (z, 0.0), opts)
}

/// As [`incremental_step_homogeneous`] with a given initial iterate
/// `(Δp, Δz)`.
///
/// The step minimizes `Q(ξ_s¹ − ξ_p⁰ − Δp) + H(Δp, Δz) + V(θ⁰ + Δz) +
/// (ε/2τ)(|Δp|² + |Δz|²)` with accelerated proximal gradient iterations for
/// strongly convex objectives; the prox of `H` is `v − λP_K(v/λ)`.
pub fn incremental_step_homogeneous_from(
    pb: &HomogeneousProblem,
    tau: f64,
    prev: &HomogeneousState,
    xi_s_new: &SymMatrix,
    start: (DevMatrix, f64),
    opts: &SolverOptions,
) -> Result<StepResult<HomogeneousState>> {
    let m_v = pb.potential.curvature_bound();
    check_tau(tau, pb.eps, m_v)?;
    if xi_s_new.dim() != prev.xi_e.dim() || start.0.dim() != prev.xi_e.dim() {
        return Err(Error::param("xi_s_new", "dimension does not match the state"));
    }
    let st = Step { pb, tau, trial: *xi_s_new - *prev.xi_p.as_sym(), theta0: prev.theta };
    let c = pb.eps / tau;
    let mu2 = 2.0 * pb.elasticity.mu();
    let strong = (mu2 + c).min(c - m_v);
    let mut lip = mu2.max(m_v) + c;

    let mut x = Inc { p: start.0, z: start.1 };
    let mut x_prev: Inc;
    let mut y = x;
    let mut kkt = st.kkt(&x);
    let mut it = 0;
    while kkt > opts.kkt_tol {
        if it >= opts.max_iter {
            return Err(Error::StepFailure { t: prev.t + tau, reason: format!("no convergence, residual {kkt:.3e}") });
        }
        it += 1;
        let g = st.grad(&y);
        let fy = st.smooth(&y);
        // Backtracking keeps the step valid when V'' is not bounded above.
        let x_new = loop {
            let cand = st.prox(&y.axpy(-1.0 / lip, &g), 1.0 / lip);
            let d = cand.axpy(-1.0, &y);
            if st.smooth(&cand) <= fy + g.dot(&d) + 0.5 * lip * d.dot(&d) + 1e-14 * fy.abs().max(1.0) {
                break cand;
            }
            lip *= 2.0;
        };
        let beta = (lip.sqrt() - strong.sqrt()) / (lip.sqrt() + strong.sqrt());
        x_prev = std::mem::replace(&mut x, x_new);
        y = x.axpy(beta, &x.axpy(-1.0, &x_prev));
        kkt = st.kkt(&x);
        if !kkt.is_finite() {
            return Err(Error::StepFailure { t: prev.t + tau, reason: "iteration diverged".into() });
        }
    }
    let xi_p = prev.xi_p + x.p;
    let state = HomogeneousState { t: prev.t + tau, xi_e: *xi_s_new - *xi_p.as_sym(), theta: prev.theta + x.z, xi_p };
    Ok(StepResult { state, kkt_residual: kkt, dual_gap: st.fenchel_gap(&x), iterations: it })
}

/// Runs the scheme on `grid` from `init` (at `t = 0`), warm-starting each
/// step with the previous increment.
pub fn run_incremental_homogeneous(
    pb: &HomogeneousProblem,
    init: &HomogeneousState,
    grid: &TimeGrid,
    opts: &SolverOptions,
) -> Result<IncrementalRun<HomogeneousState>> {
    grid.check_window(pb.eps, pb.potential.curvature_bound())?;
    if init.t != 0.0 {
        return Err(Error::param("init", "incremental runs start at t = 0"));
    }
    let mut steps: Vec<StepResult<HomogeneousState>> = Vec::with_capacity(grid.len());
    let mut prev = *init;
    let mut warm = (DevMatrix::zeros(init.xi_e.dim())?, 0.0);
    for w in grid.knots().windows(2) {
        let tau = w[1] - w[0];
        let mut r = incremental_step_homogeneous_from(pb, tau, &prev, &pb.loading.value(w[1]), warm, opts)?;
        r.state.t = w[1];
        warm = (r.state.xi_p - prev.xi_p, r.state.theta - prev.theta);
        prev = r.state;
        steps.push(r);
    }
    Ok(IncrementalRun { eps: pb.eps, grid: grid.clone(), initial: *init, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::ElasticDomain;
    use crate::homogeneous::{integrate_eps_ode, LoadingProgram};
    use crate::softening::SofteningPotential;
    use crate::tensor::{shear_embed, IsotropicElasticity};

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

    #[test]
    fn elastic_step_is_exact() {
        let pb = ball_problem(1.0, 1.0, 1e-2);
        let prev = HomogeneousState::initial(&pb.loading, 0.0, 0.5);
        let r = incremental_step_homogeneous(&pb, 1e-2, &prev, &pb.loading.value(0.1), &SolverOptions::default()).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.state.theta, 0.5);
        assert_eq!(r.state.xi_p.norm(), 0.0);
        assert!((r.state.xi_e - pb.loading.value(0.1)).norm() < 1e-15);
    }

    #[test]
    fn rejects_large_tau() {
        let pb = ball_problem(1.0, 1.0, 1e-2);
        let prev = HomogeneousState::initial(&pb.loading, 0.0, 0.5);
        let e = incremental_step_homogeneous(&pb, 0.02, &prev, &pb.loading.value(0.02), &SolverOptions::default());
        assert!(matches!(e, Err(Error::InvalidParameter { .. })));
    }

    fn plastic_prev(pb: &HomogeneousProblem, t: f64) -> HomogeneousState {
        let init = HomogeneousState::initial(&pb.loading, 0.0, 0.5);
        integrate_eps_ode(pb, &init, t, 1e-11, &[t]).unwrap().samples[0].state
    }

    #[test]
    fn plastic_step_solves_flow_relation() {
        let pb = ball_problem(1.0, 1.0, 1e-2);
        let prev = plastic_prev(&pb, 1.0);
        let r = incremental_step_homogeneous(&pb, 5e-3, &prev, &pb.loading.value(1.005), &SolverOptions::default()).unwrap();
        assert!(r.kkt_residual <= 1e-9);
        assert!(r.dual_gap >= -1e-12 && r.dual_gap < 1e-9, "{}", r.dual_gap);
        assert!(r.state.theta > prev.theta);
    }

    #[test]
    fn distinct_starts_agree() {
        let pb = ball_problem(1.0, 1.0, 1e-2);
        let prev = plastic_prev(&pb, 1.0);
        let xs = pb.loading.value(1.005);
        let o = SolverOptions::default();
        let a = incremental_step_homogeneous(&pb, 5e-3, &prev, &xs, &o).unwrap();
        let b = incremental_step_homogeneous_from(&pb, 5e-3, &prev, &xs, (shear_embed(0.3, 2).unwrap(), -0.7), &o).unwrap();
        assert!((a.state.theta - b.state.theta).abs() < 1e-9);
        assert!((a.state.xi_p - b.state.xi_p).norm() < 1e-9);
    }

    #[test]
    fn local_error_is_second_order() {
        let pb = ball_problem(1.0, 1.0, 1e-2);
        let t0 = 1.0;
        let prev = plastic_prev(&pb, t0);
        let err = |tau: f64| {
            let r = incremental_step_homogeneous(&pb, tau, &prev, &pb.loading.value(t0 + tau), &SolverOptions { kkt_tol: 1e-12, ..Default::default() })
                .unwrap();
            let ode = integrate_eps_ode(&pb, &prev, t0 + tau, 1e-12, &[t0 + tau]).unwrap().samples[0].state;
            (r.state.theta - ode.theta).abs() + (r.state.xi_p - ode.xi_p).norm()
        };
        let (e1, e2) = (err(4e-3), err(2e-3));
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.3, "{e1:e} {e2:e} {order}");
    }
}
