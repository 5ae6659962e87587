//! Spatially homogeneous problem: ε-regularized ODE, slow/fast
//! decomposition, fast-transition map and the quasistatic limit.

mod convergence;
mod quasistatic;
mod slowfast;

pub use convergence::{verify_eps_convergence, ConvergenceReport, ConvergenceRow};
pub use quasistatic::{
    energy_audit_quasistatic, quasistatic_assemble, Jump, QuasistaticAudit, QuasistaticSample,
    QuasistaticTrajectory,
};
pub(crate) use slowfast::maximize_ratio;
pub use slowfast::{fast_orbit, fast_transition, slow_fast_coefficients, Case, FastOrbit, SlowFastDecomposition};

use crate::domain::{self, ElasticDomain, StressPoint};
use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions, OdeSystem};
use crate::softening::{validate_against_domain, SofteningPotential};
use crate::tensor::{apply_elasticity, deviator_split, elastic_energy, DevMatrix, IsotropicElasticity, SymMatrix};

/// Imposed macroscopic strain `ξ(t)`; the boundary datum is `w(t, x) = ξ(t)x`.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadingProgram {
    /// `ξ(t) = t ξ0`.
    Linear { xi0: SymMatrix },
    /// `ξ(t) = φ_T(t) ξ0` with `φ_T(t) = t` up to `T` and `2T − t` after.
    Triangular { xi0: SymMatrix, turnaround: f64 },
    /// Piecewise linear through the knots, constant after the last one.
    Tabulated { knots: Vec<(f64, SymMatrix)> },
}

impl LoadingProgram {
    pub fn linear(xi0: SymMatrix) -> Result<Self> {
        if xi0.norm() == 0.0 {
            return Err(Error::InvalidLoading("ξ0 must be nonzero".into()));
        }
        Ok(LoadingProgram::Linear { xi0 })
    }

    pub fn triangular(xi0: SymMatrix, turnaround: f64) -> Result<Self> {
        if !(turnaround > 0.0) {
            return Err(Error::InvalidLoading("turnaround time must be positive".into()));
        }
        Ok(LoadingProgram::Triangular { xi0, turnaround })
    }

    pub fn tabulated(knots: Vec<(f64, SymMatrix)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidLoading("need at least two knots".into()));
        }
        if knots.windows(2).any(|w| !(w[1].0 > w[0].0) || w[1].1.dim() != w[0].1.dim()) {
            return Err(Error::InvalidLoading("knot times must increase and dimensions agree".into()));
        }
        Ok(LoadingProgram::Tabulated { knots })
    }

    pub fn dim(&self) -> usize {
        match self {
            LoadingProgram::Linear { xi0 } | LoadingProgram::Triangular { xi0, .. } => xi0.dim(),
            LoadingProgram::Tabulated { knots } => knots[0].1.dim(),
        }
    }

    /// Fixed direction of the loading when it has one.
    pub fn direction(&self) -> Option<SymMatrix> {
        match self {
            LoadingProgram::Linear { xi0 } | LoadingProgram::Triangular { xi0, .. } => Some(*xi0),
            LoadingProgram::Tabulated { .. } => None,
        }
    }

    pub fn value(&self, t: f64) -> SymMatrix {
        match self {
            LoadingProgram::Linear { xi0 } => *xi0 * t,
            LoadingProgram::Triangular { xi0, turnaround } => {
                let phi = if t <= *turnaround { t } else { 2.0 * turnaround - t };
                *xi0 * phi
            }
            LoadingProgram::Tabulated { knots } => {
                if t <= knots[0].0 {
                    return knots[0].1;
                }
                for w in knots.windows(2) {
                    if t <= w[1].0 {
                        let s = (t - w[0].0) / (w[1].0 - w[0].0);
                        return w[0].1 * (1.0 - s) + w[1].1 * s;
                    }
                }
                knots[knots.len() - 1].1
            }
        }
    }

    /// Right derivative `ξ̇(t)`.
    pub fn rate(&self, t: f64) -> SymMatrix {
        match self {
            LoadingProgram::Linear { xi0 } => *xi0,
            LoadingProgram::Triangular { xi0, turnaround } => {
                if t < *turnaround {
                    *xi0
                } else {
                    -*xi0
                }
            }
            LoadingProgram::Tabulated { knots } => {
                let d = knots[0].1.dim();
                for w in knots.windows(2) {
                    if t >= w[0].0 && t < w[1].0 {
                        return (w[1].1 - w[0].1) * (1.0 / (w[1].0 - w[0].0));
                    }
                }
                SymMatrix::zeros(d).unwrap()
            }
        }
    }

    /// Times where the rate is discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            LoadingProgram::Linear { .. } => vec![],
            LoadingProgram::Triangular { turnaround, .. } => vec![*turnaround],
            LoadingProgram::Tabulated { knots } => knots.iter().map(|k| k.0).collect(),
        }
    }

    /// `∫_a^b |ξ̇(t)| dt`.
    pub fn variation(&self, a: f64, b: f64) -> f64 {
        let mut pts = vec![a];
        pts.extend(self.breakpoints().into_iter().filter(|&p| p > a && p < b));
        pts.push(b);
        pts.windows(2).map(|w| self.rate(0.5 * (w[0] + w[1])).norm() * (w[1] - w[0])).sum()
    }
}

/// State of the homogeneous problem. `xi_p = ξ^s(t) − ξ_e` is kept
/// alongside for convenience.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousState {
    pub t: f64,
    pub xi_e: SymMatrix,
    pub theta: f64,
    pub xi_p: DevMatrix,
}

impl HomogeneousState {
    /// State at time `t` with zero plastic strain.
    pub fn initial(loading: &LoadingProgram, t: f64, theta0: f64) -> Self {
        let xi = loading.value(t);
        HomogeneousState { t, xi_e: xi, theta: theta0, xi_p: DevMatrix::zeros(xi.dim()).unwrap() }
    }
}

/// Data of the homogeneous ε-problem.
#[derive(Debug, Clone)]
pub struct HomogeneousProblem {
    pub elasticity: IsotropicElasticity,
    pub domain: ElasticDomain,
    pub potential: SofteningPotential,
    pub loading: LoadingProgram,
    pub eps: f64,
}

impl HomogeneousProblem {
    pub fn new(
        elasticity: IsotropicElasticity,
        domain: ElasticDomain,
        potential: SofteningPotential,
        loading: LoadingProgram,
        eps: f64,
    ) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::param("eps", "must be positive"));
        }
        if loading.dim() > 1 && !domain.is_dimension_free() {
            return Err(Error::Unsupported("planar domains need d = 1 loading".into()));
        }
        validate_against_domain(&potential, &domain)?;
        Ok(HomogeneousProblem { elasticity, domain, potential, loading, eps })
    }

    pub fn dim(&self) -> usize {
        self.loading.dim()
    }

    fn deviatoric_stress(&self, xi_e: &SymMatrix) -> DevMatrix {
        let (dev, _) = deviator_split(xi_e);
        dev * (2.0 * self.elasticity.mu())
    }

    /// Plastic rates `(ξ̇_p, θ̇) = N_K^ε(ℂ_D (ξ_e)_D, −V'(θ))`.
    pub fn flow(&self, xi_e: &SymMatrix, theta: f64) -> (DevMatrix, f64) {
        let x = StressPoint::new(self.deviatoric_stress(xi_e), -self.potential.deriv(theta));
        let n = domain::visco_flow(&self.domain, &x, self.eps).expect("eps validated");
        (n.xi, n.theta)
    }

    fn stress_inside(&self, xi_e: &SymMatrix, theta: f64) -> bool {
        let x = StressPoint::new(self.deviatoric_stress(xi_e), -self.potential.deriv(theta));
        let p = domain::project(&self.domain, &x);
        p == x
    }
}

/// Running energy terms of an ε-run (per unit volume).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyTerms {
    /// `∫ H(ṗ, ż) dt`.
    pub dissipation: f64,
    /// `ε ∫ |ṗ|² dt`.
    pub viscous_p: f64,
    /// `ε ∫ |ż|² dt`.
    pub viscous_z: f64,
    /// `∫ ⟨σ, ξ̇⟩ dt`.
    pub work: f64,
}

/// One output sample of an ε-run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousSample {
    pub state: HomogeneousState,
    pub sigma: SymMatrix,
    pub rate_p: DevMatrix,
    pub rate_theta: f64,
    pub energy: EnergyTerms,
}

impl HomogeneousSample {
    /// Plastic strain along the loading direction, `ψ` in `ξ_p = ψ ξ0^s`.
    pub fn psi(&self, direction: &SymMatrix) -> f64 {
        self.state.xi_p.as_sym().dot(direction) / direction.dot(direction)
    }
}

/// Sampled ε-trajectory.
#[derive(Debug, Clone)]
pub struct HomogeneousTrajectory {
    pub eps: f64,
    pub samples: Vec<HomogeneousSample>,
    pub steps: usize,
}

struct EpsOde<'a> {
    pb: &'a HomogeneousProblem,
    m: usize,
}

impl EpsOde<'_> {
    fn unpack(&self, y: &[f64]) -> (SymMatrix, f64) {
        (SymMatrix::from_upper(self.pb.dim(), &y[..self.m]).unwrap(), y[self.m])
    }
}

impl OdeSystem for EpsOde<'_> {
    fn dim(&self) -> usize {
        self.m + 5
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let (xi_e, theta) = self.unpack(y);
        let (np, nz) = self.pb.flow(&xi_e, theta);
        let rate = self.pb.loading.rate(t);
        let dxe = rate - *np.as_sym();
        dy[..self.m].copy_from_slice(&dxe.upper());
        dy[self.m] = nz;
        let sigma = apply_elasticity(&self.pb.elasticity, &xi_e);
        let eps = self.pb.eps;
        dy[self.m + 1] = domain::support(&self.pb.domain, &domain::FlowDirection::new(np, nz));
        dy[self.m + 2] = eps * np.dot(&np);
        dy[self.m + 3] = eps * nz * nz;
        dy[self.m + 4] = sigma.dot(&rate);
    }

    fn max_step(&self, _t: f64, y: &[f64]) -> f64 {
        let (xi_e, theta) = self.unpack(y);
        if self.pb.stress_inside(&xi_e, theta) {
            f64::INFINITY
        } else {
            0.25 * self.pb.eps
        }
    }
}

/// Integrates the ε-problem from `init` to `t_end`, sampling at `t_eval`
/// (sorted, within `[init.t, t_end]`).
pub fn integrate_eps_ode(
    pb: &HomogeneousProblem,
    init: &HomogeneousState,
    t_end: f64,
    tol: f64,
    t_eval: &[f64],
) -> Result<HomogeneousTrajectory> {
    if !(t_end > init.t) {
        return Err(Error::param("t_end", "must exceed the initial time"));
    }
    let d = pb.dim();
    if init.xi_e.dim() != d {
        return Err(Error::param("init", "dimension does not match the loading"));
    }
    let consistency = (pb.loading.value(init.t) - init.xi_e - *init.xi_p.as_sym()).norm();
    if consistency > 1e-9 * (1.0 + init.xi_e.norm()) {
        return Err(Error::param("init", "ξ_e + ξ_p must equal the imposed strain"));
    }
    let m = d * (d + 1) / 2;
    let sys = EpsOde { pb, m };
    let mut y: Vec<f64> = init.xi_e.upper();
    y.push(init.theta);
    y.extend([0.0; 4]);
    let opts = OdeOptions { rtol: tol, atol: tol * 1e-2, h_init: (t_end - init.t) * 1e-4, ..Default::default() };

    let mut cuts = vec![init.t];
    cuts.extend(pb.loading.breakpoints().into_iter().filter(|&b| b > init.t && b < t_end));
    cuts.push(t_end);
    let mut raw: Vec<(f64, Vec<f64>)> = Vec::with_capacity(t_eval.len());
    let mut steps = 0;
    for (k, w) in cuts.windows(2).enumerate() {
        let evals: Vec<f64> = t_eval
            .iter()
            .copied()
            .filter(|&t| if k == 0 { t >= w[0] && t <= w[1] } else { t > w[0] && t <= w[1] })
            .collect();
        let sol = ode::integrate(&sys, w[0], &y, w[1], &opts, &evals, |_, _, _| true)?;
        steps += sol.accepted;
        raw.extend(sol.samples);
        y = sol.y_end;
    }

    let samples = raw
        .into_iter()
        .map(|(t, y)| {
            let (xi_e, theta) = sys.unpack(&y);
            let (rate_p, rate_theta) = pb.flow(&xi_e, theta);
            let xi_p = DevMatrix::new(pb.loading.value(t) - xi_e).unwrap_or_else(|_| {
                // Trace drift at roundoff level; project back onto deviators.
                deviator_split(&(pb.loading.value(t) - xi_e)).0
            });
            HomogeneousSample {
                state: HomogeneousState { t, xi_e, theta, xi_p },
                sigma: apply_elasticity(&pb.elasticity, &xi_e),
                rate_p,
                rate_theta,
                energy: EnergyTerms {
                    dissipation: y[m + 1],
                    viscous_p: y[m + 2],
                    viscous_z: y[m + 3],
                    work: y[m + 4],
                },
            }
        })
        .collect();
    Ok(HomogeneousTrajectory { eps: pb.eps, samples, steps })
}

/// Energy balance of an ε-run at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsEnergyAudit {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// `|residual| / (1 + Σ|terms|)`.
    pub scaled_residual: f64,
}

/// `Q(e(T)) + ∫H + V(z(T)) + ε∫|ṗ|² + ε∫|ż|² − Q(e0) − V(z0) − ∫⟨σ, Eẇ⟩`
/// evaluated at every sample of the run.
pub fn energy_audit_homogeneous(pb: &HomogeneousProblem, run: &HomogeneousTrajectory) -> Vec<EpsEnergyAudit> {
    let c = &pb.elasticity;
    let v = &pb.potential;
    let first = &run.samples[0];
    let e0 = elastic_energy(c, &first.state.xi_e) + v.eval(first.state.theta);
    run.samples
        .iter()
        .map(|s| {
            let q = elastic_energy(c, &s.state.xi_e);
            let vz = v.eval(s.state.theta);
            let en = &s.energy;
            let en0 = &first.energy;
            let lhs = q + (en.dissipation - en0.dissipation) + vz + (en.viscous_p - en0.viscous_p)
                + (en.viscous_z - en0.viscous_z);
            let rhs = e0 + (en.work - en0.work);
            let scale = 1.0 + q.abs() + en.dissipation.abs() + vz.abs() + en.viscous_p + en.viscous_z + e0.abs()
                + en.work.abs();
            EpsEnergyAudit { lhs, rhs, residual: lhs - rhs, scaled_residual: (lhs - rhs).abs() / scale }
        })
        .collect()
}

/// `t0 = √(1 − V'(θ0)²) / (2μ|ξ0^s|)`.
pub fn critical_time(mu: f64, xi0s_norm: f64, v: &SofteningPotential, theta0: f64) -> Result<f64> {
    if !(xi0s_norm > 0.0) {
        return Err(Error::InvalidLoading("|ξ0^s| must be positive".into()));
    }
    if !(mu > 0.0) {
        return Err(Error::param("mu", "must be positive"));
    }
    let vp = v.deriv(theta0);
    Ok((1.0 - vp * vp).sqrt() / (2.0 * mu * xi0s_norm))
}

/// Residual of `|ξ0^s|²[2μ(t−ψ) − εψ̇]² + [V'(θ) + εθ̇]² − 1` for a sample
/// of a linear-loading run on the unit ball.
pub fn boundary_constraint_residual(pb: &HomogeneousProblem, s: &HomogeneousSample) -> f64 {
    let dir = pb.loading.direction().expect("fixed-direction loading");
    let n2 = dir.dot(&dir);
    let psi = s.psi(&dir);
    let psi_dot = s.rate_p.as_sym().dot(&dir) / n2;
    let mu = pb.elasticity.mu();
    let a = 2.0 * mu * (s.state.t - psi) - pb.eps * psi_dot;
    let b = pb.potential.deriv(s.state.theta) + pb.eps * s.rate_theta;
    n2 * a * a + b * b - 1.0
}

/// Uniform grid of `n + 1` points on `[a, b]`.
pub fn uniform_times(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::shear_embed;

    pub(crate) fn ball_problem(mu: f64, s: f64, eps: f64) -> HomogeneousProblem {
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
    fn critical_time_examples() {
        let v = SofteningPotential::Sqrt;
        let t0 = critical_time(0.5, 1.0, &v, 3f64.sqrt()).unwrap();
        assert!((t0 - 13f64.sqrt() / 4.0).abs() < 1e-15);
        assert!((t0 - 0.901388).abs() < 1e-6);
        assert!((critical_time(0.5, 1.0, &v, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let a = critical_time(1.0, 1.0, &v, 0.7).unwrap();
        let b = critical_time(2.0, 1.0, &v, 0.7).unwrap();
        assert!((a - 2.0 * b).abs() < 1e-15);
        assert!(critical_time(1.0, 0.0, &v, 0.7).is_err());
    }

    #[test]
    fn loading_programs() {
        let x = SymMatrix::scalar(-1.0);
        let l = LoadingProgram::triangular(x, 2.0).unwrap();
        assert_eq!(l.value(1.0).get(0, 0), -1.0);
        assert_eq!(l.value(3.0).get(0, 0), -1.0);
        assert_eq!(l.rate(2.5).get(0, 0), 1.0);
        assert!((l.variation(0.0, 3.0) - 3.0).abs() < 1e-15);
        let t = LoadingProgram::tabulated(vec![(0.0, SymMatrix::scalar(0.0)), (2.0, SymMatrix::scalar(1.0))]).unwrap();
        assert_eq!(t.value(1.0).get(0, 0), 0.5);
        assert_eq!(t.rate(3.0).get(0, 0), 0.0);
        assert!(LoadingProgram::linear(SymMatrix::zeros(2).unwrap()).is_err());
    }

    #[test]
    fn elastic_phase_is_exact() {
        let pb = ball_problem(1.0, 1.0, 1e-2);
        let theta0 = 0.5;
        let t0 = critical_time(1.0, 1.0, &pb.potential, theta0).unwrap();
        let init = HomogeneousState::initial(&pb.loading, 0.0, theta0);
        let te = uniform_times(0.0, t0 * 0.999, 50);
        let run = integrate_eps_ode(&pb, &init, t0 * 0.999, 1e-9, &te).unwrap();
        for s in &run.samples {
            assert_eq!(s.state.theta, theta0);
            assert_eq!(s.rate_theta, 0.0);
            assert!(s.state.xi_p.norm() < 1e-14);
        }
    }

    #[test]
    fn eps_run_properties() {
        let pb = ball_problem(1.0, 1.0, 1e-2);
        let theta0 = 0.5;
        let t0 = critical_time(1.0, 1.0, &pb.potential, theta0).unwrap();
        let init = HomogeneousState::initial(&pb.loading, 0.0, theta0);
        let tol = 1e-9;
        let te = uniform_times(0.0, 5.0, 500);
        let run = integrate_eps_ode(&pb, &init, 5.0, tol, &te).unwrap();
        let dir = pb.loading.direction().unwrap();
        let mut prev: Option<&HomogeneousSample> = None;
        for s in &run.samples {
            if s.state.t > t0 + 0.05 {
                assert!(boundary_constraint_residual(&pb, s).abs() < 10.0 * tol + 1e-9);
                assert!(s.rate_theta > 0.0);
                assert!(pb.eps * s.rate_theta <= -pb.potential.deriv(s.state.theta));
                assert!(s.state.t - s.psi(&dir) > 0.0);
            }
            if let Some(p) = prev {
                assert!(s.state.theta >= p.state.theta - 1e-12);
                assert!(s.psi(&dir) >= p.psi(&dir) - 1e-12);
            }
            prev = Some(s);
        }
        let audit = energy_audit_homogeneous(&pb, &run);
        assert!(audit.iter().all(|a| a.scaled_residual < 1e-6));
    }
}
