//! Checks on incremental solutions: Euler conditions, dual optimality,
//! discrete energy estimates and distance to the ε-ODE.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::IncrementalRun;
use crate::domain::{self, FlowDirection, StressPoint};
use crate::error::Result;
use crate::homogeneous::{integrate_eps_ode, uniform_times, HomogeneousProblem, HomogeneousState};
use crate::shear1d::{integrate_reduced, ReducedProblem, ReducedState};
use crate::tensor::{apply_elasticity, deviator_split, elastic_conjugate, elastic_energy, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerReport {
    /// Largest relative violation of `x ∈ ∂H(Δp, Δz)` (distance of `x` to
    /// `K` plus the mismatch `⟨x, Δ⟩ − H(Δ)`), over nodes.
    pub max_violation: f64,
    pub failed_nodes: usize,
    /// `|e + p − ξ_s|` (homogeneous) or `|e + ∫p − span|` (1D).
    pub equilibrium_residual: f64,
    pub passed: bool,
}

fn euler_violation(k: &domain::ElasticDomain, x: &StressPoint, dir: &FlowDirection) -> f64 {
    let h = domain::support(k, dir);
    let dist = domain::distance(k, x) / (1.0 + x.norm());
    dist.max((x.pair(dir) - h).abs() / (1.0 + h))
}

fn stress_point(pb: &HomogeneousProblem, s: &HomogeneousState) -> StressPoint {
    let (dev, _) = deviator_split(&s.xi_e);
    StressPoint::new(dev * (2.0 * pb.elasticity.mu()), -pb.potential.deriv(s.theta))
}

/// Tests `(σ¹_D − (ε/τ)Δp, ζ¹ − (ε/τ)Δz) ∈ ∂H(Δp, Δz)` for the step
/// `prev → next`, plus kinematic compatibility of `next`.
pub fn verify_euler_homogeneous(pb: &HomogeneousProblem, prev: &HomogeneousState, next: &HomogeneousState, tol: f64) -> EulerReport {
    let tau = next.t - prev.t;
    let c = pb.eps / tau;
    let dir = FlowDirection::new(next.xi_p - prev.xi_p, next.theta - prev.theta);
    let s = stress_point(pb, next);
    let x = StressPoint::new(s.sigma - dir.xi * c, s.zeta - c * dir.theta);
    let ok = domain::subgradient_test(&pb.domain, &x, &dir, tol);
    let eq = (pb.loading.value(next.t) - next.xi_e - *next.xi_p.as_sym()).norm();
    EulerReport {
        max_violation: euler_violation(&pb.domain, &x, &dir),
        failed_nodes: usize::from(!ok),
        equilibrium_residual: eq,
        passed: ok && eq <= tol * (1.0 + next.xi_e.norm()),
    }
}

/// Nodewise version of [`verify_euler_homogeneous`]; the stress is constant
/// in `y` by construction, so equilibrium reduces to `e + ∫p = span`.
pub fn verify_euler_1d(pb: &ReducedProblem, prev: &ReducedState, next: &ReducedState, tol: f64) -> EulerReport {
    let tau = next.t - prev.t;
    let c = pb.eps / tau;
    let sigma = pb.sigma(next.e);
    let mut rep = EulerReport { max_violation: 0.0, failed_nodes: 0, equilibrium_residual: 0.0, passed: true };
    for i in 0..pb.grid.len() {
        let dir = FlowDirection::planar(next.p[i] - prev.p[i], next.z[i] - prev.z[i]);
        let zeta = -pb.potential.deriv(next.z[i]);
        let x = StressPoint::planar(sigma - c * dir.xi.as_scalar(), zeta - c * dir.theta);
        if !domain::subgradient_test(&pb.domain, &x, &dir, tol) {
            rep.failed_nodes += 1;
        }
        rep.max_violation = rep.max_violation.max(euler_violation(&pb.domain, &x, &dir));
    }
    rep.equilibrium_residual = (next.kinematic_span(&pb.grid) - pb.span(next.t)).abs();
    rep.passed = rep.failed_nodes == 0 && rep.equilibrium_residual <= tol * (1.0 + next.e.abs());
    rep
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualReport {
    /// Dual objective at `(σ¹, ζ¹)`.
    pub value: f64,
    /// Objective change for a zero perturbation.
    pub zero_perturbation_diff: f64,
    /// Smallest objective increase over the random perturbations.
    pub min_increase: f64,
    /// Least-squares `c` in `increase ≈ c δ²` for stress-only perturbations.
    pub growth_constant: f64,
    pub passed: bool,
}

fn random_sym(rng: &mut ChaCha8Rng, d: usize, size: f64) -> SymMatrix {
    let mut m = SymMatrix::zeros(d).unwrap();
    for i in 0..d {
        for j in i..d {
            m.set(i, j, rng.gen_range(-size..=size));
        }
    }
    m
}

fn finish_dual(
    value: f64,
    zero: f64,
    joint: impl Iterator<Item = f64>,
    growth: impl Iterator<Item = (f64, f64)>,
    tol: f64,
) -> DualReport {
    let min_increase = joint.fold(f64::INFINITY, f64::min);
    let (num, den) = growth.fold((0.0, 0.0), |(n, d), (delta, inc)| (n + inc * delta * delta, d + delta.powi(4)));
    let growth_constant = num / den;
    DualReport {
        value,
        zero_perturbation_diff: zero,
        min_increase,
        growth_constant,
        passed: min_increase >= -tol && zero.abs() <= tol && growth_constant > 0.0,
    }
}

/// Evaluates the dual objective
/// `(1/τ)Q*(σ − σ⁰) + H_ε*(σ_D, ζ) − (1/τ)ζΔz − (1/τ)⟨σ, Δξ_s⟩`
/// at the step's stress and at `n_perturb` random perturbations of size
/// up to `size` (seeded).
pub fn verify_dual_optimality_homogeneous(
    pb: &HomogeneousProblem,
    prev: &HomogeneousState,
    next: &HomogeneousState,
    n_perturb: usize,
    size: f64,
    seed: u64,
    tol: f64,
) -> DualReport {
    let tau = next.t - prev.t;
    let c = &pb.elasticity;
    let sigma0 = apply_elasticity(c, &prev.xi_e);
    let sigma1 = apply_elasticity(c, &next.xi_e);
    let zeta1 = -pb.potential.deriv(next.theta);
    let dz = next.theta - prev.theta;
    let dxi = (next.xi_e + *next.xi_p.as_sym()) - (prev.xi_e + *prev.xi_p.as_sym());
    let j = |s: &SymMatrix, zeta: f64| {
        let (dev, _) = deviator_split(s);
        elastic_conjugate(c, &(*s - sigma0)) / tau
            + domain::hepsilon_conjugate(&pb.domain, &StressPoint::new(dev, zeta), pb.eps).unwrap()
            - zeta * dz / tau
            - s.dot(&dxi) / tau
    };
    let v0 = j(&sigma1, zeta1);
    let d = next.xi_e.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let joint: Vec<f64> = (0..n_perturb)
        .map(|_| {
            let ds = random_sym(&mut rng, d, size);
            let dzeta = rng.gen_range(-size..=size);
            j(&(sigma1 + ds), zeta1 + dzeta) - v0
        })
        .collect();
    let mut growth = vec![];
    for _ in 0..10 {
        let dir = random_sym(&mut rng, d, 1.0);
        let dir = dir * (1.0 / dir.norm());
        for k in 0..3 {
            let delta = size / f64::from(1 << k);
            growth.push((delta, j(&(sigma1 + dir * delta), zeta1) - v0));
        }
    }
    finish_dual(v0, j(&sigma1, zeta1) - v0, joint.into_iter(), growth.into_iter(), tol)
}

/// 1D version: admissible stresses are constants in `y`; `ζ` is perturbed
/// nodewise.
pub fn verify_dual_optimality_1d(
    pb: &ReducedProblem,
    prev: &ReducedState,
    next: &ReducedState,
    n_perturb: usize,
    size: f64,
    seed: u64,
    tol: f64,
) -> DualReport {
    let tau = next.t - prev.t;
    let g = pb.grid;
    let sigma0 = pb.sigma(prev.e);
    let sigma1 = pb.sigma(next.e);
    let zeta1: Vec<f64> = next.z.iter().map(|&z| -pb.potential.deriv(z)).collect();
    let dz: Vec<f64> = next.z.iter().zip(&prev.z).map(|(a, b)| a - b).collect();
    let dspan = next.kinematic_span(&g) - prev.kinematic_span(&g);
    let j = |s: f64, zeta: &[f64]| {
        let dens: Vec<f64> = (0..g.len())
            .map(|i| {
                let (pa, pz) = pb.domain.project_planar(s, zeta[i]);
                ((s - pa).powi(2) + (zeta[i] - pz).powi(2)) / (2.0 * pb.eps) - zeta[i] * dz[i] / tau
            })
            .collect();
        (s - sigma0).powi(2) / (4.0 * pb.mu) / tau + g.integrate(&dens) - s * dspan / tau
    };
    let v0 = j(sigma1, &zeta1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let joint: Vec<f64> = (0..n_perturb)
        .map(|_| {
            let ds = rng.gen_range(-size..=size);
            let zeta: Vec<f64> = zeta1.iter().map(|z| z + rng.gen_range(-size..=size)).collect();
            j(sigma1 + ds, &zeta) - v0
        })
        .collect();
    let growth: Vec<(f64, f64)> = (0..3)
        .flat_map(|k| {
            let delta = size / f64::from(1 << k);
            [(delta, j(sigma1 + delta, &zeta1) - v0), (delta, j(sigma1 - delta, &zeta1) - v0)]
        })
        .collect();
    finish_dual(v0, j(sigma1, &zeta1) - v0, joint.into_iter(), growth.into_iter(), tol)
}

/// Dual estimate
/// `α_C ∫|ė^△|² + H_ε*(end) − H_ε*(start) ≤ M ∫|ż^△|² + ∫⟨σ̇^△, Eẇ⟩`
/// evaluated from `t = 0` to every knot.
#[derive(Debug, Clone, PartialEq)]
pub struct DualEnergyCheck {
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub max_excess: f64,
    pub holds: bool,
}

/// Primal estimate from `t = 0` to every knot:
/// `Q(e_j) + ΣH(Δp, Δz) + V(z_j) + (ε/2)∫(|ṗ^△|² + |ż^△|²)
///  ≤ Q(e_0) + V(z_0) + Σ⟨σ^{r−1}, Δw_r⟩ + ω`,
/// with `ω = ρ ∫_0^T |Eẇ|` and `ρ = max_r β_C ∫_{step r} |Eẇ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyEstimateReport {
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub omega: f64,
    /// `max (lhs − rhs)`; non-positive when the estimate holds exactly.
    pub max_excess: f64,
    pub holds: bool,
    pub dual: DualEnergyCheck,
}

// Per-step increments shared by both models.
struct StepTerms {
    t: f64,
    elastic: f64,
    dissipation: f64,
    softening: f64,
    viscous: f64,
    work_prev: f64,
    variation: f64,
    de2: f64,
    dz2: f64,
    hstar: f64,
    dsigma_dw: f64,
}

fn assemble_report(first: StepTerms, steps: Vec<StepTerms>, beta: f64, alpha: f64, m: f64, total_var: f64, tol: f64) -> EnergyEstimateReport {
    let rho = steps.iter().map(|s| beta * s.variation).fold(0.0, f64::max);
    let omega = rho * total_var;
    let mut rep = EnergyEstimateReport {
        times: vec![first.t],
        lhs: vec![first.elastic + first.softening],
        rhs: vec![first.elastic + first.softening + omega],
        omega,
        max_excess: f64::NEG_INFINITY,
        holds: true,
        dual: DualEnergyCheck { lhs: vec![0.0], rhs: vec![0.0], max_excess: f64::NEG_INFINITY, holds: true },
    };
    let (mut diss, mut visc, mut work) = (0.0, 0.0, 0.0);
    let (mut de2, mut dz2, mut sw) = (0.0, 0.0, 0.0);
    for s in &steps {
        diss += s.dissipation;
        visc += s.viscous;
        work += s.work_prev;
        de2 += s.de2;
        dz2 += s.dz2;
        sw += s.dsigma_dw;
        rep.times.push(s.t);
        rep.lhs.push(s.elastic + diss + s.softening + visc);
        rep.rhs.push(first.elastic + first.softening + work + omega);
        rep.dual.lhs.push(alpha * de2 + s.hstar - first.hstar);
        rep.dual.rhs.push(m * dz2 + sw);
    }
    let scale = |r: f64| tol * (1.0 + r.abs());
    for (l, r) in rep.lhs.iter().zip(&rep.rhs) {
        rep.max_excess = rep.max_excess.max(l - r);
        rep.holds &= l - r <= scale(*r);
    }
    for (l, r) in rep.dual.lhs.iter().zip(&rep.dual.rhs) {
        rep.dual.max_excess = rep.dual.max_excess.max(l - r);
        rep.dual.holds &= l - r <= scale(*r);
    }
    rep
}

pub fn discrete_energy_estimate_homogeneous(pb: &HomogeneousProblem, run: &IncrementalRun<HomogeneousState>, tol: f64) -> EnergyEstimateReport {
    let c = &pb.elasticity;
    let (alpha, beta) = c.energy_bounds(pb.dim());
    let hstar = |s: &HomogeneousState| domain::hepsilon_conjugate(&pb.domain, &stress_point(pb, s), pb.eps).unwrap();
    let s0 = &run.initial;
    let first = StepTerms {
        t: s0.t,
        elastic: elastic_energy(c, &s0.xi_e),
        dissipation: 0.0,
        softening: pb.potential.eval(s0.theta),
        viscous: 0.0,
        work_prev: 0.0,
        variation: 0.0,
        de2: 0.0,
        dz2: 0.0,
        hstar: hstar(s0),
        dsigma_dw: 0.0,
    };
    let states: Vec<&HomogeneousState> = run.states().collect();
    let steps = states
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let tau = b.t - a.t;
            let dp = b.xi_p - a.xi_p;
            let dz = b.theta - a.theta;
            let dw = pb.loading.value(b.t) - pb.loading.value(a.t);
            let dsigma = apply_elasticity(c, &b.xi_e) - apply_elasticity(c, &a.xi_e);
            let de = b.xi_e - a.xi_e;
            StepTerms {
                t: b.t,
                elastic: elastic_energy(c, &b.xi_e),
                dissipation: domain::support(&pb.domain, &FlowDirection::new(dp, dz)),
                softening: pb.potential.eval(b.theta),
                viscous: 0.5 * pb.eps * (dp.dot(&dp) + dz * dz) / tau,
                work_prev: apply_elasticity(c, &a.xi_e).dot(&dw),
                variation: pb.loading.variation(a.t, b.t),
                de2: de.dot(&de) / tau,
                dz2: dz * dz / tau,
                hstar: hstar(b),
                dsigma_dw: dsigma.dot(&dw) / tau,
            }
        })
        .collect();
    let total = pb.loading.variation(0.0, run.grid.t_end());
    assemble_report(first, steps, beta, alpha, pb.potential.curvature_bound(), total, tol)
}

pub fn discrete_energy_estimate_1d(pb: &ReducedProblem, run: &IncrementalRun<ReducedState>, tol: f64) -> EnergyEstimateReport {
    let g = pb.grid;
    let v_int = |s: &ReducedState| g.integrate(&s.z.iter().map(|&z| pb.potential.eval(z)).collect::<Vec<_>>());
    let hstar = |s: &ReducedState| {
        let sigma = pb.sigma(s.e);
        let dens: Vec<f64> = s
            .z
            .iter()
            .map(|&z| {
                let zeta = -pb.potential.deriv(z);
                let (pa, pz) = pb.domain.project_planar(sigma, zeta);
                ((sigma - pa).powi(2) + (zeta - pz).powi(2)) / (2.0 * pb.eps)
            })
            .collect();
        g.integrate(&dens)
    };
    let s0 = &run.initial;
    let first = StepTerms {
        t: s0.t,
        elastic: pb.mu * s0.e * s0.e,
        dissipation: 0.0,
        softening: v_int(s0),
        viscous: 0.0,
        work_prev: 0.0,
        variation: 0.0,
        de2: 0.0,
        dz2: 0.0,
        hstar: hstar(s0),
        dsigma_dw: 0.0,
    };
    let states: Vec<&ReducedState> = run.states().collect();
    let steps = states
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let tau = b.t - a.t;
            let n = g.len();
            let dp: Vec<f64> = (0..n).map(|i| b.p[i] - a.p[i]).collect();
            let dz: Vec<f64> = (0..n).map(|i| b.z[i] - a.z[i]).collect();
            let dw = pb.span(b.t) - pb.span(a.t);
            StepTerms {
                t: b.t,
                elastic: pb.mu * b.e * b.e,
                dissipation: g.integrate(&(0..n).map(|i| pb.domain.support_planar(dp[i], dz[i])).collect::<Vec<_>>()),
                softening: v_int(b),
                viscous: 0.5 * pb.eps * g.integrate(&(0..n).map(|i| dp[i] * dp[i] + dz[i] * dz[i]).collect::<Vec<_>>()) / tau,
                work_prev: pb.sigma(a.e) * dw,
                variation: pb.boundary.variation(a.t, b.t),
                de2: (b.e - a.e).powi(2) / tau,
                dz2: g.integrate(&dz.iter().map(|x| x * x).collect::<Vec<_>>()) / tau,
                hstar: hstar(b),
                dsigma_dw: (pb.sigma(b.e) - pb.sigma(a.e)) * dw / tau,
            }
        })
        .collect();
    let total = pb.boundary.variation(0.0, run.grid.t_end());
    assemble_report(first, steps, pb.mu, pb.mu, pb.potential.curvature_bound(), total, tol)
}

/// `sup_t max(|θ^△ − θ|, |ξ_p^△ − ξ_p|)` over `n_samples + 1` uniform
/// times, against the ε-ODE integrated at `ode_tol`.
pub fn sup_error_vs_ode_homogeneous(
    pb: &HomogeneousProblem,
    run: &IncrementalRun<HomogeneousState>,
    ode_tol: f64,
    n_samples: usize,
) -> Result<f64> {
    let times = uniform_times(0.0, run.grid.t_end(), n_samples);
    let ode = integrate_eps_ode(pb, &run.initial, run.grid.t_end(), ode_tol, &times)?;
    let it = run.interpolants();
    Ok(ode
        .samples
        .iter()
        .map(|s| {
            let a = it.affine(s.state.t);
            (a.theta - s.state.theta).abs().max((a.xi_p - s.state.xi_p).norm())
        })
        .fold(0.0, f64::max))
}

/// 1D version of [`sup_error_vs_ode_homogeneous`]: max over `e`, `p(y)`,
/// `z(y)`.
pub fn sup_error_vs_ode_1d(pb: &ReducedProblem, run: &IncrementalRun<ReducedState>, ode_tol: f64, n_samples: usize) -> Result<f64> {
    let times = uniform_times(0.0, run.grid.t_end(), n_samples);
    let ode = integrate_reduced(pb, run.grid.t_end(), ode_tol, &times)?;
    let it = run.interpolants();
    Ok(ode
        .samples
        .iter()
        .map(|s| {
            let a = it.affine(s.state.t);
            let dp = a.p.iter().zip(&s.state.p).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            let dz = a.z.iter().zip(&s.state.z).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            (a.e - s.state.e).abs().max(dp).max(dz)
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::super::{run_incremental_1d, run_incremental_homogeneous, SolverOptions, TimeGrid};
    use super::*;
    use crate::domain::ElasticDomain;
    use crate::homogeneous::LoadingProgram;
    use crate::shear1d::{localization_z0, Grid1D};
    use crate::softening::SofteningPotential;
    use crate::tensor::{shear_embed, IsotropicElasticity};

    fn ball_problem(eps: f64) -> HomogeneousProblem {
        HomogeneousProblem::new(
            IsotropicElasticity::new(1.0, 1.0).unwrap(),
            ElasticDomain::ball(1.0).unwrap(),
            SofteningPotential::Sqrt,
            LoadingProgram::linear(*shear_embed(1.0, 2).unwrap().as_sym()).unwrap(),
            eps,
        )
        .unwrap()
    }

    fn hrun(eps: f64, t_end: f64, tau: f64) -> (HomogeneousProblem, IncrementalRun<HomogeneousState>) {
        let pb = ball_problem(eps);
        let init = HomogeneousState::initial(&pb.loading, 0.0, 0.5);
        let run = run_incremental_homogeneous(&pb, &init, &TimeGrid::uniform(t_end, tau).unwrap(), &SolverOptions::default()).unwrap();
        (pb, run)
    }

    #[test]
    fn euler_and_dual_checks_pass_on_accepted_steps() {
        let (pb, run) = hrun(1e-2, 2.0, 5e-3);
        let states: Vec<&HomogeneousState> = run.states().collect();
        for w in states.windows(2).step_by(7) {
            let e = verify_euler_homogeneous(&pb, w[0], w[1], 1e-8);
            assert!(e.passed, "{e:?} at {}", w[1].t);
            let d = verify_dual_optimality_homogeneous(&pb, w[0], w[1], 50, 0.05, 7, 1e-8);
            assert!(d.passed, "{d:?}");
            assert_eq!(d.zero_perturbation_diff, 0.0);
        }
    }

    #[test]
    fn perturbed_state_fails_euler() {
        let (pb, run) = hrun(1e-2, 1.5, 5e-3);
        let n = run.steps.len();
        let (a, mut b) = (*run.state(n - 1), *run.state(n));
        assert!(verify_euler_homogeneous(&pb, &a, &b, 1e-8).passed);
        b.xi_p = b.xi_p + shear_embed(0.01, 2).unwrap();
        assert!(!verify_euler_homogeneous(&pb, &a, &b, 1e-8).passed);
    }

    #[test]
    fn elastic_window_energy_slack_is_omega() {
        let (pb, run) = hrun(1e-2, 0.5, 5e-3);
        let r = discrete_energy_estimate_homogeneous(&pb, &run, 1e-10);
        assert!(r.holds);
        // Elastic: Q(e_j) − Q(e_0) − Σ⟨σ^{r−1}, Δw⟩ = Σ Q(Δw) ≤ ω.
        let slack = r.rhs.last().unwrap() - r.lhs.last().unwrap();
        assert!(slack > 0.0 && slack <= r.omega * (1.0 + 1e-12));
    }

    #[test]
    fn energy_estimates_hold_and_omega_shrinks() {
        let mut omegas = vec![];
        for tau in [1e-2, 5e-3, 2.5e-3] {
            let (pb, run) = hrun(2e-2, 3.0, tau);
            let r = discrete_energy_estimate_homogeneous(&pb, &run, 1e-9);
            assert!(r.holds, "{}", r.max_excess);
            assert!(r.dual.holds, "{}", r.dual.max_excess);
            omegas.push(r.omega);
        }
        assert!(omegas[1] < omegas[0] && omegas[2] < omegas[1]);
    }

    #[test]
    fn tau_convergence_to_ode() {
        let errs: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
            .iter()
            .map(|&tau| {
                let (pb, run) = hrun(2e-2, 3.0, tau);
                sup_error_vs_ode_homogeneous(&pb, &run, 1e-10, 300).unwrap()
            })
            .collect();
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
    }

    #[test]
    fn gronwall_stability() {
        let pb = ball_problem(2e-2);
        let grid = TimeGrid::uniform(3.0, 5e-3).unwrap();
        let o = SolverOptions::default();
        let base = run_incremental_homogeneous(&pb, &HomogeneousState::initial(&pb.loading, 0.0, 0.5), &grid, &o).unwrap();
        let consts: Vec<f64> = [1e-3, 1e-4]
            .iter()
            .map(|&d| {
                let r = run_incremental_homogeneous(&pb, &HomogeneousState::initial(&pb.loading, 0.0, 0.5 + d), &grid, &o).unwrap();
                base.states().zip(r.states()).map(|(a, b)| (a.theta - b.theta).abs() + (a.xi_p - b.xi_p).norm()).fold(0.0, f64::max) / d
            })
            .collect();
        assert!(consts.iter().all(|c| c.is_finite() && *c < 1e3), "{consts:?}");
        assert!((consts[0] / consts[1] - 1.0).abs() < 0.2, "{consts:?}");
    }

    fn reduced(eps: f64, n: usize) -> ReducedProblem {
        let g = Grid1D::new(n).unwrap();
        ReducedProblem::shear_band_problem(eps, g, localization_z0(&g)).unwrap()
    }

    #[test]
    fn one_d_run_checks() {
        let pb = reduced(2e-2, 20);
        let m = pb.potential.curvature_bound();
        let run = run_incremental_1d(&pb, &TimeGrid::uniform(2.0, pb.eps / (2.0 * m)).unwrap(), &SolverOptions::default()).unwrap();
        let states: Vec<&ReducedState> = run.states().collect();
        for w in states.windows(2).step_by(5) {
            let e = verify_euler_1d(&pb, w[0], w[1], 1e-8);
            assert!(e.passed, "{e:?}");
            assert!(verify_dual_optimality_1d(&pb, w[0], w[1], 50, 0.05, 3, 1e-8).passed);
        }
        let r = discrete_energy_estimate_1d(&pb, &run, 1e-9);
        assert!(r.holds && r.dual.holds, "{} {}", r.max_excess, r.dual.max_excess);
        let mut bad = states[states.len() - 1].clone();
        bad.p[10] += 0.01;
        assert!(!verify_euler_1d(&pb, states[states.len() - 2], &bad, 1e-8).passed);
    }

    #[test]
    fn one_d_tau_convergence() {
        let pb = reduced(2e-2, 20);
        let m = pb.potential.curvature_bound();
        let errs: Vec<f64> = [2.0, 4.0, 8.0]
            .iter()
            .map(|&k| {
                let run = run_incremental_1d(&pb, &TimeGrid::uniform(3.0, pb.eps / (k * m)).unwrap(), &SolverOptions::default()).unwrap();
                sup_error_vs_ode_1d(&pb, &run, 1e-10, 300).unwrap()
            })
            .collect();
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
    }
}
