//! Reduced one-dimensional problem on `y ∈ [−1/2, 1/2]`: a spatially
//! constant elastic strain `e(t)` coupled to pointwise plastic fields
//! `p(t, y)` and `z(t, y)`.

mod lift;
mod measure;

pub use lift::{lift_to_shear, verify_lift_homogeneous, LiftDeviation, ShearFields};
pub use measure::{
    energy_gap_report, extract_limit_measure, power_extrapolate, EXCESS_ORDER, young_barycentre, young_dissipation, young_v_action,
    AtomicYoungMeasure, EnergyGapReport, GridMeasure, LimitFit, YoungAtom,
};

use crate::domain::{visco_flow_planar, ElasticDomain};
use crate::error::{Error, Result};
use crate::homogeneous::LoadingProgram;
use crate::ode::{self, OdeOptions, OdeSystem};
use crate::softening::{validate_against_domain, SofteningPotential};

/// Uniform midpoint grid with `n` cells on `[−1/2, 1/2]`. Odd `n` puts a
/// node at `y = 0`; even `n` puts a cell boundary there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid1D {
    n: usize,
}

impl Grid1D {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("grid", "need at least two cells"));
        }
        Ok(Grid1D { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        // Written so that node(n-1-i) == -node(i) exactly.
        0.5 * ((2 * i + 1) as f64 - self.n as f64) * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Index of the node at `−y`.
    pub fn mirror(&self, i: usize) -> usize {
        self.n - 1 - i
    }

    /// Midpoint quadrature.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() * self.h()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes().into_iter().map(f).collect()
    }
}

/// `z0(y) = 1 − 2|y|`: continuous, peaked at 0.
pub fn localization_z0(grid: &Grid1D) -> Vec<f64> {
    grid.sample(|y| 1.0 - 2.0 * y.abs())
}

/// `z0(y) = sign(y)(1 − 2|y|)`: odd, `|z0| < 1` away from 0.
pub fn oscillation_z0(grid: &Grid1D) -> Vec<f64> {
    grid.sample(|y| y.signum() * (1.0 - 2.0 * y.abs()))
}

/// Data of the reduced ε-problem. `boundary` is the imposed span
/// `w(t, 1/2) − w(t, −1/2)` as a scalar (d = 1) loading program.
#[derive(Debug, Clone)]
pub struct ReducedProblem {
    pub mu: f64,
    pub domain: ElasticDomain,
    pub potential: SofteningPotential,
    pub boundary: LoadingProgram,
    pub eps: f64,
    pub grid: Grid1D,
    pub z0: Vec<f64>,
}

impl ReducedProblem {
    pub fn new(
        mu: f64,
        domain: ElasticDomain,
        potential: SofteningPotential,
        boundary: LoadingProgram,
        eps: f64,
        grid: Grid1D,
        z0: Vec<f64>,
    ) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::param("mu", "must be positive"));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::param("eps", "must be positive"));
        }
        if boundary.dim() != 1 {
            return Err(Error::InvalidLoading("boundary span must be scalar".into()));
        }
        if z0.len() != grid.len() {
            return Err(Error::param("z0", format!("expected {} values, got {}", grid.len(), z0.len())));
        }
        validate_against_domain(&potential, &domain)?;
        Ok(ReducedProblem { mu, domain, potential, boundary, eps, grid, z0 })
    }

    /// Diamond `|α| + |ζ| ≤ 2`, Plateau V, `μ = 1/2`, `w(t, y) = ty`.
    pub fn shear_band_problem(eps: f64, grid: Grid1D, z0: Vec<f64>) -> Result<Self> {
        ReducedProblem::new(
            0.5,
            ElasticDomain::diamond(2.0)?,
            SofteningPotential::Plateau,
            LoadingProgram::linear(crate::tensor::SymMatrix::scalar(1.0))?,
            eps,
            grid,
            z0,
        )
    }

    pub fn span(&self, t: f64) -> f64 {
        self.boundary.value(t).get(0, 0)
    }

    pub fn span_rate(&self, t: f64) -> f64 {
        self.boundary.rate(t).get(0, 0)
    }

    pub fn sigma(&self, e: f64) -> f64 {
        2.0 * self.mu * e
    }

    /// Pointwise rates `(ṗ, ż)` at one node.
    pub fn node_flow(&self, e: f64, z: f64) -> (f64, f64) {
        visco_flow_planar(&self.domain, self.sigma(e), -self.potential.deriv(z), self.eps)
    }

    pub fn initial_state(&self) -> ReducedState {
        ReducedState { t: 0.0, e: self.span(0.0), p: vec![0.0; self.grid.len()], z: self.z0.clone() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    pub t: f64,
    pub e: f64,
    pub p: Vec<f64>,
    pub z: Vec<f64>,
}

impl ReducedState {
    pub fn plastic_mass(&self, grid: &Grid1D) -> f64 {
        grid.integrate(&self.p)
    }

    /// `∫(e + p) dy`, to be compared with the imposed span.
    pub fn kinematic_span(&self, grid: &Grid1D) -> f64 {
        self.e + self.plastic_mass(grid)
    }
}

/// Running energy terms of a reduced ε-run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReducedEnergy {
    /// `∫∫ H(ṗ, ż) dy dt`.
    pub dissipation: f64,
    pub viscous_p: f64,
    pub viscous_z: f64,
    /// `∫ σ · span'(t) dt`.
    pub work: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSample {
    pub state: ReducedState,
    pub energy: ReducedEnergy,
}

#[derive(Debug, Clone)]
pub struct ReducedTrajectory {
    pub eps: f64,
    pub grid: Grid1D,
    pub z0: Vec<f64>,
    pub samples: Vec<ReducedSample>,
    pub steps: usize,
}

impl ReducedTrajectory {
    /// Sample taken at time `t` (exact match within 1e-12).
    pub fn at(&self, t: f64) -> Result<&ReducedSample> {
        self.samples
            .iter()
            .find(|s| (s.state.t - t).abs() <= 1e-12 * (1.0 + t.abs()))
            .ok_or_else(|| Error::param("t", format!("no sample at t = {t}")))
    }
}

struct ReducedOde<'a> {
    pb: &'a ReducedProblem,
    n: usize,
}

impl OdeSystem for ReducedOde<'_> {
    fn dim(&self) -> usize {
        2 * self.n + 5
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let n = self.n;
        let pb = self.pb;
        let e = y[0];
        let h = pb.grid.h();
        let sigma = pb.sigma(e);
        let (mut flow, mut diss, mut vp, mut vz) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            let (np, nz) = pb.node_flow(e, y[1 + i]);
            dy[1 + i] = nz;
            dy[1 + n + i] = np;
            if np != 0.0 || nz != 0.0 {
                flow += np;
                diss += pb.domain.support_planar(np, nz);
                vp += np * np;
                vz += nz * nz;
            }
        }
        let rate = pb.span_rate(t);
        dy[0] = rate - h * flow;
        dy[2 * n + 1] = h * diss;
        dy[2 * n + 2] = pb.eps * h * vp;
        dy[2 * n + 3] = pb.eps * h * vz;
        dy[2 * n + 4] = sigma * rate;
    }

    fn max_step(&self, _t: f64, y: &[f64]) -> f64 {
        let pb = self.pb;
        let sigma = pb.sigma(y[0]);
        let outside = y[1..=self.n].iter().any(|&z| {
            let zeta = -pb.potential.deriv(z);
            pb.domain.project_planar(sigma, zeta) != (sigma, zeta)
        });
        if outside {
            0.25 * pb.eps
        } else {
            f64::INFINITY
        }
    }

    fn controlled(&self, i: usize) -> bool {
        i <= 2 * self.n
    }
}

/// Integrates the reduced ε-problem on `[0, t_end]` from the initial state
/// of `pb`, sampling at the sorted times `t_eval`.
pub fn integrate_reduced(pb: &ReducedProblem, t_end: f64, tol: f64, t_eval: &[f64]) -> Result<ReducedTrajectory> {
    if !(t_end > 0.0) {
        return Err(Error::param("t_end", "must be positive"));
    }
    let n = pb.grid.len();
    let sys = ReducedOde { pb, n };
    let init = pb.initial_state();
    let mut y = vec![init.e];
    y.extend_from_slice(&init.z);
    y.extend_from_slice(&init.p);
    y.extend([0.0; 4]);
    let opts = OdeOptions { rtol: tol, atol: tol * 1e-2, h_init: t_end * 1e-4, ..Default::default() };

    let mut cuts = vec![0.0];
    cuts.extend(pb.boundary.breakpoints().into_iter().filter(|&b| b > 0.0 && b < t_end));
    cuts.push(t_end);
    let mut raw = Vec::with_capacity(t_eval.len());
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
        .map(|(t, y)| ReducedSample {
            state: ReducedState { t, e: y[0], z: y[1..=n].to_vec(), p: y[n + 1..=2 * n].to_vec() },
            energy: ReducedEnergy {
                dissipation: y[2 * n + 1],
                viscous_p: y[2 * n + 2],
                viscous_z: y[2 * n + 3],
                work: y[2 * n + 4],
            },
        })
        .collect();
    Ok(ReducedTrajectory { eps: pb.eps, grid: pb.grid, z0: pb.z0.clone(), samples, steps })
}

/// Residual of the reduced energy equality at every sample.
pub fn energy_audit_reduced(pb: &ReducedProblem, run: &ReducedTrajectory) -> Vec<f64> {
    let g = &pb.grid;
    let v0 = g.integrate(&pb.z0.iter().map(|&z| pb.potential.eval(z)).collect::<Vec<_>>());
    let first = &run.samples[0];
    let q0 = pb.mu * first.state.e * first.state.e;
    run.samples
        .iter()
        .map(|s| {
            let vz = g.integrate(&s.state.z.iter().map(|&z| pb.potential.eval(z)).collect::<Vec<_>>());
            let en = &s.energy;
            pb.mu * s.state.e * s.state.e + en.dissipation + vz + en.viscous_p + en.viscous_z - q0 - v0 - en.work
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationReport {
    pub times: Vec<f64>,
    /// `a_ε(t) = sup{|y| : z(t, y) > z0(y) + tol_act}` (0 when no node is active).
    pub active_radius: Vec<f64>,
    /// `m_ε(t) = ∫ p(t, y) dy`.
    pub mass: Vec<f64>,
    /// `sup_t |e_ε(t) − t ∧ 1|`.
    pub e_gap: f64,
    pub radius_monotone: bool,
}

impl LocalizationReport {
    pub fn final_radius(&self) -> f64 {
        *self.active_radius.last().unwrap_or(&0.0)
    }

    pub fn mass_at(&self, t: f64) -> Option<f64> {
        self.times.iter().position(|&s| (s - t).abs() <= 1e-12 * (1.0 + t)).map(|i| self.mass[i])
    }
}

/// Activation threshold for `z > z0`.
pub fn activation_tolerance(z0: &[f64]) -> f64 {
    1e-8 * (1.0 + z0.iter().fold(0.0f64, |m, z| m.max(z.abs())))
}

pub fn localization_diagnostics(run: &ReducedTrajectory) -> LocalizationReport {
    let g = &run.grid;
    let tol = activation_tolerance(&run.z0);
    let mut rep = LocalizationReport {
        times: vec![],
        active_radius: vec![],
        mass: vec![],
        e_gap: 0.0,
        radius_monotone: true,
    };
    for s in &run.samples {
        let st = &s.state;
        let a = (0..g.len())
            .filter(|&i| st.z[i] > run.z0[i] + tol)
            .map(|i| g.node(i).abs())
            .fold(0.0f64, f64::max);
        if let Some(&prev) = rep.active_radius.last() {
            rep.radius_monotone &= a >= prev;
        }
        rep.times.push(st.t);
        rep.active_radius.push(a);
        rep.mass.push(st.plastic_mass(g));
        rep.e_gap = rep.e_gap.max((st.e - st.t.min(1.0)).abs());
    }
    rep
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    /// `max |e − ē|`.
    pub e_diff: f64,
    /// `max |p(y) − p̄(y)|` and `max |p̄(y) − p̄(−y)|`.
    pub p_diff: f64,
    /// `max |z(y) − sign(y) z̄(y)|` and `max |z̄(y) − z̄(−y)|`.
    pub z_diff: f64,
}

impl SymmetryReport {
    pub fn max(&self) -> f64 {
        self.e_diff.max(self.p_diff).max(self.z_diff)
    }
}

/// Compares a run with odd `z0` against the run started from `|z0|`.
pub fn oscillation_symmetry_check(run: &ReducedTrajectory, mirrored: &ReducedTrajectory) -> Result<SymmetryReport> {
    if run.samples.len() != mirrored.samples.len() || run.grid != mirrored.grid {
        return Err(Error::Incompatible("runs are not sampled alike".into()));
    }
    let g = &run.grid;
    let mut rep = SymmetryReport { e_diff: 0.0, p_diff: 0.0, z_diff: 0.0 };
    for (a, b) in run.samples.iter().zip(&mirrored.samples) {
        let (a, b) = (&a.state, &b.state);
        if a.t != b.t {
            return Err(Error::Incompatible("sample times differ".into()));
        }
        rep.e_diff = rep.e_diff.max((a.e - b.e).abs());
        for i in 0..g.len() {
            let j = g.mirror(i);
            rep.p_diff = rep.p_diff.max((a.p[i] - b.p[i]).abs()).max((b.p[i] - b.p[j]).abs());
            let sgn = g.node(i).signum();
            rep.z_diff = rep.z_diff.max((a.z[i] - sgn * b.z[i]).abs()).max((b.z[i] - b.z[j]).abs());
        }
    }
    Ok(rep)
}
