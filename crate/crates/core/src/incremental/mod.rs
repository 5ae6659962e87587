//! Implicit-Euler incremental minimization of the ε-regularized problem:
//! single steps for the homogeneous and the reduced 1D models, full runs
//! on a time grid, interpolants and the verification suite.

mod homogeneous;
mod reduced;
mod verify;

pub use homogeneous::{incremental_step_homogeneous, incremental_step_homogeneous_from, run_incremental_homogeneous};
pub use reduced::{incremental_step_1d, run_incremental_1d};
pub use verify::{
    discrete_energy_estimate_1d, discrete_energy_estimate_homogeneous, sup_error_vs_ode_1d,
    sup_error_vs_ode_homogeneous, verify_dual_optimality_1d, verify_dual_optimality_homogeneous, verify_euler_1d,
    verify_euler_homogeneous, DualEnergyCheck, DualReport, EnergyEstimateReport, EulerReport,
};

use crate::error::{Error, Result};
use crate::homogeneous::HomogeneousState;
use crate::shear1d::ReducedState;

/// Strictly increasing time knots starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    knots: Vec<f64>,
    tau_max: f64,
}

impl TimeGrid {
    pub fn from_knots(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || knots[0] != 0.0 {
            return Err(Error::param("knots", "need at least two knots starting at 0"));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::param("knots", "must be strictly increasing"));
        }
        let tau_max = knots.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        Ok(TimeGrid { knots, tau_max })
    }

    /// Uniform grid on `[0, t_end]` whose step does not exceed `tau`.
    pub fn uniform(t_end: f64, tau: f64) -> Result<Self> {
        if !(t_end > 0.0 && tau > 0.0) {
            return Err(Error::param("tau", "t_end and tau must be positive"));
        }
        let n = ((t_end / tau) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let mut knots: Vec<f64> = (0..=n).map(|i| t_end * i as f64 / n as f64).collect();
        knots[n] = t_end;
        Self::from_knots(knots)
    }

    /// Uniform grid with `τ = ε/(2M)`.
    pub fn default_for(t_end: f64, eps: f64, m: f64) -> Result<Self> {
        let tau = if m > 0.0 { eps / (2.0 * m) } else { eps };
        Self::uniform(t_end, tau)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn t_end(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.knots.len() < 2
    }

    /// Rejects grids with `τ ≥ ε/M`.
    pub fn check_window(&self, eps: f64, m: f64) -> Result<()> {
        check_tau(self.tau_max, eps, m)
    }
}

pub(crate) fn check_tau(tau: f64, eps: f64, m: f64) -> Result<()> {
    if !(tau > 0.0) {
        return Err(Error::param("tau", "must be positive"));
    }
    if m > 0.0 && tau * m >= eps {
        return Err(Error::param("tau", format!("τ = {tau:e} violates τ < ε/M = {:e}", eps / m)));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Absolute tolerance on the residual of the implicit flow relation.
    pub kkt_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { kkt_tol: 1e-9, max_iter: 5000 }
    }
}

/// Outcome of one incremental step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult<S> {
    pub state: S,
    /// `|(Δp, Δz)/τ − N_K^ε(σ¹_D, ζ¹)|` (max over nodes in 1D, including
    /// the equilibrium residual).
    pub kkt_residual: f64,
    /// Fenchel–Young gap `H_ε(Δ/τ) + H_ε*(σ¹_D, ζ¹) − ⟨(σ¹_D, ζ¹), Δ/τ⟩`.
    pub dual_gap: f64,
    pub iterations: usize,
}

/// States that can be interpolated in time.
pub trait StepState: Clone {
    fn time(&self) -> f64;
    /// `(1 − s)·self + s·other`.
    fn lerp(&self, other: &Self, s: f64) -> Self;
}

impl StepState for HomogeneousState {
    fn time(&self) -> f64 {
        self.t
    }

    fn lerp(&self, o: &Self, s: f64) -> Self {
        HomogeneousState {
            t: self.t + s * (o.t - self.t),
            xi_e: self.xi_e + (o.xi_e - self.xi_e) * s,
            theta: self.theta + s * (o.theta - self.theta),
            xi_p: self.xi_p + (o.xi_p - self.xi_p) * s,
        }
    }
}

impl StepState for ReducedState {
    fn time(&self) -> f64 {
        self.t
    }

    fn lerp(&self, o: &Self, s: f64) -> Self {
        let mix = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect();
        ReducedState { t: self.t + s * (o.t - self.t), e: self.e + s * (o.e - self.e), p: mix(&self.p, &o.p), z: mix(&self.z, &o.z) }
    }
}

/// Initial state and every step of an incremental run.
#[derive(Debug, Clone)]
pub struct IncrementalRun<S> {
    pub eps: f64,
    pub grid: TimeGrid,
    pub initial: S,
    pub steps: Vec<StepResult<S>>,
}

impl<S: StepState> IncrementalRun<S> {
    pub fn state(&self, i: usize) -> &S {
        if i == 0 {
            &self.initial
        } else {
            &self.steps[i - 1].state
        }
    }

    pub fn states(&self) -> impl Iterator<Item = &S> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|s| &s.state))
    }

    pub fn interpolants(&self) -> Interpolants<'_, S> {
        Interpolants { knots: self.grid.knots(), states: self.states().collect() }
    }

    pub fn max_kkt(&self) -> f64 {
        self.steps.iter().map(|s| s.kkt_residual).fold(0.0, f64::max)
    }
}

/// Piecewise constant and piecewise affine views of a run.
#[derive(Debug, Clone)]
pub struct Interpolants<'a, S> {
    knots: &'a [f64],
    states: Vec<&'a S>,
}

impl<S: StepState> Interpolants<'_, S> {
    // Index i with t in [t^i, t^{i+1}), clamped to the grid.
    fn interval(&self, t: f64) -> usize {
        let n = self.knots.len() - 1;
        match self.knots.partition_point(|&k| k <= t) {
            0 => 0,
            i => (i - 1).min(n),
        }
    }

    /// Value on `[t^i, t^{i+1})` is the state at `t^i`.
    pub fn constant(&self, t: f64) -> &S {
        self.states[self.interval(t)]
    }

    /// Continuous piecewise affine interpolation through the knots.
    pub fn affine(&self, t: f64) -> S {
        let n = self.knots.len() - 1;
        let i = self.interval(t).min(n - 1);
        let s = ((t - self.knots[i]) / (self.knots[i + 1] - self.knots[i])).clamp(0.0, 1.0);
        let mut out = self.states[i].lerp(self.states[i + 1], s);
        if s == 1.0 {
            out = self.states[i + 1].clone();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::SymMatrix;

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::from_knots(vec![0.0, 0.5, 0.5]).is_err());
        assert!(TimeGrid::from_knots(vec![0.1, 0.5]).is_err());
        let g = TimeGrid::uniform(1.0, 0.3).unwrap();
        assert_eq!(g.len(), 4);
        assert!(g.tau_max() <= 0.3);
        assert_eq!(g.t_end(), 1.0);
        assert!(g.check_window(1e-2, 0.5).is_err());
        assert!(TimeGrid::uniform(1.0, 0.01).unwrap().check_window(1e-2, 0.5).is_ok());
        let d = TimeGrid::default_for(1.0, 1e-2, 0.5).unwrap();
        assert!((d.tau_max() - 1e-2).abs() < 1e-12);
    }

    #[test]
    fn interpolants_are_consistent() {
        let st = |t: f64, th: f64| HomogeneousState {
            t,
            xi_e: SymMatrix::scalar(t),
            theta: th,
            xi_p: crate::tensor::DevMatrix::scalar(0.0),
        };
        let run = IncrementalRun {
            eps: 1.0,
            grid: TimeGrid::from_knots(vec![0.0, 1.0, 3.0]).unwrap(),
            initial: st(0.0, 0.0),
            steps: vec![
                StepResult { state: st(1.0, 2.0), kkt_residual: 0.0, dual_gap: 0.0, iterations: 0 },
                StepResult { state: st(3.0, 4.0), kkt_residual: 0.0, dual_gap: 0.0, iterations: 0 },
            ],
        };
        let it = run.interpolants();
        assert_eq!(it.constant(0.99).theta, 0.0);
        assert_eq!(it.constant(1.0).theta, 2.0);
        assert_eq!(it.constant(5.0).theta, 4.0);
        assert_eq!(it.affine(0.5).theta, 1.0);
        assert_eq!(it.affine(1.0).theta, 2.0);
        assert_eq!(it.affine(2.0).theta, 3.0);
        assert_eq!(it.affine(3.0).theta, 4.0);
    }
}
