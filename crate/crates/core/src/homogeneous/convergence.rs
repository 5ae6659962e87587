//! ε → 0 convergence of the regularized homogeneous runs towards the
//! quasistatic evolution.

use rayon::prelude::*;

use super::{integrate_eps_ode, uniform_times, HomogeneousProblem, HomogeneousState, QuasistaticTrajectory};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub eps: f64,
    /// `sup |θ_ε − θ|` over the window with `(τ − δ, τ + δ)` removed.
    pub sup_err: f64,
    /// `sup |θ_ε − θ|` over `[τ − δ, τ + δ]`; `None` without a jump.
    pub jump_window_err: Option<f64>,
    /// `sup |θ_ε − θ0|` over `[0, t0]`.
    pub before_t0_err: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub window: (f64, f64),
    pub delta: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    /// Whether `sup_err` strictly decreases along the ε list.
    pub fn monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].sup_err < w[0].sup_err)
    }

    pub fn final_error(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.sup_err)
    }
}

/// Runs the ε-problem for every entry of `eps_list` (decreasing), starting
/// from `θ0` at `t = 0`, and measures the distance to `quasi` on `window`.
/// `template` supplies every datum except ε. The jump time comes from the
/// quasistatic assembly.
pub fn verify_eps_convergence(
    eps_list: &[f64],
    quasi: &QuasistaticTrajectory,
    template: &HomogeneousProblem,
    window: (f64, f64),
    delta: f64,
    tol: f64,
    n_samples: usize,
) -> Result<ConvergenceReport> {
    if eps_list.is_empty() {
        return Err(Error::NoData);
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::param("eps_list", "must be strictly decreasing"));
    }
    let (a, b) = window;
    if !(b > a && a >= 0.0) || b > quasi.t_end {
        return Err(Error::param("window", "must lie inside [0, t_end] of the quasistatic run"));
    }
    let tau = quasi.jump.as_ref().map(|j| j.tau);
    let in_jump_window = |t: f64| tau.is_some_and(|tau| (t - tau).abs() <= delta);

    let mut times = uniform_times(a, b, n_samples);
    times.extend(uniform_times(0.0, quasi.t0, 50));
    if let Some(tau) = tau {
        times.extend(uniform_times((tau - delta).max(0.0), tau + delta, 200));
    }
    times.retain(|&t| t <= b.max(quasi.t0));
    times.sort_by(|x, y| x.partial_cmp(y).unwrap());
    times.dedup();
    let t_end = *times.last().unwrap();
    let reference: Vec<f64> = times.iter().map(|&t| quasi.theta_at(t)).collect();

    let rows: Result<Vec<ConvergenceRow>> = eps_list
        .par_iter()
        .map(|&eps| {
            let mut pb = template.clone();
            pb.eps = eps;
            let init = HomogeneousState::initial(&pb.loading, 0.0, quasi.theta0);
            let run = integrate_eps_ode(&pb, &init, t_end, tol, &times)?;
            let (mut sup_err, mut jump_err, mut before) = (0.0f64, None::<f64>, 0.0f64);
            for (s, &th) in run.samples.iter().zip(&reference) {
                let t = s.state.t;
                let e = (s.state.theta - th).abs();
                if t <= quasi.t0 {
                    before = before.max(e);
                }
                if in_jump_window(t) {
                    jump_err = Some(jump_err.unwrap_or(0.0).max(e));
                } else if t >= a && t <= b {
                    sup_err = sup_err.max(e);
                }
            }
            Ok(ConvergenceRow { eps, sup_err, jump_window_err: jump_err, before_t0_err: before, steps: run.steps })
        })
        .collect();
    Ok(ConvergenceReport { window, delta, rows: rows? })
}
