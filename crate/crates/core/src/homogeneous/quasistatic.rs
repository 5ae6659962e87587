//! Quasistatic limit: slow dynamics `B0 θ̇ = A0`, integrated with θ as the
//! independent variable (`dt/dθ = B0/A0` stays bounded where `B0 → 0`),
//! glued to jumps given by the fast-transition map.

use super::slowfast::{fast_orbit, Case, FastOrbit, SlowFastDecomposition};
use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions, OdeSystem};

/// Jump of the quasistatic evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub tau: f64,
    pub theta_minus: f64,
    pub theta_plus: f64,
    pub psi_minus: f64,
    pub psi_plus: f64,
    /// `H` of the jump increment `(Δψ ξ0^s, Δθ)`.
    pub chord: f64,
    pub orbit: FastOrbit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasistaticSample {
    pub t: f64,
    pub theta: f64,
    pub psi: f64,
    /// `|σ| = 2μ(t − ψ)|ξ0^s|`; σ is parallel to ξ0^s.
    pub sigma_norm: f64,
}

#[derive(Debug, Clone)]
struct SlowSegment {
    // Knots: θ, then (t, D, W) and their θ-derivatives.
    theta: Vec<f64>,
    y: Vec<[f64; 3]>,
    f: Vec<[f64; 3]>,
}

impl SlowSegment {
    fn t_start(&self) -> f64 {
        self.y[0][0]
    }

    fn t_last(&self) -> f64 {
        self.y[self.y.len() - 1][0]
    }

    fn interp(&self, i: usize, s: f64, k: usize) -> f64 {
        let h = self.theta[i + 1] - self.theta[i];
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * self.y[i][k] + h10 * h * self.f[i][k] + h01 * self.y[i + 1][k] + h11 * h * self.f[i + 1][k]
    }

    /// `(θ, D, W)` at time `t` inside the segment.
    fn at(&self, t: f64) -> (f64, f64, f64) {
        let n = self.theta.len();
        if n == 1 || t <= self.t_start() {
            return (self.theta[0], self.y[0][1], self.y[0][2]);
        }
        let i = match self.y.binary_search_by(|y| y[0].partial_cmp(&t).unwrap()) {
            Ok(i) => return (self.theta[i], self.y[i][1], self.y[i][2]),
            Err(i) => (i.max(1) - 1).min(n - 2),
        };
        let (mut a, mut b) = (0.0, 1.0);
        for _ in 0..64 {
            let m = 0.5 * (a + b);
            if self.interp(i, m, 0) < t {
                a = m;
            } else {
                b = m;
            }
        }
        let s = 0.5 * (a + b);
        let th = self.theta[i] + s * (self.theta[i + 1] - self.theta[i]);
        (th, self.interp(i, s, 1), self.interp(i, s, 2))
    }
}

struct SlowOde<'a> {
    dec: &'a SlowFastDecomposition,
}

impl SlowOde<'_> {
    fn dt_dtheta(&self, th: f64) -> f64 {
        self.dec.b0(th) / self.dec.a0(th)
    }
}

impl OdeSystem for SlowOde<'_> {
    fn dim(&self) -> usize {
        3
    }

    fn rhs(&self, th: f64, _y: &[f64], dy: &mut [f64]) {
        let d = self.dec;
        let vp = d.potential.deriv(th);
        let vpp = d.potential.deriv2(th);
        let root = (1.0 - vp * vp).sqrt();
        let dt = self.dt_dtheta(th);
        let dpsi = dt + vp * vpp / (2.0 * d.mu * d.xi_norm * root);
        dy[0] = dt;
        dy[1] = (dpsi * d.xi_norm).hypot(1.0);
        dy[2] = d.xi_norm * root * dt;
    }
}

fn slow_segment(
    dec: &SlowFastDecomposition,
    theta_start: f64,
    y0: [f64; 3],
    theta_stop: Option<f64>,
    t_end: f64,
) -> Result<SlowSegment> {
    let sys = SlowOde { dec };
    let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, h_init: 1e-4, ..Default::default() };
    let mut seg = SlowSegment { theta: vec![], y: vec![], f: vec![] };
    let upper = theta_stop.unwrap_or(theta_start + 1e7);
    ode::integrate(&sys, theta_start, &y0, upper, &opts, &[], |th, y, f| {
        seg.theta.push(th);
        seg.y.push([y[0], y[1], y[2]]);
        seg.f.push([f[0], f[1], f[2]]);
        theta_stop.is_some() || y[0] < t_end
    })?;
    if seg.theta.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Integration("slow dynamics did not advance".into()));
    }
    Ok(seg)
}

/// Quasistatic trajectory of the homogeneous problem.
#[derive(Debug, Clone)]
pub struct QuasistaticTrajectory {
    pub case: Case,
    pub mu: f64,
    pub xi_norm: f64,
    pub theta0: f64,
    pub t0: f64,
    pub t_end: f64,
    pub jump: Option<Jump>,
    pub samples: Vec<QuasistaticSample>,
    segments: Vec<SlowSegment>,
    potential: crate::softening::SofteningPotential,
}

impl QuasistaticTrajectory {
    fn psi_on_boundary(&self, t: f64, theta: f64) -> f64 {
        let vp = self.potential.deriv(theta);
        t - (1.0 - vp * vp).sqrt() / (2.0 * self.mu * self.xi_norm)
    }

    /// `(θ, D, W)` at `t`, left-continuous at the jump. `D` includes the
    /// jump chord for `t > τ`.
    fn state_at(&self, t: f64) -> (f64, f64, f64) {
        if t <= self.t0 {
            return (self.theta0, 0.0, self.mu * self.xi_norm * self.xi_norm * t * t);
        }
        let seg = match &self.jump {
            Some(j) if t > j.tau => self.segments.last().unwrap(),
            _ => &self.segments[0],
        };
        seg.at(t)
    }

    pub fn theta_at(&self, t: f64) -> f64 {
        self.state_at(t).0
    }

    pub fn psi_at(&self, t: f64) -> f64 {
        if t <= self.t0 {
            0.0
        } else {
            self.psi_on_boundary(t, self.theta_at(t))
        }
    }

    pub fn sigma_norm_at(&self, t: f64) -> f64 {
        2.0 * self.mu * (t - self.psi_at(t)) * self.xi_norm
    }

    /// Dissipation `D_H` on `[0, t]`.
    pub fn dissipation_at(&self, t: f64) -> f64 {
        self.state_at(t).1
    }

    /// Work `∫⟨σ, ξ̇^s⟩` on `[0, t]`.
    pub fn work_at(&self, t: f64) -> f64 {
        self.state_at(t).2
    }

    pub fn has_jump(&self) -> bool {
        self.jump.is_some()
    }
}

/// Assembles the quasistatic evolution from `θ0` on `[0, t_end]` with
/// `n_samples + 1` uniform samples (plus `t0` and `τ`).
pub fn quasistatic_assemble(
    dec: &SlowFastDecomposition,
    theta0: f64,
    t_end: f64,
    n_samples: usize,
) -> Result<QuasistaticTrajectory> {
    if !(theta0 > 0.0) {
        return Err(Error::param("theta0", "must be positive"));
    }
    let (mu, s) = (dec.mu, dec.xi_norm);
    let v = &dec.potential;
    let t0 = super::critical_time(mu, s, v, theta0)?;
    let case = dec.classify(theta0);
    let w0 = mu * s * s * t0 * t0;
    let psi_of = |t: f64, th: f64| {
        let vp = v.deriv(th);
        t - (1.0 - vp * vp).sqrt() / (2.0 * mu * s)
    };
    let make_jump = |tau: f64, gamma: f64| -> Result<Jump> {
        let orbit = fast_orbit(dec, gamma)?;
        let (pm, pp) = (psi_of(tau, gamma), psi_of(tau, orbit.phi));
        let chord = ((pp - pm) * s).hypot(orbit.phi - gamma);
        Ok(Jump { tau, theta_minus: gamma, theta_plus: orbit.phi, psi_minus: pm, psi_plus: pp, chord, orbit })
    };

    let mut segments = vec![];
    let mut jump = None;
    match case {
        Case::A => {
            segments.push(slow_segment(dec, theta0, [t0, 0.0, w0], None, t_end)?);
        }
        Case::B => {
            let j = make_jump(t0, theta0)?;
            segments.push(SlowSegment { theta: vec![theta0], y: vec![[t0, 0.0, w0]], f: vec![[0.0; 3]] });
            segments.push(slow_segment(dec, j.theta_plus, [t0, j.chord, w0], None, t_end)?);
            jump = Some(j);
        }
        Case::C => {
            let alpha = dec.roots.unwrap().0;
            let first = slow_segment(dec, theta0, [t0, 0.0, w0], Some(alpha), t_end)?;
            let last = *first.y.last().unwrap();
            let j = make_jump(last[0], alpha)?;
            let second = slow_segment(dec, j.theta_plus, [last[0], last[1] + j.chord, last[2]], None, t_end)?;
            segments.push(first);
            segments.push(second);
            jump = Some(j);
        }
    }
    if segments.last().unwrap().t_last() < t_end {
        return Err(Error::Integration("slow dynamics stopped before t_end".into()));
    }

    let mut traj = QuasistaticTrajectory {
        case,
        mu,
        xi_norm: s,
        theta0,
        t0,
        t_end,
        jump,
        samples: vec![],
        segments,
        potential: v.clone(),
    };
    let mut times = super::uniform_times(0.0, t_end, n_samples.max(1));
    times.push(t0);
    if let Some(j) = &traj.jump {
        times.push(j.tau);
    }
    times.retain(|&t| t <= t_end);
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup();
    traj.samples = times
        .into_iter()
        .map(|t| QuasistaticSample {
            t,
            theta: traj.theta_at(t),
            psi: traj.psi_at(t),
            sigma_norm: traj.sigma_norm_at(t),
        })
        .collect();
    Ok(traj)
}

/// Both sides of the reduced energy inequality at time `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasistaticAudit {
    pub t: f64,
    /// `Q(e(T)) + D_H(0, T) + V(θ(T))`.
    pub lhs: f64,
    /// `Q(e(0)) + V(θ0) + ∫⟨σ, ξ̇^s⟩`.
    pub rhs: f64,
    pub residual: f64,
    /// `H(jump chord) − dissipation along the fast orbit`, once past τ.
    pub predicted_deficit: Option<f64>,
}

pub fn energy_audit_quasistatic(traj: &QuasistaticTrajectory, t: f64) -> QuasistaticAudit {
    let (theta, d, w) = traj.state_at(t);
    let psi = traj.psi_at(t);
    let s = traj.xi_norm;
    let q = traj.mu * s * s * (t - psi) * (t - psi);
    let lhs = q + d + traj.potential.eval(theta);
    let rhs = traj.potential.eval(traj.theta0) + w;
    let predicted_deficit = traj.jump.as_ref().filter(|j| t > j.tau).map(|j| j.chord - j.orbit.dissipation);
    QuasistaticAudit { t, lhs, rhs, residual: lhs - rhs, predicted_deficit }
}
