//! Coefficients of the second-order reduction `εθ̈ = A(θ, εθ̇) + B(θ, εθ̇)θ̇`
//! on the unit ball, roots of `B0`, and the fast-transition map `Φ`.

use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions, OdeSystem};
use crate::softening::SofteningPotential;

/// Which branch of the quasistatic limit applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// Slow dynamics only.
    A,
    /// Jump at `t0` from `θ0`.
    B,
    /// Slow dynamics to `α`, then a jump.
    C,
}

/// Coefficient bundle for fixed `μ`, `|ξ0^s|` and `V`.
#[derive(Debug, Clone)]
pub struct SlowFastDecomposition {
    pub mu: f64,
    pub xi_norm: f64,
    pub potential: SofteningPotential,
    pub mu0: f64,
    pub alpha0: f64,
    /// `(α, β)` with `B0 < 0` on `(α, β)`.
    pub roots: Option<(f64, f64)>,
}

fn closed_form_constants() -> (f64, f64) {
    let r19 = 19f64.sqrt();
    let mu0 = (79.0 * r19 - 344.0) / 108.0 * (7.0 + 2.0 * r19).sqrt();
    let alpha0 = 2f64.sqrt() / 3.0 * (r19 - 1.0).sqrt();
    (mu0, alpha0)
}

/// `V'²V''/(V'² − 1)`; `B0 < 0` exactly where this exceeds `2μ`.
pub(crate) fn softening_ratio(v: &SofteningPotential, t: f64) -> f64 {
    let vp = v.deriv(t);
    vp * vp * v.deriv2(t) / (vp * vp - 1.0)
}

/// Maximizer and maximum of [`softening_ratio`] on `(0, 50]`.
pub(crate) fn maximize_ratio(v: &SofteningPotential) -> (f64, f64) {
    let f = |t: f64| softening_ratio(v, t);
    let n = 50_000;
    let h = 50.0 / n as f64;
    let mut best = (h, f(h));
    for i in 1..=n {
        let t = i as f64 * h;
        let val = f(t);
        if val > best.1 {
            best = (t, val);
        }
    }
    let (mut lo, mut hi) = ((best.0 - h).max(1e-12), best.0 + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if f(x1) > f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let t = 0.5 * (lo + hi);
    (t, f(t))
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Builds the coefficient bundle. `μ0`, `α0` use the closed forms for the
/// square-root potential and a numerical maximization otherwise.
pub fn slow_fast_coefficients(mu: f64, xi0s_norm: f64, v: &SofteningPotential) -> Result<SlowFastDecomposition> {
    if !(mu > 0.0) {
        return Err(Error::param("mu", "must be positive"));
    }
    if !(xi0s_norm > 0.0) {
        return Err(Error::InvalidLoading("|ξ0^s| must be positive".into()));
    }
    let (mu0, alpha0) = match v {
        SofteningPotential::Sqrt => closed_form_constants(),
        _ => {
            let (a, m) = maximize_ratio(v);
            (0.5 * m, a)
        }
    };
    let mut dec =
        SlowFastDecomposition { mu, xi_norm: xi0s_norm, potential: v.clone(), mu0, alpha0, roots: None };
    if mu == mu0 {
        dec.roots = Some((alpha0, alpha0));
    } else if mu < mu0 {
        let b0 = |t: f64| dec.b0(t);
        let step = alpha0 / 200.0;
        let mut changes = vec![];
        let mut prev = (step, b0(step));
        for i in 2..=2000 {
            let t = i as f64 * step;
            let val = b0(t);
            if (val < 0.0) != (prev.1 < 0.0) {
                changes.push((prev.0, t));
            }
            prev = (t, val);
        }
        let (lo_br, hi_br) = if changes.len() >= 2 {
            (changes[0], changes[changes.len() - 1])
        } else {
            // Roots closer than the scan step: B0(α0) < 0 brackets both.
            ((step * 1e-3, alpha0), (alpha0, 10.0 * alpha0))
        };
        let alpha = bisect(b0, lo_br.0, lo_br.1, 1e-13);
        let beta = bisect(b0, hi_br.0, hi_br.1, 1e-13);
        dec.roots = Some((alpha, beta));
    }
    Ok(dec)
}

impl SlowFastDecomposition {
    fn vp(&self, t: f64) -> f64 {
        self.potential.deriv(t)
    }

    fn vpp(&self, t: f64) -> f64 {
        self.potential.deriv2(t)
    }

    pub fn a0(&self, t: f64) -> f64 {
        let vp = self.vp(t);
        -2.0 * self.mu * self.xi_norm * vp * (1.0 - vp * vp).sqrt()
    }

    pub fn a1(&self, t: f64, v: f64) -> f64 {
        let vp = self.vp(t);
        let ms = self.mu * self.xi_norm;
        let s1 = (1.0 - (vp + v) * (vp + v)).sqrt();
        let s0 = (1.0 - vp * vp).sqrt();
        // (s1 − s0)/v written without cancellation.
        let quot = (-2.0 * vp - v) / (s1 + s0);
        4.0 * ms * s1 + 2.0 * ms * vp * quot
    }

    pub fn a2(&self, t: f64, v: f64) -> f64 {
        let vp = self.vp(t);
        -(2.0 * self.mu * self.xi_norm / vp) * (1.0 - (vp + v) * (vp + v)).sqrt()
    }

    pub fn b0(&self, t: f64) -> f64 {
        let vp = self.vp(t);
        2.0 * self.mu * (1.0 - vp * vp) + vp * vp * self.vpp(t)
    }

    pub fn b1(&self, t: f64) -> f64 {
        let vp = self.vp(t);
        -(2.0 * self.mu - self.vpp(t)) * (1.0 - 3.0 * vp * vp) / vp
    }

    pub fn b2(&self, t: f64) -> f64 {
        3.0 * (2.0 * self.mu - self.vpp(t))
    }

    pub fn b3(&self, t: f64) -> f64 {
        -(2.0 * self.mu - self.vpp(t)) / self.vp(t)
    }

    pub fn a(&self, t: f64, v: f64) -> f64 {
        self.a0(t) - self.a1(t, v) * v + self.a2(t, v) * v * v
    }

    pub fn b(&self, t: f64, v: f64) -> f64 {
        -self.b0(t) + self.b1(t) * v + self.b2(t) * v * v - self.b3(t) * v * v * v
    }

    /// `θ̈` from the second-order form.
    pub fn theta_ddot(&self, t: f64, theta_dot: f64, eps: f64) -> f64 {
        let v = eps * theta_dot;
        (self.a(t, v) + self.b(t, v) * theta_dot) / eps
    }

    /// Slow velocity `φ = A0/B0`.
    pub fn slow_velocity(&self, t: f64) -> f64 {
        self.a0(t) / self.b0(t)
    }

    /// Case of the quasistatic limit for the initial value `θ0`.
    pub fn classify(&self, theta0: f64) -> Case {
        match self.roots {
            Some((a, b)) if a < b => {
                if theta0 >= b {
                    Case::A
                } else if theta0 >= a {
                    Case::B
                } else {
                    Case::C
                }
            }
            _ => Case::A,
        }
    }
}

/// Connecting orbit of the fast dynamics from `γ` to `Φ(γ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FastOrbit {
    pub gamma: f64,
    pub phi: f64,
    /// Energy dissipated along the orbit, `∫ H + ε|ṗ|² + ε|ż|²`.
    pub dissipation: f64,
    /// The `∫ H(dp, dz)` part alone.
    pub rate_independent: f64,
    /// `max w/(−V'(θ))` over the orbit; below 1 by comparison.
    pub max_w_ratio: f64,
    /// `w'` at the arrival point.
    pub w_prime_end: f64,
}

struct FastOde<'a> {
    dec: &'a SlowFastDecomposition,
}

impl OdeSystem for FastOde<'_> {
    fn dim(&self) -> usize {
        3
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let w = y[0];
        let vp = self.dec.vp(t);
        let big_w = vp + w;
        dy[0] = self.dec.b(t, w);
        // Along the orbit |ξ0^s|ψ' = −√(1−W²)/W, so H = 1/|W| and the
        // viscous density is (|ξ0^s|²ψ'² + 1) w = w/W².
        dy[1] = -1.0 / big_w;
        dy[2] = w / (big_w * big_w);
    }

    fn controlled(&self, i: usize) -> bool {
        i == 0
    }
}

/// `Φ(γ)`: first zero after `γ` of `w' = B(θ, w)`, `w(γ) = 0`.
pub fn fast_transition(dec: &SlowFastDecomposition, gamma: f64) -> Result<f64> {
    fast_orbit(dec, gamma).map(|o| o.phi)
}

/// Integrates the fast orbit and its dissipation.
///
/// By comparison `w > 0` on `(γ, β]`, so crossings are only searched past
/// `β`; the crossing is located by bisection on the step's Hermite
/// interpolant.
pub fn fast_orbit(dec: &SlowFastDecomposition, gamma: f64) -> Result<FastOrbit> {
    let (alpha, beta) = match dec.roots {
        Some((a, b)) if a < b => (a, b),
        _ => return Err(Error::Domain("fast transition needs μ < μ0".into())),
    };
    if !(gamma >= alpha && gamma < beta) {
        return Err(Error::Domain(format!("γ = {gamma} outside [α, β) = [{alpha}, {beta})")));
    }
    let sys = FastOde { dec };
    let opts = OdeOptions { rtol: 1e-11, atol: 1e-22, h_init: 1e-6 * (beta - gamma).max(1e-6), ..Default::default() };
    let guard = gamma + 50.0;
    let mut prev: Option<(f64, [f64; 3], [f64; 3])> = None;
    let mut crossing: Option<(f64, [f64; 3], [f64; 3], f64, [f64; 3], [f64; 3])> = None;
    let mut max_ratio = 0.0f64;
    ode::integrate(&sys, gamma, &[0.0, 0.0, 0.0], guard, &opts, &[], |t, y, f| {
        let cur = (t, [y[0], y[1], y[2]], [f[0], f[1], f[2]]);
        max_ratio = max_ratio.max(y[0] / -dec.vp(t));
        if t > beta && y[0] < 0.0 {
            let p = prev.unwrap();
            crossing = Some((p.0, p.1, p.2, cur.0, cur.1, cur.2));
            return false;
        }
        prev = Some(cur);
        true
    })?;
    let (t0, y0, f0, t1, y1, f1) =
        crossing.ok_or_else(|| Error::Integration(format!("no zero of w before θ = γ + 50 (γ = {gamma})")))?;
    let h = t1 - t0;
    let herm = |s: f64, i: usize| {
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i]
    };
    let (mut a, mut b) = (0.0, 1.0);
    if herm(0.0, 0) > 0.0 {
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if herm(m, 0) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
    }
    let s = 0.5 * (a + b);
    let phi = t0 + s * h;
    if !(phi > beta) {
        return Err(Error::Integration(format!("Φ(γ) = {phi} does not exceed β = {beta}")));
    }
    let rate_independent = herm(s, 1);
    let dissipation = rate_independent + herm(s, 2);
    Ok(FastOrbit {
        gamma,
        phi,
        dissipation,
        rate_independent,
        max_w_ratio: max_ratio,
        w_prime_end: dec.b(phi, 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_constants() {
        let d = slow_fast_coefficients(1.0, 1.0, &SofteningPotential::Sqrt).unwrap();
        assert!((d.mu0 - 0.012_962).abs() < 1e-5, "{}", d.mu0);
        assert!(d.mu0.to_string().starts_with("0.0129"));
        assert!(d.alpha0.to_string().starts_with("0.8639"));
        assert!(d.roots.is_none());
    }

    #[test]
    fn ratio_closed_form() {
        // V'²V''/(V'²−1) = θ²/(2(4+3θ²)(1+θ²)^{3/2}) for the square root.
        let v = SofteningPotential::Sqrt;
        for i in 1..100 {
            let t = i as f64 * 0.07;
            let exact = t * t / (2.0 * (4.0 + 3.0 * t * t) * (1.0 + t * t).powf(1.5));
            assert!((softening_ratio(&v, t) - exact).abs() < 1e-15);
        }
        let (a, m) = maximize_ratio(&v);
        let (mu0, alpha0) = closed_form_constants();
        assert!((a - alpha0).abs() < 1e-6);
        assert!((m - 2.0 * mu0).abs() < 1e-12);
    }

    #[test]
    fn b0_positive_for_large_mu() {
        let d = slow_fast_coefficients(1.0, 1.0, &SofteningPotential::Sqrt).unwrap();
        for i in 1..=1000 {
            assert!(d.b0(i as f64 * 0.05) > 0.0);
        }
    }

    #[test]
    fn roots_straddle_alpha0() {
        let v = SofteningPotential::Sqrt;
        let d0 = slow_fast_coefficients(1.0, 1.0, &v).unwrap();
        let d = slow_fast_coefficients(d0.mu0 / 2.0, 1.0, &v).unwrap();
        let (a, b) = d.roots.unwrap();
        assert!(0.0 < a && a < d.alpha0 && d.alpha0 < b);
        assert!(d.b0(a).abs() < 1e-10 && d.b0(b).abs() < 1e-10);
        for i in 1..100 {
            assert!(d.b0(a + (b - a) * i as f64 / 100.0) < 0.0);
        }
        let deg = slow_fast_coefficients(d0.mu0, 1.0, &v).unwrap();
        assert_eq!(deg.roots, Some((deg.alpha0, deg.alpha0)));
        assert_eq!(deg.classify(0.3), Case::A);
        // Roots closer than the scan step are still found.
        let close = slow_fast_coefficients(d0.mu0 * (1.0 - 1e-9), 1.0, &v).unwrap();
        let (a, b) = close.roots.unwrap();
        assert!(a < close.alpha0 && close.alpha0 < b && b - a < 1e-2);
    }

    #[test]
    fn second_order_form_matches_limits() {
        // B(θ, v) → μ(−3/2 + v + 6v² − 4v³) and A0/B0 → s/√3 as θ → ∞.
        let mu = 0.7;
        let s = 1.3;
        let d = slow_fast_coefficients(mu, s, &SofteningPotential::Sqrt).unwrap();
        let t = 1e4;
        for &v in &[0.0, 0.1, 0.3] {
            let lim = mu * (-1.5 + v + 6.0 * v * v - 4.0 * v * v * v);
            assert!((d.b(t, v) - lim).abs() < 1e-6);
        }
        assert!((d.slow_velocity(1e3) - s / 3f64.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn coefficient_bounds_on_sample() {
        let mu = 1.0;
        let s = 1.0;
        let theta0 = 0.5;
        let d = slow_fast_coefficients(mu, s, &SofteningPotential::Sqrt).unwrap();
        let vp0 = d.potential.deriv(theta0);
        let ms = mu * s;
        for i in 0..100 {
            let t = theta0 + (50.0 - theta0) * i as f64 / 99.0;
            let vmax = -d.potential.deriv(t);
            for j in 0..100 {
                let v = vmax * j as f64 / 99.0 * (1.0 - 1e-12);
                let tol = 1e-12;
                assert!(d.a0(t) >= -3f64.sqrt() * ms * vp0 - tol && d.a0(t) <= ms + tol);
                assert!(d.a1(t, v) >= 2.0 * ms - tol && d.a1(t, v) <= 4.0 * ms + tol);
                assert!(d.a2(t, v) >= 2.0 * 3f64.sqrt() * ms - tol && d.a2(t, v) <= -2.0 * ms / vp0 + tol);
                assert!(d.b0(t) >= 1.5 * mu - 0.125 - tol && d.b0(t) <= 2.0 * mu + tol);
                assert!(d.b1(t) >= mu - tol && d.b1(t) <= -(2.0 * mu + 0.5) / vp0 + tol);
                assert!(d.b2(t) >= 6.0 * mu - tol && d.b2(t) <= 6.0 * mu + 1.5 + tol);
                assert!(d.b3(t) >= 4.0 * mu - tol && d.b3(t) <= -(2.0 * mu + 0.5) / vp0 + tol);
            }
        }
    }

    #[test]
    fn transition_map_properties() {
        let v = SofteningPotential::Sqrt;
        let mu0 = closed_form_constants().0;
        let d = slow_fast_coefficients(mu0 / 2.0, 1.0, &v).unwrap();
        let (a, b) = d.roots.unwrap();
        let o = fast_orbit(&d, a).unwrap();
        assert!(o.phi > b);
        assert!(o.max_w_ratio < 1.0);
        assert!(o.w_prime_end < 0.0);
        let mut last = f64::INFINITY;
        for k in 0..6 {
            let g = a + (b - a) * k as f64 / 6.0;
            let p = fast_transition(&d, g).unwrap();
            assert!(p < last);
            last = p;
        }
        let mut gaps = vec![];
        for k in 2..=5 {
            gaps.push(fast_transition(&d, b - 10f64.powi(-k)).unwrap() - b);
        }
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
        assert!(fast_transition(&d, b + 0.1).is_err());
        assert!(fast_transition(&d, a - 0.1).is_err());
    }

    #[test]
    fn orbit_dissipation_matches_energy_drop() {
        // With t frozen, the energy dissipated equals the drop of Q + V
        // between the two boundary states: (V'(θ+)² − V'(θ−)²)/(4μ) + V(θ−) − V(θ+).
        let v = SofteningPotential::Sqrt;
        let mu = closed_form_constants().0 / 2.0;
        let d = slow_fast_coefficients(mu, 1.0, &v).unwrap();
        let (a, b) = d.roots.unwrap();
        for g in [a, 0.5 * (a + b)] {
            let o = fast_orbit(&d, g).unwrap();
            let (vm, vpl) = (v.deriv(g), v.deriv(o.phi));
            let drop = (vpl * vpl - vm * vm) / (4.0 * mu) + v.eval(g) - v.eval(o.phi);
            assert!((o.dissipation - drop).abs() < 1e-7 * drop.abs().max(1e-3), "{} vs {}", o.dissipation, drop);
        }
    }
}
