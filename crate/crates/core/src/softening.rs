//! Softening potentials `V` with derivatives, recession function and the
//! one-homogeneous extensions `{V}`, `{V'}`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::domain::ElasticDomain;
use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied potential given by three callables and declared bounds.
#[derive(Clone)]
pub struct CustomPotential {
    v: ScalarFn,
    dv: ScalarFn,
    d2v: ScalarFn,
    m: f64,
    slope_pos: f64,
    slope_neg: f64,
}

impl fmt::Debug for CustomPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomPotential")
            .field("m", &self.m)
            .field("slope_pos", &self.slope_pos)
            .field("slope_neg", &self.slope_neg)
            .finish()
    }
}

impl CustomPotential {
    /// `m` bounds `−V''`; `slope_pos`, `slope_neg` are `V'(+∞)`, `V'(−∞)`.
    /// The declared curvature bound is checked by sampling on `[−50, 50]`.
    pub fn new(
        v: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2v: impl Fn(f64) -> f64 + Send + Sync + 'static,
        m: f64,
        slope_pos: f64,
        slope_neg: f64,
    ) -> Result<Self> {
        if !(m >= 0.0 && m.is_finite()) {
            return Err(Error::param("m", "curvature bound must be finite and nonnegative"));
        }
        if !(slope_pos.is_finite() && slope_neg.is_finite()) || slope_pos > slope_neg {
            return Err(Error::param("slopes", "need finite V'(+∞) ≤ V'(−∞)"));
        }
        for i in 0..=20_000 {
            let t = -50.0 + i as f64 * 0.005;
            let c = d2v(t);
            if !(c >= -m * (1.0 + 1e-9) - 1e-12) {
                return Err(Error::param("m", format!("V''({t}) = {c} violates V'' ≥ −M")));
            }
        }
        Ok(CustomPotential { v: Arc::new(v), dv: Arc::new(dv), d2v: Arc::new(d2v), m, slope_pos, slope_neg })
    }
}

/// Potential tabulated on a grid of `(θ, V, V', V'')` and interpolated by
/// cubic Hermite splines; extended linearly outside the table.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPotential {
    theta: Vec<f64>,
    v: Vec<f64>,
    dv: Vec<f64>,
    d2v: Vec<f64>,
    m: f64,
    slope_pos: f64,
    slope_neg: f64,
}

fn hermite(x0: f64, x1: f64, f0: f64, f1: f64, d0: f64, d1: f64, x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    let val = h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
    let dh00 = 6.0 * s * s - 6.0 * s;
    let dh10 = 3.0 * s * s - 4.0 * s + 1.0;
    let dh01 = -dh00;
    let dh11 = 3.0 * s * s - 2.0 * s;
    let der = (dh00 * f0 + dh01 * f1) / h + dh10 * d0 + dh11 * d1;
    (val, der)
}

impl TabulatedPotential {
    pub fn new(
        theta: Vec<f64>,
        v: Vec<f64>,
        dv: Vec<f64>,
        d2v: Vec<f64>,
        m: f64,
        slope_pos: f64,
        slope_neg: f64,
    ) -> Result<Self> {
        let n = theta.len();
        if n < 2 || v.len() != n || dv.len() != n || d2v.len() != n {
            return Err(Error::param("table", "need at least two rows of equal length"));
        }
        if theta.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("table", "θ knots must be strictly increasing"));
        }
        if !(m >= 0.0 && m.is_finite()) {
            return Err(Error::param("m", "curvature bound must be finite and nonnegative"));
        }
        if slope_pos > slope_neg {
            return Err(Error::param("slopes", "need V'(+∞) ≤ V'(−∞)"));
        }
        if let Some(c) = d2v.iter().find(|&&c| c < -m * (1.0 + 1e-9) - 1e-12) {
            return Err(Error::param("m", format!("tabulated V'' = {c} violates V'' ≥ −M")));
        }
        Ok(TabulatedPotential { theta, v, dv, d2v, m, slope_pos, slope_neg })
    }

    fn locate(&self, t: f64) -> usize {
        match self.theta.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.theta.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.theta.len() - 2),
        }
    }

    fn eval3(&self, t: f64) -> (f64, f64, f64) {
        let n = self.theta.len();
        if t <= self.theta[0] {
            let dt = t - self.theta[0];
            return (self.v[0] + self.dv[0] * dt, self.dv[0], 0.0);
        }
        if t >= self.theta[n - 1] {
            let dt = t - self.theta[n - 1];
            return (self.v[n - 1] + self.dv[n - 1] * dt, self.dv[n - 1], 0.0);
        }
        let i = self.locate(t);
        let (x0, x1) = (self.theta[i], self.theta[i + 1]);
        let (val, _) = hermite(x0, x1, self.v[i], self.v[i + 1], self.dv[i], self.dv[i + 1], t);
        let (der, _) = hermite(x0, x1, self.dv[i], self.dv[i + 1], self.d2v[i], self.d2v[i + 1], t);
        let s = (t - x0) / (x1 - x0);
        let sec = (1.0 - s) * self.d2v[i] + s * self.d2v[i + 1];
        (val, der, sec)
    }
}

/// Concave softening potential.
#[derive(Debug, Clone)]
pub enum SofteningPotential {
    /// `V(θ) = 1/2 − √(1+θ²)/2`.
    Sqrt,
    /// Even potential with `V'(θ) = −sin(πθ/2)` on `|θ| ≤ 1` and
    /// `V'(θ) = −sign θ` beyond.
    Plateau,
    Custom(CustomPotential),
    Tabulated(TabulatedPotential),
}

impl SofteningPotential {
    pub fn name(&self) -> &'static str {
        match self {
            SofteningPotential::Sqrt => "sqrt",
            SofteningPotential::Plateau => "plateau",
            SofteningPotential::Custom(_) => "custom",
            SofteningPotential::Tabulated(_) => "tabulated",
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            SofteningPotential::Sqrt => 0.5 - 0.5 * (1.0 + t * t).sqrt(),
            SofteningPotential::Plateau => {
                let a = t.abs();
                if a <= 1.0 {
                    2.0 / PI * ((0.5 * PI * a).cos() - 1.0)
                } else {
                    -2.0 / PI - (a - 1.0)
                }
            }
            SofteningPotential::Custom(c) => (c.v)(t),
            SofteningPotential::Tabulated(tb) => tb.eval3(t).0,
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match self {
            SofteningPotential::Sqrt => -t / (2.0 * (1.0 + t * t).sqrt()),
            SofteningPotential::Plateau => {
                if t.abs() <= 1.0 {
                    -(0.5 * PI * t).sin()
                } else {
                    -t.signum()
                }
            }
            SofteningPotential::Custom(c) => (c.dv)(t),
            SofteningPotential::Tabulated(tb) => tb.eval3(t).1,
        }
    }

    pub fn deriv2(&self, t: f64) -> f64 {
        match self {
            SofteningPotential::Sqrt => -0.5 / (1.0 + t * t).powf(1.5),
            SofteningPotential::Plateau => {
                if t.abs() <= 1.0 {
                    -0.5 * PI * (0.5 * PI * t).cos()
                } else {
                    0.0
                }
            }
            SofteningPotential::Custom(c) => (c.d2v)(t),
            SofteningPotential::Tabulated(tb) => tb.eval3(t).2,
        }
    }

    /// `M` with `−M ≤ V'' ≤ 0`.
    pub fn curvature_bound(&self) -> f64 {
        match self {
            SofteningPotential::Sqrt => 0.5,
            SofteningPotential::Plateau => 0.5 * PI,
            SofteningPotential::Custom(c) => c.m,
            SofteningPotential::Tabulated(t) => t.m,
        }
    }

    /// `V'(+∞)`.
    pub fn slope_pos_inf(&self) -> f64 {
        match self {
            SofteningPotential::Sqrt => -0.5,
            SofteningPotential::Plateau => -1.0,
            SofteningPotential::Custom(c) => c.slope_pos,
            SofteningPotential::Tabulated(t) => t.slope_pos,
        }
    }

    /// `V'(−∞)`.
    pub fn slope_neg_inf(&self) -> f64 {
        match self {
            SofteningPotential::Sqrt => 0.5,
            SofteningPotential::Plateau => 1.0,
            SofteningPotential::Custom(c) => c.slope_neg,
            SofteningPotential::Tabulated(t) => t.slope_neg,
        }
    }

    /// Recession function `V∞`.
    pub fn recession(&self, t: f64) -> f64 {
        if t >= 0.0 {
            self.slope_pos_inf() * t
        } else {
            self.slope_neg_inf() * t
        }
    }

    /// `{V}(θ, η)`.
    pub fn homog_v(&self, t: f64, eta: f64) -> f64 {
        if eta > 0.0 {
            eta * self.eval(t / eta)
        } else {
            self.recession(t)
        }
    }

    /// `{V'}(θ, η)`.
    pub fn homog_vprime(&self, t: f64, eta: f64) -> f64 {
        if eta > 0.0 {
            eta * self.deriv(t / eta)
        } else {
            0.0
        }
    }
}

/// Result of [`validate_against_domain`].
#[derive(Debug, Clone, PartialEq)]
pub struct DomainCompatibility {
    pub a_k: f64,
    pub b_k: f64,
    pub slope_pos: f64,
    pub slope_neg: f64,
    /// Coercivity constant `C^K_V`.
    pub coercivity: f64,
}

/// Checks `−b_K < V'(+∞) ≤ V'(−∞) < a_K` and estimates `C^K_V`.
///
/// Since `V(θ₂) − V(θ₁) ≥ V∞(θ₂ − θ₁)` for concave `V` with the given
/// asymptotic slopes, the constant is the minimum over unit increments of
/// `(H(Δξ, Δθ) + V∞(Δθ)) / (|Δξ| + |Δθ|)`, found by an angular scan and a
/// golden-section refinement.
pub fn validate_against_domain(v: &SofteningPotential, k: &ElasticDomain) -> Result<DomainCompatibility> {
    let (a_k, b_k) = (k.a_k(), k.b_k());
    let (sp, sn) = (v.slope_pos_inf(), v.slope_neg_inf());
    if !(-b_k < sp) {
        return Err(Error::Incompatible(format!("−b_K < V'(+∞) fails: b_K = {b_k}, V'(+∞) = {sp}")));
    }
    if !(sp <= sn) {
        return Err(Error::Incompatible(format!("V'(+∞) ≤ V'(−∞) fails: {sp} > {sn}")));
    }
    if !(sn < a_k) {
        return Err(Error::Incompatible(format!("V'(−∞) < a_K fails: V'(−∞) = {sn}, a_K = {a_k}")));
    }
    let f = |phi: f64| {
        let (c, s) = (phi.cos(), phi.sin());
        (k.support_planar(c, s) + v.recession(s)) / (c.abs() + s.abs())
    };
    let n = 4096;
    let step = 2.0 * PI / n as f64;
    let (mut best_i, mut best) = (0, f64::INFINITY);
    for i in 0..n {
        let val = f(i as f64 * step);
        if val < best {
            best = val;
            best_i = i;
        }
    }
    let (mut lo, mut hi) = ((best_i as f64 - 1.0) * step, (best_i as f64 + 1.0) * step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if f(x1) < f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let coercivity = best.min(f(0.5 * (lo + hi)));
    Ok(DomainCompatibility { a_k, b_k, slope_pos: sp, slope_neg: sn, coercivity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn tabulated_sqrt() -> SofteningPotential {
        let th: Vec<f64> = (0..=400).map(|i| -20.0 + 0.1 * i as f64).collect();
        let s = SofteningPotential::Sqrt;
        SofteningPotential::Tabulated(
            TabulatedPotential::new(
                th.clone(),
                th.iter().map(|&t| s.eval(t)).collect(),
                th.iter().map(|&t| s.deriv(t)).collect(),
                th.iter().map(|&t| s.deriv2(t)).collect(),
                0.5,
                -0.5,
                0.5,
            )
            .unwrap(),
        )
    }

    fn all() -> Vec<SofteningPotential> {
        vec![SofteningPotential::Sqrt, SofteningPotential::Plateau, tabulated_sqrt()]
    }

    #[test]
    fn sqrt_examples() {
        let v = SofteningPotential::Sqrt;
        assert_eq!(v.eval(0.0), 0.0);
        assert_eq!(v.deriv(0.0), 0.0);
        assert_relative_eq!(v.deriv(3f64.sqrt()), -3f64.sqrt() / 4.0, epsilon = 1e-15);
        assert_relative_eq!(v.recession(2.0), -1.0);
        assert_relative_eq!(v.recession(-2.0), -1.0);
    }

    #[test]
    fn plateau_examples() {
        let v = SofteningPotential::Plateau;
        assert_eq!(v.deriv(1.0), -1.0);
        assert!(v.deriv2(1.0).abs() < 1e-15);
        assert_eq!(v.recession(3.0), -3.0);
        assert_eq!(v.homog_v(2.5, 0.0), -2.5);
        for i in 1..100 {
            let t = i as f64 / 100.0;
            assert!(v.deriv(t) > -1.0 && v.deriv(t) <= 0.0);
            assert!(v.deriv(1.0 + t) == -1.0);
        }
    }

    #[test]
    fn homog_examples() {
        for v in all() {
            for &t in &[-2.0, -0.3, 0.0, 0.7, 4.0] {
                assert_relative_eq!(v.homog_v(t, 1.0), v.eval(t), epsilon = 1e-14);
                assert_relative_eq!(v.homog_v(2.0 * t, 2.0), 2.0 * v.eval(t), epsilon = 1e-13);
                assert_eq!(v.homog_vprime(t, 0.0), 0.0);
            }
        }
    }

    #[test]
    fn homog_limit_is_recession() {
        for v in [SofteningPotential::Sqrt, SofteningPotential::Plateau] {
            for &t in &[-1.5, 0.4, 2.0] {
                let r = v.recession(t);
                assert!((v.homog_v(t, 1e-3) - r).abs() < 2e-3);
                assert!((v.homog_v(t, 1e-6) - r).abs() < 2e-6);
            }
        }
    }

    #[test]
    fn validation_examples() {
        let r = validate_against_domain(&SofteningPotential::Sqrt, &ElasticDomain::ball(1.0).unwrap()).unwrap();
        assert_eq!((r.a_k, r.b_k), (1.0, 1.0));
        assert!(r.coercivity > 0.0);
        let r = validate_against_domain(&SofteningPotential::Plateau, &ElasticDomain::diamond(2.0).unwrap()).unwrap();
        assert_eq!((r.a_k, r.b_k), (2.0, 2.0));
        assert!(r.coercivity > 0.0);
        let e = validate_against_domain(&SofteningPotential::Plateau, &ElasticDomain::ball(1.0).unwrap());
        assert!(matches!(e, Err(Error::Incompatible(msg)) if msg.contains("b_K")));
        assert!(validate_against_domain(&SofteningPotential::Plateau, &ElasticDomain::hexagon()).is_ok());
    }

    #[test]
    fn coercivity_matches_brute_force() {
        // Direct minimisation of the defining ratio over sampled pairs.
        let v = SofteningPotential::Sqrt;
        let k = ElasticDomain::ball(1.0).unwrap();
        let c = validate_against_domain(&v, &k).unwrap().coercivity;
        let mut best = f64::INFINITY;
        for i in 0..200 {
            let t1 = -30.0 + 0.3 * i as f64;
            for j in 0..72 {
                let phi = j as f64 * PI / 36.0;
                let (dx, dt) = (phi.cos(), phi.sin());
                let val = k.support_planar(dx, dt) + v.eval(t1 + dt) - v.eval(t1);
                best = best.min(val / (dx.abs() + dt.abs()));
            }
        }
        assert!(c <= best + 1e-9);
        assert!(best - c < 0.05);
    }

    #[test]
    fn custom_validation() {
        let ok = CustomPotential::new(|t| -0.1 * t * t, |t| -0.2 * t, |_| -0.2, 0.2, -0.3, 0.3);
        assert!(ok.is_ok());
        let bad = CustomPotential::new(|t| -0.1 * t * t, |t| -0.2 * t, |_| -0.2, 0.1, -0.3, 0.3);
        assert!(bad.is_err());
    }

    proptest! {
        #[test]
        fn derivatives_match_differences(k in 0usize..3, t in -10.0f64..10.0) {
            let v = &all()[k];
            let h = 1e-5;
            let fd1 = (v.eval(t + h) - v.eval(t - h)) / (2.0 * h);
            let fd2 = (v.deriv(t + h) - v.deriv(t - h)) / (2.0 * h);
            // Tabulated V and V' are interpolated independently.
            let tol1 = if k == 2 { 1e-4 } else { 1e-6 };
            prop_assert!((fd1 - v.deriv(t)).abs() <= tol1 * (1.0 + v.deriv(t).abs()));
            // Tabulated V'' is piecewise linear on a 0.1 grid (error up to
            // h²/8·max|V''''| ≈ 2e-3), Plateau V'' has kinks.
            let tol2 = if k == 2 { 5e-3 } else { 1e-5 };
            prop_assert!((fd2 - v.deriv2(t)).abs() <= tol2 * (1.0 + v.deriv2(t).abs()));
        }

        #[test]
        fn concave_and_monotone(k in 0usize..3, a in -10.0f64..10.0, b in -10.0f64..10.0) {
            let v = &all()[k];
            prop_assert!(v.deriv2(a) <= 1e-12);
            prop_assert!(v.deriv2(a) >= -v.curvature_bound() - 1e-12);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(v.deriv(hi) <= v.deriv(lo) + 1e-12);
        }

        #[test]
        fn plateau_even(t in -5.0f64..5.0) {
            let v = SofteningPotential::Plateau;
            prop_assert!((v.eval(t) - v.eval(-t)).abs() < 1e-12);
            prop_assert!((v.deriv(t) + v.deriv(-t)).abs() < 1e-15);
        }

        #[test]
        fn homog_concave(k in 0usize..2, t1 in -5.0f64..5.0, e1 in 0.01f64..3.0, t2 in -5.0f64..5.0, e2 in 0.01f64..3.0) {
            let v = &all()[k];
            let mid = v.homog_v(0.5 * (t1 + t2), 0.5 * (e1 + e2));
            let avg = 0.5 * (v.homog_v(t1, e1) + v.homog_v(t2, e2));
            prop_assert!(mid >= avg - 1e-12);
        }

        #[test]
        fn homog_is_one_homogeneous(k in 0usize..2, t in -5.0f64..5.0, e in 0.0f64..3.0, l in 0.1f64..10.0) {
            let v = &all()[k];
            prop_assert!((v.homog_v(l * t, l * e) - l * v.homog_v(t, e)).abs() < 1e-11 * (1.0 + l));
            prop_assert!((v.homog_vprime(l * t, l * e) - l * v.homog_vprime(t, e)).abs() < 1e-11 * (1.0 + l));
        }
    }
}
