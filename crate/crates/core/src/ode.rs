//! Adaptive Dormand–Prince 5(4) integrator shared by the homogeneous and
//! 1D solvers.

use crate::error::{Error, Result};

/// Right-hand side of `y' = f(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]);
    /// Upper bound on the next step from state `(t, y)`.
    fn max_step(&self, _t: f64, _y: &[f64]) -> f64 {
        f64::INFINITY
    }
    /// Whether component `i` takes part in error control.
    fn controlled(&self, _i: usize) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-8, atol: 1e-10, h_init: 1e-4, h_max: f64::INFINITY, max_steps: 50_000_000 }
    }
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        OdeOptions { rtol: tol, atol: tol * 1e-2, ..Default::default() }
    }
}

/// Step statistics and requested samples.
#[derive(Debug, Clone, Default)]
pub struct OdeSolution {
    pub samples: Vec<(f64, Vec<f64>)>,
    pub accepted: usize,
    pub rejected: usize,
    pub y_end: Vec<f64>,
    /// Time at which integration stopped.
    pub t_last: f64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates from `(t0, y0)` to `t_end`, returning the state at each time
/// in the sorted list `t_eval` (cubic Hermite dense output). The observer
/// sees every accepted step as `(t, y, y')` and stops the integration by
/// returning `false`.
pub fn integrate<S: OdeSystem + ?Sized>(
    sys: &S,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: &OdeOptions,
    t_eval: &[f64],
    mut observer: impl FnMut(f64, &[f64], &[f64]) -> bool,
) -> Result<OdeSolution> {
    let n = sys.dim();
    assert_eq!(y0.len(), n, "initial state has wrong length");
    let mut sol = OdeSolution::default();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let ctrl: Vec<bool> = (0..n).map(|i| sys.controlled(i)).collect();

    let mut next_eval = 0;
    while next_eval < t_eval.len() && t_eval[next_eval] < t0 {
        next_eval += 1;
    }
    while next_eval < t_eval.len() && t_eval[next_eval] == t0 {
        sol.samples.push((t0, y.clone()));
        next_eval += 1;
    }

    sys.rhs(t, &y, &mut k1);
    if !observer(t, &y, &k1) {
        sol.y_end = y;
        sol.t_last = t;
        return Ok(sol);
    }
    let mut h = opts.h_init.min(opts.h_max).max(1e-300);
    let span = (t_end - t0).abs();
    if span == 0.0 {
        sol.y_end = y;
        sol.t_last = t;
        return Ok(sol);
    }

    while t < t_end {
        if sol.accepted + sol.rejected >= opts.max_steps {
            return Err(Error::Integration(format!("step budget exhausted at t = {t}")));
        }
        h = h.min(sys.max_step(t, &y)).min(opts.h_max);
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let h_min = 1e-14 * t.abs().max(span).max(1e-300);
        if h < h_min {
            return Err(Error::StepSizeUnderflow { t, h });
        }

        for i in 0..n {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        sys.rhs(t + C2 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        sys.rhs(t + C3 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        sys.rhs(t + C4 * h, &tmp, &mut k4);
        for i in 0..n {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        sys.rhs(t + C5 * h, &tmp, &mut k5);
        for i in 0..n {
            tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_new = if last { t_end } else { t + h };
        sys.rhs(t_new, &tmp, &mut k6);
        for i in 0..n {
            ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        sys.rhs(t_new, &ynew, &mut k7);

        let mut err = 0.0f64;
        for i in 0..n {
            if !ctrl[i] {
                continue;
            }
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            err = err.max(e.abs() / sc);
        }
        if !err.is_finite() {
            sol.rejected += 1;
            h *= 0.1;
            continue;
        }
        if err <= 1.0 {
            while next_eval < t_eval.len() && t_eval[next_eval] <= t_new {
                let te = t_eval[next_eval];
                let s = (te - t) / h;
                let h10 = s * (1.0 - s) * (1.0 - s);
                let h01 = s * s * (3.0 - 2.0 * s);
                let h11 = s * s * (s - 1.0);
                let ye: Vec<f64> = (0..n)
                    .map(|i| {
                        if te == t_new {
                            ynew[i]
                        } else {
                            y[i] + h01 * (ynew[i] - y[i]) + h * (h10 * k1[i] + h11 * k7[i])
                        }
                    })
                    .collect();
                sol.samples.push((te, ye));
                next_eval += 1;
            }
            t = t_new;
            std::mem::swap(&mut y, &mut ynew);
            std::mem::swap(&mut k1, &mut k7);
            sol.accepted += 1;
            if !observer(t, &y, &k1) {
                break;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            sol.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    sol.y_end = y;
    sol.t_last = t;
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Decay;
    impl OdeSystem for Decay {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = -y[0];
            dy[1] = y[0];
        }
    }

    struct Oscillator;
    impl OdeSystem for Oscillator {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = y[1];
            dy[1] = -y[0];
        }
        fn max_step(&self, _t: f64, _y: &[f64]) -> f64 {
            0.01
        }
    }

    #[test]
    fn exponential_decay() {
        let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, ..Default::default() };
        let te: Vec<f64> = (0..=10).map(|i| i as f64 * 0.5).collect();
        let sol = integrate(&Decay, 0.0, &[1.0, 0.0], 5.0, &opts, &te, |_, _, _| true).unwrap();
        assert_eq!(sol.samples.len(), te.len());
        for (t, y) in &sol.samples {
            assert!((y[0] - (-t).exp()).abs() < 1e-10);
            assert!((y[0] + y[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn max_step_is_respected() {
        let mut hmax = 0.0f64;
        let mut last = 0.0;
        let sol = integrate(&Oscillator, 0.0, &[0.0, 1.0], 1.0, &OdeOptions::default(), &[], |t, _, _| {
            hmax = hmax.max(t - last);
            last = t;
            true
        })
        .unwrap();
        assert!(hmax <= 0.01 + 1e-15);
        assert!((sol.y_end[0] - 1f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn fifth_order_convergence() {
        // Fixed steps through max_step, loose tolerance so no rejection.
        struct Fixed(f64);
        impl OdeSystem for Fixed {
            fn dim(&self) -> usize {
                2
            }
            fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
                dy[0] = y[1];
                dy[1] = -y[0];
            }
            fn max_step(&self, _t: f64, _y: &[f64]) -> f64 {
                self.0
            }
        }
        let opts = OdeOptions { rtol: 1.0, atol: 1.0, h_init: 1.0, ..Default::default() };
        let e = |h: f64| {
            let s = integrate(&Fixed(h), 0.0, &[0.0, 1.0], 2.0, &opts, &[], |_, _, _| true).unwrap();
            (s.y_end[0] - 2f64.sin()).abs()
        };
        let ratio = e(0.1) / e(0.05);
        assert!(ratio > 24.0 && ratio < 48.0, "ratio {ratio}");
    }
}
