//! Bracketed scalar root finding.

/// Illinois variant of regula falsi on `[a, b]` with `f(a)`, `f(b)` of
/// opposite signs. Stops when `|f| <= ftol` or the bracket is below
/// `xtol` (or a few ulps). Returns the root and the number of evaluations.
pub(crate) fn illinois(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut fa: f64,
    mut b: f64,
    mut fb: f64,
    xtol: f64,
    ftol: f64,
    max_iter: usize,
) -> Option<(f64, usize)> {
    if fa == 0.0 {
        return Some((a, 0));
    }
    if fb == 0.0 {
        return Some((b, 0));
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let mut side = 0i8;
    for k in 1..=max_iter {
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !c.is_finite() || c <= a.min(b) || c >= a.max(b) {
            c = 0.5 * (a + b);
        }
        let fc = f(c);
        if fc.abs() <= ftol || (b - a).abs() <= xtol + 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            return Some((c, k));
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_roots() {
        let f = |x: f64| x * x * x - 2.0;
        let (r, n) = illinois(f, 0.0, f(0.0), 3.0, f(3.0), 1e-15, 1e-14, 200).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14, "{r}");
        assert!(n < 40);
        let g = |x: f64| (x - 0.3).max(0.0) - 0.1;
        let (r, _) = illinois(g, 0.0, g(0.0), 1.0, g(1.0), 1e-15, 1e-15, 200).unwrap();
        assert!((r - 0.4).abs() < 1e-14);
        assert!(illinois(f, 2.0, f(2.0), 3.0, f(3.0), 1e-12, 0.0, 10).is_none());
    }
}
