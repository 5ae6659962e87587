//! Symmetric and deviatoric d×d matrices (d ∈ {1, 2, 3}), isotropic
//! elasticity and the shear embedding `M(α)`.
//!
//! For `d = 1` the deviatoric space is the whole real line: `ξ_D := ξ`.
//! This differs from the `d ≥ 2` definition on purpose, and every
//! function that splits or recombines a matrix honours it.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

const SYM_TOL: f64 = 1e-12;

/// Dense symmetric matrix of runtime dimension `d`, stored row-major in a
/// 3×3 buffer with zero padding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMatrix {
    d: usize,
    a: [f64; 9],
}

fn check_dim(d: usize) -> Result<()> {
    if (1..=3).contains(&d) {
        Ok(())
    } else {
        Err(Error::InvalidDimension(d))
    }
}

impl SymMatrix {
    pub fn zeros(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(SymMatrix { d, a: [0.0; 9] })
    }

    pub fn identity(d: usize) -> Result<Self> {
        let mut m = Self::zeros(d)?;
        for i in 0..d {
            m.a[i * 3 + i] = 1.0;
        }
        Ok(m)
    }

    /// 1×1 matrix.
    pub fn scalar(v: f64) -> Self {
        let mut a = [0.0; 9];
        a[0] = v;
        SymMatrix { d: 1, a }
    }

    /// Builds from rows, rejecting non-square or non-symmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        check_dim(d)?;
        let mut m = SymMatrix { d, a: [0.0; 9] };
        let mut scale = 0.0f64;
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(Error::param("rows", "matrix must be square"));
            }
            for (j, &v) in r.iter().enumerate() {
                m.a[i * 3 + j] = v;
                scale = scale.max(v.abs());
            }
        }
        for i in 0..d {
            for j in 0..i {
                if (m.a[i * 3 + j] - m.a[j * 3 + i]).abs() > SYM_TOL * scale.max(1.0) {
                    return Err(Error::param("rows", "matrix is not symmetric"));
                }
                let avg = 0.5 * (m.a[i * 3 + j] + m.a[j * 3 + i]);
                m.a[i * 3 + j] = avg;
                m.a[j * 3 + i] = avg;
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.d && j < self.d, "index out of range");
        self.a[i * 3 + j]
    }

    /// Sets entries (i,j) and (j,i).
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.d && j < self.d, "index out of range");
        self.a[i * 3 + j] = v;
        self.a[j * 3 + i] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.d).map(|i| self.a[i * 3 + i]).sum()
    }

    /// Frobenius inner product ξ : η.
    pub fn dot(&self, other: &SymMatrix) -> f64 {
        debug_assert_eq!(self.d, other.d);
        self.a.iter().zip(other.a.iter()).map(|(x, y)| x * y).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.d).map(|i| (0..self.d).map(|j| self.a[i * 3 + j]).collect()).collect()
    }

    /// Independent upper-triangular entries, row by row.
    pub fn upper(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(6);
        for i in 0..self.d {
            for j in i..self.d {
                v.push(self.a[i * 3 + j]);
            }
        }
        v
    }

    /// Inverse of [`SymMatrix::upper`].
    pub fn from_upper(d: usize, v: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(d)?;
        if v.len() != d * (d + 1) / 2 {
            return Err(Error::param("upper", "wrong number of entries"));
        }
        let mut k = 0;
        for i in 0..d {
            for j in i..d {
                m.set(i, j, v[k]);
                k += 1;
            }
        }
        Ok(m)
    }
}

impl Add for SymMatrix {
    type Output = SymMatrix;
    fn add(mut self, o: SymMatrix) -> SymMatrix {
        debug_assert_eq!(self.d, o.d);
        for k in 0..9 {
            self.a[k] += o.a[k];
        }
        self
    }
}

impl Sub for SymMatrix {
    type Output = SymMatrix;
    fn sub(mut self, o: SymMatrix) -> SymMatrix {
        debug_assert_eq!(self.d, o.d);
        for k in 0..9 {
            self.a[k] -= o.a[k];
        }
        self
    }
}

impl AddAssign for SymMatrix {
    fn add_assign(&mut self, o: SymMatrix) {
        *self = *self + o;
    }
}

impl SubAssign for SymMatrix {
    fn sub_assign(&mut self, o: SymMatrix) {
        *self = *self - o;
    }
}

impl Neg for SymMatrix {
    type Output = SymMatrix;
    fn neg(self) -> SymMatrix {
        self * -1.0
    }
}

impl Mul<f64> for SymMatrix {
    type Output = SymMatrix;
    fn mul(mut self, s: f64) -> SymMatrix {
        for v in self.a.iter_mut() {
            *v *= s;
        }
        self
    }
}

/// Symmetric trace-free matrix. For `d = 1` any real is admissible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DevMatrix(SymMatrix);

impl DevMatrix {
    /// Wraps a symmetric matrix after checking it is trace-free.
    pub fn new(m: SymMatrix) -> Result<Self> {
        if m.d > 1 && m.trace().abs() > SYM_TOL * m.norm().max(1.0) {
            return Err(Error::param("dev", "matrix is not trace-free"));
        }
        Ok(DevMatrix(m))
    }

    pub fn zeros(d: usize) -> Result<Self> {
        Ok(DevMatrix(SymMatrix::zeros(d)?))
    }

    pub fn scalar(v: f64) -> Self {
        DevMatrix(SymMatrix::scalar(v))
    }

    pub fn dim(&self) -> usize {
        self.0.d
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.0
    }

    pub fn into_sym(self) -> SymMatrix {
        self.0
    }

    /// The single entry of a `d = 1` matrix.
    pub fn as_scalar(&self) -> f64 {
        debug_assert_eq!(self.0.d, 1);
        self.0.a[0]
    }

    pub fn dot(&self, o: &DevMatrix) -> f64 {
        self.0.dot(&o.0)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }
}

impl Add for DevMatrix {
    type Output = DevMatrix;
    fn add(self, o: DevMatrix) -> DevMatrix {
        DevMatrix(self.0 + o.0)
    }
}

impl Sub for DevMatrix {
    type Output = DevMatrix;
    fn sub(self, o: DevMatrix) -> DevMatrix {
        DevMatrix(self.0 - o.0)
    }
}

impl Neg for DevMatrix {
    type Output = DevMatrix;
    fn neg(self) -> DevMatrix {
        DevMatrix(-self.0)
    }
}

impl Mul<f64> for DevMatrix {
    type Output = DevMatrix;
    fn mul(self, s: f64) -> DevMatrix {
        DevMatrix(self.0 * s)
    }
}

/// Splits ξ into its deviator and trace.
///
/// For `d ≥ 2`, `ξ = dev + (trace/d)·I`. For `d = 1` the deviator is ξ
/// itself and the trace is returned as ξ as well, so the reconstruction
/// identity does not apply there.
pub fn deviator_split(xi: &SymMatrix) -> (DevMatrix, f64) {
    let tr = xi.trace();
    if xi.d == 1 {
        return (DevMatrix(*xi), tr);
    }
    let mut dev = *xi;
    let m = tr / xi.d as f64;
    for i in 0..xi.d {
        dev.a[i * 3 + i] -= m;
    }
    (DevMatrix(dev), tr)
}

/// Shear isometry `M(α)` with entries (1,2) and (2,1) equal to α/√2.
pub fn shear_embed(alpha: f64, d: usize) -> Result<DevMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let mut m = SymMatrix::zeros(d)?;
    m.set(0, 1, alpha / std::f64::consts::SQRT_2);
    Ok(DevMatrix(m))
}

/// Isotropic elasticity tensor `ℂξ = 2μ ξ_D + κ tr(ξ) I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropicElasticity {
    mu: f64,
    kappa: f64,
}

impl IsotropicElasticity {
    pub fn new(mu: f64, kappa: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::param("mu", "shear modulus must be positive"));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::param("kappa", "compression modulus must be positive"));
        }
        Ok(IsotropicElasticity { mu, kappa })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Constants with `α_C |ξ|² ≤ Q(ξ) ≤ β_C |ξ|²` in dimension d.
    pub fn energy_bounds(&self, d: usize) -> (f64, f64) {
        if d == 1 {
            return (self.mu, self.mu);
        }
        let k = self.kappa * d as f64 / 2.0;
        (self.mu.min(k), self.mu.max(k))
    }
}

/// ℂξ; for `d = 1` this is 2μξ.
pub fn apply_elasticity(c: &IsotropicElasticity, xi: &SymMatrix) -> SymMatrix {
    if xi.d == 1 {
        return *xi * (2.0 * c.mu);
    }
    let (dev, tr) = deviator_split(xi);
    dev.0 * (2.0 * c.mu) + SymMatrix::identity(xi.d).unwrap() * (c.kappa * tr)
}

/// Q(ξ) = μ|ξ_D|² + (κ/2)(tr ξ)²; μξ² for `d = 1`.
pub fn elastic_energy(c: &IsotropicElasticity, xi: &SymMatrix) -> f64 {
    if xi.d == 1 {
        return c.mu * xi.a[0] * xi.a[0];
    }
    let (dev, tr) = deviator_split(xi);
    c.mu * dev.0.dot(&dev.0) + 0.5 * c.kappa * tr * tr
}

/// Q*(σ) = |σ_D|²/(4μ) + (tr σ)²/(2κd²); σ²/(4μ) for `d = 1`.
pub fn elastic_conjugate(c: &IsotropicElasticity, sigma: &SymMatrix) -> f64 {
    if sigma.d == 1 {
        return sigma.a[0] * sigma.a[0] / (4.0 * c.mu);
    }
    let (dev, tr) = deviator_split(sigma);
    let d = sigma.d as f64;
    dev.0.dot(&dev.0) / (4.0 * c.mu) + tr * tr / (2.0 * c.kappa * d * d)
}
