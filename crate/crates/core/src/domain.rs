//! Elastic domains `K` in (deviatoric stress, ζ)-space: support function,
//! Euclidean projection, viscous normal map and the regularized pair
//! `H_ε`, `H_ε*`.
//!
//! Planar variants (`Diamond`, `Polygon`) act on `d = 1` points where the
//! stress is a bare real. `Ball` works in any dimension. `Radial` lifts a
//! planar generator symmetric under `α ↦ −α` to `{(σ, ζ) : (|σ|, ζ) ∈ K^R}`.

use crate::error::{Error, Result};
use crate::tensor::DevMatrix;

const MEMBER_TOL: f64 = 1e-10;

/// (σ_D, ζ) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressPoint {
    pub sigma: DevMatrix,
    pub zeta: f64,
}

/// (ξ, θ) pair: plastic strain rate direction and internal variable rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowDirection {
    pub xi: DevMatrix,
    pub theta: f64,
}

impl StressPoint {
    pub fn new(sigma: DevMatrix, zeta: f64) -> Self {
        StressPoint { sigma, zeta }
    }

    pub fn planar(alpha: f64, zeta: f64) -> Self {
        StressPoint { sigma: DevMatrix::scalar(alpha), zeta }
    }

    pub fn norm(&self) -> f64 {
        (self.sigma.dot(&self.sigma) + self.zeta * self.zeta).sqrt()
    }

    pub fn pair(&self, dir: &FlowDirection) -> f64 {
        self.sigma.dot(&dir.xi) + self.zeta * dir.theta
    }

    fn sub(&self, o: &StressPoint) -> StressPoint {
        StressPoint { sigma: self.sigma - o.sigma, zeta: self.zeta - o.zeta }
    }
}

impl FlowDirection {
    pub fn new(xi: DevMatrix, theta: f64) -> Self {
        FlowDirection { xi, theta }
    }

    pub fn planar(xi: f64, theta: f64) -> Self {
        FlowDirection { xi: DevMatrix::scalar(xi), theta }
    }

    pub fn norm(&self) -> f64 {
        (self.xi.dot(&self.xi) + self.theta * self.theta).sqrt()
    }
}

/// Convex polygon with counterclockwise, strictly convex vertices and the
/// origin in its interior.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<[f64; 2]>,
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl Polygon {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::param("vertices", "polygon needs at least 3 vertices"));
        }
        if vertices.iter().any(|v| !v[0].is_finite() || !v[1].is_finite()) {
            return Err(Error::param("vertices", "non-finite vertex"));
        }
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if cross(a, b, c) <= 0.0 {
                return Err(Error::param(
                    "vertices",
                    format!("not strictly convex and counterclockwise at vertex {}", (i + 1) % n),
                ));
            }
            if cross(a, b, [0.0, 0.0]) <= 0.0 {
                return Err(Error::param("vertices", "origin is not an interior point"));
            }
        }
        Ok(Polygon { vertices })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    fn contains_exact(&self, p: [f64; 2]) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| cross(self.vertices[i], self.vertices[(i + 1) % n], p) >= 0.0)
    }

    /// Closest point: each edge's closest point is tested, the global
    /// minimizer wins, ties go to the lowest edge index.
    pub fn project(&self, p: [f64; 2]) -> [f64; 2] {
        if self.contains_exact(p) {
            return p;
        }
        let n = self.vertices.len();
        let mut best = self.vertices[0];
        let mut best_d = f64::INFINITY;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let ab = [b[0] - a[0], b[1] - a[1]];
            let t = ((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / (ab[0] * ab[0] + ab[1] * ab[1]);
            let t = t.clamp(0.0, 1.0);
            let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
            let d = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2);
            if d < best_d {
                best_d = d;
                best = q;
            }
        }
        best
    }

    pub fn support(&self, dir: [f64; 2]) -> f64 {
        self.vertices.iter().map(|v| v[0] * dir[0] + v[1] * dir[1]).fold(f64::NEG_INFINITY, f64::max)
    }

    fn is_symmetric(&self) -> bool {
        self.vertices.iter().all(|v| {
            let r = [-v[0], v[1]];
            let q = self.project(r);
            ((q[0] - r[0]).powi(2) + (q[1] - r[1]).powi(2)).sqrt() <= MEMBER_TOL * (1.0 + v[0].abs() + v[1].abs())
        })
    }
}

/// Compact convex elastic domain.
#[derive(Debug, Clone, PartialEq)]
pub enum ElasticDomain {
    /// `|σ|² + ζ² ≤ r²` in any dimension.
    Ball { radius: f64 },
    /// `|α| + |ζ| ≤ c`, planar.
    Diamond { c: f64 },
    /// Planar polygon.
    Polygon(Polygon),
    /// `{(σ, ζ) : (|σ|, ζ) ∈ generator}` with a symmetric planar generator.
    Radial(Box<ElasticDomain>),
}

impl ElasticDomain {
    pub fn ball(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::param("radius", "must be positive"));
        }
        Ok(ElasticDomain::Ball { radius })
    }

    pub fn diamond(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::param("c", "must be positive"));
        }
        Ok(ElasticDomain::Diamond { c })
    }

    /// Polygon domain; also checks that `(σ, ζ) ∈ K ⇒ (0, ζ) ∈ K`.
    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let p = Polygon::new(vertices)?;
        let top = p.support([0.0, 1.0]);
        let bottom = -p.support([0.0, -1.0]);
        for z in [top, bottom] {
            let q = p.project([0.0, z]);
            if (q[0].powi(2) + (q[1] - z).powi(2)).sqrt() > MEMBER_TOL * (1.0 + z.abs()) {
                return Err(Error::param("vertices", "the ζ-extreme points must lie on the axis σ = 0"));
            }
        }
        Ok(ElasticDomain::Polygon(p))
    }

    /// Hexagon with vertices (3/2,1/2), (0,2), (−5/4,3/4), (−3/2,−1/2),
    /// (0,−2), (5/4,−3/4).
    pub fn hexagon() -> Self {
        ElasticDomain::polygon(vec![
            [1.5, 0.5],
            [0.0, 2.0],
            [-1.25, 0.75],
            [-1.5, -0.5],
            [0.0, -2.0],
            [1.25, -0.75],
        ])
        .expect("hexagon is valid")
    }

    pub fn radial(generator: ElasticDomain) -> Result<Self> {
        match &generator {
            ElasticDomain::Radial(_) => Err(Error::param("generator", "generator must be planar")),
            ElasticDomain::Polygon(p) if !p.is_symmetric() => Err(Error::Unsupported(
                "radial generator must be symmetric under α ↦ −α".into(),
            )),
            _ => Ok(ElasticDomain::Radial(Box::new(generator))),
        }
    }

    /// True when the domain accepts `d ≥ 2` stress points.
    pub fn is_dimension_free(&self) -> bool {
        matches!(self, ElasticDomain::Ball { .. } | ElasticDomain::Radial(_))
    }

    /// True when symmetric under `σ ↦ −σ`.
    pub fn is_symmetric(&self) -> bool {
        match self {
            ElasticDomain::Polygon(p) => p.is_symmetric(),
            _ => true,
        }
    }

    /// Support function of the planar section (or generator).
    pub fn support_planar(&self, xi: f64, theta: f64) -> f64 {
        match self {
            ElasticDomain::Ball { radius } => radius * xi.hypot(theta),
            ElasticDomain::Diamond { c } => c * xi.abs().max(theta.abs()),
            ElasticDomain::Polygon(p) => p.support([xi, theta]).max(0.0),
            ElasticDomain::Radial(g) => g.support_planar(xi.abs(), theta),
        }
    }

    /// Projection of a planar point.
    pub fn project_planar(&self, a: f64, z: f64) -> (f64, f64) {
        match self {
            ElasticDomain::Ball { radius } => {
                let n = a.hypot(z);
                if n <= *radius {
                    (a, z)
                } else {
                    let s = radius / n;
                    (a * s, z * s)
                }
            }
            ElasticDomain::Diamond { c } => {
                let (u, v) = (a.abs(), z.abs());
                if u + v <= *c {
                    return (a, z);
                }
                let s = 0.5 * (u + v - c);
                let (pu, pv) = if u - s < 0.0 {
                    (0.0, *c)
                } else if v - s < 0.0 {
                    (*c, 0.0)
                } else {
                    (u - s, v - s)
                };
                (pu.copysign(a), pv.copysign(z))
            }
            ElasticDomain::Polygon(p) => {
                let q = p.project([a, z]);
                (q[0], q[1])
            }
            ElasticDomain::Radial(g) => {
                let (r, zz) = g.project_planar(a.abs(), z);
                (r.copysign(a), zz)
            }
        }
    }

    /// Polygonal description used as a cross-validation oracle. Exact for
    /// `Diamond` and `Polygon`; an inscribed `n`-gon for `Ball`.
    pub fn as_polygon(&self, n: usize) -> Polygon {
        match self {
            ElasticDomain::Ball { radius } => {
                let n = n.max(8);
                Polygon::new(
                    (0..n)
                        .map(|k| {
                            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                            [radius * t.cos(), radius * t.sin()]
                        })
                        .collect(),
                )
                .expect("regular polygon")
            }
            ElasticDomain::Diamond { c } => {
                Polygon::new(vec![[*c, 0.0], [0.0, *c], [-c, 0.0], [0.0, -c]]).expect("diamond")
            }
            ElasticDomain::Polygon(p) => p.clone(),
            ElasticDomain::Radial(g) => g.as_polygon(n),
        }
    }

    /// Radius of a ball around the origin contained in K.
    pub fn inner_radius(&self) -> f64 {
        match self {
            ElasticDomain::Ball { radius } => *radius,
            ElasticDomain::Diamond { c } => c / 2f64.sqrt(),
            ElasticDomain::Polygon(p) => {
                let v = &p.vertices;
                let n = v.len();
                (0..n)
                    .map(|i| {
                        let a = v[i];
                        let b = v[(i + 1) % n];
                        cross(a, b, [0.0, 0.0]) / ((b[0] - a[0]).hypot(b[1] - a[1]))
                    })
                    .fold(f64::INFINITY, f64::min)
            }
            ElasticDomain::Radial(g) => g.inner_radius(),
        }
    }

    /// Radius of a ball around the origin containing K.
    pub fn outer_radius(&self) -> f64 {
        match self {
            ElasticDomain::Ball { radius } => *radius,
            ElasticDomain::Diamond { c } => *c,
            ElasticDomain::Polygon(p) => p.vertices.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max),
            ElasticDomain::Radial(g) => g.outer_radius(),
        }
    }

    /// `a_K`: extent of K in the −ζ direction.
    pub fn a_k(&self) -> f64 {
        self.support_planar(0.0, -1.0)
    }

    /// `b_K`: extent of K in the +ζ direction.
    pub fn b_k(&self) -> f64 {
        self.support_planar(0.0, 1.0)
    }

    fn check_point_dim(&self, d: usize) {
        assert!(
            d == 1 || self.is_dimension_free(),
            "planar domain used with a d = {d} stress point"
        );
    }
}

/// Support function `H(ξ, θ)`.
pub fn support(k: &ElasticDomain, dir: &FlowDirection) -> f64 {
    let d = dir.xi.dim();
    k.check_point_dim(d);
    if d == 1 {
        k.support_planar(dir.xi.as_scalar(), dir.theta)
    } else {
        k.support_planar(dir.xi.norm(), dir.theta)
    }
}

/// Euclidean projection `P_K`.
pub fn project(k: &ElasticDomain, x: &StressPoint) -> StressPoint {
    let d = x.sigma.dim();
    k.check_point_dim(d);
    if d == 1 {
        let (a, z) = k.project_planar(x.sigma.as_scalar(), x.zeta);
        return StressPoint::planar(a, z);
    }
    let r = x.sigma.norm();
    let (rp, zp) = k.project_planar(r, x.zeta);
    if rp == r && zp == x.zeta {
        return *x;
    }
    let sigma = if r > 0.0 { x.sigma * (rp / r) } else { x.sigma * 0.0 };
    StressPoint { sigma, zeta: zp }
}

/// Distance from x to K.
pub fn distance(k: &ElasticDomain, x: &StressPoint) -> f64 {
    x.sub(&project(k, x)).norm()
}

/// Membership with tolerance `1e-10·(1 + |x|)`.
pub fn contains(k: &ElasticDomain, x: &StressPoint) -> bool {
    distance(k, x) <= MEMBER_TOL * (1.0 + x.norm())
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::param("eps", "must be positive"))
    }
}

/// Viscous normal map `N_K^ε(x) = (x − P_K x)/ε`.
pub fn visco_flow(k: &ElasticDomain, x: &StressPoint, eps: f64) -> Result<FlowDirection> {
    check_eps(eps)?;
    let p = project(k, x);
    let r = x.sub(&p);
    Ok(FlowDirection { xi: r.sigma * (1.0 / eps), theta: r.zeta / eps })
}

/// Planar version of [`visco_flow`] without allocation or checks.
#[inline]
pub fn visco_flow_planar(k: &ElasticDomain, a: f64, z: f64, eps: f64) -> (f64, f64) {
    let (pa, pz) = k.project_planar(a, z);
    ((a - pa) / eps, (z - pz) / eps)
}

/// `H_ε*(x) = dist(x, K)²/(2ε)`.
pub fn hepsilon_conjugate(k: &ElasticDomain, x: &StressPoint, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let d = distance(k, x);
    Ok(d * d / (2.0 * eps))
}

/// `H_ε(ξ, θ) = H(ξ, θ) + ε|ξ|²/2 + ε|θ|²/2`.
pub fn hepsilon(k: &ElasticDomain, dir: &FlowDirection, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let n = dir.norm();
    Ok(support(k, dir) + 0.5 * eps * n * n)
}

/// Tests `x ∈ ∂H(dir)`, i.e. `x ∈ K` and `⟨x, dir⟩ = H(dir)`, within `tol`.
pub fn subgradient_test(k: &ElasticDomain, x: &StressPoint, dir: &FlowDirection, tol: f64) -> bool {
    let h = support(k, dir);
    distance(k, x) <= tol * (1.0 + x.norm()) && (x.pair(dir) - h).abs() <= tol * (1.0 + h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::shear_embed;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn domains() -> Vec<ElasticDomain> {
        vec![
            ElasticDomain::ball(1.0).unwrap(),
            ElasticDomain::ball(2.5).unwrap(),
            ElasticDomain::diamond(2.0).unwrap(),
            ElasticDomain::hexagon(),
            ElasticDomain::radial(ElasticDomain::diamond(1.0).unwrap()).unwrap(),
        ]
    }

    #[test]
    fn support_examples() {
        let dia = ElasticDomain::diamond(2.0).unwrap();
        assert_eq!(support(&dia, &FlowDirection::planar(1.0, -3.0)), 6.0);
        let ball = ElasticDomain::ball(1.0).unwrap();
        assert_eq!(support(&ball, &FlowDirection::planar(3.0, 4.0)), 5.0);
        for k in domains() {
            assert_eq!(support(&k, &FlowDirection::planar(0.0, 0.0)), 0.0);
        }
    }

    #[test]
    fn project_examples() {
        let dia = ElasticDomain::diamond(2.0).unwrap();
        let p = project(&dia, &StressPoint::planar(2.0, 2.0));
        assert_eq!((p.sigma.as_scalar(), p.zeta), (1.0, 1.0));
        let ball = ElasticDomain::ball(1.0).unwrap();
        let p = project(&ball, &StressPoint::planar(1.2, 1.6));
        assert_relative_eq!(p.sigma.as_scalar(), 0.6, epsilon = 1e-15);
        assert_relative_eq!(p.zeta, 0.8, epsilon = 1e-15);
        let x = StressPoint::planar(0.3, -0.2);
        assert_eq!(project(&ball, &x), x);
    }

    #[test]
    fn flow_examples() {
        let ball = ElasticDomain::ball(1.0).unwrap();
        let n = visco_flow(&ball, &StressPoint::planar(2.0, 0.0), 0.5).unwrap();
        assert_relative_eq!(n.xi.as_scalar(), 2.0);
        assert_eq!(n.theta, 0.0);
        let n = visco_flow(&ball, &StressPoint::planar(0.1, 0.2), 0.5).unwrap();
        assert_eq!((n.xi.as_scalar(), n.theta), (0.0, 0.0));
        let dia = ElasticDomain::diamond(2.0).unwrap();
        let n = visco_flow(&dia, &StressPoint::planar(1.5, 1.5), 0.5).unwrap();
        assert_relative_eq!(n.xi.as_scalar(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(n.theta, 1.0, epsilon = 1e-15);
        assert!(visco_flow(&dia, &StressPoint::planar(1.5, 1.5), 0.0).is_err());
        assert_relative_eq!(hepsilon_conjugate(&ball, &StressPoint::planar(2.0, 0.0), 0.5).unwrap(), 1.0);
    }

    #[test]
    fn diamond_branch_formula() {
        // α ≥ 0, −2 ≤ ζ − α ≤ 2: N = (1/2ε)((α+ζ−2)^+, (α+ζ−2)^+)
        let dia = ElasticDomain::diamond(2.0).unwrap();
        let eps = 0.01;
        for &(a, z) in &[(1.5, 1.5), (0.3, 2.2), (2.5, 0.9), (1.0, 0.5), (3.0, 1.5)] {
            let (n1, n2) = visco_flow_planar(&dia, a, z, eps);
            let f = ((a + z - 2.0) as f64).max(0.0) / (2.0 * eps);
            assert_relative_eq!(n1, f, epsilon = 1e-12);
            assert_relative_eq!(n2, f, epsilon = 1e-12);
        }
    }

    #[test]
    fn subgradient_examples() {
        let ball = ElasticDomain::ball(1.0).unwrap();
        assert!(subgradient_test(&ball, &StressPoint::planar(0.2, 0.1), &FlowDirection::planar(0.0, 0.0), 1e-10));
        assert!(subgradient_test(&ball, &StressPoint::planar(1.0, 0.0), &FlowDirection::planar(5.0, 0.0), 1e-10));
        assert!(!subgradient_test(&ball, &StressPoint::planar(0.0, 1.0), &FlowDirection::planar(5.0, 0.0), 1e-10));
    }

    #[test]
    fn hexagon_geometry() {
        let h = ElasticDomain::hexagon();
        assert_eq!(h.a_k(), 2.0);
        assert_eq!(h.b_k(), 2.0);
        assert!(!h.is_symmetric());
        assert!(ElasticDomain::radial(h).is_err());
        assert!(ElasticDomain::polygon(vec![[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).is_err());
        // ζ-extreme off axis violates (σ,ζ) ∈ K ⇒ (0,ζ) ∈ K
        assert!(ElasticDomain::polygon(vec![[1.0, -1.0], [1.0, 2.0], [-1.0, 0.5], [-1.0, -1.0]]).is_err());
    }

    #[test]
    fn radius_bounds() {
        for k in domains() {
            let (a, b) = (k.inner_radius(), k.outer_radius());
            assert!(a > 0.0 && a <= b);
            for i in 0..64 {
                let t = i as f64 * 0.1;
                let (c, s) = (t.cos(), t.sin());
                let h = k.support_planar(c, s);
                assert!(h >= a - 1e-12 && h <= b + 1e-12);
            }
        }
    }

    #[test]
    fn closed_forms_match_polygon_oracle() {
        let dia = ElasticDomain::diamond(2.0).unwrap();
        let poly = dia.as_polygon(0);
        for i in 0..200 {
            let a = ((i * 37) % 101) as f64 / 101.0 * 8.0 - 4.0;
            let z = ((i * 53) % 97) as f64 / 97.0 * 8.0 - 4.0;
            let (pa, pz) = dia.project_planar(a, z);
            let q = poly.project([a, z]);
            assert!((pa - q[0]).abs() < 1e-12 && (pz - q[1]).abs() < 1e-12);
        }
        let ball = ElasticDomain::ball(1.0).unwrap();
        let poly = ball.as_polygon(4096);
        for i in 0..50 {
            let t = i as f64 * 0.37;
            let (pa, pz) = ball.project_planar(3.0 * t.cos(), 3.0 * t.sin());
            let q = poly.project([3.0 * t.cos(), 3.0 * t.sin()]);
            assert!((pa - q[0]).abs() < 2e-3 && (pz - q[1]).abs() < 2e-3);
        }
    }

    #[test]
    fn radial_projection_in_shear_plane() {
        let gen = ElasticDomain::diamond(2.0).unwrap();
        let k = ElasticDomain::radial(gen.clone()).unwrap();
        for i in 0..100 {
            let a = (i as f64 * 0.731).sin() * 4.0;
            let z = (i as f64 * 1.37).cos() * 4.0;
            let x = StressPoint::new(shear_embed(a, 3).unwrap(), z);
            let p = project(&k, &x);
            let (ah, zh) = gen.project_planar(a, z);
            assert!((p.sigma - shear_embed(ah, 3).unwrap()).norm() < 1e-12);
            assert!((p.zeta - zh).abs() < 1e-12);
        }
    }

    fn arb_point() -> impl Strategy<Value = (f64, f64)> {
        (-6.0f64..6.0, -6.0f64..6.0)
    }

    proptest! {
        #[test]
        fn projection_properties(k in 0usize..5, x in arb_point(), y in arb_point(), v in arb_point()) {
            let k = &domains()[k];
            let px = k.project_planar(x.0, x.1);
            let ppx = k.project_planar(px.0, px.1);
            prop_assert!((px.0 - ppx.0).abs() < 1e-12 && (px.1 - ppx.1).abs() < 1e-12);
            let py = k.project_planar(y.0, y.1);
            let dp = (px.0 - py.0).hypot(px.1 - py.1);
            let dx = (x.0 - y.0).hypot(x.1 - y.1);
            prop_assert!(dp <= dx + 1e-12);
            let pv = k.project_planar(v.0, v.1);
            let vi = (x.0 - px.0) * (pv.0 - px.0) + (x.1 - px.1) * (pv.1 - px.1);
            prop_assert!(vi <= 1e-10);
        }

        #[test]
        fn support_sublinear(k in 0usize..5, a in arb_point(), b in arb_point(), l in 0.01f64..10.0) {
            let k = &domains()[k];
            let h = |p: (f64, f64)| k.support_planar(p.0, p.1);
            let s = h((a.0 + b.0, a.1 + b.1));
            prop_assert!(s <= (h(a) + h(b)) * (1.0 + 1e-12) + 1e-14);
            prop_assert!((h((l * a.0, l * a.1)) - l * h(a)).abs() <= 1e-12 * (1.0 + l * h(a)));
        }

        #[test]
        fn fenchel_young(k in 0usize..5, x in arb_point(), dir in arb_point(), eps in 0.05f64..2.0) {
            let k = &domains()[k];
            let xs = StressPoint::planar(x.0, x.1);
            let fd = FlowDirection::planar(dir.0, dir.1);
            let rhs = hepsilon(k, &fd, eps).unwrap() + hepsilon_conjugate(k, &xs, eps).unwrap();
            prop_assert!(xs.pair(&fd) <= rhs + 1e-10 * (1.0 + rhs.abs()));
            let n = visco_flow(k, &xs, eps).unwrap();
            let eq = hepsilon(k, &n, eps).unwrap() + hepsilon_conjugate(k, &xs, eps).unwrap();
            prop_assert!((xs.pair(&n) - eq).abs() <= 1e-8 * (1.0 + eq.abs()));
        }

        #[test]
        fn conjugate_gradient_fd(k in 0usize..5, x in arb_point(), eps in 0.05f64..2.0) {
            let k = &domains()[k];
            let h = 1e-6;
            let f = |a: f64, z: f64| hepsilon_conjugate(k, &StressPoint::planar(a, z), eps).unwrap();
            let g = visco_flow(k, &StressPoint::planar(x.0, x.1), eps).unwrap();
            let fa = (f(x.0 + h, x.1) - f(x.0 - h, x.1)) / (2.0 * h);
            let fz = (f(x.0, x.1 + h) - f(x.0, x.1 - h)) / (2.0 * h);
            let scale = 1.0 + g.norm();
            prop_assert!((fa - g.xi.as_scalar()).abs() <= 1e-5 * scale);
            prop_assert!((fz - g.theta).abs() <= 1e-5 * scale);
        }

        #[test]
        fn radial_flow_stays_deviatoric(a in -3.0f64..3.0, b in -3.0f64..3.0, z in -3.0f64..3.0) {
            let k = ElasticDomain::ball(1.0).unwrap();
            let m = crate::tensor::SymMatrix::from_upper(3, &[a, b, 0.3, -a - 0.5, 0.1, 0.5]).unwrap();
            let s = DevMatrix::new(m).unwrap();
            let n = visco_flow(&k, &StressPoint::new(s, z), 0.1).unwrap();
            prop_assert!(n.xi.as_sym().trace().abs() < 1e-12);
        }
    }
}
