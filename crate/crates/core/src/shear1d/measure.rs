//! Atomic Young measures on the 1D grid and the limit diagnostics built
//! on them.

use super::{activation_tolerance, Grid1D, ReducedTrajectory};
use crate::domain::ElasticDomain;
use crate::error::{Error, Result};
use crate::softening::SofteningPotential;

const LOC_TOL: f64 = 1e-9;

/// Measure on `[−1/2, 1/2]`: a density on the grid plus point masses.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeasure {
    pub grid: Grid1D,
    pub density: Vec<f64>,
    /// `(location, mass)` pairs.
    pub atoms: Vec<(f64, f64)>,
}

impl GridMeasure {
    pub fn zero(grid: Grid1D) -> Self {
        GridMeasure { grid, density: vec![0.0; grid.len()], atoms: vec![] }
    }

    pub fn from_density(grid: Grid1D, density: Vec<f64>) -> Self {
        GridMeasure { grid, density, atoms: vec![] }
    }

    pub fn total_variation(&self) -> f64 {
        self.grid.integrate(&self.density.iter().map(|d| d.abs()).collect::<Vec<_>>())
            + self.atoms.iter().map(|a| a.1.abs()).sum::<f64>()
    }

    pub fn total_mass(&self) -> f64 {
        self.grid.integrate(&self.density) + self.atoms.iter().map(|a| a.1).sum::<f64>()
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// `a·self + b·other`, merging atoms at common locations and dropping
    /// atoms that cancel.
    pub fn combine(&self, a: f64, other: &GridMeasure, b: f64) -> GridMeasure {
        let density = self.density.iter().zip(&other.density).map(|(x, y)| a * x + b * y).collect();
        let mut atoms: Vec<(f64, f64)> = vec![];
        let scale: f64 = self.atoms.iter().map(|x| (a * x.1).abs()).sum::<f64>()
            + other.atoms.iter().map(|x| (b * x.1).abs()).sum::<f64>();
        for &(loc, m) in self.atoms.iter().map(|x| (x.0, a * x.1)).chain(other.atoms.iter().map(|x| (x.0, b * x.1))).collect::<Vec<_>>().iter() {
            match atoms.iter_mut().find(|x| (x.0 - loc).abs() <= LOC_TOL) {
                Some(x) => x.1 += m,
                None => atoms.push((loc, m)),
            }
        }
        atoms.retain(|x| x.1.abs() > 1e-12 * scale.max(1e-300));
        GridMeasure { grid: self.grid, density, atoms }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct YoungAtom {
    pub weight: f64,
    pub p: GridMeasure,
    pub z: GridMeasure,
}

/// Finite convex combination of deterministic `(p, z)` configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicYoungMeasure {
    pub atoms: Vec<YoungAtom>,
}

impl AtomicYoungMeasure {
    pub fn new(atoms: Vec<YoungAtom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::NoData);
        }
        if atoms.iter().any(|a| !(a.weight > 0.0)) {
            return Err(Error::param("weight", "atom weights must be positive"));
        }
        let s: f64 = atoms.iter().map(|a| a.weight).sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::param("weight", format!("weights sum to {s}, not 1")));
        }
        Ok(AtomicYoungMeasure { atoms })
    }

    /// Dirac measure at a single configuration.
    pub fn dirac(p: GridMeasure, z: GridMeasure) -> Self {
        AtomicYoungMeasure { atoms: vec![YoungAtom { weight: 1.0, p, z }] }
    }

    pub fn weights(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.weight).collect()
    }
}

/// Componentwise weighted average of the atoms.
pub fn young_barycentre(mu: &AtomicYoungMeasure) -> (GridMeasure, GridMeasure) {
    let g = mu.atoms[0].p.grid;
    let (mut p, mut z) = (GridMeasure::zero(g), GridMeasure::zero(g));
    for a in &mu.atoms {
        p = p.combine(1.0, &a.p, a.weight);
        z = z.combine(1.0, &a.z, a.weight);
    }
    (p, z)
}

/// `∫ V(z) dy` over the density plus `V∞` of every point mass.
pub fn measure_v(z: &GridMeasure, v: &SofteningPotential) -> f64 {
    z.grid.integrate(&z.density.iter().map(|&x| v.eval(x)).collect::<Vec<_>>())
        + z.atoms.iter().map(|a| v.recession(a.1)).sum::<f64>()
}

/// `Σ_j w_j [∫ V(z_j) dy + Σ V∞(atom masses)]`.
pub fn young_v_action(mu: &AtomicYoungMeasure, v: &SofteningPotential) -> f64 {
    mu.atoms.iter().map(|a| a.weight * measure_v(&a.z, v)).sum()
}

/// `ℋ(dp, dz)`: `H` on the densities plus `H` of the point masses, with
/// `p` and `z` atoms at one location paired.
pub fn measure_dissipation(k: &ElasticDomain, dp: &GridMeasure, dz: &GridMeasure) -> f64 {
    let g = &dp.grid;
    let dens: Vec<f64> = dp.density.iter().zip(&dz.density).map(|(&a, &b)| k.support_planar(a, b)).collect();
    let mut pairs: Vec<(f64, f64, f64)> = dp.atoms.iter().map(|a| (a.0, a.1, 0.0)).collect();
    for &(loc, m) in &dz.atoms {
        match pairs.iter_mut().find(|x| (x.0 - loc).abs() <= LOC_TOL) {
            Some(x) => x.2 += m,
            None => pairs.push((loc, 0.0, m)),
        }
    }
    g.integrate(&dens) + pairs.iter().map(|x| k.support_planar(x.1, x.2)).sum::<f64>()
}

/// Dissipation of a sequence of Young measures whose atoms are matched by
/// index across times (perfect correlation).
pub fn young_dissipation(k: &ElasticDomain, measures: &[AtomicYoungMeasure]) -> Result<f64> {
    let mut total = 0.0;
    for w in measures.windows(2) {
        if w[0].atoms.len() != w[1].atoms.len() {
            return Err(Error::InvalidCorrelation(format!(
                "{} atoms followed by {}",
                w[0].atoms.len(),
                w[1].atoms.len()
            )));
        }
        for (a, b) in w[0].atoms.iter().zip(&w[1].atoms) {
            if (a.weight - b.weight).abs() > 1e-6 {
                return Err(Error::InvalidCorrelation("matched atoms carry different weights".into()));
            }
            let dp = b.p.combine(1.0, &a.p, -1.0);
            let dz = b.z.combine(1.0, &a.z, -1.0);
            total += b.weight * measure_dissipation(k, &dp, &dz);
        }
    }
    Ok(total)
}

/// Rate at which concentration features approach their limit: the band
/// carries an excess strain `e − 1 ≈ 2ε/width` with width `∝ ε^{1/3}`.
pub const EXCESS_ORDER: f64 = 2.0 / 3.0;

/// Least-squares fit of `x(ε) = a + b ε^q`; returns `a`. With a single
/// value, that value.
pub fn power_extrapolate(eps: &[f64], xs: &[f64], q: f64) -> f64 {
    let n = xs.len();
    if n < 2 {
        return xs[n - 1];
    }
    let u: Vec<f64> = eps.iter().map(|e| e.powf(q)).collect();
    let (mu, mx) = (u.iter().sum::<f64>() / n as f64, xs.iter().sum::<f64>() / n as f64);
    let suu: f64 = u.iter().map(|v| (v - mu).powi(2)).sum();
    let sux: f64 = u.iter().zip(xs).map(|(v, x)| (v - mu) * (x - mx)).sum();
    mx - sux / suu * mu
}

/// Per-ε features of the plastic concentration at one time.
#[derive(Debug, Clone, PartialEq)]
struct Concentration {
    // Per sign group of Δz: (p-mass, z-mass, location).
    groups: Vec<(f64, f64, f64)>,
    active: Vec<bool>,
}

fn concentration(run: &ReducedTrajectory, t: f64) -> Result<Concentration> {
    let s = &run.at(t)?.state;
    let g = &run.grid;
    let tol = activation_tolerance(&run.z0);
    let h = g.h();
    let mut groups: Vec<(f64, f64, f64)> = vec![];
    let mut signs: Vec<f64> = vec![];
    let mut active = vec![false; g.len()];
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..g.len() {
        let dz = s.z[i] - run.z0[i];
        if dz.abs() <= tol {
            continue;
        }
        active[i] = true;
        lo = lo.min(g.node(i));
        hi = hi.max(g.node(i));
        let sg = dz.signum();
        let k = match signs.iter().position(|&x| x == sg) {
            Some(k) => k,
            None => {
                signs.push(sg);
                groups.push((0.0, 0.0, 0.0));
                groups.len() - 1
            }
        };
        groups[k].0 += h * s.p[i];
        groups[k].1 += h * dz;
        groups[k].2 += h * s.p[i] * g.node(i);
    }
    let mut order: Vec<usize> = (0..groups.len()).collect();
    // Positive z-excess first.
    order.sort_by(|&a, &b| signs[b].partial_cmp(&signs[a]).unwrap());
    let mut groups: Vec<(f64, f64, f64)> = order
        .into_iter()
        .map(|k| {
            let (pm, zm, c) = groups[k];
            (pm, zm, if pm != 0.0 { c / pm } else { 0.0 })
        })
        .collect();
    // Groups closer than the half-width of the active band cannot be told
    // apart at this resolution and share one concentration point.
    let resolution = 0.5 * (hi - lo) + h;
    let spread = groups.iter().map(|x| x.2).fold(f64::NEG_INFINITY, f64::max)
        - groups.iter().map(|x| x.2).fold(f64::INFINITY, f64::min);
    if groups.len() > 1 && spread <= resolution {
        let m: f64 = groups.iter().map(|x| x.0).sum();
        let c = groups.iter().map(|x| x.0 * x.2).sum::<f64>() / m;
        for x in &mut groups {
            x.2 = c;
        }
    }
    Ok(Concentration { groups, active })
}

/// `(p, z)` densities of a run with the active cells removed: `p = 0` and
/// `z = z0` there.
fn diffuse_part(run: &ReducedTrajectory, c: &Concentration, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let s = &run.at(t)?.state;
    let n = run.grid.len();
    let p = (0..n).map(|i| if c.active[i] { 0.0 } else { s.p[i] }).collect();
    let z = (0..n).map(|i| if c.active[i] { run.z0[i] } else { s.z[i] }).collect();
    Ok((p, z))
}

/// One Young atom per group; `(weight, p-mass, z-mass, location)` per atom.
fn assemble(grid: Grid1D, p_dens: Vec<f64>, z_dens: Vec<f64>, atoms: &[(f64, f64, f64, f64)]) -> Result<AtomicYoungMeasure> {
    if atoms.is_empty() {
        return Ok(AtomicYoungMeasure::dirac(GridMeasure::from_density(grid, p_dens), GridMeasure::from_density(grid, z_dens)));
    }
    let s: f64 = atoms.iter().map(|a| a.0).sum();
    AtomicYoungMeasure::new(
        atoms
            .iter()
            .map(|&(w, pm, zm, loc)| YoungAtom {
                weight: w / s,
                p: GridMeasure { grid, density: p_dens.clone(), atoms: vec![(loc, pm)] },
                z: GridMeasure { grid, density: z_dens.clone(), atoms: vec![(loc, zm)] },
            })
            .collect(),
    )
}

/// Young measure read off a single run at time `t`: each sign group of the
/// z-excess carries all of the concentrated plastic mass, with its share
/// of that mass as weight.
fn run_measure(run: &ReducedTrajectory, c: &Concentration, t: f64) -> Result<AtomicYoungMeasure> {
    let (p, z) = diffuse_part(run, c, t)?;
    let total: f64 = c.groups.iter().map(|x| x.0).sum();
    let atoms: Vec<_> = c.groups.iter().map(|&(pm, zm, loc)| (pm / total, total, zm * total / pm, loc)).collect();
    assemble(run.grid, p, z, &atoms)
}

/// Extrapolated limit of the concentrated part, with the per-ε data it
/// was fitted from.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitFit {
    pub t: f64,
    pub eps: Vec<f64>,
    /// Total plastic mass of the active region per ε.
    pub masses: Vec<f64>,
    /// Measure read off each run, before extrapolation.
    pub per_eps: Vec<AtomicYoungMeasure>,
    pub measure: AtomicYoungMeasure,
}

fn concentrations(runs: &[&ReducedTrajectory], t: f64) -> Result<Vec<Concentration>> {
    if runs.len() < 3 {
        return Err(Error::param("runs", "need at least three ε values"));
    }
    if runs.windows(2).any(|w| !(w[1].eps < w[0].eps) || w[1].grid != w[0].grid) {
        return Err(Error::param("runs", "ε must decrease on a common grid"));
    }
    let conc: Vec<Concentration> = runs.iter().map(|r| concentration(r, t)).collect::<Result<_>>()?;
    let ng = conc.last().unwrap().groups.len();
    if conc.iter().any(|c| c.groups.len() != ng) {
        return Err(Error::Inconclusive("number of concentration groups changes with ε".into()));
    }
    let masses: Vec<f64> = conc.iter().map(|c| c.groups.iter().map(|x| x.0).sum()).collect();
    let tail = &masses[masses.len() - 3..];
    let swing = (tail[2] - tail[1]) * (tail[1] - tail[0]) < 0.0
        && (tail[2] - tail[1]).abs().max((tail[1] - tail[0]).abs()) > 0.1 * tail[2].abs();
    if swing {
        return Err(Error::Inconclusive(format!("plastic mass oscillates across ε: {tail:?}")));
    }
    Ok(conc)
}

/// Builds the limit Young measure at time `t` from runs ordered by
/// decreasing ε. Every active cell (z departed from z0) is attributed to
/// a point mass; cells are grouped by the sign of the z-excess and each
/// group becomes one Young atom weighted by its share of plastic mass.
/// Scalars are extrapolated in ε with [`power_extrapolate`].
pub fn extract_limit_measure(runs: &[&ReducedTrajectory], t: f64) -> Result<LimitFit> {
    let conc = concentrations(runs, t)?;
    let masses: Vec<f64> = conc.iter().map(|c| c.groups.iter().map(|x| x.0).sum()).collect();
    let eps: Vec<f64> = runs.iter().map(|r| r.eps).collect();
    let per_eps = runs.iter().zip(&conc).map(|(r, c)| run_measure(r, c, t)).collect::<Result<Vec<_>>>()?;
    let last = runs.last().unwrap();
    let (p_dens, z_dens) = diffuse_part(last, conc.last().unwrap(), t)?;
    let fit = |xs: &[f64]| power_extrapolate(&eps, xs, EXCESS_ORDER);
    let total = fit(&masses);
    let atoms: Vec<_> = (0..conc[0].groups.len())
        .map(|k| {
            let w_seq: Vec<f64> = conc.iter().zip(&masses).map(|(c, &mt)| c.groups[k].0 / mt).collect();
            let z_seq: Vec<f64> = conc.iter().map(|c| c.groups[k].1).collect();
            let loc_seq: Vec<f64> = conc.iter().map(|c| c.groups[k].2).collect();
            let w = fit(&w_seq);
            (w, total, fit(&z_seq) / w, fit(&loc_seq))
        })
        .collect();
    let measure = assemble(last.grid, p_dens, z_dens, &atoms)?;
    Ok(LimitFit { t, eps, masses, per_eps, measure })
}

/// Both sides of the energy balance at `T`, for the barycentre of the
/// limit measure and for the measure itself.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyGapReport {
    pub t: f64,
    pub elastic: f64,
    pub work: f64,
    pub barycentre_lhs: f64,
    pub barycentre_rhs: f64,
    /// `lhs − rhs` for the barycentre; positive means the inequality fails.
    pub barycentre_gap: f64,
    pub measure_lhs: f64,
    pub measure_rhs: f64,
    pub measure_residual: f64,
    pub young_dissipation: f64,
    pub barycentre_dissipation: f64,
}

fn gap_for(mu: f64, e0: f64, e: f64, work: f64, k: &ElasticDomain, v: &SofteningPotential, z0: &GridMeasure, m: &AtomicYoungMeasure, t: f64) -> Result<EnergyGapReport> {
    let start = AtomicYoungMeasure::dirac(GridMeasure::zero(z0.grid), z0.clone());
    let elastic = mu * e * e;
    let rhs = mu * e0 * e0 + measure_v(z0, v) + work;
    let (pb, zb) = young_barycentre(m);
    let bary_diss = measure_dissipation(k, &pb, &zb.combine(1.0, z0, -1.0));
    let bary_lhs = elastic + bary_diss + measure_v(&zb, v);
    let ydiss = young_dissipation(k, &[expand_like(&start, m)?, m.clone()])?;
    let meas_lhs = elastic + ydiss + young_v_action(m, v);
    Ok(EnergyGapReport {
        t,
        elastic,
        work,
        barycentre_lhs: bary_lhs,
        barycentre_rhs: rhs,
        barycentre_gap: bary_lhs - rhs,
        measure_lhs: meas_lhs,
        measure_rhs: rhs,
        measure_residual: meas_lhs - rhs,
        young_dissipation: ydiss,
        barycentre_dissipation: bary_diss,
    })
}

/// Energy audit of the ε → 0 limit at time `t_final`. Each run gives a
/// report from its own measure (see [`extract_limit_measure`]); every
/// field is then extrapolated in ε. Returns the limit report and the
/// per-ε reports.
pub fn energy_gap_report(
    runs: &[&ReducedTrajectory],
    mu: f64,
    k: &ElasticDomain,
    v: &SofteningPotential,
    t_final: f64,
) -> Result<(EnergyGapReport, Vec<EnergyGapReport>)> {
    let fit = extract_limit_measure(runs, t_final)?;
    let per: Vec<EnergyGapReport> = runs
        .iter()
        .zip(&fit.per_eps)
        .map(|(r, m)| {
            let s = r.at(t_final)?;
            let z0 = GridMeasure::from_density(r.grid, r.z0.clone());
            gap_for(mu, r.samples[0].state.e, s.state.e, s.energy.work, k, v, &z0, m, t_final)
        })
        .collect::<Result<_>>()?;
    let x = |f: fn(&EnergyGapReport) -> f64| power_extrapolate(&fit.eps, &per.iter().map(f).collect::<Vec<_>>(), EXCESS_ORDER);
    let lim = EnergyGapReport {
        t: t_final,
        elastic: x(|r| r.elastic),
        work: x(|r| r.work),
        barycentre_lhs: x(|r| r.barycentre_lhs),
        barycentre_rhs: x(|r| r.barycentre_rhs),
        barycentre_gap: x(|r| r.barycentre_gap),
        measure_lhs: x(|r| r.measure_lhs),
        measure_rhs: x(|r| r.measure_rhs),
        measure_residual: x(|r| r.measure_residual),
        young_dissipation: x(|r| r.young_dissipation),
        barycentre_dissipation: x(|r| r.barycentre_dissipation),
    };
    Ok((lim, per))
}

/// Splits a Dirac initial measure into copies matching the atoms of
/// `target`, so the two can be correlated by index.
fn expand_like(start: &AtomicYoungMeasure, target: &AtomicYoungMeasure) -> Result<AtomicYoungMeasure> {
    if start.atoms.len() != 1 {
        return Err(Error::InvalidCorrelation("initial measure must be a Dirac mass".into()));
    }
    let a = &start.atoms[0];
    Ok(AtomicYoungMeasure {
        atoms: target.atoms.iter().map(|t| YoungAtom { weight: t.weight, p: a.p.clone(), z: a.z.clone() }).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> Grid1D {
        Grid1D::new(10).unwrap()
    }

    fn dirac_at0(m: f64) -> GridMeasure {
        GridMeasure { grid: g(), density: vec![0.0; 10], atoms: vec![(0.0, m)] }
    }

    #[test]
    fn barycentre_examples() {
        let a = dirac_at0(1.0);
        let b = GridMeasure::from_density(g(), vec![2.0; 10]);
        let single = AtomicYoungMeasure::dirac(a.clone(), b.clone());
        assert_eq!(young_barycentre(&single), (a.clone(), b.clone()));
        let mixed = AtomicYoungMeasure::new(vec![
            YoungAtom { weight: 0.25, p: a.clone(), z: b.clone() },
            YoungAtom { weight: 0.75, p: b.clone(), z: a.clone() },
        ])
        .unwrap();
        let (p, _) = young_barycentre(&mixed);
        assert!((p.total_mass() - (0.25 * 1.0 + 0.75 * 2.0)).abs() < 1e-14);
        // Opposite z atoms cancel.
        let osc = AtomicYoungMeasure::new(vec![
            YoungAtom { weight: 0.5, p: dirac_at0(2.0), z: dirac_at0(2.0) },
            YoungAtom { weight: 0.5, p: dirac_at0(2.0), z: dirac_at0(-2.0) },
        ])
        .unwrap();
        let (p, z) = young_barycentre(&osc);
        assert_eq!(p.atoms, vec![(0.0, 2.0)]);
        assert!(z.atoms.is_empty());
        assert!(AtomicYoungMeasure::new(vec![YoungAtom { weight: 0.5, p: a.clone(), z: b }]).is_err());
    }

    #[test]
    fn v_action_examples() {
        let v = SofteningPotential::Plateau;
        let z0: Vec<f64> = g().sample(|y| 1.0 - 2.0 * y.abs());
        let plain = AtomicYoungMeasure::dirac(GridMeasure::zero(g()), GridMeasure::from_density(g(), z0.clone()));
        let direct = g().integrate(&z0.iter().map(|&z| v.eval(z)).collect::<Vec<_>>());
        assert!((young_v_action(&plain, &v) - direct).abs() < 1e-15);
        let t = 3.0;
        let mk = |s: f64| GridMeasure { grid: g(), density: z0.clone(), atoms: vec![(0.0, s * (t - 1.0))] };
        let osc = AtomicYoungMeasure::new(vec![
            YoungAtom { weight: 0.5, p: dirac_at0(t - 1.0), z: mk(1.0) },
            YoungAtom { weight: 0.5, p: dirac_at0(t - 1.0), z: mk(-1.0) },
        ])
        .unwrap();
        assert!((young_v_action(&osc, &v) - (direct - (t - 1.0))).abs() < 1e-12);
        let atom_part = |m: f64| measure_v(&GridMeasure { grid: g(), density: vec![0.0; 10], atoms: vec![(0.0, m)] }, &v)
            - measure_v(&GridMeasure::zero(g()), &v);
        assert!((atom_part(4.0) - 2.0 * atom_part(2.0)).abs() < 1e-12);
    }

    #[test]
    fn dissipation_examples() {
        let k = ElasticDomain::diamond(2.0).unwrap();
        let t = 3.0;
        let z0 = GridMeasure::from_density(g(), vec![0.3; 10]);
        let start = AtomicYoungMeasure::dirac(GridMeasure::zero(g()), z0.clone());
        let end = AtomicYoungMeasure::dirac(dirac_at0(t - 1.0), z0.combine(1.0, &dirac_at0(t - 1.0), 1.0));
        assert!((young_dissipation(&k, &[start.clone(), end.clone()]).unwrap() - 2.0 * (t - 1.0)).abs() < 1e-12);
        assert_eq!(young_dissipation(&k, &[end.clone(), end.clone()]).unwrap(), 0.0);
        let two = AtomicYoungMeasure::new(vec![
            YoungAtom { weight: 0.5, p: dirac_at0(1.0), z: dirac_at0(1.0) },
            YoungAtom { weight: 0.5, p: dirac_at0(1.0), z: dirac_at0(-1.0) },
        ])
        .unwrap();
        assert!(matches!(young_dissipation(&k, &[start, two]), Err(Error::InvalidCorrelation(_))));
    }

    #[test]
    fn power_fit_recovers_limit() {
        let eps = [4e-3, 2e-3, 1e-3, 5e-4];
        let xs: Vec<f64> = eps.iter().map(|e: &f64| 2.0 - 3.0 * e.powf(EXCESS_ORDER)).collect();
        assert!((power_extrapolate(&eps, &xs, EXCESS_ORDER) - 2.0).abs() < 1e-12);
        assert_eq!(power_extrapolate(&eps[..1], &xs[..1], EXCESS_ORDER), xs[0]);
    }
}
