//! Lift of reduced 1D solutions to simple shears in dimension `d`.

use super::{integrate_reduced, ReducedProblem, ReducedTrajectory};
use crate::domain::ElasticDomain;
use crate::error::{Error, Result};
use crate::homogeneous::{integrate_eps_ode, HomogeneousProblem, HomogeneousState, LoadingProgram};
use crate::tensor::{shear_embed, DevMatrix, IsotropicElasticity};

/// Fields of the lifted shear at one time: `e = M(e^R)`, `p = M(p^R)`,
/// `z = z^R`, with `u(t, x) = √2 u^R(t, x₁) e₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearFields {
    pub t: f64,
    pub e: DevMatrix,
    pub p: Vec<DevMatrix>,
    pub z: Vec<f64>,
}

/// `K` in dimension `d` generated by the planar domain of the reduced run.
fn lifted_domain(k: &ElasticDomain) -> Result<ElasticDomain> {
    match k {
        ElasticDomain::Ball { .. } | ElasticDomain::Radial(_) => Ok(k.clone()),
        other => ElasticDomain::radial(other.clone()),
    }
}

pub fn lift_to_shear(pb: &ReducedProblem, run: &ReducedTrajectory, d: usize) -> Result<Vec<ShearFields>> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    lifted_domain(&pb.domain)?;
    run.samples
        .iter()
        .map(|s| {
            Ok(ShearFields {
                t: s.state.t,
                e: shear_embed(s.state.e, d)?,
                p: s.state.p.iter().map(|&p| shear_embed(p, d)).collect::<Result<_>>()?,
                z: s.state.z.clone(),
            })
        })
        .collect()
}

fn lift_loading(span: &LoadingProgram, d: usize) -> Result<LoadingProgram> {
    let m = |x: &crate::tensor::SymMatrix| shear_embed(x.get(0, 0), d).map(DevMatrix::into_sym);
    match span {
        LoadingProgram::Linear { xi0 } => LoadingProgram::linear(m(xi0)?),
        LoadingProgram::Triangular { xi0, turnaround } => LoadingProgram::triangular(m(xi0)?, *turnaround),
        LoadingProgram::Tabulated { knots } => {
            LoadingProgram::tabulated(knots.iter().map(|(t, x)| Ok((*t, m(x)?))).collect::<Result<_>>()?)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftDeviation {
    pub e: f64,
    pub p: f64,
    pub z: f64,
}

impl LiftDeviation {
    pub fn max(&self) -> f64 {
        self.e.max(self.p).max(self.z)
    }
}

/// Runs the reduced problem (which must have constant `z0`) and the
/// homogeneous problem in dimension `d` with the lifted data, and returns
/// the largest deviation between the lifted reduced fields and the direct
/// run over the sample times.
pub fn verify_lift_homogeneous(pb: &ReducedProblem, d: usize, t_end: f64, tol: f64, t_eval: &[f64]) -> Result<LiftDeviation> {
    if pb.z0.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::param("z0", "lift check needs a constant initial z"));
    }
    let run = integrate_reduced(pb, t_end, tol, t_eval)?;
    let lifted = lift_to_shear(pb, &run, d)?;
    let hp = HomogeneousProblem::new(
        IsotropicElasticity::new(pb.mu, 1.0)?,
        lifted_domain(&pb.domain)?,
        pb.potential.clone(),
        lift_loading(&pb.boundary, d)?,
        pb.eps,
    )?;
    let init = HomogeneousState::initial(&hp.loading, 0.0, pb.z0[0]);
    let direct = integrate_eps_ode(&hp, &init, t_end, tol, t_eval)?;
    let mut dev = LiftDeviation { e: 0.0, p: 0.0, z: 0.0 };
    for (l, h) in lifted.iter().zip(&direct.samples) {
        dev.e = dev.e.max((*l.e.as_sym() - h.state.xi_e).norm());
        dev.p = dev.p.max((l.p[0] - h.state.xi_p).norm());
        dev.z = dev.z.max((l.z[0] - h.state.theta).abs());
    }
    Ok(dev)
}
