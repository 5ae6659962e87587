//! Configuration-driven runs: built-in scenarios, ε/τ sweeps and CSV/SVG
//! output.
//!
//! A scenario is a TOML file (see [`ScenarioConfig`]); [`run_scenario`]
//! writes its outputs under `<output.dir>/<name>/` together with a
//! `manifest.toml` that reproduces the run.

mod config;
mod plot;

pub use config::{
    apply_override, builtin, builtin_names, DomainSpec, GridSpec, InitialSpec, LoadingSpec, MaterialSpec, OutputSpec,
    PotentialSpec, ScenarioConfig, ScenarioKind, TimeSpec, Tolerances,
};
pub use plot::{emit_plot, render_svg, JumpMarker, PlotStyle, Series};

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::ElasticDomain;
use crate::error::{Error, Result};
use crate::homogeneous::{
    energy_audit_homogeneous, integrate_eps_ode, quasistatic_assemble, slow_fast_coefficients, uniform_times,
    verify_eps_convergence, Case, HomogeneousProblem, HomogeneousTrajectory, QuasistaticTrajectory,
};
use crate::incremental::{
    discrete_energy_estimate_1d, discrete_energy_estimate_homogeneous, run_incremental_1d, run_incremental_homogeneous,
    sup_error_vs_ode_1d, sup_error_vs_ode_homogeneous, verify_dual_optimality_1d, verify_dual_optimality_homogeneous,
    verify_euler_1d, verify_euler_homogeneous, EnergyEstimateReport, SolverOptions, TimeGrid,
};
use crate::shear1d::{
    energy_audit_reduced, energy_gap_report, extract_limit_measure, integrate_reduced, localization_diagnostics,
    oscillation_symmetry_check, ReducedTrajectory,
};
use crate::tensor::{deviator_split, SymMatrix};

/// Config echo plus the code version; parsing it gives back the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub seed: u64,
    pub config: ScenarioConfig,
}

impl Manifest {
    pub fn new(config: &ScenarioConfig) -> Self {
        Manifest { version: env!("CARGO_PKG_VERSION").into(), seed: config.seed, config: config.clone() }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }

    /// Parses a manifest and validates the embedded config.
    pub fn parse(text: &str) -> Result<Self> {
        let m: Manifest = toml::from_str(text).map_err(|e| Error::config("manifest", e.message().to_string()))?;
        m.config.validate()?;
        Ok(m)
    }
}

/// Files and diagnostics of one scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifact {
    pub manifest: Manifest,
    pub dir: PathBuf,
    pub csv: Vec<PathBuf>,
    pub svg: Vec<PathBuf>,
    /// Scalar diagnostics by name; `error` is the scenario's headline
    /// error measure when it has one.
    pub diagnostics: BTreeMap<String, f64>,
}

/// Writes `bytes` to `path` through a temporary file in the same
/// directory.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Comma-separated table with a header row; numbers carry 17 significant
/// digits.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable { header: header.iter().map(|s| s.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:.16e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.render().as_bytes())
    }
}

/// Quasistatic stress–strain curve: `|σ|` against the imposed strain
/// `t|ξ0^s|`, split at the jump.
#[derive(Debug, Clone, PartialEq)]
pub struct StressCurve {
    pub segments: Vec<Vec<(f64, f64)>>,
    pub jumps: Vec<JumpMarker>,
    /// Strain at the end of the elastic phase.
    pub elastic_limit: f64,
}

pub fn stress_curve(q: &QuasistaticTrajectory) -> StressCurve {
    let s = q.xi_norm;
    let mut segments = vec![vec![]];
    let mut jumps = vec![];
    let tau = q.jump.as_ref().map(|j| j.tau);
    for smp in &q.samples {
        if let (Some(tau), Some(j)) = (tau, &q.jump) {
            if smp.t > tau && segments.len() == 1 {
                let from = q.sigma_norm_at(tau);
                let to = 2.0 * q.mu * (tau - j.psi_plus) * s;
                jumps.push(JumpMarker { x: tau * s, from, to });
                segments.push(vec![(tau * s, to)]);
            }
        }
        segments.last_mut().unwrap().push((smp.t * s, smp.sigma_norm));
    }
    StressCurve { segments, jumps, elastic_limit: q.t0 * s }
}

fn case_index(c: Case) -> f64 {
    match c {
        Case::A => 1.0,
        Case::B => 2.0,
        Case::C => 3.0,
    }
}

fn eps_tag(i: usize) -> String {
    format!("eps{i}")
}

// Signed stress for d = 1, |σ_D| otherwise.
fn stress_value(sigma: &SymMatrix) -> f64 {
    if sigma.dim() == 1 {
        sigma.get(0, 0)
    } else {
        deviator_split(sigma).0.norm()
    }
}

fn domain_outline(k: &ElasticDomain) -> Vec<(f64, f64)> {
    let poly = k.as_polygon(256);
    let v = poly.vertices();
    v.iter().chain(v.first()).map(|p| (p[0], p[1])).collect()
}

struct Outputs {
    csv: Vec<PathBuf>,
    svg: Vec<PathBuf>,
    diag: BTreeMap<String, f64>,
}

impl Outputs {
    fn new() -> Self {
        Outputs { csv: vec![], svg: vec![], diag: BTreeMap::new() }
    }

    fn table(&mut self, path: PathBuf, t: &CsvTable) -> Result<()> {
        t.write(&path)?;
        self.csv.push(path);
        Ok(())
    }

    fn plot(&mut self, path: PathBuf, series: &[Series], style: &PlotStyle) -> Result<()> {
        emit_plot(&path, series, style)?;
        self.svg.push(path);
        Ok(())
    }
}

/// Output directory of a scenario.
pub fn output_dir(cfg: &ScenarioConfig) -> PathBuf {
    Path::new(&cfg.output.dir).join(&cfg.name)
}

/// Runs a validated scenario and writes its outputs.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunArtifact> {
    cfg.validate()?;
    let dir = output_dir(cfg);
    std::fs::create_dir_all(&dir)?;
    let mut out = match cfg.kind {
        ScenarioKind::Homogeneous => run_homogeneous(cfg, &dir)?,
        ScenarioKind::Shear1d => run_shear(cfg, &dir)?,
        ScenarioKind::Incremental if cfg.is_shear() => run_incremental_shear(cfg, &dir)?,
        ScenarioKind::Incremental => run_incremental_hom(cfg, &dir)?,
    };
    let manifest = Manifest::new(cfg);
    write_atomic(&dir.join("manifest.toml"), manifest.to_toml_string().as_bytes())?;
    let mut diag = String::from("key,value\n");
    for (k, v) in &out.diag {
        let _ = writeln!(diag, "{k},{v:.16e}");
    }
    let diag_path = dir.join(format!("{}_diagnostics.csv", cfg.name));
    write_atomic(&diag_path, diag.as_bytes())?;
    out.csv.push(diag_path);
    Ok(RunArtifact { manifest, dir, csv: out.csv, svg: out.svg, diagnostics: out.diag })
}

/// Quasistatic trajectory of a homogeneous scenario with
/// `quasistatic = true`.
pub fn scenario_quasistatic(cfg: &ScenarioConfig) -> Result<QuasistaticTrajectory> {
    let pb = cfg.homogeneous_problem(cfg.eps[0])?;
    let init = cfg.homogeneous_initial(&pb)?;
    let xi0 = pb.loading.direction().ok_or_else(|| Error::config("loading", "needs a fixed direction"))?;
    let dec = slow_fast_coefficients(cfg.material.mu, deviator_split(&xi0).0.norm(), &pb.potential)?;
    quasistatic_assemble(&dec, init.theta, cfg.t_end, cfg.time.samples)
}

fn run_homogeneous(cfg: &ScenarioConfig, dir: &Path) -> Result<Outputs> {
    let name = &cfg.name;
    let mut out = Outputs::new();
    let template = cfg.homogeneous_problem(cfg.eps[0])?;
    let xi0 = template.loading.direction().expect("built from a direction");
    let unit = xi0 * (1.0 / xi0.norm());
    let strain = |pb: &HomogeneousProblem, t: f64| pb.loading.value(t).dot(&unit);
    let times = uniform_times(0.0, cfg.t_end, cfg.time.samples);

    let runs: Vec<(HomogeneousProblem, HomogeneousTrajectory)> = cfg
        .eps
        .par_iter()
        .map(|&e| {
            let pb = cfg.homogeneous_problem(e)?;
            let init = cfg.homogeneous_initial(&pb)?;
            let run = integrate_eps_ode(&pb, &init, cfg.t_end, cfg.tolerances.ode, &times)?;
            Ok((pb, run))
        })
        .collect::<Result<_>>()?;

    let mut stress_series = vec![];
    let mut path_series = vec![Series { label: "∂K".into(), segments: vec![domain_outline(&template.domain)], dashed: true }];
    let mut style = PlotStyle::new(format!("{name}: stress vs imposed strain"), "imposed strain", "stress");

    if cfg.quasistatic {
        let q = scenario_quasistatic(cfg)?;
        let mut t = CsvTable::new(&["t", "strain", "theta", "psi", "sigma_norm", "dissipation", "work"]);
        for s in &q.samples {
            t.push(vec![s.t, s.t * q.xi_norm, s.theta, s.psi, s.sigma_norm, q.dissipation_at(s.t), q.work_at(s.t)]);
        }
        out.table(dir.join(format!("{name}_quasistatic.csv")), &t)?;
        let mut jt = CsvTable::new(&["tau", "strain", "theta_minus", "theta_plus", "sigma_minus", "sigma_plus", "chord", "orbit_dissipation"]);
        let curve = stress_curve(&q);
        if let (Some(j), Some(m)) = (&q.jump, curve.jumps.first()) {
            jt.push(vec![j.tau, m.x, j.theta_minus, j.theta_plus, m.from, m.to, j.chord, j.orbit.dissipation]);
        }
        out.table(dir.join(format!("{name}_jump.csv")), &jt)?;
        out.diag.insert("case".into(), case_index(q.case));
        out.diag.insert("t0".into(), q.t0);
        if let Some(j) = &q.jump {
            out.diag.insert("jump_tau".into(), j.tau);
            out.diag.insert("jump_theta_plus".into(), j.theta_plus);
        }
        let window = (q.t0 + 0.1, cfg.t_end);
        if window.1 > window.0 {
            let conv = verify_eps_convergence(&cfg.eps, &q, &template, window, 0.2, cfg.tolerances.ode, cfg.time.samples)?;
            for (i, r) in conv.rows.iter().enumerate() {
                out.diag.insert(format!("{}.theta_sup_err", eps_tag(i)), r.sup_err);
            }
            out.diag.insert("error".into(), conv.final_error());
        }
        stress_series.push(Series { label: "quasistatic".into(), segments: curve.segments, dashed: false });
        style.jumps = curve.jumps;
    }

    let mut worst_audit = 0.0f64;
    for (i, (pb, run)) in runs.iter().enumerate() {
        let audit = energy_audit_homogeneous(pb, run);
        let mut t = CsvTable::new(&["t", "strain", "sigma", "theta", "zeta", "dissipation", "work", "energy_residual"]);
        let mut curve = vec![];
        let mut path = vec![];
        for (s, a) in run.samples.iter().zip(&audit) {
            let sig = stress_value(&s.sigma);
            let zeta = -pb.potential.deriv(s.state.theta);
            let x = strain(pb, s.state.t);
            t.push(vec![s.state.t, x, sig, s.state.theta, zeta, s.energy.dissipation, s.energy.work, a.residual]);
            curve.push((x, sig));
            path.push((sig, zeta));
        }
        out.table(dir.join(format!("{name}_{}.csv", eps_tag(i))), &t)?;
        let worst = audit.iter().map(|a| a.scaled_residual).fold(0.0, f64::max);
        worst_audit = worst_audit.max(worst);
        out.diag.insert(format!("{}.eps", eps_tag(i)), pb.eps);
        out.diag.insert(format!("{}.energy_residual", eps_tag(i)), worst);
        out.diag.insert(format!("{}.zeta_max", eps_tag(i)), path.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max));
        out.diag.insert(format!("{}.steps", eps_tag(i)), run.steps as f64);
        stress_series.push(Series { label: format!("ε = {:e}", pb.eps), segments: vec![curve], dashed: true });
        path_series.push(Series::line(format!("ε = {:e}", pb.eps), path));
    }
    out.diag.entry("error".into()).or_insert(worst_audit);
    out.plot(dir.join(format!("{name}_stress.svg")), &stress_series, &style)?;
    let mut ps = PlotStyle::new(format!("{name}: path in the (σ, ζ) plane"), "σ", "ζ");
    ps.equal_aspect = true;
    out.plot(dir.join(format!("{name}_path.svg")), &path_series, &ps)?;
    Ok(out)
}

fn snapshot_indices(run: &ReducedTrajectory, k: usize) -> Vec<usize> {
    let t_end = run.samples.last().map_or(0.0, |s| s.state.t);
    let mut idx: Vec<usize> = (1..=k)
        .map(|j| {
            let target = t_end * j as f64 / k as f64;
            (0..run.samples.len())
                .min_by(|&a, &b| {
                    let da = (run.samples[a].state.t - target).abs();
                    let db = (run.samples[b].state.t - target).abs();
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap()
        })
        .collect();
    idx.dedup();
    idx
}

fn run_shear(cfg: &ScenarioConfig, dir: &Path) -> Result<Outputs> {
    let name = &cfg.name;
    let mut out = Outputs::new();
    let times = uniform_times(0.0, cfg.t_end, cfg.time.samples);
    let oscillation = cfg.initial == InitialSpec::Oscillation;
    let runs: Vec<(ReducedTrajectory, Option<ReducedTrajectory>)> = cfg
        .eps
        .par_iter()
        .map(|&e| {
            let pb = cfg.reduced_problem(e)?;
            let run = integrate_reduced(&pb, cfg.t_end, cfg.tolerances.ode, &times)?;
            let mirrored = if oscillation {
                let mut pm = pb.clone();
                pm.z0 = pm.z0.iter().map(|z| z.abs()).collect();
                Some(integrate_reduced(&pm, cfg.t_end, cfg.tolerances.ode, &times)?)
            } else {
                None
            };
            Ok((run, mirrored))
        })
        .collect::<Result<_>>()?;

    let mut radius_series = vec![];
    let mut field_series = vec![];
    let mut error = 0.0;
    for (i, (run, mirrored)) in runs.iter().enumerate() {
        let pb = cfg.reduced_problem(run.eps)?;
        let tag = eps_tag(i);
        let loc = localization_diagnostics(run);
        let audit = energy_audit_reduced(&pb, run);
        let mut t = CsvTable::new(&["t", "e", "sigma", "plastic_mass", "active_radius", "energy_residual"]);
        for (k, s) in run.samples.iter().enumerate() {
            t.push(vec![s.state.t, s.state.e, pb.sigma(s.state.e), loc.mass[k], loc.active_radius[k], audit[k]]);
        }
        out.table(dir.join(format!("{name}_{tag}_series.csv")), &t)?;
        let mut f = CsvTable::new(&["t", "y", "p", "z"]);
        for k in snapshot_indices(run, 4) {
            let st = &run.samples[k].state;
            for (j, y) in run.grid.nodes().into_iter().enumerate() {
                f.push(vec![st.t, y, st.p[j], st.z[j]]);
            }
        }
        out.table(dir.join(format!("{name}_{tag}_fields.csv")), &f)?;
        out.diag.insert(format!("{tag}.eps"), run.eps);
        out.diag.insert(format!("{tag}.e_gap"), loc.e_gap);
        out.diag.insert(format!("{tag}.plastic_mass"), *loc.mass.last().unwrap());
        out.diag.insert(format!("{tag}.active_radius"), loc.final_radius());
        out.diag.insert(format!("{tag}.energy_residual"), audit.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        if let Some(m) = mirrored {
            out.diag.insert(format!("{tag}.symmetry"), oscillation_symmetry_check(run, m)?.max());
        }
        error = loc.e_gap;
        radius_series.push(Series::line(format!("ε = {:e}", run.eps), loc.times.iter().copied().zip(loc.active_radius.iter().copied()).collect()));
        let last = &run.samples.last().unwrap().state;
        field_series.push(Series::line(format!("ε = {:e}", run.eps), run.grid.nodes().into_iter().zip(last.p.iter().copied()).collect()));
    }
    out.diag.insert("error".into(), error);
    out.plot(dir.join(format!("{name}_radius.svg")), &radius_series, &PlotStyle::new(format!("{name}: active region"), "t", "a_ε(t)"))?;
    out.plot(
        dir.join(format!("{name}_fields.svg")),
        &field_series,
        &PlotStyle::new(format!("{name}: plastic strain at t = {}", cfg.t_end), "y", "p"),
    )?;

    if oscillation && runs.len() >= 3 {
        let refs: Vec<&ReducedTrajectory> = runs.iter().map(|r| &r.0).collect();
        let pb = cfg.reduced_problem(cfg.eps[0])?;
        let fit = extract_limit_measure(&refs, cfg.t_end)?;
        let mut m = CsvTable::new(&["atom", "weight", "field", "location", "mass"]);
        for (k, a) in fit.measure.atoms.iter().enumerate() {
            for (field, gm) in [(0.0, &a.p), (1.0, &a.z)] {
                for &(loc, mass) in &gm.atoms {
                    m.push(vec![k as f64, a.weight, field, loc, mass]);
                }
            }
        }
        out.table(dir.join(format!("{name}_measure.csv")), &m)?;
        let (rep, _) = energy_gap_report(&refs, pb.mu, &pb.domain, &pb.potential, cfg.t_end)?;
        out.diag.insert("limit.barycentre_gap".into(), rep.barycentre_gap);
        out.diag.insert("limit.measure_residual".into(), rep.measure_residual);
        out.diag.insert("limit.young_dissipation".into(), rep.young_dissipation);
        for (k, a) in fit.measure.atoms.iter().enumerate() {
            out.diag.insert(format!("limit.atom{k}.weight"), a.weight);
            out.diag.insert(format!("limit.atom{k}.z_mass"), a.z.atom_mass());
        }
    }
    Ok(out)
}

fn energy_columns(t: &mut CsvTable, rows: Vec<(f64, f64, f64, f64)>, en: &EnergyEstimateReport) {
    for (i, (time, sigma, theta, kkt)) in rows.into_iter().enumerate() {
        t.push(vec![i as f64, time, sigma, theta, kkt, en.lhs[i], en.rhs[i]]);
    }
}

const STEP_HEADER: [&str; 7] = ["i", "t", "sigma", "theta", "kkt_residual", "energy_lhs", "energy_rhs"];

struct IncrementalSummary {
    tau: f64,
    sup_err: f64,
    euler_failures: usize,
    dual_failures: usize,
    energy_holds: bool,
    max_kkt: f64,
    series: Vec<(f64, f64)>,
    table: CsvTable,
}

fn record_incremental(out: &mut Outputs, cfg: &ScenarioConfig, dir: &Path, sums: &[(f64, Vec<IncrementalSummary>)]) -> Result<()> {
    let name = &cfg.name;
    let mut series = vec![];
    let mut error = 0.0;
    for (i, (eps, list)) in sums.iter().enumerate() {
        for (j, s) in list.iter().enumerate() {
            let tag = format!("{}.tau{j}", eps_tag(i));
            out.table(dir.join(format!("{name}_{}_tau{j}.csv", eps_tag(i))), &s.table)?;
            out.diag.insert(format!("{tag}.tau"), s.tau);
            out.diag.insert(format!("{tag}.sup_err"), s.sup_err);
            out.diag.insert(format!("{tag}.euler_failures"), s.euler_failures as f64);
            out.diag.insert(format!("{tag}.dual_failures"), s.dual_failures as f64);
            out.diag.insert(format!("{tag}.energy_holds"), if s.energy_holds { 1.0 } else { 0.0 });
            out.diag.insert(format!("{tag}.max_kkt"), s.max_kkt);
            error = s.sup_err;
            series.push(Series::line(format!("ε = {eps:e}, τ = {:e}", s.tau), s.series.clone()));
        }
    }
    out.diag.insert("error".into(), error);
    out.plot(dir.join(format!("{name}_theta.svg")), &series, &PlotStyle::new(format!("{name}: incremental runs"), "t", "θ"))
}

fn run_incremental_hom(cfg: &ScenarioConfig, dir: &Path) -> Result<Outputs> {
    let opts = SolverOptions { kkt_tol: cfg.tolerances.kkt, ..SolverOptions::default() };
    let tol = cfg.tolerances.verify;
    let sums: Vec<(f64, Vec<IncrementalSummary>)> = cfg
        .eps
        .iter()
        .map(|&e| {
            let pb = cfg.homogeneous_problem(e)?;
            let init = cfg.homogeneous_initial(&pb)?;
            let list = cfg
                .taus(e)
                .par_iter()
                .map(|&tau| {
                    let grid = TimeGrid::uniform(cfg.t_end, tau)?;
                    let run = run_incremental_homogeneous(&pb, &init, &grid, &opts)?;
                    let sup_err = sup_error_vs_ode_homogeneous(&pb, &run, cfg.tolerances.ode.min(1e-10), cfg.time.samples)?;
                    let states: Vec<_> = run.states().collect();
                    let (mut ef, mut df) = (0, 0);
                    for (k, w) in states.windows(2).enumerate() {
                        ef += usize::from(!verify_euler_homogeneous(&pb, w[0], w[1], tol).passed);
                        df += usize::from(!verify_dual_optimality_homogeneous(&pb, w[0], w[1], 20, 0.05, cfg.seed.wrapping_add(k as u64), tol).passed);
                    }
                    let en = discrete_energy_estimate_homogeneous(&pb, &run, tol);
                    let rows = run
                        .states()
                        .enumerate()
                        .map(|(k, s)| {
                            let kkt = if k == 0 { 0.0 } else { run.steps[k - 1].kkt_residual };
                            (s.t, stress_value(&crate::tensor::apply_elasticity(&pb.elasticity, &s.xi_e)), s.theta, kkt)
                        })
                        .collect();
                    let mut table = CsvTable::new(&STEP_HEADER);
                    energy_columns(&mut table, rows, &en);
                    Ok(IncrementalSummary {
                        tau: grid.tau_max(),
                        sup_err,
                        euler_failures: ef,
                        dual_failures: df,
                        energy_holds: en.holds && en.dual.holds,
                        max_kkt: run.max_kkt(),
                        series: run.states().map(|s| (s.t, s.theta)).collect(),
                        table,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((e, list))
        })
        .collect::<Result<_>>()?;
    let mut out = Outputs::new();
    record_incremental(&mut out, cfg, dir, &sums)?;
    Ok(out)
}

fn run_incremental_shear(cfg: &ScenarioConfig, dir: &Path) -> Result<Outputs> {
    let opts = SolverOptions { kkt_tol: cfg.tolerances.kkt, ..SolverOptions::default() };
    let tol = cfg.tolerances.verify;
    let sums: Vec<(f64, Vec<IncrementalSummary>)> = cfg
        .eps
        .iter()
        .map(|&e| {
            let pb = cfg.reduced_problem(e)?;
            let list = cfg
                .taus(e)
                .par_iter()
                .map(|&tau| {
                    let grid = TimeGrid::uniform(cfg.t_end, tau)?;
                    let run = run_incremental_1d(&pb, &grid, &opts)?;
                    let sup_err = sup_error_vs_ode_1d(&pb, &run, cfg.tolerances.ode.min(1e-9), cfg.time.samples)?;
                    let states: Vec<_> = run.states().collect();
                    let (mut ef, mut df) = (0, 0);
                    for (k, w) in states.windows(2).enumerate() {
                        ef += usize::from(!verify_euler_1d(&pb, w[0], w[1], tol).passed);
                        df += usize::from(!verify_dual_optimality_1d(&pb, w[0], w[1], 8, 0.05, cfg.seed.wrapping_add(k as u64), tol).passed);
                    }
                    let en = discrete_energy_estimate_1d(&pb, &run, tol);
                    let zmax = |z: &[f64]| z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let rows = run
                        .states()
                        .enumerate()
                        .map(|(k, s)| {
                            let kkt = if k == 0 { 0.0 } else { run.steps[k - 1].kkt_residual };
                            (s.t, pb.sigma(s.e), zmax(&s.z), kkt)
                        })
                        .collect();
                    let mut table = CsvTable::new(&STEP_HEADER);
                    energy_columns(&mut table, rows, &en);
                    Ok(IncrementalSummary {
                        tau: grid.tau_max(),
                        sup_err,
                        euler_failures: ef,
                        dual_failures: df,
                        energy_holds: en.holds && en.dual.holds,
                        max_kkt: run.max_kkt(),
                        series: run.states().map(|s| (s.t, zmax(&s.z))).collect(),
                        table,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((e, list))
        })
        .collect::<Result<_>>()?;
    let mut out = Outputs::new();
    record_incremental(&mut out, cfg, dir, &sums)?;
    Ok(out)
}

/// Parameter varied by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Eps,
    Tau,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eps" => Ok(SweepParam::Eps),
            "tau" => Ok(SweepParam::Tau),
            _ => Err(Error::config("param", format!("expected `eps` or `tau`, got `{s}`"))),
        }
    }
}

impl SweepParam {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParam::Eps => "eps",
            SweepParam::Tau => "tau",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// Headline error of the run (see [`RunArtifact::diagnostics`]).
    pub error: Option<f64>,
    /// `None` on success, the error message otherwise.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub param: SweepParam,
    pub rows: Vec<SweepRow>,
    pub artifacts: Vec<RunArtifact>,
    pub table: PathBuf,
}

impl SweepReport {
    /// Whether the error decreases along the sweep; `None` with fewer than
    /// two successful runs.
    pub fn decreasing(&self) -> Option<bool> {
        let errs: Vec<f64> = self.rows.iter().filter_map(|r| r.error).collect();
        (errs.len() >= 2).then(|| errs.windows(2).all(|w| w[1] < w[0]))
    }
}

/// Runs `cfg` once per value of `param` on up to `workers` threads and
/// writes `<name>_sweep_<param>.csv`. Failing runs are recorded and the
/// sweep continues.
pub fn sweep(cfg: &ScenarioConfig, param: SweepParam, values: &[f64], workers: usize) -> Result<SweepReport> {
    cfg.validate()?;
    if values.is_empty() {
        return Err(Error::config("values", "need at least one value"));
    }
    if param == SweepParam::Tau && cfg.kind != ScenarioKind::Incremental {
        return Err(Error::config("param", "tau sweeps need an incremental scenario"));
    }
    let base = output_dir(cfg);
    let subs: Vec<Result<ScenarioConfig>> = values
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let mut c = cfg.clone();
            c.name = format!("{}-{}{k}", cfg.name, param.as_str());
            c.output.dir = base.join("sweep").to_string_lossy().into_owned();
            match param {
                SweepParam::Eps => c.eps = vec![v],
                SweepParam::Tau => {
                    c.eps = vec![cfg.eps[cfg.eps.len() - 1]];
                    c.time.tau = Some(v);
                }
            }
            c.validate()?;
            Ok(c)
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::config("workers", e.to_string()))?;
    let results: Vec<Result<RunArtifact>> = pool.install(|| {
        subs.into_par_iter().map(|c| c.and_then(|c| run_scenario(&c))).collect()
    });
    let mut rows = vec![];
    let mut artifacts = vec![];
    let mut text = format!("{},error,status\n", param.as_str());
    for (&v, r) in values.iter().zip(results) {
        match r {
            Ok(a) => {
                let e = a.diagnostics.get("error").copied();
                let _ = writeln!(text, "{v:.16e},{:.16e},ok", e.unwrap_or(f64::NAN));
                rows.push(SweepRow { value: v, error: e, failure: None });
                artifacts.push(a);
            }
            Err(e) => {
                let msg = e.to_string().replace([',', '\n'], ";");
                let _ = writeln!(text, "{v:.16e},nan,{msg}");
                rows.push(SweepRow { value: v, error: None, failure: Some(e.to_string()) });
            }
        }
    }
    let table = base.join(format!("{}_sweep_{}.csv", cfg.name, param.as_str()));
    write_atomic(&table, text.as_bytes())?;
    Ok(SweepReport { param, rows, artifacts, table })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_full_precision() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.push(vec![0.1, 1.0 / 3.0]);
        let s = t.render();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("a,b"));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(row, vec![0.1, 1.0 / 3.0]);
    }

    #[test]
    fn manifest_round_trip() {
        for (name, _) in builtin_names() {
            let m = Manifest::new(&builtin(name).unwrap());
            assert_eq!(Manifest::parse(&m.to_toml_string()).unwrap(), m);
        }
    }

    #[test]
    fn fig_a_curve_has_no_jump() {
        let q = scenario_quasistatic(&builtin("fig-a").unwrap()).unwrap();
        let c = stress_curve(&q);
        assert!(c.jumps.is_empty());
        assert_eq!(c.segments.len(), 1);
    }

    #[test]
    fn fig_c_curve_jumps_down() {
        let q = scenario_quasistatic(&builtin("fig-c").unwrap()).unwrap();
        assert_eq!(q.case, Case::C);
        let c = stress_curve(&q);
        assert_eq!(c.jumps.len(), 1);
        let j = c.jumps[0];
        assert!(j.to < j.from);
        assert_eq!(c.segments[1][0], (j.x, j.to));
    }

    #[test]
    fn sweep_param_parsing() {
        assert_eq!("eps".parse::<SweepParam>().unwrap(), SweepParam::Eps);
        assert!("mu".parse::<SweepParam>().is_err());
    }
}
