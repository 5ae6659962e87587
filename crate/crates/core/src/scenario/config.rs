//! Scenario configuration: TOML schema, validation, overrides and the
//! built-in scenarios.

use serde::{Deserialize, Serialize};

use crate::domain::ElasticDomain;
use crate::error::{Error, Result};
use crate::homogeneous::{HomogeneousProblem, HomogeneousState, LoadingProgram};
use crate::shear1d::{localization_z0, oscillation_z0, Grid1D, ReducedProblem};
use crate::softening::{validate_against_domain, SofteningPotential};
use crate::tensor::{shear_embed, IsotropicElasticity, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// ε-runs of the homogeneous problem, optionally with the quasistatic
    /// limit.
    Homogeneous,
    /// ε-runs of the reduced shear problem.
    Shear1d,
    /// Implicit-Euler runs (homogeneous or shear, from the initial data).
    Incremental,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    pub mu: f64,
    #[serde(default = "one")]
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainSpec {
    Ball { radius: f64 },
    Diamond { c: f64 },
    Hexagon,
    Polygon { vertices: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    Sqrt,
    Plateau,
}

/// Loading along the shear direction with amplitude `shear` (the scalar
/// itself when `d = 1`). For shear scenarios it is the imposed span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LoadingSpec {
    Linear { shear: f64 },
    Triangular { shear: f64, turnaround: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialSpec {
    /// Homogeneous internal variable.
    Theta0 { theta0: f64 },
    /// `z0(y) = 1 − 2|y|`.
    Localization,
    /// `z0(y) = sign(y)(1 − 2|y|)`.
    Oscillation,
    /// Cell values of `z0` on the grid.
    Table { z0: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n: 400 }
    }
}

/// Output sampling and the incremental step rule `τ = ε/(k M)` for each
/// divisor `k` (or a fixed `tau`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_divisors")]
    pub tau_divisors: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

impl Default for TimeSpec {
    fn default() -> Self {
        TimeSpec { samples: default_samples(), tau_divisors: default_divisors(), tau: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: String,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: "out".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Local error tolerance of the adaptive integrator.
    pub ode: f64,
    /// Residual tolerance of the incremental steps.
    pub kkt: f64,
    /// Tolerance of the per-step verification.
    pub verify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { ode: 1e-9, kkt: 1e-9, verify: 1e-8 }
    }
}

/// A complete scenario description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub kind: ScenarioKind,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    pub t_end: f64,
    /// Regularization parameters, strictly decreasing.
    pub eps: Vec<f64>,
    /// Assemble the quasistatic limit (unit ball, linear loading).
    #[serde(default)]
    pub quasistatic: bool,
    #[serde(default)]
    pub seed: u64,
    pub material: MaterialSpec,
    pub domain: DomainSpec,
    pub potential: PotentialSpec,
    pub loading: LoadingSpec,
    pub initial: InitialSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub time: TimeSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn one() -> f64 {
    1.0
}

fn default_dimension() -> usize {
    2
}

fn default_samples() -> usize {
    400
}

fn default_divisors() -> Vec<f64> {
    vec![2.0]
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be positive and finite, got {v}")))
    }
}

impl DomainSpec {
    pub fn build(&self) -> Result<ElasticDomain> {
        let r = match self {
            DomainSpec::Ball { radius } => ElasticDomain::ball(*radius),
            DomainSpec::Diamond { c } => ElasticDomain::diamond(*c),
            DomainSpec::Hexagon => Ok(ElasticDomain::hexagon()),
            DomainSpec::Polygon { vertices } => ElasticDomain::polygon(vertices.clone()),
        };
        r.map_err(|e| Error::config("domain", e.to_string()))
    }
}

impl PotentialSpec {
    pub fn build(&self) -> SofteningPotential {
        match self {
            PotentialSpec::Sqrt => SofteningPotential::Sqrt,
            PotentialSpec::Plateau => SofteningPotential::Plateau,
        }
    }
}

impl LoadingSpec {
    pub fn shear(&self) -> f64 {
        match self {
            LoadingSpec::Linear { shear } | LoadingSpec::Triangular { shear, .. } => *shear,
        }
    }

    /// Loading program in dimension `d`.
    pub fn build(&self, d: usize) -> Result<LoadingProgram> {
        let xi0 = if d == 1 { SymMatrix::scalar(self.shear()) } else { shear_embed(self.shear(), d)?.into_sym() };
        let r = match self {
            LoadingSpec::Linear { .. } => LoadingProgram::linear(xi0),
            LoadingSpec::Triangular { turnaround, .. } => LoadingProgram::triangular(xi0, *turnaround),
        };
        r.map_err(|e| Error::config("loading", e.to_string()))
    }
}

impl ScenarioConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let value: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::config("toml", e.message().to_string()))?;
        Self::from_table(value)
    }

    /// Reads a config file, applying `key=value` overrides (dotted keys)
    /// before validation.
    pub fn load(path: &std::path::Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::config("toml", e.message().to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        Self::from_table(table)
    }

    pub fn from_table(table: toml::Table) -> Result<Self> {
        let cfg: ScenarioConfig =
            toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| Error::config("toml", e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Applies `key=value` overrides to an already validated config.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self> {
        let mut table = toml::Table::try_from(self).expect("config serializes");
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        Self::from_table(table)
    }

    pub fn is_shear(&self) -> bool {
        !matches!(self.initial, InitialSpec::Theta0 { .. })
    }

    pub fn curvature_bound(&self) -> f64 {
        self.potential.build().curvature_bound()
    }

    /// Step sizes of the incremental runs at regularization `eps`.
    pub fn taus(&self, eps: f64) -> Vec<f64> {
        if let Some(t) = self.time.tau {
            return vec![t];
        }
        let m = self.curvature_bound();
        let base = if m > 0.0 { eps / m } else { eps };
        self.time.tau_divisors.iter().map(|k| base / k).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(Error::config("name", "use letters, digits, '-' or '_'"));
        }
        if !(1..=3).contains(&self.dimension) {
            return Err(Error::config("dimension", format!("expected 1, 2 or 3, got {}", self.dimension)));
        }
        positive("t_end", self.t_end)?;
        if self.eps.is_empty() {
            return Err(Error::config("eps", "need at least one value"));
        }
        for &e in &self.eps {
            positive("eps", e)?;
        }
        if self.eps.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::config("eps", "must be strictly decreasing"));
        }
        positive("material.mu", self.material.mu)?;
        positive("material.kappa", self.material.kappa)?;
        let domain = self.domain.build()?;
        let v = self.potential.build();
        validate_against_domain(&v, &domain).map_err(|e| Error::config("potential", e.to_string()))?;
        if self.time.samples < 2 {
            return Err(Error::config("time.samples", "need at least 2"));
        }
        if let LoadingSpec::Triangular { turnaround, .. } = self.loading {
            positive("loading.turnaround", turnaround)?;
        }
        if self.loading.shear() == 0.0 || !self.loading.shear().is_finite() {
            return Err(Error::config("loading.shear", "must be nonzero and finite"));
        }
        match &self.initial {
            InitialSpec::Theta0 { theta0 } => {
                if self.kind == ScenarioKind::Shear1d {
                    return Err(Error::config("initial", "shear scenarios need a z0 profile"));
                }
                if !theta0.is_finite() {
                    return Err(Error::config("initial.theta0", "must be finite"));
                }
                if !domain.is_dimension_free() && self.dimension != 1 {
                    return Err(Error::config("domain", "planar domains need dimension = 1"));
                }
            }
            init => {
                if self.kind == ScenarioKind::Homogeneous {
                    return Err(Error::config("initial", "homogeneous scenarios need theta0"));
                }
                Grid1D::new(self.grid.n).map_err(|e| Error::config("grid.n", e.to_string()))?;
                if let InitialSpec::Table { z0 } = init {
                    if z0.len() != self.grid.n {
                        return Err(Error::config("initial.z0", format!("expected {} values, got {}", self.grid.n, z0.len())));
                    }
                }
            }
        }
        if self.quasistatic {
            if self.kind != ScenarioKind::Homogeneous {
                return Err(Error::config("quasistatic", "only for homogeneous scenarios"));
            }
            if self.domain != (DomainSpec::Ball { radius: 1.0 }) || !matches!(self.loading, LoadingSpec::Linear { .. }) {
                return Err(Error::config("quasistatic", "needs the unit ball and linear loading"));
            }
            match self.initial {
                InitialSpec::Theta0 { theta0 } if theta0 > 0.0 => {}
                _ => return Err(Error::config("initial.theta0", "quasistatic limit needs theta0 > 0")),
            }
        }
        let m = self.curvature_bound();
        for &e in &self.eps {
            for tau in self.taus(e) {
                positive("time.tau", tau)?;
                if m > 0.0 && tau * m >= e {
                    return Err(Error::config("time", format!("τ = {tau:e} violates τ < ε/M = {:e}", e / m)));
                }
            }
        }
        Ok(())
    }

    fn elasticity(&self) -> Result<IsotropicElasticity> {
        IsotropicElasticity::new(self.material.mu, self.material.kappa).map_err(|e| Error::config("material", e.to_string()))
    }

    pub fn homogeneous_problem(&self, eps: f64) -> Result<HomogeneousProblem> {
        HomogeneousProblem::new(self.elasticity()?, self.domain.build()?, self.potential.build(), self.loading.build(self.dimension)?, eps)
    }

    pub fn homogeneous_initial(&self, pb: &HomogeneousProblem) -> Result<HomogeneousState> {
        match self.initial {
            InitialSpec::Theta0 { theta0 } => Ok(HomogeneousState::initial(&pb.loading, 0.0, theta0)),
            _ => Err(Error::config("initial", "expected theta0")),
        }
    }

    pub fn reduced_problem(&self, eps: f64) -> Result<ReducedProblem> {
        let g = Grid1D::new(self.grid.n)?;
        let z0 = match &self.initial {
            InitialSpec::Localization => localization_z0(&g),
            InitialSpec::Oscillation => oscillation_z0(&g),
            InitialSpec::Table { z0 } => z0.clone(),
            InitialSpec::Theta0 { .. } => return Err(Error::config("initial", "expected a z0 profile")),
        };
        ReducedProblem::new(self.material.mu, self.domain.build()?, self.potential.build(), self.loading.build(1)?, eps, g, z0)
    }
}

/// Sets `dotted.key = value` in `table`; the value is parsed as a TOML
/// value, falling back to a plain string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment.split_once('=').ok_or_else(|| Error::config(assignment, "expected key=value"))?;
    let key = key.trim();
    let value = format!("v = {}", raw.trim())
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::config(key, "empty key segment"));
    }
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| Error::config(key, format!("`{p}` is not a table")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

fn homogeneous_base(name: &str, mu: f64, shear: f64, theta0: f64, t_end: f64) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        kind: ScenarioKind::Homogeneous,
        dimension: 2,
        t_end,
        eps: vec![1e-2, 2.5e-3],
        quasistatic: true,
        seed: 0,
        material: MaterialSpec { mu, kappa: 1.0 },
        domain: DomainSpec::Ball { radius: 1.0 },
        potential: PotentialSpec::Sqrt,
        loading: LoadingSpec::Linear { shear },
        initial: InitialSpec::Theta0 { theta0 },
        grid: GridSpec::default(),
        time: TimeSpec::default(),
        output: OutputSpec::default(),
        tolerances: Tolerances::default(),
    }
}

fn shear_base(name: &str, initial: InitialSpec, eps: Vec<f64>) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        kind: ScenarioKind::Shear1d,
        dimension: 1,
        t_end: 3.0,
        eps,
        quasistatic: false,
        seed: 0,
        material: MaterialSpec { mu: 0.5, kappa: 1.0 },
        domain: DomainSpec::Diamond { c: 2.0 },
        potential: PotentialSpec::Plateau,
        loading: LoadingSpec::Linear { shear: 1.0 },
        initial,
        grid: GridSpec { n: 400 },
        time: TimeSpec { samples: 300, ..TimeSpec::default() },
        output: OutputSpec::default(),
        tolerances: Tolerances { ode: 1e-8, ..Tolerances::default() },
    }
}

/// Names of the built-in scenarios with a one-line description.
pub fn builtin_names() -> Vec<(&'static str, &'static str)> {
    vec![
        ("fig-a", "μ = 1, θ0 = 0.5: smooth softening after the elastic phase"),
        ("fig-b", "μ = 0.005, θ0 = 1.2 in [α, β): jump at the critical time"),
        ("fig-c", "μ = 0.005, θ0 = 0.1 < α: slow softening to α, then a jump"),
        ("hexagon-path", "d = 1, hexagon, triangular loading: stress path reaching ζ = 1"),
        ("shear-band", "reduced shear problem, peaked z0: plastic strain concentrates at y = 0"),
        ("oscillation", "reduced shear problem, odd z0: two-atom Young measure limit"),
        ("incremental", "implicit-Euler runs of the fig-a problem at three step sizes"),
    ]
}

/// Built-in scenario by name.
pub fn builtin(name: &str) -> Option<ScenarioConfig> {
    let cfg = match name {
        "fig-a" => homogeneous_base("fig-a", 1.0, 1.0, 0.5, 5.0),
        "fig-b" => homogeneous_base("fig-b", 0.005, 20.0, 1.2, 10.0),
        "fig-c" => homogeneous_base("fig-c", 0.005, 20.0, 0.1, 10.0),
        "hexagon-path" => ScenarioConfig {
            dimension: 1,
            eps: vec![1e-3],
            quasistatic: false,
            material: MaterialSpec { mu: 0.5, kappa: 1.0 },
            domain: DomainSpec::Hexagon,
            potential: PotentialSpec::Plateau,
            loading: LoadingSpec::Triangular { shear: -1.0, turnaround: 4.0 },
            initial: InitialSpec::Theta0 { theta0: 0.0 },
            ..homogeneous_base("hexagon-path", 0.5, -1.0, 0.0, 8.0)
        },
        "shear-band" => shear_base("shear-band", InitialSpec::Localization, vec![4e-3, 2e-3, 1e-3]),
        "oscillation" => shear_base("oscillation", InitialSpec::Oscillation, vec![4e-3, 2e-3, 1e-3, 5e-4]),
        "incremental" => ScenarioConfig {
            kind: ScenarioKind::Incremental,
            eps: vec![1e-3],
            quasistatic: false,
            time: TimeSpec { samples: 400, tau_divisors: vec![2.0, 4.0, 8.0], tau: None },
            ..homogeneous_base("incremental", 1.0, 1.0, 0.5, 5.0)
        },
        _ => return None,
    };
    Some(cfg)
}
