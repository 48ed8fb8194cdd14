//! Experiment configuration, read from a TOML file.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    SolveLimit,
    SolveLayer,
    GammaSweep,
    Optimize,
    BoundCheck,
    Oracle,
    DirichletLimit,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SolveLimit => "solve_limit",
            ExperimentKind::SolveLayer => "solve_layer",
            ExperimentKind::GammaSweep => "gamma_sweep",
            ExperimentKind::Optimize => "optimize",
            ExperimentKind::BoundCheck => "bound_check",
            ExperimentKind::Oracle => "oracle",
            ExperimentKind::DirichletLimit => "dirichlet_limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub disk_radius: Option<f64>,
    pub polygon: Option<Vec<[f64; 2]>>,
    pub mesh_file: Option<PathBuf>,
    /// Polygon meshing only; defaults to `diameter / 2^(level + 2)`.
    pub edge_length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub beta: f64,
    pub mass: f64,
    pub source: Option<f64>,
    /// One non-negative value per mesh vertex, whitespace separated.
    pub source_file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub kind: ExperimentKind,
    /// Constant insulation thickness for the fixed-`h` experiments.
    /// Defaults to `mass / perimeter`.
    pub h: Option<f64>,
    pub eps: Option<Vec<f64>>,
    pub betas: Option<Vec<f64>>,
    #[serde(default = "default_solver_tol")]
    pub solver_tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_energy_tol")]
    pub energy_tol: f64,
    #[serde(default = "default_max_outer")]
    pub max_outer: usize,
    #[serde(default = "default_level_sets")]
    pub level_sets: usize,
    /// Ambient dimension for the `oracle` experiment.
    #[serde(default = "default_dim")]
    pub dim: u32,
}

fn default_solver_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    20_000
}
fn default_energy_tol() -> f64 {
    1e-10
}
fn default_max_outer() -> usize {
    200
}
fn default_level_sets() -> usize {
    64
}
fn default_dim() -> u32 {
    2
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub geometry: Geometry,
    #[serde(default = "default_level")]
    pub refinement_level: u32,
    pub params: Params,
    pub experiment: Experiment,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub write_mesh: bool,
}

fn default_level() -> u32 {
    3
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn field(name: &str, msg: impl fmt::Display) -> ConfigError {
    ConfigError(format!("field `{name}`: {msg}"))
}

fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(field(name, format!("must be positive, got {v}")))
    }
}

fn schedule(name: &str, v: &[f64]) -> Result<(), ConfigError> {
    if v.is_empty() {
        return Err(field(name, "must not be empty"));
    }
    for x in v {
        positive(name, *x)?;
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        // relative file references are taken from the config's directory
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(p) = &mut cfg.geometry.mesh_file {
            *p = base.join(&*p);
        }
        if let Some(p) = &mut cfg.params.source_file {
            *p = base.join(&*p);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let g = &self.geometry;
        let sources = g.disk_radius.is_some() as u8 + g.polygon.is_some() as u8 + g.mesh_file.is_some() as u8;
        if sources != 1 {
            return Err(field("geometry", "exactly one of disk_radius, polygon, mesh_file is required"));
        }
        if let Some(r) = g.disk_radius {
            positive("geometry.disk_radius", r)?;
        }
        if let Some(p) = &g.polygon {
            if p.len() < 3 {
                return Err(field("geometry.polygon", "needs at least 3 vertices"));
            }
        }
        if let Some(e) = g.edge_length {
            positive("geometry.edge_length", e)?;
        }
        positive("params.beta", self.params.beta)?;
        positive("params.mass", self.params.mass)?;
        match (self.params.source, &self.params.source_file) {
            (Some(_), Some(_)) => return Err(field("params", "source and source_file are exclusive")),
            (Some(f), None) if !(0.0..f64::INFINITY).contains(&f) => {
                return Err(field("params.source", format!("must be non-negative, got {f}")))
            }
            _ => {}
        }
        let x = &self.experiment;
        positive("experiment.solver_tol", x.solver_tol)?;
        positive("experiment.energy_tol", x.energy_tol)?;
        if x.max_iter == 0 {
            return Err(field("experiment.max_iter", "must be positive"));
        }
        if x.max_outer == 0 {
            return Err(field("experiment.max_outer", "must be positive"));
        }
        if x.level_sets == 0 {
            return Err(field("experiment.level_sets", "must be positive"));
        }
        if let Some(h) = x.h {
            if !(0.0..f64::INFINITY).contains(&h) {
                return Err(field("experiment.h", format!("must be non-negative, got {h}")));
            }
        }
        if let Some(e) = &x.eps {
            schedule("experiment.eps", e)?;
        }
        if let Some(b) = &x.betas {
            schedule("experiment.betas", b)?;
            if b.windows(2).any(|w| w[1] <= w[0]) {
                return Err(field("experiment.betas", "must be increasing"));
            }
        }
        if x.kind == ExperimentKind::Oracle {
            if g.disk_radius.is_none() {
                return Err(field("geometry.disk_radius", "the oracle experiment needs a disk"));
            }
            if x.dim < 2 {
                return Err(field("experiment.dim", "must be at least 2"));
            }
        }
        if x.kind == ExperimentKind::SolveLayer && x.eps.as_ref().is_some_and(|e| e.len() != 1) {
            return Err(field("experiment.eps", "solve_layer takes a single value"));
        }
        Ok(())
    }
}
