use std::fmt::Write as _;

use log::{info, warn};
use robin_insulate_core::bounds::{dirichlet_limit_check, isoperimetric_bound, level_set_diagnostic};
use robin_insulate_core::fem::{
    assemble_layer_energy, assemble_limit_energy, heat_content, layer_energy, limit_energy, solve_with_stats,
    ProblemParams, SourceField,
};
use robin_insulate_core::gamma::{gamma_sweep, limit_minimum, recovery_diagnostic};
use robin_insulate_core::insulation::{
    alternating_minimize, AlternatingOptions, AlternatingReport, InsulationDistribution,
};
use robin_insulate_core::mesh::{extrude_layer, io, make_disk_mesh, make_polygon_mesh, Region, TriangleMesh};
use robin_insulate_core::radial::{layer_ball_solution, limit_ball_solution, sphere_measure, RadialSolution};
use serde_json::{json, Map, Value};

use crate::config::{ExperimentConfig, ExperimentKind};

pub const DEFAULT_EPS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];
pub const DEFAULT_BETAS: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];
const PROFILE_POINTS: usize = 201;

#[derive(Debug)]
pub enum RunError {
    /// Bad input: the config, the geometry it describes, or a referenced file.
    Config(String),
    Numerical(robin_insulate_core::Error),
}

impl From<robin_insulate_core::Error> for RunError {
    fn from(e: robin_insulate_core::Error) -> Self {
        RunError::Numerical(e)
    }
}

/// Scalars for `summary.json` plus named CSV (or mesh) artifacts.
#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Map<String, Value>,
    pub files: Vec<(String, String)>,
    pub mesh: Option<Value>,
}

impl Outcome {
    fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.results.insert(key.to_string(), v.into());
    }

    fn file(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }
}

fn build_mesh(cfg: &ExperimentConfig) -> Result<TriangleMesh, RunError> {
    let g = &cfg.geometry;
    let bad = |e: robin_insulate_core::Error| RunError::Config(format!("geometry: {e}"));
    if let Some(r) = g.disk_radius {
        make_disk_mesh(r, cfg.refinement_level).map_err(bad)
    } else if let Some(poly) = &g.polygon {
        let len = g.edge_length.unwrap_or_else(|| {
            let mut d: f64 = 0.0;
            for a in poly {
                for b in poly {
                    d = d.max((a[0] - b[0]).hypot(a[1] - b[1]));
                }
            }
            d / 2f64.powi(cfg.refinement_level as i32 + 2)
        });
        make_polygon_mesh(poly, len).map_err(bad)
    } else {
        let path = g.mesh_file.as_ref().expect("validated geometry");
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
        let m = io::read_mesh(&text).map_err(bad)?;
        if m.has_region(Region::Layer) {
            return Err(RunError::Config("geometry: mesh file must contain body triangles only".into()));
        }
        Ok(m)
    }
}

fn build_source(cfg: &ExperimentConfig, mesh: &TriangleMesh) -> Result<SourceField, RunError> {
    let bad = |m: String| RunError::Config(format!("field `params.source_file`: {m}"));
    match &cfg.params.source_file {
        None => Ok(SourceField::Constant(cfg.params.source.unwrap_or(1.0))),
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
            let vals = text
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| bad(format!("invalid number `{t}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            if vals.len() != mesh.vertex_count() {
                return Err(bad(format!("expected {} values, got {}", mesh.vertex_count(), vals.len())));
            }
            SourceField::nodal(vals).map_err(|e| bad(e.to_string()))
        }
    }
}

fn constant_source(f: &SourceField) -> Option<f64> {
    match f {
        SourceField::Constant(c) => Some(*c),
        SourceField::Nodal(_) => None,
    }
}

fn mesh_summary(m: &TriangleMesh) -> Value {
    json!({
        "vertices": m.vertex_count(),
        "triangles": m.triangle_count(),
        "boundary_nodes": m.boundary_map().len(),
        "area": m.area(),
        "perimeter": m.perimeter(),
        "max_edge_length": m.max_edge_length(),
        "min_angle_deg": m.min_angle_deg(),
    })
}

fn fixed_h(cfg: &ExperimentConfig, mesh: &TriangleMesh) -> InsulationDistribution {
    let b = mesh.boundary_map();
    let value = cfg.experiment.h.unwrap_or(cfg.params.mass / b.perimeter());
    InsulationDistribution::uniform_value(b, value)
}

fn params(cfg: &ExperimentConfig) -> Result<ProblemParams, RunError> {
    ProblemParams::new(cfg.params.beta, cfg.params.mass).map_err(|e| RunError::Config(format!("params: {e}")))
}

fn profile_csv(sol: &RadialSolution) -> String {
    let mut s = String::from("r,u\n");
    let outer = sol.outer_radius();
    for k in 0..PROFILE_POINTS {
        let r = outer * k as f64 / (PROFILE_POINTS - 1) as f64;
        let _ = writeln!(s, "{r:?},{:?}", sol.value(r));
    }
    s
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let p = params(cfg)?;
    if cfg.experiment.kind == ExperimentKind::Oracle {
        return oracle(cfg, &p);
    }
    let mesh = build_mesh(cfg)?;
    let f = build_source(cfg, &mesh)?;
    info!(
        "{}: mesh with {} vertices, {} triangles",
        cfg.experiment.kind.name(),
        mesh.vertex_count(),
        mesh.triangle_count()
    );
    let mut out = match cfg.experiment.kind {
        ExperimentKind::SolveLimit => solve_limit(cfg, &mesh, &p, &f)?,
        ExperimentKind::SolveLayer => solve_layer(cfg, &mesh, &p, &f)?,
        ExperimentKind::GammaSweep => gamma(cfg, &mesh, &p, &f)?,
        ExperimentKind::Optimize => optimize(cfg, &mesh, &p, &f)?.0,
        ExperimentKind::BoundCheck => bound_check(cfg, &mesh, &p, &f)?,
        ExperimentKind::DirichletLimit => dirichlet(cfg, &mesh, &f)?,
        ExperimentKind::Oracle => unreachable!(),
    };
    out.mesh = Some(mesh_summary(&mesh));
    if cfg.write_mesh {
        out.file("mesh.txt", io::write_mesh(&mesh));
    }
    Ok(out)
}

fn solve_limit(
    cfg: &ExperimentConfig,
    mesh: &TriangleMesh,
    p: &ProblemParams,
    f: &SourceField,
) -> Result<Outcome, RunError> {
    let x = &cfg.experiment;
    let h = fixed_h(cfg, mesh);
    let (u, stats) = solve_with_stats(&assemble_limit_energy(mesh, &h, p, f)?, x.solver_tol, x.max_iter)?;
    let heat = heat_content(mesh, &u)?;
    let trace = mesh.boundary_map().restrict(&u.values);
    let mut out = Outcome::default();
    out.put("h", h.values()[0]);
    out.put("energy", limit_energy(mesh, &u, &h, p, f)?);
    out.put("heat_content", heat);
    out.put("u_min", u.min());
    out.put("u_max", u.max());
    out.put("boundary_min", trace.values.iter().cloned().fold(f64::INFINITY, f64::min));
    out.put("boundary_max", trace.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    out.put("solver_iterations", stats.iterations);
    if let (Some(r), Some(fc)) = (cfg.geometry.disk_radius, constant_source(f)) {
        let o = limit_ball_solution(r, 2, p.beta, h.values()[0])?;
        out.put("oracle_boundary_value", fc * o.boundary_value);
        out.put("oracle_heat_content", fc * o.heat_content);
        out.put("heat_content_rel_error", (heat - fc * o.heat_content).abs() / (fc * o.heat_content).abs());
    }
    out.file("solution.csv", u.to_csv(mesh)?);
    Ok(out)
}

fn solve_layer(
    cfg: &ExperimentConfig,
    mesh: &TriangleMesh,
    p: &ProblemParams,
    f: &SourceField,
) -> Result<Outcome, RunError> {
    let x = &cfg.experiment;
    let eps = x.eps.as_ref().map_or(0.05, |e| e[0]);
    let h = fixed_h(cfg, mesh);
    let lm = extrude_layer(mesh, &h, eps)?;
    let (u, stats) = solve_with_stats(&assemble_layer_energy(&lm.mesh, eps, p, f)?, x.solver_tol, x.max_iter)?;
    let energy = layer_energy(&lm.mesh, eps, &u, p, f)?;
    let (min_limit, _) = limit_minimum(mesh, &h, p, f)?;
    let mut out = Outcome::default();
    out.put("eps", eps);
    out.put("h", h.values()[0]);
    out.put("layers", lm.layers);
    out.put("energy", energy);
    out.put("limit_energy", min_limit);
    out.put("gap", (energy - min_limit).abs());
    out.put("heat_content", heat_content(&lm.mesh, &u)?);
    out.put("solver_iterations", stats.iterations);
    if let (Some(r), Some(fc)) = (cfg.geometry.disk_radius, constant_source(f)) {
        let o = layer_ball_solution(r, 2, p.beta, h.values()[0], eps)?;
        out.put("oracle_boundary_value", fc * o.boundary_value);
        out.put("oracle_heat_content", fc * o.heat_content);
    }
    out.file("solution.csv", u.to_csv(&lm.mesh)?);
    Ok(out)
}

fn gamma(cfg: &ExperimentConfig, mesh: &TriangleMesh, p: &ProblemParams, f: &SourceField) -> Result<Outcome, RunError> {
    let eps = cfg.experiment.eps.clone().unwrap_or_else(|| DEFAULT_EPS.to_vec());
    let h = fixed_h(cfg, mesh);
    let sweep = gamma_sweep(mesh, &h, p, f, &eps)?;
    let (_, v) = limit_minimum(mesh, &h, p, f)?;
    let rec = recovery_diagnostic(mesh, &h, p, f, &v, &eps)?;
    let mut out = Outcome::default();
    out.put("h", h.values()[0]);
    out.put("min_limit", sweep.rows[0].min_limit);
    out.put("gaps", sweep.gaps());
    out.put("gap_decreasing", sweep.is_decreasing());
    if eps.len() >= 2 {
        out.put("fitted_order", sweep.fitted_order());
    }
    out.put("recovery_deltas", rec.iter().map(|r| r.delta()).collect::<Vec<_>>());
    if !sweep.is_decreasing() {
        warn!("energy gap is not decreasing over the eps schedule");
    }
    let mut csv = String::from("eps,F_limit,F_layer_recovery,delta\n");
    for r in &rec {
        let _ = writeln!(csv, "{:?},{:?},{:?},{:?}", r.eps, r.limit, r.layer, r.delta());
    }
    out.file("gamma.csv", sweep.to_csv());
    out.file("recovery.csv", csv);
    Ok(out)
}

fn optimize(
    cfg: &ExperimentConfig,
    mesh: &TriangleMesh,
    p: &ProblemParams,
    f: &SourceField,
) -> Result<(Outcome, AlternatingReport), RunError> {
    let x = &cfg.experiment;
    let opts = AlternatingOptions {
        tol_energy: x.energy_tol,
        max_outer: x.max_outer,
        solver_tol: x.solver_tol,
        max_iter: x.max_iter,
        initial_h: None,
    };
    let r = alternating_minimize(mesh, p, f, &opts)?;
    info!("alternating minimization: {} iterations, {:?}", r.iterations, r.termination);
    let uniform = p.mass / r.h.boundary().perimeter();
    let mut out = Outcome::default();
    out.put("energy", r.final_energy());
    out.put("heat_content", r.heat_content(mesh)?);
    out.put("c", r.c);
    out.put("iterations", r.iterations);
    out.put("termination", format!("{:?}", r.termination));
    out.put("h_min", r.h.min());
    out.put("h_max", r.h.max());
    out.put("h_mass", r.h.mass());
    out.put("h_uniformity_sup_deviation", r.h.values().iter().map(|h| (h - uniform).abs()).fold(0.0, f64::max));
    out.put("robin_deviation", r.robin_deviation);
    out.put("connected_components", r.connected_components);
    out.file("energy.csv", r.energy_csv());
    out.file("h.csv", r.h.to_csv());
    out.file("solution.csv", r.u.to_csv(mesh)?);
    Ok((out, r))
}

fn bound_check(
    cfg: &ExperimentConfig,
    mesh: &TriangleMesh,
    p: &ProblemParams,
    f: &SourceField,
) -> Result<Outcome, RunError> {
    if constant_source(f) != Some(1.0) {
        return Err(RunError::Config("field `params.source`: bound_check needs a unit source".into()));
    }
    let (mut out, r) = optimize(cfg, mesh, p, f)?;
    let heat = r.heat_content(mesh)?;
    let bound = isoperimetric_bound(mesh.area(), mesh.perimeter(), p)?;
    out.put("bound", bound);
    out.put("bound_ratio", heat / bound);
    out.put("bound_holds", heat <= bound);
    let ls = level_set_diagnostic(mesh, &r.u, &r.h, p, cfg.experiment.level_sets)?;
    out.put("worst_psquare_violation", ls.worst_psquare);
    out.put("worst_master_violation", ls.worst_master);
    out.put("worst_flux_defect", ls.worst_flux_defect);
    out.file("level_sets.csv", ls.profile.to_csv());
    Ok(out)
}

fn dirichlet(cfg: &ExperimentConfig, mesh: &TriangleMesh, f: &SourceField) -> Result<Outcome, RunError> {
    let betas = cfg.experiment.betas.clone().unwrap_or_else(|| DEFAULT_BETAS.to_vec());
    let h = fixed_h(cfg, mesh);
    let r = dirichlet_limit_check(mesh, &h, f, &betas)?;
    let mut out = Outcome::default();
    out.put("h", h.values()[0]);
    out.put("l2_gaps", r.l2_gaps.clone());
    out.put("orders", r.orders.clone());
    out.put("gap_decreasing", r.is_decreasing());
    out.put("limit_heat", r.limit_heat);
    out.put("corollary_bound", r.corollary_bound);
    out.put("bound_ratio", r.bound_ratio());
    let mut csv = String::from("beta,l2_gap,order\n");
    for (k, (b, g)) in r.betas.iter().zip(&r.l2_gaps).enumerate() {
        let order = if k == 0 { f64::NAN } else { r.orders[k - 1] };
        let _ = writeln!(csv, "{b:?},{g:?},{order:?}");
    }
    out.file("dirichlet.csv", csv);
    Ok(out)
}

fn oracle(cfg: &ExperimentConfig, p: &ProblemParams) -> Result<Outcome, RunError> {
    let r = cfg.geometry.disk_radius.expect("validated oracle geometry");
    let n = cfg.experiment.dim;
    let h = cfg.experiment.h.unwrap_or(p.mass / sphere_measure(n, r));
    let sol = match cfg.experiment.eps.as_ref().map(|e| e[0]) {
        Some(eps) => layer_ball_solution(r, n, p.beta, h, eps)?,
        None => limit_ball_solution(r, n, p.beta, h)?,
    };
    let mut out = Outcome::default();
    out.put("h", h);
    out.put("dim", n);
    out.put("boundary_value", sol.boundary_value);
    out.put("body_constant", sol.body_constant);
    out.put("heat_content", sol.heat_content);
    out.put("min_energy", sol.min_energy());
    out.put("outer_radius", sol.outer_radius());
    out.file("profile.csv", profile_csv(&sol));
    Ok(out)
}

/// Heat content and boundary value printed by the `oracle` subcommand.
pub fn oracle_lines(radius: f64, n: u32, beta: f64, h: f64, eps: Option<f64>) -> robin_insulate_core::Result<String> {
    let sol = match eps {
        Some(e) => layer_ball_solution(radius, n, beta, h, e)?,
        None => limit_ball_solution(radius, n, beta, h)?,
    };
    let mut s = String::new();
    let _ = writeln!(s, "boundary_value {:?}", sol.boundary_value);
    let _ = writeln!(s, "body_constant {:?}", sol.body_constant);
    let _ = writeln!(s, "heat_content {:?}", sol.heat_content);
    let _ = writeln!(s, "min_energy {:?}", sol.min_energy());
    Ok(s)
}
