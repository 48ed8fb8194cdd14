use super::optimal::{optimal_h_detailed, robin_value_check};
use super::threshold::threshold_constant;
use super::InsulationDistribution;
use crate::error::{Error, Result};
use crate::fem::{
    assemble_limit_energy, h1_seminorm_sq, heat_content, l2_norm, limit_energy, solve, ProblemParams, ScalarField,
    SourceField, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE,
};
use crate::mesh::TriangleMesh;

#[derive(Debug, Clone)]
pub struct AlternatingOptions {
    /// Stop when `|F_n − F_{n+1}| ≤ tol_energy (1 + |F_{n+1}|)`.
    pub tol_energy: f64,
    pub max_outer: usize,
    pub solver_tol: f64,
    pub max_iter: usize,
    /// Starting insulation; uniform `m / Per` when absent.
    pub initial_h: Option<InsulationDistribution>,
}

impl Default for AlternatingOptions {
    fn default() -> Self {
        AlternatingOptions {
            tol_energy: 1e-10,
            max_outer: 200,
            solver_tol: DEFAULT_TOLERANCE,
            max_iter: DEFAULT_MAX_ITER,
            initial_h: None,
        }
    }
}

/// Energies around one outer iteration:
/// `F(u_n, h_n) ≥ F(u_n, h_{n+1}) ≥ F(u_{n+1}, h_{n+1})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfStepEnergies {
    pub start: f64,
    pub after_h: f64,
    pub after_u: f64,
}

impl HalfStepEnergies {
    /// Largest increase over the two half-steps (non-positive when both
    /// steps descend).
    pub fn worst_increase(&self) -> f64 {
        (self.after_h - self.start).max(self.after_u - self.after_h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    EnergyTolerance,
    /// The h-update reproduced the previous distribution exactly.
    Stationary,
}

#[derive(Debug, Clone)]
pub struct AlternatingReport {
    /// `F(u_n, h_n)` for n = 0, 1, ...
    pub energy_trace: Vec<f64>,
    pub half_steps: Vec<HalfStepEnergies>,
    pub u: ScalarField,
    pub h: InsulationDistribution,
    /// Threshold constant of the final trace.
    pub c: f64,
    pub termination: Termination,
    pub iterations: usize,
    /// Lumped L¹ and L² norms of `h_{n+1} − h_n`.
    pub h_changes: Vec<(f64, f64)>,
    /// `‖u_n‖_{H¹}` for n = 0, 1, ...
    pub h1_norms: Vec<f64>,
    pub renormalizations: Vec<f64>,
    pub connected_components: usize,
    /// Deviation of the final couple from the optimality structure.
    pub robin_deviation: f64,
}

impl AlternatingReport {
    pub fn final_energy(&self) -> f64 {
        *self.energy_trace.last().expect("energy trace is never empty")
    }

    pub fn heat_content(&self, mesh: &TriangleMesh) -> Result<f64> {
        heat_content(mesh, &self.u)
    }

    /// CSV with header `iteration,energy,after_h_step,h_change_l1,h_change_l2`.
    pub fn energy_csv(&self) -> String {
        let mut s = String::from("iteration,energy,after_h_step,h_change_l1,h_change_l2\n");
        for (n, e) in self.energy_trace.iter().enumerate() {
            let (ah, l1, l2) = match n.checked_sub(1) {
                Some(k) => (self.half_steps[k].after_h, self.h_changes[k].0, self.h_changes[k].1),
                None => (f64::NAN, f64::NAN, f64::NAN),
            };
            s.push_str(&format!("{n},{e:?},{ah:?},{l1:?},{l2:?}\n"));
        }
        s
    }
}

fn solve_u(
    mesh: &TriangleMesh,
    h: &InsulationDistribution,
    params: &ProblemParams,
    f: &SourceField,
    opts: &AlternatingOptions,
) -> Result<ScalarField> {
    let sys = assemble_limit_energy(mesh, h, params, f)?;
    solve(&sys, opts.solver_tol, opts.max_iter)
}

fn h1_norm(mesh: &TriangleMesh, u: &ScalarField) -> Result<f64> {
    Ok((l2_norm(mesh, u)?.powi(2) + h1_seminorm_sq(mesh, u)?).sqrt())
}

/// Minimizes `F(v, h)` jointly over `v` and `h` with `∫ h = m` by exact
/// minimization in each variable in turn.
pub fn alternating_minimize(
    mesh: &TriangleMesh,
    params: &ProblemParams,
    f: &SourceField,
    opts: &AlternatingOptions,
) -> Result<AlternatingReport> {
    if f.is_zero() {
        return Err(Error::InvalidArgument("source must not vanish identically".into()));
    }
    if !(opts.tol_energy > 0.0) {
        return Err(Error::InvalidArgument(format!("tol_energy must be positive, got {}", opts.tol_energy)));
    }
    let connected_components = mesh.connected_components();
    if connected_components > 1 {
        log::warn!("domain has {connected_components} components; the minimizing couple need not be unique");
    }
    let boundary = mesh.boundary_map();
    let mut h = match &opts.initial_h {
        Some(h0) => {
            if h0.boundary().node_ids() != boundary.node_ids() {
                return Err(Error::InvalidArgument("initial insulation is defined on a different boundary".into()));
            }
            h0.check_nonnegative()?;
            h0.clone()
        }
        None => InsulationDistribution::uniform_mass(boundary.clone(), params.mass)?,
    };
    let mut u = solve_u(mesh, &h, params, f, opts)?;
    let mut energy = limit_energy(mesh, &u, &h, params, f)?;
    let mut energy_trace = vec![energy];
    let mut half_steps = Vec::new();
    let mut h_changes = Vec::new();
    let mut h1_norms = vec![h1_norm(mesh, &u)?];
    let mut renormalizations = Vec::new();

    for n in 0..opts.max_outer {
        let opt = optimal_h_detailed(&boundary.restrict(&u.values), &boundary, params)?;
        let after_h = limit_energy(mesh, &u, &opt.h, params, f)?;
        h_changes.push(opt.h.distances(&h));
        renormalizations.push(opt.renormalization);
        let stationary = opt.h.values() == h.values();
        h = opt.h;
        u = solve_u(mesh, &h, params, f, opts)?;
        let next = limit_energy(mesh, &u, &h, params, f)?;
        half_steps.push(HalfStepEnergies { start: energy, after_h, after_u: next });
        energy_trace.push(next);
        h1_norms.push(h1_norm(mesh, &u)?);
        log::debug!("alternating step {n}: F = {next:.15e}");
        let done = if stationary {
            Some(Termination::Stationary)
        } else if (energy - next).abs() <= opts.tol_energy * (1.0 + next.abs()) {
            Some(Termination::EnergyTolerance)
        } else {
            None
        };
        energy = next;
        if let Some(termination) = done {
            let trace = boundary.restrict(&u.values);
            let c = threshold_constant(&trace, &boundary, params).c;
            let robin_deviation = robin_value_check(&h, &trace, c, params).deviation();
            return Ok(AlternatingReport {
                energy_trace,
                half_steps,
                u,
                h,
                c,
                termination,
                iterations: n + 1,
                h_changes,
                h1_norms,
                renormalizations,
                connected_components,
                robin_deviation,
            });
        }
    }
    Err(Error::AlternatingNotConverged { iterations: opts.max_outer, energy_trace })
}
