use super::corollary_bound;
use crate::error::{Error, Result};
use crate::fem::{
    assemble_limit_energy, assemble_robin_system, heat_content, l2_norm, solve, ProblemParams, ScalarField,
    SourceField, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE,
};
use crate::insulation::InsulationDistribution;
use crate::mesh::{Region, TriangleMesh};

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletLimitReport {
    pub betas: Vec<f64>,
    /// `‖u_β − v‖_{L²}` for each β.
    pub l2_gaps: Vec<f64>,
    /// `log(gap_k / gap_{k+1}) / log(β_{k+1} / β_k)` for consecutive β.
    pub orders: Vec<f64>,
    /// `∫ v` for the limit problem `h ∂v/∂ν + v = 0`.
    pub limit_heat: f64,
    /// Right-hand side of the `β → ∞` heat-content bound with `m = ∫h`.
    pub corollary_bound: f64,
    pub limit_solution: ScalarField,
}

impl DirichletLimitReport {
    pub fn is_decreasing(&self) -> bool {
        self.l2_gaps.windows(2).all(|w| w[1] < w[0])
    }

    pub fn bound_ratio(&self) -> f64 {
        self.limit_heat / self.corollary_bound
    }
}

/// Solves the limit problem for each β of an increasing schedule and the
/// `β → ∞` problem `−Δv = f`, `h ∂v/∂ν + v = 0` once, and measures the gap.
pub fn dirichlet_limit_check(
    mesh: &TriangleMesh,
    h: &InsulationDistribution,
    f: &SourceField,
    betas: &[f64],
) -> Result<DirichletLimitReport> {
    if mesh.has_region(Region::Layer) {
        return Err(Error::InvalidArgument("expected a body-only mesh".into()));
    }
    if betas.is_empty() || betas.iter().any(|b| !(*b > 0.0) || !b.is_finite()) {
        return Err(Error::InvalidArgument("beta schedule must be non-empty and positive".into()));
    }
    if betas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("beta schedule must be increasing".into()));
    }
    let boundary = h.boundary();
    if boundary.node_ids() != mesh.boundary_map().node_ids() {
        return Err(Error::InvalidArgument("insulation is defined on a different boundary".into()));
    }
    for (k, &hv) in h.values().iter().enumerate() {
        if !(hv > 0.0) {
            return Err(Error::NonPositiveInsulation { node: boundary.node_ids()[k], value: hv });
        }
    }
    let weights: Vec<f64> = h.values().iter().map(|hv| 1.0 / hv).collect();
    let sys = assemble_robin_system(mesh, 1.0, boundary, &weights, f)?;
    let v = solve(&sys, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER)?;

    let mut l2_gaps = Vec::with_capacity(betas.len());
    for &beta in betas {
        let params = ProblemParams::new(beta, h.mass())?;
        let u = solve(&assemble_limit_energy(mesh, h, &params, f)?, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER)?;
        let diff = ScalarField::new(u.values.iter().zip(&v.values).map(|(a, b)| a - b).collect());
        l2_gaps.push(l2_norm(mesh, &diff)?);
    }
    let orders =
        betas.windows(2).zip(l2_gaps.windows(2)).map(|(b, g)| (g[0] / g[1]).ln() / (b[1] / b[0]).ln()).collect();
    let limit_heat = heat_content(mesh, &v)?;
    let corollary_bound = corollary_bound(mesh.area(), h.mass(), 2)?;
    Ok(DirichletLimitReport { betas: betas.to_vec(), l2_gaps, orders, limit_heat, corollary_bound, limit_solution: v })
}
