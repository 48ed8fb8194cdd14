//! Numerical study of the thin-layer limit: minimum energies of the layer
//! problem against the limit problem, and the energy of the standard
//! recovery sequence.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fem::{
    assemble_layer_energy, assemble_limit_energy, layer_energy, limit_energy, solve, ProblemParams, ScalarField,
    SourceField, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE,
};
use crate::insulation::InsulationDistribution;
use crate::mesh::{extrude_layer, LayerMesh, TriangleMesh};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaRow {
    pub eps: f64,
    pub min_layer: f64,
    pub min_limit: f64,
    /// `|min F_ε − min F|`
    pub gap: f64,
    pub layers: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaSweep {
    pub rows: Vec<GammaRow>,
}

impl GammaSweep {
    pub fn gaps(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.gap).collect()
    }

    pub fn is_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].gap < w[0].gap)
    }

    /// Least-squares slope of `log gap` against `log ε`.
    pub fn fitted_order(&self) -> f64 {
        fit_order(&self.rows.iter().map(|r| (r.eps, r.gap)).collect::<Vec<_>>())
    }

    /// CSV with header `eps,min_F_eps,min_F,gap`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("eps,min_F_eps,min_F,gap\n");
        for r in &self.rows {
            let _ = writeln!(s, "{:?},{:?},{:?},{:?}", r.eps, r.min_layer, r.min_limit, r.gap);
        }
        s
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_order(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn check_schedule(eps: &[f64]) -> Result<()> {
    if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::InvalidArgument("eps schedule must be non-empty and positive".into()));
    }
    Ok(())
}

/// Minimum of the limit functional for a fixed `h`, with its minimizer.
pub fn limit_minimum(
    mesh: &TriangleMesh,
    h: &InsulationDistribution,
    params: &ProblemParams,
    f: &SourceField,
) -> Result<(f64, ScalarField)> {
    let u = solve(&assemble_limit_energy(mesh, h, params, f)?, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER)?;
    Ok((limit_energy(mesh, &u, h, params, f)?, u))
}

/// Minimum of the layer functional for a fixed `h` and `ε`.
pub fn layer_minimum(
    mesh: &TriangleMesh,
    h: &InsulationDistribution,
    params: &ProblemParams,
    f: &SourceField,
    eps: f64,
) -> Result<(f64, usize)> {
    let lm = extrude_layer(mesh, h, eps)?;
    let u = solve(&assemble_layer_energy(&lm.mesh, eps, params, f)?, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER)?;
    Ok((layer_energy(&lm.mesh, eps, &u, params, f)?, lm.layers))
}

pub fn gamma_sweep(
    mesh: &TriangleMesh,
    h: &InsulationDistribution,
    params: &ProblemParams,
    f: &SourceField,
    eps_schedule: &[f64],
) -> Result<GammaSweep> {
    check_schedule(eps_schedule)?;
    let (min_limit, _) = limit_minimum(mesh, h, params, f)?;
    let mut rows = Vec::with_capacity(eps_schedule.len());
    for &eps in eps_schedule {
        let (min_layer, layers) = layer_minimum(mesh, h, params, f, eps)?;
        rows.push(GammaRow { eps, min_layer, min_limit, gap: (min_layer - min_limit).abs(), layers });
    }
    Ok(GammaSweep { rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryRow {
    pub eps: f64,
    /// `F(v, h)`
    pub limit: f64,
    /// `F_ε(v φ_ε)`
    pub layer: f64,
}

impl RecoveryRow {
    /// `δ(ε) = F_ε(v φ_ε) − F(v)`
    pub fn delta(&self) -> f64 {
        self.layer - self.limit
    }
}

/// Extends `v` into the layer constantly along the offset directions and
/// multiplies it by `φ_ε(t) = 1 − βt/(ε(1+βh))`, `t` the offset distance,
/// so that `v φ_ε = v/(1+βh)` on the outer boundary.
pub fn recovery_field(
    mesh: &TriangleMesh,
    h: &InsulationDistribution,
    params: &ProblemParams,
    v: &ScalarField,
    eps: f64,
) -> Result<(LayerMesh, ScalarField)> {
    v.check_mesh(mesh)?;
    let lm = extrude_layer(mesh, h, eps)?;
    let mut w = vec![0.0; lm.mesh.vertex_count()];
    w[..mesh.vertex_count()].copy_from_slice(&v.values);
    let d = lm.offset_distance();
    for col in &lm.columns {
        if col.thickness == 0.0 {
            continue;
        }
        let hv = col.thickness / eps;
        let base = v.values[col.body_node];
        for &node in &col.nodes[1..] {
            w[node] = base * (1.0 - params.beta * d[node] / (eps * (1.0 + params.beta * hv)));
        }
    }
    Ok((lm, ScalarField::new(w)))
}

pub fn recovery_diagnostic(
    mesh: &TriangleMesh,
    h: &InsulationDistribution,
    params: &ProblemParams,
    f: &SourceField,
    v: &ScalarField,
    eps_schedule: &[f64],
) -> Result<Vec<RecoveryRow>> {
    check_schedule(eps_schedule)?;
    let limit = limit_energy(mesh, v, h, params, f)?;
    eps_schedule
        .iter()
        .map(|&eps| {
            let (lm, w) = recovery_field(mesh, h, params, v, eps)?;
            Ok(RecoveryRow { eps, limit, layer: layer_energy(&lm.mesh, eps, &w, params, f)? })
        })
        .collect()
}
