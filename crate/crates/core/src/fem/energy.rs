use super::assembly::basis_gradients;
use super::{ProblemParams, ScalarField, SourceField};
use crate::error::{Error, Result};
use crate::insulation::InsulationDistribution;
use crate::mesh::{Region, TriangleMesh};

/// The three pieces of a Robin-type energy, evaluated element by element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParts {
    /// `½∫ k|∇v|²` (layer part already scaled by its conductivity)
    pub gradient: f64,
    /// `½∫ w v²` on the boundary
    pub boundary: f64,
    /// `∫ f v`
    pub load: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.gradient + self.boundary - self.load
    }
}

fn gradient_and_load(mesh: &TriangleMesh, v: &[f64], layer_k: f64, f: &SourceField) -> (f64, f64) {
    let mut grad = 0.0;
    let mut load = 0.0;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let (g, area) = basis_gradients(mesh.triangle_points(t));
        let mut dv = [0.0; 2];
        for k in 0..3 {
            dv[0] += v[tri[k]] * g[k][0];
            dv[1] += v[tri[k]] * g[k][1];
        }
        let k = match mesh.regions()[t] {
            Region::Body => 1.0,
            Region::Layer => layer_k,
        };
        grad += 0.5 * k * area * (dv[0] * dv[0] + dv[1] * dv[1]);
        if mesh.regions()[t] == Region::Body {
            let fs = [f.at(tri[0]), f.at(tri[1]), f.at(tri[2])];
            let (sf, sv) = (fs.iter().sum::<f64>(), tri.iter().map(|&i| v[i]).sum::<f64>());
            let sfv: f64 = (0..3).map(|k| fs[k] * v[tri[k]]).sum();
            // exact ∫ of a product of two linear functions
            load += area / 12.0 * (sfv + sf * sv);
        }
    }
    (grad, load)
}

/// Limit functional `F(v, h)` split into its parts.
pub fn limit_energy_parts(
    mesh: &TriangleMesh,
    field: &ScalarField,
    h: &InsulationDistribution,
    params: &ProblemParams,
    f: &SourceField,
) -> Result<EnergyParts> {
    field.check_mesh(mesh)?;
    let boundary = h.boundary();
    if boundary.node_ids().iter().any(|&i| i >= mesh.vertex_count()) {
        return Err(Error::InvalidArgument("insulation is defined on a different mesh".into()));
    }
    let v = &field.values;
    let (gradient, load) = gradient_and_load(mesh, v, 1.0, f);
    let boundary_term: f64 = boundary
        .node_ids()
        .iter()
        .zip(boundary.node_weights())
        .zip(h.values())
        .map(|((&i, &m), &hv)| 0.5 * m * params.beta * v[i] * v[i] / (1.0 + params.beta * hv))
        .sum();
    Ok(EnergyParts { gradient, boundary: boundary_term, load })
}

pub fn limit_energy(
    mesh: &TriangleMesh,
    field: &ScalarField,
    h: &InsulationDistribution,
    params: &ProblemParams,
    f: &SourceField,
) -> Result<f64> {
    limit_energy_parts(mesh, field, h, params, f).map(|p| p.total())
}

/// Layer functional `F_ε(v)` split into its parts.
pub fn layer_energy_parts(
    mesh_eps: &TriangleMesh,
    eps: f64,
    field: &ScalarField,
    params: &ProblemParams,
    f: &SourceField,
) -> Result<EnergyParts> {
    field.check_mesh(mesh_eps)?;
    let v = &field.values;
    let (gradient, load) = gradient_and_load(mesh_eps, v, eps, f);
    let boundary_term: f64 = mesh_eps
        .boundary_edges()
        .iter()
        .map(|e| {
            let (a, b) = (v[e.nodes[0]], v[e.nodes[1]]);
            0.25 * params.beta * e.length * (a * a + b * b)
        })
        .sum();
    Ok(EnergyParts { gradient, boundary: boundary_term, load })
}

pub fn layer_energy(
    mesh_eps: &TriangleMesh,
    eps: f64,
    field: &ScalarField,
    params: &ProblemParams,
    f: &SourceField,
) -> Result<f64> {
    layer_energy_parts(mesh_eps, eps, field, params, f).map(|p| p.total())
}

/// `∫_Ω u` over the body triangles (exact for linear elements).
pub fn heat_content(mesh: &TriangleMesh, field: &ScalarField) -> Result<f64> {
    field.check_mesh(mesh)?;
    let v = &field.values;
    Ok(mesh
        .triangles()
        .iter()
        .enumerate()
        .filter(|(t, _)| mesh.regions()[*t] == Region::Body)
        .map(|(t, tri)| mesh.triangle_area(t) / 3.0 * (v[tri[0]] + v[tri[1]] + v[tri[2]]))
        .sum())
}

/// `(∫_Ω v²)^½` over the body triangles.
pub fn l2_norm(mesh: &TriangleMesh, field: &ScalarField) -> Result<f64> {
    field.check_mesh(mesh)?;
    let v = &field.values;
    let mut s = 0.0;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        if mesh.regions()[t] != Region::Body {
            continue;
        }
        let vals = [v[tri[0]], v[tri[1]], v[tri[2]]];
        let sum: f64 = vals.iter().sum();
        let sq: f64 = vals.iter().map(|x| x * x).sum();
        s += mesh.triangle_area(t) / 12.0 * (sq + sum * sum);
    }
    Ok(s.sqrt())
}

/// `∫_Ω |∇v|²` over the body triangles.
pub fn h1_seminorm_sq(mesh: &TriangleMesh, field: &ScalarField) -> Result<f64> {
    field.check_mesh(mesh)?;
    let v = &field.values;
    let mut s = 0.0;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        if mesh.regions()[t] != Region::Body {
            continue;
        }
        let (g, area) = basis_gradients(mesh.triangle_points(t));
        let mut dv = [0.0; 2];
        for k in 0..3 {
            dv[0] += v[tri[k]] * g[k][0];
            dv[1] += v[tri[k]] * g[k][1];
        }
        s += area * (dv[0] * dv[0] + dv[1] * dv[1]);
    }
    Ok(s)
}
