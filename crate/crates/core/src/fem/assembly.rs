use super::{CsrMatrix, LinearSystem, ProblemParams, SourceField};
use crate::error::{Error, Result};
use crate::insulation::InsulationDistribution;
use crate::mesh::{BoundaryMap, Point, Region, TriangleMesh};

/// Gradients of the three barycentric basis functions and the area.
pub(crate) fn basis_gradients(p: [Point; 3]) -> ([[f64; 2]; 3], f64) {
    let area = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]));
    let inv = 1.0 / (2.0 * area);
    let mut g = [[0.0; 2]; 3];
    for k in 0..3 {
        let (a, b) = (p[(k + 1) % 3], p[(k + 2) % 3]);
        g[k] = [(a[1] - b[1]) * inv, (b[0] - a[0]) * inv];
    }
    (g, area)
}

/// Nodal Robin coefficients `β / (1 + β h)` on the boundary nodes.
pub fn robin_weights(h: &InsulationDistribution, params: &ProblemParams) -> Vec<f64> {
    h.values().iter().map(|&hv| params.beta / (1.0 + params.beta * hv)).collect()
}

/// Consistent load vector `∫ f φ_i` over the body triangles.
pub fn load_vector(mesh: &TriangleMesh, f: &SourceField) -> Result<Vec<f64>> {
    let mut b = vec![0.0; mesh.vertex_count()];
    if let SourceField::Nodal(values) = f {
        let needed = mesh.body_triangles().iter().flatten().copied().max().map_or(0, |m| m + 1);
        if values.len() < needed {
            return Err(Error::SizeMismatch { expected: needed, actual: values.len() });
        }
    }
    for (t, tri) in mesh.triangles().iter().enumerate() {
        if mesh.regions()[t] != Region::Body {
            continue;
        }
        let area = mesh.triangle_area(t);
        match f {
            SourceField::Constant(c) => {
                for &v in tri {
                    b[v] += c * area / 3.0;
                }
            }
            SourceField::Nodal(_) => {
                let fs = [f.at(tri[0]), f.at(tri[1]), f.at(tri[2])];
                let sum: f64 = fs.iter().sum();
                for k in 0..3 {
                    b[tri[k]] += area / 12.0 * (fs[k] + sum);
                }
            }
        }
    }
    Ok(b)
}

/// General assembly: stiffness with unit conductivity on body triangles and
/// `layer_conductivity` on layer triangles, lumped boundary mass with nodal
/// coefficients `weights` (in `boundary` order), and load from `f` on the
/// body.
pub fn assemble_robin_system(
    mesh: &TriangleMesh,
    layer_conductivity: f64,
    boundary: &BoundaryMap,
    weights: &[f64],
    f: &SourceField,
) -> Result<LinearSystem> {
    if weights.len() != boundary.len() {
        return Err(Error::SizeMismatch { expected: boundary.len(), actual: weights.len() });
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidArgument(format!("boundary coefficient must be finite and non-negative, got {w}")));
    }
    let n = mesh.vertex_count();
    let mut triplets = Vec::with_capacity(9 * mesh.triangle_count() + boundary.len());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let k = match mesh.regions()[t] {
            Region::Body => 1.0,
            Region::Layer => layer_conductivity,
        };
        let (g, area) = basis_gradients(mesh.triangle_points(t));
        for i in 0..3 {
            for j in 0..3 {
                let v = k * area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                triplets.push((tri[i], tri[j], v));
            }
        }
    }
    for ((&node, &w), &m) in boundary.node_ids().iter().zip(weights).zip(boundary.node_weights()) {
        triplets.push((node, node, w * m));
    }
    let matrix = CsrMatrix::from_triplets(n, triplets);
    LinearSystem::new(matrix, load_vector(mesh, f)?)
}

/// System for the limit functional
/// `F(v, h) = ½∫|∇v|² + ½∫_∂Ω β v² / (1 + βh) − ∫ f v` on a body mesh.
pub fn assemble_limit_energy(
    mesh: &TriangleMesh,
    h: &InsulationDistribution,
    params: &ProblemParams,
    f: &SourceField,
) -> Result<LinearSystem> {
    if mesh.has_region(Region::Layer) {
        return Err(Error::InvalidArgument("limit functional expects a body-only mesh".into()));
    }
    let boundary = mesh.boundary_map();
    if boundary.node_ids() != h.boundary().node_ids() {
        return Err(Error::InvalidArgument("insulation is defined on a different boundary".into()));
    }
    h.check_nonnegative()?;
    assemble_robin_system(mesh, 1.0, &boundary, &robin_weights(h, params), f)
}

/// System for the layer functional
/// `F_ε(v) = ½∫_Ω|∇v|² + ε/2 ∫_Σ|∇v|² + β/2 ∫_∂Ω_ε v² − ∫_Ω f v`
/// on a mesh of the body plus its insulating layer.
pub fn assemble_layer_energy(
    mesh_eps: &TriangleMesh,
    eps: f64,
    params: &ProblemParams,
    f: &SourceField,
) -> Result<LinearSystem> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let boundary = mesh_eps.boundary_map();
    if boundary.is_empty() {
        return Err(Error::MissingOuterBoundary);
    }
    let weights = vec![params.beta; boundary.len()];
    assemble_robin_system(mesh_eps, eps, &boundary, &weights, f)
}
