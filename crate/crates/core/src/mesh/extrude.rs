use super::polygon::{is_simple_loop, polygon_area, segments_intersect};
use super::{signed_area, Point, Region, TriangleMesh};
use crate::error::{Error, Result};
use crate::insulation::InsulationDistribution;

/// Minimum number of element layers across the insulation thickness.
pub fn min_layer_count(eps: f64) -> usize {
    (2.0 / eps.sqrt()).ceil().max(1.0) as usize
}

/// Vertices stacked along the offset direction above one boundary node.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerColumn {
    /// Vertex index of the boundary node of the body.
    pub body_node: usize,
    /// Unit offset direction (averaged outward normal).
    pub direction: Point,
    /// Layer thickness `eps * h` at this node.
    pub thickness: f64,
    /// Vertex indices from the body surface (level 0) to the outer surface.
    /// All entries equal `body_node` when the thickness is zero.
    pub nodes: Vec<usize>,
}

/// Body mesh extended by an insulating layer.
///
/// Body vertices and body triangles keep their indices from the input mesh;
/// layer vertices and triangles are appended after them.
#[derive(Debug, Clone)]
pub struct LayerMesh {
    pub mesh: TriangleMesh,
    pub eps: f64,
    pub layers: usize,
    pub body_vertex_count: usize,
    pub columns: Vec<LayerColumn>,
}

impl LayerMesh {
    /// Offset distance of every vertex from the body surface (zero inside
    /// the body), following the extrusion columns.
    pub fn offset_distance(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.mesh.vertex_count()];
        for col in &self.columns {
            for (j, &v) in col.nodes.iter().enumerate() {
                d[v] = col.thickness * j as f64 / self.layers as f64;
            }
        }
        d
    }

    /// Column owning each vertex (None for interior body vertices).
    pub fn column_of_vertex(&self) -> Vec<Option<usize>> {
        let mut owner = vec![None; self.mesh.vertex_count()];
        for (c, col) in self.columns.iter().enumerate() {
            for &v in &col.nodes {
                owner[v] = Some(c);
            }
        }
        owner
    }
}

/// Builds the insulating layer of thickness `eps * h` around a body mesh
/// with the default number of element layers.
pub fn extrude_layer(mesh: &TriangleMesh, h: &InsulationDistribution, eps: f64) -> Result<LayerMesh> {
    extrude_layer_with(mesh, h, eps, min_layer_count(eps))
}

/// Structured extrusion: every boundary edge is swept along the nodal offset
/// directions into `layers` quads, each split into two triangles. Nodes
/// with `h = 0` do not move, so an arc with zero insulation produces no
/// layer elements and the outer boundary follows the body there.
pub fn extrude_layer_with(
    mesh: &TriangleMesh,
    h: &InsulationDistribution,
    eps: f64,
    layers: usize,
) -> Result<LayerMesh> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    if mesh.has_region(Region::Layer) {
        return Err(Error::InvalidArgument("extrusion expects a body-only mesh".into()));
    }
    let layers = layers.max(min_layer_count(eps));
    let boundary = h.boundary();
    if boundary.node_ids() != mesh.boundary_map().node_ids() {
        return Err(Error::InvalidArgument("insulation is defined on a different boundary".into()));
    }
    for (i, &v) in h.values().iter().enumerate() {
        if v < 0.0 || !v.is_finite() {
            return Err(Error::NegativeInsulation { node: boundary.node_ids()[i], value: v });
        }
    }

    // averaged outward normal at each boundary node
    let nb = boundary.len();
    let mut dir = vec![[0.0; 2]; nb];
    for (e, edge) in mesh.boundary_edges().iter().enumerate() {
        let [a, b] = boundary.edges()[e];
        for k in [a, b] {
            dir[k][0] += edge.normal[0];
            dir[k][1] += edge.normal[1];
        }
    }
    for d in &mut dir {
        let n = d[0].hypot(d[1]);
        if n < 1e-12 {
            return Err(Error::LayerFoldOver);
        }
        d[0] /= n;
        d[1] /= n;
    }

    let mut vertices = mesh.vertices().to_vec();
    let mut triangles = mesh.triangles().to_vec();
    let mut regions = mesh.regions().to_vec();
    let mut columns = Vec::with_capacity(nb);
    for (i, dir_i) in dir.iter().enumerate() {
        let body_node = boundary.node_ids()[i];
        let thickness = eps * h.values()[i];
        let p = vertices[body_node];
        let mut nodes = vec![body_node];
        for j in 1..=layers {
            if thickness > 0.0 {
                let t = thickness * j as f64 / layers as f64;
                nodes.push(vertices.len());
                vertices.push([p[0] + t * dir_i[0], p[1] + t * dir_i[1]]);
            } else {
                nodes.push(body_node);
            }
        }
        columns.push(LayerColumn { body_node, direction: dir[i], thickness, nodes });
    }

    let scale = mesh.max_edge_length();
    for &[a, b] in boundary.edges() {
        let (ca, cb) = (&columns[a].nodes, &columns[b].nodes);
        for j in 0..layers {
            let candidates = [[ca[j], cb[j + 1], cb[j]], [ca[j], ca[j + 1], cb[j + 1]]];
            for tri in candidates {
                if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                    continue;
                }
                let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
                if !(area > 1e-14 * scale * scale) {
                    return Err(Error::LayerFoldOver);
                }
                triangles.push(tri);
                regions.push(Region::Layer);
            }
        }
    }

    let body_vertex_count = mesh.vertex_count();
    let out = TriangleMesh::new(vertices, triangles, regions).map_err(|_| Error::LayerFoldOver)?;
    check_no_overlap(&out)?;
    Ok(LayerMesh { mesh: out, eps, layers, body_vertex_count, columns })
}

fn check_no_overlap(mesh: &TriangleMesh) -> Result<()> {
    let verts = mesh.vertices();
    let edges = mesh.boundary_edges();
    let mut enclosed = 0.0;
    for lp in mesh.boundary_loops() {
        let pts: Vec<Point> = lp.iter().map(|&e| verts[edges[e].nodes[0]]).collect();
        if !is_simple_loop(&pts) {
            return Err(Error::LayerFoldOver);
        }
        enclosed += polygon_area(&pts);
    }
    // distinct loops must not cross either
    let loops = mesh.boundary_loops();
    for (i, li) in loops.iter().enumerate() {
        for lj in loops.iter().skip(i + 1) {
            for &ei in li {
                for &ej in lj {
                    let (a, b) = (verts[edges[ei].nodes[0]], verts[edges[ei].nodes[1]]);
                    let (c, d) = (verts[edges[ej].nodes[0]], verts[edges[ej].nodes[1]]);
                    if segments_intersect(a, b, c, d) {
                        return Err(Error::LayerFoldOver);
                    }
                }
            }
        }
    }
    // overlapping triangles cover some region twice
    let area = mesh.area();
    if (enclosed - area).abs() > 1e-9 * area {
        return Err(Error::LayerFoldOver);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::mesh::{make_disk_mesh, make_polygon_mesh};

    #[test]
    fn annulus_area_under_refinement() {
        let expected = PI * (1.05f64.powi(2) - 1.0);
        let mut errs = Vec::new();
        for level in 1..5 {
            let m = make_disk_mesh(1.0, level).unwrap();
            let h = InsulationDistribution::uniform_value(m.boundary_map(), 0.5);
            let lm = extrude_layer(&m, &h, 0.1).unwrap();
            errs.push((lm.mesh.region_area(Region::Layer) - expected).abs() / expected);
        }
        assert!(errs[3] < 0.01, "{errs:?}");
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    }

    #[test]
    fn body_is_preserved() {
        let m = make_disk_mesh(1.0, 2).unwrap();
        let h = InsulationDistribution::uniform_value(m.boundary_map(), 0.3);
        let lm = extrude_layer(&m, &h, 0.2).unwrap();
        assert_eq!(&lm.mesh.vertices()[..m.vertex_count()], m.vertices());
        assert_eq!(lm.mesh.body_triangles(), m.triangles());
        assert_eq!(lm.layers, min_layer_count(0.2));
        assert!(lm.layers >= 5);
    }

    #[test]
    fn thick_layer_on_convex_body() {
        let m = make_disk_mesh(1.0, 2).unwrap();
        let h = InsulationDistribution::uniform_value(m.boundary_map(), 10.0);
        let lm = extrude_layer(&m, &h, 0.5).unwrap();
        let verts = lm.mesh.vertices();
        for e in lm.mesh.boundary_edges() {
            let p = verts[e.nodes[0]];
            assert!((p[0].hypot(p[1]) - 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_insulation_arc_has_no_layer() {
        let m = make_disk_mesh(1.0, 2).unwrap();
        let b = m.boundary_map();
        let values: Vec<f64> = b.node_ids().iter().map(|&v| if m.vertices()[v][1] > 0.2 { 0.0 } else { 1.0 }).collect();
        let h = InsulationDistribution::from_values(b.clone(), values.clone()).unwrap();
        let lm = extrude_layer(&m, &h, 0.1).unwrap();
        // bare edges of the body are still on the outer boundary
        let outer: std::collections::HashSet<[usize; 2]> = lm.mesh.boundary_edges().iter().map(|e| e.nodes).collect();
        for &[a, c] in b.edges() {
            let bare = values[a] == 0.0 && values[c] == 0.0;
            let edge = [b.node_ids()[a], b.node_ids()[c]];
            assert_eq!(outer.contains(&edge), bare);
        }
    }

    #[test]
    fn concave_fold_over_detected() {
        let l = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
        let m = make_polygon_mesh(&l, 0.25).unwrap();
        let small = InsulationDistribution::uniform_value(m.boundary_map(), 0.1);
        assert!(extrude_layer(&m, &small, 0.1).is_ok());
        let big = InsulationDistribution::uniform_value(m.boundary_map(), 4.0);
        assert_eq!(extrude_layer(&m, &big, 0.5).unwrap_err(), Error::LayerFoldOver);
    }

    #[test]
    fn offset_distance_matches_columns() {
        let m = make_disk_mesh(1.0, 1).unwrap();
        let h = InsulationDistribution::uniform_value(m.boundary_map(), 0.5);
        let lm = extrude_layer(&m, &h, 0.1).unwrap();
        let d = lm.offset_distance();
        for (v, p) in lm.mesh.vertices().iter().enumerate() {
            let r = p[0].hypot(p[1]);
            if v >= lm.body_vertex_count {
                assert!((r - 1.0 - d[v]).abs() < 1e-12);
            }
        }
    }
}
