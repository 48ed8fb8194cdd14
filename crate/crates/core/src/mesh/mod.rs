//! Two-dimensional conforming triangulations of the body and of the
//! body-plus-insulating-layer domain.
//!
//! A [`TriangleMesh`] is immutable once built. Boundary edges are derived
//! from the triangle connectivity (an edge used by exactly one triangle),
//! oriented so that the domain lies to their left, which makes the outward
//! normal the right-hand perpendicular of the edge direction.

mod disk;
mod extrude;
pub mod io;
mod polygon;

use std::collections::HashMap;

use crate::error::{Error, Result};

pub use disk::make_disk_mesh;
pub use extrude::{extrude_layer, extrude_layer_with, min_layer_count, LayerColumn, LayerMesh};
pub use polygon::{make_polygon_mesh, polygon_area, polygon_perimeter, MIN_ANGLE_DEG};

pub type Point = [f64; 2];

/// Material tag of a triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Body,
    Layer,
}

/// A boundary edge oriented with the domain on its left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub normal: Point,
    pub length: f64,
}

#[derive(Debug, Clone)]
pub struct TriangleMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    regions: Vec<Region>,
    boundary: Vec<BoundaryEdge>,
}

pub(crate) fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

impl TriangleMesh {
    /// Builds a mesh from raw connectivity, checking orientation and
    /// conformity, and derives the oriented boundary.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>, regions: Vec<Region>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        if regions.len() != triangles.len() {
            return Err(Error::SizeMismatch { expected: triangles.len(), actual: regions.len() });
        }
        let nv = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidMesh(format!("triangle {t} references a missing vertex")));
            }
            let a = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if !(a > 0.0) {
                return Err(Error::InvalidMesh(format!("triangle {t} has non-positive area {a:e}")));
            }
        }

        // directed edge -> owning triangle count; an interior edge appears once in each direction
        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * triangles.len());
        for tri in &triangles {
            for k in 0..3 {
                let e = (tri[k], tri[(k + 1) % 3]);
                let count = directed.entry(e).or_insert(0);
                *count += 1;
                if *count > 1 {
                    return Err(Error::InvalidMesh(format!("edge {:?} used twice with the same orientation", e)));
                }
            }
        }
        let mut boundary = Vec::new();
        for tri in &triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                if !directed.contains_key(&(b, a)) {
                    let (pa, pb) = (vertices[a], vertices[b]);
                    let length = dist(pa, pb);
                    let normal = [(pb[1] - pa[1]) / length, -(pb[0] - pa[0]) / length];
                    boundary.push(BoundaryEdge { nodes: [a, b], normal, length });
                }
            }
        }
        if boundary.is_empty() {
            return Err(Error::MissingOuterBoundary);
        }
        let mut mesh = TriangleMesh { vertices, triangles, regions, boundary };
        mesh.boundary = mesh.ordered_boundary()?;
        Ok(mesh)
    }

    // Reorders boundary edges into consecutive closed loops.
    fn ordered_boundary(&self) -> Result<Vec<BoundaryEdge>> {
        let mut next: HashMap<usize, usize> = HashMap::with_capacity(self.boundary.len());
        for (i, e) in self.boundary.iter().enumerate() {
            if next.insert(e.nodes[0], i).is_some() {
                return Err(Error::InvalidMesh(format!("boundary is not a manifold at vertex {}", e.nodes[0])));
            }
        }
        let mut used = vec![false; self.boundary.len()];
        let mut ordered = Vec::with_capacity(self.boundary.len());
        for start in 0..self.boundary.len() {
            if used[start] {
                continue;
            }
            let mut i = start;
            loop {
                used[i] = true;
                ordered.push(self.boundary[i]);
                let head = self.boundary[i].nodes[1];
                match next.get(&head) {
                    Some(&j) if j == start => break,
                    Some(&j) if !used[j] => i = j,
                    _ => return Err(Error::InvalidMesh("open boundary loop".into())),
                }
            }
        }
        Ok(ordered)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    /// Boundary edges grouped by loop, each loop contiguous and closed.
    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        signed_area(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn region_area(&self, region: Region) -> f64 {
        (0..self.triangles.len()).filter(|&t| self.regions[t] == region).map(|t| self.triangle_area(t)).sum()
    }

    pub fn perimeter(&self) -> f64 {
        self.boundary.iter().map(|e| e.length).sum()
    }

    pub fn has_region(&self, region: Region) -> bool {
        self.regions.contains(&region)
    }

    pub fn max_edge_length(&self) -> f64 {
        let mut m: f64 = 0.0;
        for tri in &self.triangles {
            for k in 0..3 {
                m = m.max(dist(self.vertices[tri[k]], self.vertices[tri[(k + 1) % 3]]));
            }
        }
        m
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        let mut min = f64::INFINITY;
        for t in 0..self.triangles.len() {
            let p = self.triangle_points(t);
            for k in 0..3 {
                let (o, a, b) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
                let u = [a[0] - o[0], a[1] - o[1]];
                let v = [b[0] - o[0], b[1] - o[1]];
                let cos = (u[0] * v[0] + u[1] * v[1]) / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
                min = min.min(cos.clamp(-1.0, 1.0).acos().to_degrees());
            }
        }
        min
    }

    /// Boundary loops as sequences of edge indices into [`Self::boundary_edges`].
    pub fn boundary_loops(&self) -> Vec<Vec<usize>> {
        let mut loops = Vec::new();
        let mut current = Vec::new();
        let mut start_node = None;
        for (i, e) in self.boundary.iter().enumerate() {
            if start_node.is_none() {
                start_node = Some(e.nodes[0]);
            }
            current.push(i);
            if Some(e.nodes[1]) == start_node {
                loops.push(std::mem::take(&mut current));
                start_node = None;
            }
        }
        loops
    }

    /// Number of edge-connected components of the triangulation.
    pub fn connected_components(&self) -> usize {
        let n = self.triangles.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                if let Some(&s) = owner.get(&key) {
                    let (ra, rb) = (find(&mut parent, s), find(&mut parent, t));
                    parent[ra] = rb;
                } else {
                    owner.insert(key, t);
                }
            }
        }
        (0..n).filter(|&t| find(&mut parent, t) == t).count()
    }

    /// Sub-mesh made of the `Body` triangles only. Vertex indices are
    /// preserved when body vertices come first (as produced by extrusion).
    pub fn body_triangles(&self) -> Vec<[usize; 3]> {
        self.triangles.iter().zip(&self.regions).filter(|(_, r)| **r == Region::Body).map(|(t, _)| *t).collect()
    }

    pub fn boundary_map(&self) -> BoundaryMap {
        BoundaryMap::new(self)
    }
}

/// Ordered boundary nodes of a mesh together with the arc-length weights
/// used for boundary quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMap {
    node_ids: Vec<usize>,
    /// Edges as pairs of local boundary indices.
    edges: Vec<[usize; 2]>,
    edge_lengths: Vec<f64>,
    /// Trapezoidal (lumped) weight of each boundary node: half the length of
    /// its two incident edges.
    node_weights: Vec<f64>,
    /// Cumulative arc position of each node along its loop.
    arc_positions: Vec<f64>,
}

impl BoundaryMap {
    pub fn new(mesh: &TriangleMesh) -> Self {
        let mut node_ids = Vec::new();
        let mut local: HashMap<usize, usize> = HashMap::new();
        let mut arc_positions = Vec::new();
        for lp in mesh.boundary_loops() {
            let mut s = 0.0;
            for &ei in &lp {
                let e = mesh.boundary[ei];
                local.insert(e.nodes[0], node_ids.len());
                node_ids.push(e.nodes[0]);
                arc_positions.push(s);
                s += e.length;
            }
        }
        let mut edges = Vec::with_capacity(mesh.boundary.len());
        let mut edge_lengths = Vec::with_capacity(mesh.boundary.len());
        let mut node_weights = vec![0.0; node_ids.len()];
        for e in &mesh.boundary {
            let (a, b) = (local[&e.nodes[0]], local[&e.nodes[1]]);
            edges.push([a, b]);
            edge_lengths.push(e.length);
            node_weights[a] += 0.5 * e.length;
            node_weights[b] += 0.5 * e.length;
        }
        BoundaryMap { node_ids, edges, edge_lengths, node_weights, arc_positions }
    }

    pub fn node_ids(&self) -> &[usize] {
        &self.node_ids
    }

    pub fn len(&self) -> usize {
        self.node_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_ids.is_empty()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_lengths
    }

    pub fn node_weights(&self) -> &[f64] {
        &self.node_weights
    }

    pub fn arc_positions(&self) -> &[f64] {
        &self.arc_positions
    }

    pub fn perimeter(&self) -> f64 {
        self.edge_lengths.iter().sum()
    }

    /// Lumped boundary integral of nodal values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.node_weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Restricts a nodal field on the mesh to the boundary nodes.
    pub fn restrict(&self, nodal: &[f64]) -> BoundaryTrace {
        BoundaryTrace { values: self.node_ids.iter().map(|&i| nodal[i]).collect() }
    }
}

/// Values of a field on the boundary nodes, in [`BoundaryMap`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    pub values: Vec<f64>,
}

impl BoundaryTrace {
    pub fn new(values: Vec<f64>) -> Self {
        BoundaryTrace { values }
    }

    pub fn constant(boundary: &BoundaryMap, value: f64) -> Self {
        BoundaryTrace { values: vec![value; boundary.len()] }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}
