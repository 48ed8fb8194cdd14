use std::collections::HashSet;

use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};

use super::{dist, Point, Region, TriangleMesh};
use crate::error::{Error, Result};

/// Minimum interior angle accepted from the polygon mesher.
pub const MIN_ANGLE_DEG: f64 = 20.0;

// Angle requested from Delaunay refinement; above the acceptance threshold
// so that boundary-adjacent elements still clear it.
const REFINEMENT_ANGLE_DEG: f64 = 25.0;

/// Shoelace area, positive for counterclockwise polygons.
pub fn polygon_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
}

pub fn polygon_perimeter(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    (0..n).map(|i| dist(vertices[i], vertices[(i + 1) % n])).sum()
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

/// Closed-segment intersection test, including touching and collinear overlap.
pub(crate) fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// True when the closed polyline `points` has no intersections other than
/// shared endpoints of consecutive segments.
pub(crate) fn is_simple_loop(points: &[Point]) -> bool {
    let n = points.len();
    if n < 3 {
        return false;
    }
    let seg = |i: usize| (points[i], points[(i + 1) % n]);
    let bbox = |i: usize| {
        let (a, b) = seg(i);
        [a[0].min(b[0]), a[1].min(b[1]), a[0].max(b[0]), a[1].max(b[1])]
    };
    let boxes: Vec<[f64; 4]> = (0..n).map(bbox).collect();
    for i in 0..n {
        for j in i + 1..n {
            let (bi, bj) = (boxes[i], boxes[j]);
            if bi[0] > bj[2] || bj[0] > bi[2] || bi[1] > bj[3] || bj[1] > bi[3] {
                continue;
            }
            let (a, b) = seg(i);
            let (c, d) = seg(j);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // consecutive segments may only share their common endpoint
                let (p, shared, q) = if j == i + 1 { (a, b, d) } else { (c, a, b) };
                if orient(p, shared, q) == 0.0 {
                    let (u, v) = ([shared[0] - p[0], shared[1] - p[1]], [q[0] - shared[0], q[1] - shared[1]]);
                    // folding back onto itself
                    if u[0] * v[0] + u[1] * v[1] < 0.0 {
                        return false;
                    }
                }
                continue;
            }
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Conforming triangulation of a simple polygon.
///
/// Each polygon side is split into equal segments no longer than
/// `target_edge_length`, the constrained Delaunay triangulation is refined
/// to the requested element size, and the result is rejected if any angle
/// falls below [`MIN_ANGLE_DEG`]. The polygon vertices are kept, so the
/// mesh area equals the polygon area. Clockwise input is reversed.
pub fn make_polygon_mesh(vertices: &[Point], target_edge_length: f64) -> Result<TriangleMesh> {
    if !(target_edge_length > 0.0) || !target_edge_length.is_finite() {
        return Err(Error::InvalidArgument(format!("target edge length must be positive, got {target_edge_length}")));
    }
    if vertices.len() < 3 || vertices.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::SelfIntersectingBoundary);
    }
    let mut poly: Vec<Point> = vertices.to_vec();
    let area = polygon_area(&poly);
    if area == 0.0 || !is_simple_loop(&poly) {
        return Err(Error::SelfIntersectingBoundary);
    }
    if area < 0.0 {
        poly.reverse();
    }

    let mut points: Vec<Point2<f64>> = Vec::new();
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let pieces = (dist(a, b) / target_edge_length).ceil().max(1.0) as usize;
        for k in 0..pieces {
            let s = k as f64 / pieces as f64;
            points.push(Point2::new(a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])));
        }
    }
    let m = points.len();
    let edges: Vec<[usize; 2]> = (0..m).map(|i| [i, (i + 1) % m]).collect();
    let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::bulk_load_cdt(points, edges)
        .map_err(|e| Error::InvalidMesh(format!("constrained triangulation failed: {e:?}")))?;

    let max_area = 3f64.sqrt() / 4.0 * target_edge_length * target_edge_length;
    let params = RefinementParameters::<f64>::new()
        .with_angle_limit(AngleLimit::from_deg(REFINEMENT_ANGLE_DEG))
        .with_max_allowed_area(max_area)
        .with_max_additional_vertices(2_000_000)
        .exclude_outer_faces(true);
    let result = cdt.refine(params);
    if !result.refinement_complete {
        return Err(Error::InvalidMesh("refinement did not complete".into()));
    }
    let excluded: HashSet<_> = result.excluded_faces.iter().copied().collect();

    let mut verts: Vec<Point> = vec![[0.0; 2]; cdt.num_vertices()];
    for v in cdt.vertices() {
        let p = v.position();
        verts[v.fix().index()] = [p.x, p.y];
    }
    let mut triangles = Vec::new();
    for f in cdt.inner_faces() {
        if excluded.contains(&f.fix()) {
            continue;
        }
        let [a, b, c] = f.vertices();
        triangles.push([a.fix().index(), b.fix().index(), c.fix().index()]);
    }
    // drop vertices that ended up outside the polygon
    let mut remap = vec![usize::MAX; verts.len()];
    let mut used = Vec::new();
    for t in &mut triangles {
        for v in t.iter_mut() {
            if remap[*v] == usize::MAX {
                remap[*v] = used.len();
                used.push(verts[*v]);
            }
            *v = remap[*v];
        }
    }
    let regions = vec![Region::Body; triangles.len()];
    let mesh = TriangleMesh::new(used, triangles, regions)?;
    let min_angle = mesh.min_angle_deg();
    if min_angle < MIN_ANGLE_DEG {
        return Err(Error::MeshQuality { min_angle_deg: min_angle, threshold_deg: MIN_ANGLE_DEG });
    }
    Ok(mesh)
}
