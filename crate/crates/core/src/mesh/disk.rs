use std::f64::consts::PI;

use super::{Point, Region, TriangleMesh};
use crate::error::{Error, Result};

/// Rings at refinement level 0; each level doubles the ring count.
const BASE_RINGS: usize = 2;

/// Quasi-uniform triangulation of the disk of the given radius centred at
/// the origin.
///
/// Vertices sit on `N = 2^(level+1)` concentric circles; circle `k` carries
/// `6k` equally spaced vertices, so the tangential spacing is `~1.05 R/N`
/// on every ring and the radial spacing is `R/N`. Outer vertices lie
/// exactly on the circle.
pub fn make_disk_mesh(radius: f64, refinement_level: u32) -> Result<TriangleMesh> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!("disk radius must be positive, got {radius}")));
    }
    if refinement_level > 12 {
        return Err(Error::InvalidArgument(format!("refinement level {refinement_level} too large")));
    }
    let rings = BASE_RINGS << refinement_level;

    let mut vertices: Vec<Point> = vec![[0.0, 0.0]];
    let mut ring_start = vec![0usize];
    for k in 1..=rings {
        ring_start.push(vertices.len());
        let r = radius * k as f64 / rings as f64;
        let n = 6 * k;
        for j in 0..n {
            let theta = 2.0 * PI * j as f64 / n as f64;
            vertices.push([r * theta.cos(), r * theta.sin()]);
        }
    }

    let mut triangles = Vec::with_capacity(6 * rings * rings);
    // innermost ring: fan around the centre
    for j in 0..6 {
        triangles.push([0, ring_start[1] + j, ring_start[1] + (j + 1) % 6]);
    }
    for k in 2..=rings {
        let (n_in, n_out) = (6 * (k - 1), 6 * k);
        let (s_in, s_out) = (ring_start[k - 1], ring_start[k]);
        let (mut i, mut j) = (0usize, 0usize);
        // merge the two rings by increasing angle
        while i < n_in || j < n_out {
            let next_in = (i + 1) as f64 / n_in as f64;
            let next_out = (j + 1) as f64 / n_out as f64;
            let advance_inner = if j == n_out {
                true
            } else if i == n_in {
                false
            } else {
                next_in < next_out
            };
            let a = s_in + i % n_in;
            let b = s_out + j % n_out;
            if advance_inner {
                triangles.push([a, b, s_in + (i + 1) % n_in]);
                i += 1;
            } else {
                triangles.push([a, b, s_out + (j + 1) % n_out]);
                j += 1;
            }
        }
    }
    let regions = vec![Region::Body; triangles.len()];
    TriangleMesh::new(vertices, triangles, regions)
}
