//! Plain-text mesh format.
//!
//! ```text
//! # optional comment lines start with '#'
//! V T E
//! x y                 (V lines, vertex coordinates)
//! a b c tag           (T lines, counterclockwise vertex indices, tag = body | layer)
//! a b                 (E lines, boundary edges with the domain on their left)
//! ```
//!
//! Indices are zero-based. Blank lines are ignored. Coordinates are written
//! with Rust's shortest round-trip float formatting, so a write/read cycle
//! reproduces the mesh bit for bit. On reading, the boundary edges are
//! checked against the boundary derived from the triangles.

use std::collections::HashSet;
use std::fmt::Write as _;

use super::{Region, TriangleMesh};
use crate::error::{Error, Result};

pub fn write_mesh(mesh: &TriangleMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {} {}", mesh.vertex_count(), mesh.triangle_count(), mesh.boundary_edges().len());
    for p in mesh.vertices() {
        let _ = writeln!(s, "{:?} {:?}", p[0], p[1]);
    }
    for (t, r) in mesh.triangles().iter().zip(mesh.regions()) {
        let tag = match r {
            Region::Body => "body",
            Region::Layer => "layer",
        };
        let _ = writeln!(s, "{} {} {} {}", t[0], t[1], t[2], tag);
    }
    for e in mesh.boundary_edges() {
        let _ = writeln!(s, "{} {}", e.nodes[0], e.nodes[1]);
    }
    s
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::Parse { line, message: format!("missing {what}") })?
        .parse()
        .map_err(|_| Error::Parse { line, message: format!("invalid {what}") })
}

pub fn read_mesh(text: &str) -> Result<TriangleMesh> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (ln, header) = lines.next().ok_or(Error::Parse { line: 0, message: "empty mesh file".into() })?;
    let mut it = header.split_whitespace();
    let nv: usize = parse(it.next(), ln, "vertex count")?;
    let nt: usize = parse(it.next(), ln, "triangle count")?;
    let ne: usize = parse(it.next(), ln, "edge count")?;

    let mut next_line = |what: &str| {
        lines.next().ok_or(Error::Parse { line: 0, message: format!("unexpected end of file reading {what}") })
    };

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = next_line("vertices")?;
        let mut it = l.split_whitespace();
        vertices.push([parse(it.next(), ln, "x")?, parse(it.next(), ln, "y")?]);
    }
    let mut triangles = Vec::with_capacity(nt);
    let mut regions = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, l) = next_line("triangles")?;
        let mut it = l.split_whitespace();
        triangles.push([
            parse(it.next(), ln, "index")?,
            parse(it.next(), ln, "index")?,
            parse(it.next(), ln, "index")?,
        ]);
        regions.push(match it.next() {
            Some("body") => Region::Body,
            Some("layer") => Region::Layer,
            other => return Err(Error::Parse { line: ln, message: format!("invalid region tag {other:?}") }),
        });
    }
    let mut edges = HashSet::with_capacity(ne);
    for _ in 0..ne {
        let (ln, l) = next_line("boundary edges")?;
        let mut it = l.split_whitespace();
        let e: [usize; 2] = [parse(it.next(), ln, "index")?, parse(it.next(), ln, "index")?];
        edges.insert(e);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::Parse { line: ln, message: "trailing content".into() });
    }
    let mesh = TriangleMesh::new(vertices, triangles, regions)?;
    let derived: HashSet<[usize; 2]> = mesh.boundary_edges().iter().map(|e| e.nodes).collect();
    if derived != edges {
        return Err(Error::InvalidMesh("boundary edges do not match the triangulation".into()));
    }
    Ok(mesh)
}
