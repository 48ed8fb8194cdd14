//! Piecewise-linear finite elements for the limit functional and the
//! thin-layer functional.
//!
//! Both energies are quadratic in the temperature, so minimizing one is the
//! same as solving the symmetric system `A x = b` returned by the
//! `assemble_*` functions. The boundary terms use nodal (trapezoidal)
//! quadrature with weights from [`crate::mesh::BoundaryMap`].

mod assembly;
mod energy;
mod sparse;

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;

pub(crate) use assembly::basis_gradients;
pub use assembly::{assemble_layer_energy, assemble_limit_energy, assemble_robin_system, load_vector, robin_weights};
pub use energy::{
    h1_seminorm_sq, heat_content, l2_norm, layer_energy, layer_energy_parts, limit_energy, limit_energy_parts,
    EnergyParts,
};
pub use sparse::{solve, solve_with_stats, CsrMatrix, LinearSystem, SolveStats, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE};

/// Nodal values of a piecewise-linear field.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Self {
        ScalarField { values }
    }

    pub fn zeros(n: usize) -> Self {
        ScalarField { values: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub(crate) fn check_mesh(&self, mesh: &TriangleMesh) -> Result<()> {
        if self.values.len() != mesh.vertex_count() {
            return Err(Error::SizeMismatch { expected: mesh.vertex_count(), actual: self.values.len() });
        }
        Ok(())
    }

    /// CSV with header `vertex_id,x,y,value`.
    pub fn to_csv(&self, mesh: &TriangleMesh) -> Result<String> {
        self.check_mesh(mesh)?;
        let mut s = String::from("vertex_id,x,y,value\n");
        for (i, (p, v)) in mesh.vertices().iter().zip(&self.values).enumerate() {
            let _ = writeln!(s, "{i},{:?},{:?},{:?}", p[0], p[1], v);
        }
        Ok(s)
    }
}

/// Heat source density, supported on the body.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceField {
    Constant(f64),
    /// One value per body vertex, interpolated linearly.
    Nodal(Vec<f64>),
}

impl SourceField {
    pub fn constant(value: f64) -> Result<Self> {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::InvalidArgument(format!("source must be non-negative, got {value}")));
        }
        Ok(SourceField::Constant(value))
    }

    pub fn nodal(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("source must be non-negative, got {v} at vertex {i}")));
        }
        Ok(SourceField::Nodal(values))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SourceField::Constant(c) => *c == 0.0,
            SourceField::Nodal(v) => v.iter().all(|&x| x == 0.0),
        }
    }

    pub(crate) fn at(&self, vertex: usize) -> f64 {
        match self {
            SourceField::Constant(c) => *c,
            SourceField::Nodal(v) => v[vertex],
        }
    }
}

/// Convection coefficient, insulation mass and ambient dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    pub beta: f64,
    pub mass: f64,
    pub dim: u32,
}

impl ProblemParams {
    pub fn new(beta: f64, mass: f64) -> Result<Self> {
        Self::with_dim(beta, mass, 2)
    }

    pub fn with_dim(beta: f64, mass: f64, dim: u32) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
        }
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidArgument(format!("mass must be positive, got {mass}")));
        }
        if dim < 2 {
            return Err(Error::InvalidArgument(format!("dimension must be at least 2, got {dim}")));
        }
        Ok(ProblemParams { beta, mass, dim })
    }
}
