use thiserror::Error;

/// Errors produced by the meshing, assembly and optimization routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("self-intersecting boundary")]
    SelfIntersectingBoundary,

    #[error("mesh quality: minimum angle {min_angle_deg:.2} deg below {threshold_deg} deg")]
    MeshQuality { min_angle_deg: f64, threshold_deg: f64 },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("layer fold-over; reduce eps")]
    LayerFoldOver,

    #[error("negative insulation at boundary node {node} (h = {value})")]
    NegativeInsulation { node: usize, value: f64 },

    #[error("missing outer boundary")]
    MissingOuterBoundary,

    #[error("size mismatch: expected {expected} values, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("optimal h undefined for zero trace")]
    ZeroTrace,

    #[error("alternating minimization did not converge in {iterations} outer iterations")]
    AlternatingNotConverged { iterations: usize, energy_trace: Vec<f64> },

    #[error("Dirichlet limit requires h > 0 (h = {value} at boundary node {node})")]
    NonPositiveInsulation { node: usize, value: f64 },

    #[error("level-set diagnostic requires a positive field (min value {min})")]
    SignIndefinite { min: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
