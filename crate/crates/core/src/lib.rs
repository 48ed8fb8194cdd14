//! Optimal insulation of a 2D body exchanging heat with its surroundings
//! through a Robin condition.
//!
//! A body `Ω` with heat source `f` is wrapped in a thin layer of thickness
//! `εh` and conductivity `ε`. As `ε → 0` the layer is replaced by the
//! boundary condition `(1+βh) ∂u/∂ν + βu = 0`, and the thickness `h` of a
//! fixed mass `m` of insulation can be chosen to maximize the heat content.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod fem;
pub mod gamma;
pub mod insulation;
pub mod mesh;
pub mod radial;

pub use bounds::LevelSetProfile;
pub use error::{Error, Result};
pub use fem::{ProblemParams, ScalarField, SourceField};
pub use insulation::{AlternatingReport, FixedPointResult, InsulationDistribution};
pub use mesh::{BoundaryMap, BoundaryTrace, TriangleMesh};
pub use radial::RadialSolution;
