//! Sharp upper bound for the heat content of the optimally insulated body
//! and the level-set quantities entering its proof.

mod dirichlet;
mod level_set;

pub use dirichlet::{dirichlet_limit_check, DirichletLimitReport};
pub use level_set::{level_set_diagnostic, level_set_sample, LevelSetProfile, LevelSetReport, LevelSetSample};

use crate::error::{Error, Result};
use crate::fem::ProblemParams;
use crate::radial::omega;

fn check_measure(name: &str, value: f64) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::InvalidArgument(format!("{name} must be positive, got {value}")));
    }
    Ok(())
}

/// `(1/(ω_n^{2/n} n²)) (n|Ω|^{1+2/n}/(n+2) + |Ω|^{2/n}(Per/β + m))`, an upper
/// bound for `∫ u` at the optimal couple with `f ≡ 1`, attained by balls.
pub fn isoperimetric_bound(area: f64, perimeter: f64, params: &ProblemParams) -> Result<f64> {
    check_measure("area", area)?;
    check_measure("perimeter", perimeter)?;
    let n = params.dim as f64;
    let a2n = area.powf(2.0 / n);
    let k = 1.0 / (omega(params.dim).powf(2.0 / n) * n * n);
    Ok(k * (n * area * a2n / (n + 2.0) + a2n * (perimeter / params.beta + params.mass)))
}

/// The `β → ∞` form of [`isoperimetric_bound`], which bounds `∫ v` for the
/// problem `−Δv = 1`, `h ∂v/∂ν + v = 0` with `∫ h = m`.
pub fn corollary_bound(area: f64, mass: f64, dim: u32) -> Result<f64> {
    check_measure("area", area)?;
    if !(mass >= 0.0) || !mass.is_finite() {
        return Err(Error::InvalidArgument(format!("mass must be non-negative, got {mass}")));
    }
    let n = dim as f64;
    let a2n = area.powf(2.0 / n);
    let k = 1.0 / (omega(dim).powf(2.0 / n) * n * n);
    Ok(k * (n * area * a2n / (n + 2.0) + a2n * mass))
}
