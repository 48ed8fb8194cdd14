use super::threshold::{threshold_constant, FixedPointResult};
use super::InsulationDistribution;
use crate::error::{Error, Result};
use crate::fem::ProblemParams;
use crate::mesh::{BoundaryMap, BoundaryTrace};

/// Optimal insulation together with its threshold constant.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalInsulation {
    pub h: InsulationDistribution,
    pub threshold: FixedPointResult,
    /// Multiplicative correction applied so that the trapezoidal mass is
    /// exactly `m`. Equals 1 up to rounding with the lumped threshold.
    pub renormalization: f64,
}

/// Minimizer of `∫ β v² / (1 + βh)` over `h ≥ 0` with `∫ h = m`.
pub fn optimal_h(
    trace: &BoundaryTrace,
    boundary: &BoundaryMap,
    params: &ProblemParams,
) -> Result<InsulationDistribution> {
    optimal_h_detailed(trace, boundary, params).map(|o| o.h)
}

pub fn optimal_h_detailed(
    trace: &BoundaryTrace,
    boundary: &BoundaryMap,
    params: &ProblemParams,
) -> Result<OptimalInsulation> {
    if trace.values.len() != boundary.len() {
        return Err(Error::SizeMismatch { expected: boundary.len(), actual: trace.values.len() });
    }
    let threshold = threshold_constant(trace, boundary, params);
    let c = threshold.c;
    if !(c > 0.0) {
        return Err(Error::ZeroTrace);
    }
    let beta = params.beta;
    // nodes with |v| = c belong to the active set and get h = 0 either way
    let mut values: Vec<f64> = trace
        .values
        .iter()
        .map(|v| if v.abs() >= c { (v.abs() / (c * beta) - 1.0 / beta).max(0.0) } else { 0.0 })
        .collect();
    let mass = boundary.integrate(&values);
    let renormalization = if mass > 0.0 { params.mass / mass } else { 1.0 };
    for v in &mut values {
        *v *= renormalization;
    }
    Ok(OptimalInsulation {
        h: InsulationDistribution::from_values_unchecked(boundary.clone(), values),
        threshold,
        renormalization,
    })
}

/// Deviation of a pair `(h, v)` from the optimality structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobinCheck {
    /// `max |(|v|/(1+βh)) − c|` over nodes with `h > 0`
    pub active_deviation: f64,
    /// `max (|v| − c)₊` over nodes with `h = 0`
    pub inactive_excess: f64,
}

impl RobinCheck {
    pub fn deviation(&self) -> f64 {
        self.active_deviation.max(self.inactive_excess)
    }
}

pub fn robin_value_check(
    h: &InsulationDistribution,
    trace: &BoundaryTrace,
    c: f64,
    params: &ProblemParams,
) -> RobinCheck {
    let mut active_deviation: f64 = 0.0;
    let mut inactive_excess: f64 = 0.0;
    for (&hv, v) in h.values().iter().zip(&trace.values) {
        if hv > 0.0 {
            active_deviation = active_deviation.max((v.abs() / (1.0 + params.beta * hv) - c).abs());
        } else {
            inactive_excess = inactive_excess.max(v.abs() - c);
        }
    }
    RobinCheck { active_deviation, inactive_excess }
}
