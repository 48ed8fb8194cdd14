//! Distribution of a fixed mass of insulating material along the boundary.
//!
//! The optimal distribution for a given boundary temperature is explicit
//! once the threshold constant `c` is known: `h = |v|/(cβ) − 1/β` where
//! `|v| ≥ c` and `h = 0` elsewhere, which makes `|v|/(1+βh)` constant on
//! the insulated part of the boundary.

mod alternating;
mod optimal;
mod threshold;

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::mesh::BoundaryMap;

pub use alternating::{alternating_minimize, AlternatingOptions, AlternatingReport, HalfStepEnergies, Termination};
pub use optimal::{optimal_h, optimal_h_detailed, robin_value_check, OptimalInsulation, RobinCheck};
pub use threshold::{
    threshold_constant, threshold_constant_with, threshold_function, FixedPointResult, TraceQuadrature,
};

/// Nodal insulation thickness `h ≥ 0` on the boundary nodes of a mesh,
/// interpreted as piecewise linear along the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct InsulationDistribution {
    boundary: BoundaryMap,
    values: Vec<f64>,
}

impl InsulationDistribution {
    /// Validated constructor: one finite, non-negative value per boundary node.
    pub fn from_values(boundary: BoundaryMap, values: Vec<f64>) -> Result<Self> {
        if values.len() != boundary.len() {
            return Err(Error::SizeMismatch { expected: boundary.len(), actual: values.len() });
        }
        let h = InsulationDistribution { boundary, values };
        h.check_nonnegative()?;
        Ok(h)
    }

    pub(crate) fn from_values_unchecked(boundary: BoundaryMap, values: Vec<f64>) -> Self {
        InsulationDistribution { boundary, values }
    }

    /// Constant thickness `m / Per`.
    pub fn uniform_mass(boundary: BoundaryMap, mass: f64) -> Result<Self> {
        if !(mass >= 0.0) || !mass.is_finite() {
            return Err(Error::InvalidArgument(format!("mass must be non-negative, got {mass}")));
        }
        let value = mass / boundary.perimeter();
        Ok(Self::uniform_value(boundary, value))
    }

    pub fn uniform_value(boundary: BoundaryMap, value: f64) -> Self {
        let n = boundary.len();
        InsulationDistribution { boundary, values: vec![value; n] }
    }

    pub fn boundary(&self) -> &BoundaryMap {
        &self.boundary
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `∫ h dσ` with the trapezoidal rule.
    pub fn mass(&self) -> f64 {
        self.boundary.integrate(&self.values)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Rescales to the given total mass. Fails for a zero distribution.
    pub fn with_mass(&self, mass: f64) -> Result<Self> {
        let current = self.mass();
        if !(current > 0.0) {
            return Err(Error::InvalidArgument("cannot rescale a zero insulation distribution".into()));
        }
        let k = mass / current;
        Ok(InsulationDistribution {
            boundary: self.boundary.clone(),
            values: self.values.iter().map(|v| v * k).collect(),
        })
    }

    pub(crate) fn check_nonnegative(&self) -> Result<()> {
        for (i, &v) in self.values.iter().enumerate() {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::NegativeInsulation { node: self.boundary.node_ids()[i], value: v });
            }
        }
        Ok(())
    }

    /// Lumped `∫|a − b|` and `(∫|a − b|²)^½` distances between two distributions.
    pub fn distances(&self, other: &InsulationDistribution) -> (f64, f64) {
        let w = self.boundary.node_weights();
        let mut l1 = 0.0;
        let mut l2 = 0.0;
        for ((a, b), wi) in self.values.iter().zip(&other.values).zip(w) {
            let d = (a - b).abs();
            l1 += wi * d;
            l2 += wi * d * d;
        }
        (l1, l2.sqrt())
    }

    /// CSV with header `boundary_node_id,arc_position,h_value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("boundary_node_id,arc_position,h_value\n");
        for ((id, pos), h) in self.boundary.node_ids().iter().zip(self.boundary.arc_positions()).zip(&self.values) {
            let _ = writeln!(s, "{id},{pos:?},{h:?}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::make_disk_mesh;

    #[test]
    fn uniform_mass_integrates_to_mass() {
        let m = make_disk_mesh(1.0, 3).unwrap();
        let h = InsulationDistribution::uniform_mass(m.boundary_map(), 2.5).unwrap();
        assert!((h.mass() - 2.5).abs() < 1e-12 * 2.5);
        let h2 = InsulationDistribution::uniform_value(m.boundary_map(), 1.0).with_mass(4.0).unwrap();
        assert!((h2.mass() - 4.0).abs() < 1e-12 * 4.0);
    }

    #[test]
    fn rejects_negative_values() {
        let m = make_disk_mesh(1.0, 1).unwrap();
        let b = m.boundary_map();
        let mut v = vec![1.0; b.len()];
        v[0] = -1e-3;
        assert!(matches!(InsulationDistribution::from_values(b.clone(), v), Err(Error::NegativeInsulation { .. })));
        assert!(InsulationDistribution::from_values(b, vec![1.0; 2]).is_err());
    }

    #[test]
    fn csv_layout() {
        let m = make_disk_mesh(1.0, 0).unwrap();
        let h = InsulationDistribution::uniform_value(m.boundary_map(), 0.5);
        let csv = h.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("boundary_node_id,arc_position,h_value"));
        assert_eq!(lines.count(), h.boundary().len());
    }
}
