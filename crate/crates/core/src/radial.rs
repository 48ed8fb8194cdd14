//! Closed-form radial solutions on balls with `f ≡ 1` and constant `h`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `Γ(x)` for `x` a positive integer or half-integer.
fn gamma_half_integer(x: f64) -> f64 {
    let twice = (2.0 * x).round();
    debug_assert!(twice >= 1.0 && (2.0 * x - twice).abs() < 1e-12);
    let (mut g, mut a) = if (twice as u64).is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while a < x - 0.25 {
        g *= a;
        a += 1.0;
    }
    g
}

/// Volume of the unit ball in `R^n`.
pub fn omega(n: u32) -> f64 {
    let half = n as f64 / 2.0;
    PI.powf(half) / gamma_half_integer(half + 1.0)
}

/// Surface measure of the sphere of radius `r` in `R^n`.
pub fn sphere_measure(n: u32, r: f64) -> f64 {
    n as f64 * omega(n) * r.powi(n as i32 - 1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialKind {
    /// `(1+βh) ∂u/∂ν + βu = 0` on the sphere.
    Limit,
    /// Body plus a layer of thickness `εh` and conductivity `ε`.
    Layer,
    /// `h ∂u/∂ν + u = 0` on the sphere.
    Dirichlet,
}

/// Piecewise radial profile. In the body `u = (R² − r²)/(2n) + A`; in the
/// layer `u = B ln r + D` (n = 2) or `u = B r^{2−n} + D` (n ≥ 3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSolution {
    pub kind: RadialKind,
    pub radius: f64,
    pub dim: u32,
    /// Infinite for the Dirichlet-reinforcement problem.
    pub beta: f64,
    pub h: f64,
    pub eps: Option<f64>,
    pub body_constant: f64,
    pub layer_coefficients: Option<(f64, f64)>,
    pub boundary_value: f64,
    pub heat_content: f64,
}

impl RadialSolution {
    pub fn outer_radius(&self) -> f64 {
        self.radius + self.eps.unwrap_or(0.0) * self.h
    }

    fn layer_part(&self, r: f64) -> (f64, f64) {
        let (b, d) = self.layer_coefficients.expect("layer profile");
        if self.dim == 2 {
            (b * r.ln() + d, b / r)
        } else {
            let k = 2.0 - self.dim as f64;
            (b * r.powf(k) + d, k * b * r.powf(k - 1.0))
        }
    }

    /// `u(r)` for `0 ≤ r ≤ outer_radius()`.
    pub fn value(&self, r: f64) -> f64 {
        if r <= self.radius || self.layer_coefficients.is_none() {
            (self.radius * self.radius - r * r) / (2.0 * self.dim as f64) + self.body_constant
        } else {
            self.layer_part(r).0
        }
    }

    /// `u'(r)`; for `r = R` the body-side derivative.
    pub fn derivative(&self, r: f64) -> f64 {
        if r <= self.radius || self.layer_coefficients.is_none() {
            -r / self.dim as f64
        } else {
            self.layer_part(r).1
        }
    }

    /// Layer-side derivative at `r = R`.
    pub fn layer_derivative_at_interface(&self) -> Option<f64> {
        self.layer_coefficients.map(|_| self.layer_part(self.radius).1)
    }

    /// Minimum of the energy, `−½∫ u` since `f ≡ 1` on the body.
    pub fn min_energy(&self) -> f64 {
        -0.5 * self.heat_content
    }

    /// `∫_{B_R} u`
    fn body_heat(radius: f64, n: u32, a: f64) -> f64 {
        let w = omega(n);
        let nf = n as f64;
        w * radius.powi(n as i32 + 2) / (nf * (nf + 2.0)) + w * radius.powi(n as i32) * a
    }
}

fn check_common(radius: f64, n: u32, h: f64) -> Result<()> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("dimension must be at least 2, got {n}")));
    }
    if !(h >= 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("h must be non-negative, got {h}")));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    Ok(())
}

pub fn limit_ball_solution(radius: f64, n: u32, beta: f64, h: f64) -> Result<RadialSolution> {
    check_common(radius, n, h)?;
    check_beta(beta)?;
    let a = radius * (1.0 + beta * h) / (n as f64 * beta);
    Ok(RadialSolution {
        kind: RadialKind::Limit,
        radius,
        dim: n,
        beta,
        h,
        eps: None,
        body_constant: a,
        layer_coefficients: None,
        boundary_value: a,
        heat_content: RadialSolution::body_heat(radius, n, a),
    })
}

/// Flux `ε u'(R⁺) = u'(R⁻)` at the interface and `ε u' + βu = 0` on the
/// outer sphere of radius `R + εh`.
pub fn layer_ball_solution(radius: f64, n: u32, beta: f64, h: f64, eps: f64) -> Result<RadialSolution> {
    check_common(radius, n, h)?;
    check_beta(beta)?;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let nf = n as f64;
    let re = radius + eps * h;
    let (b, d) = if n == 2 {
        let b = -radius * radius / (2.0 * eps);
        (b, -b * re.ln() - eps * b / (beta * re))
    } else {
        let b = radius.powi(n as i32) / (nf * eps * (nf - 2.0));
        (b, -b * re.powf(2.0 - nf) + eps * (nf - 2.0) * b * re.powf(1.0 - nf) / beta)
    };
    let a = if n == 2 {
        // B ln R + D written without cancellation for small εh
        radius * radius / (2.0 * eps) * (eps * h / radius).ln_1p() + radius * radius / (2.0 * beta * re)
    } else {
        b * radius.powf(2.0 - nf) + d
    };
    Ok(RadialSolution {
        kind: RadialKind::Layer,
        radius,
        dim: n,
        beta,
        h,
        eps: Some(eps),
        body_constant: a,
        layer_coefficients: Some((b, d)),
        boundary_value: a,
        heat_content: RadialSolution::body_heat(radius, n, a),
    })
}

/// Solution of `−Δu = 1`, `h ∂u/∂ν + u = 0`, the `β → ∞` limit.
pub fn dirichlet_ball_solution(radius: f64, n: u32, h: f64) -> Result<RadialSolution> {
    check_common(radius, n, h)?;
    let a = h * radius / n as f64;
    Ok(RadialSolution {
        kind: RadialKind::Dirichlet,
        radius,
        dim: n,
        beta: f64::INFINITY,
        h,
        eps: None,
        body_constant: a,
        layer_coefficients: None,
        boundary_value: a,
        heat_content: RadialSolution::body_heat(radius, n, a),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_ball_volumes() {
        assert_relative_eq!(omega(2), PI, max_relative = 1e-15);
        assert_relative_eq!(omega(3), 4.0 * PI / 3.0, max_relative = 1e-15);
        assert_relative_eq!(omega(4), PI * PI / 2.0, max_relative = 1e-15);
        assert_relative_eq!(omega(5), 8.0 * PI * PI / 15.0, max_relative = 1e-15);
        assert_relative_eq!(sphere_measure(3, 2.0), 16.0 * PI, max_relative = 1e-15);
    }

    #[test]
    fn limit_disk_values() {
        let s = limit_ball_solution(1.0, 2, 1.0, 1.0).unwrap();
        assert_relative_eq!(s.boundary_value, 1.0, max_relative = 1e-15);
        assert_relative_eq!(s.heat_content, PI / 8.0 + PI, max_relative = 1e-15);
        assert_relative_eq!(s.value(0.0), 1.25, max_relative = 1e-15);
        // (1+βh) u' + βu = 0 on the sphere
        assert!(((1.0 + s.beta * s.h) * s.derivative(1.0) + s.beta * s.value(1.0)).abs() < 1e-15);
    }

    #[test]
    fn limit_heat_matches_quadrature() {
        let s = limit_ball_solution(1.3, 3, 0.7, 0.4).unwrap();
        let n = 20000;
        let dr = s.radius / n as f64;
        let q: f64 = (0..n)
            .map(|k| {
                let r = (k as f64 + 0.5) * dr;
                sphere_measure(3, r) * s.value(r) * dr
            })
            .sum();
        assert_relative_eq!(q, s.heat_content, max_relative = 1e-8);
    }

    #[test]
    fn bare_ball() {
        let s = limit_ball_solution(2.0, 3, 4.0, 0.0).unwrap();
        assert_relative_eq!(s.boundary_value, 2.0 / (3.0 * 4.0), max_relative = 1e-15);
    }

    #[test]
    fn layer_profile_conditions() {
        for n in [2, 3, 5] {
            let s = layer_ball_solution(1.2, n, 1.5, 0.8, 0.05).unwrap();
            let eps = s.eps.unwrap();
            // continuity and flux transmission at R
            let r = s.radius;
            assert!((s.layer_part(r).0 - s.value(r)).abs() < 1e-12);
            assert_relative_eq!(
                s.derivative(r),
                eps * s.layer_derivative_at_interface().unwrap(),
                max_relative = 1e-13
            );
            // outer Robin condition
            let re = s.outer_radius();
            assert!((eps * s.derivative(re) + s.beta * s.value(re)).abs() < 1e-12);
            // the layer part is harmonic: (r^{n-1} u')' = 0
            let flux = |r: f64| r.powi(n as i32 - 1) * s.derivative(r);
            assert_relative_eq!(flux(r + 0.01), flux(re), max_relative = 1e-12);
        }
    }

    #[test]
    fn layer_log_gap() {
        let eps = 1e-6;
        let s = layer_ball_solution(1.0, 2, 1.0, 1.0, eps).unwrap();
        let gap = s.value(s.outer_radius()) - s.value(1.0);
        let (b, _) = s.layer_coefficients.unwrap();
        assert_relative_eq!(gap, b * (1.0 + eps).ln(), max_relative = 1e-6);
        assert!((gap + 0.5).abs() < 1e-5);
    }

    #[test]
    fn layer_converges_at_first_order() {
        for n in [2, 3] {
            let lim = limit_ball_solution(1.0, n, 1.0, 1.0).unwrap().boundary_value;
            let gaps: Vec<f64> = [0.1, 0.05, 0.025]
                .iter()
                .map(|&e| (layer_ball_solution(1.0, n, 1.0, 1.0, e).unwrap().boundary_value - lim).abs())
                .collect();
            for w in gaps.windows(2) {
                let order = (w[0] / w[1]).log2();
                assert!((order - 1.0).abs() < 0.15, "n={n} order {order}");
            }
        }
    }

    #[test]
    fn unit_eps_outer_condition_is_plain_robin() {
        // with ε = 1 the layer has the body's conductivity and the outer
        // condition is u' + βu = 0 on the ball of radius R + h
        let s = layer_ball_solution(1.0, 2, 2.0, 0.5, 1.0).unwrap();
        let re = s.outer_radius();
        assert_relative_eq!(re, 1.5);
        assert!((s.derivative(re) + 2.0 * s.value(re)).abs() < 1e-14);
    }

    #[test]
    fn dirichlet_is_large_beta_limit() {
        let v = dirichlet_ball_solution(1.0, 2, 1.0).unwrap();
        assert_relative_eq!(v.boundary_value, 0.5);
        for beta in [1.0, 10.0, 100.0] {
            let u = limit_ball_solution(1.0, 2, beta, 1.0).unwrap();
            assert_relative_eq!(u.boundary_value - v.boundary_value, 1.0 / (2.0 * beta), max_relative = 1e-12);
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(limit_ball_solution(0.0, 2, 1.0, 1.0).is_err());
        assert!(limit_ball_solution(1.0, 1, 1.0, 1.0).is_err());
        assert!(limit_ball_solution(1.0, 2, 0.0, 1.0).is_err());
        assert!(layer_ball_solution(1.0, 2, 1.0, 1.0, 0.0).is_err());
        assert!(dirichlet_ball_solution(1.0, 2, -1.0).is_err());
    }
}
