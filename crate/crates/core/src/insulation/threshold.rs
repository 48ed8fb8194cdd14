use crate::fem::ProblemParams;
use crate::mesh::{BoundaryMap, BoundaryTrace};

/// How boundary integrals of `|v|` are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceQuadrature {
    /// Trapezoidal nodal weights, the rule used by the assembled energy.
    /// `g₁` is piecewise linear in `c`.
    #[default]
    Lumped,
    /// Exact integration of the linear interpolant of the nodal `|v|` along
    /// each edge. `g₁` is piecewise quadratic in `c`.
    PiecewiseLinear,
}

/// The threshold constant `c` balancing `∫(|v| − c)₊ = mβc`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointResult {
    pub c: f64,
    /// Boundary measure of `{|v| ≥ c}`.
    pub active_set_measure: f64,
    /// Bisection steps before the closed-form finish.
    pub iterations: usize,
    /// `|g₁(c) − mβc|`
    pub residual: f64,
    /// `g₁(0) + mβ max|v|`, the natural size of both sides.
    pub scale: f64,
}

/// `g₁(c) = ∫_{|v| ≥ c} (|v| − c) dσ`
pub fn threshold_function(trace: &BoundaryTrace, boundary: &BoundaryMap, quadrature: TraceQuadrature, c: f64) -> f64 {
    match quadrature {
        TraceQuadrature::Lumped => {
            boundary.node_weights().iter().zip(&trace.values).map(|(w, v)| w * (v.abs() - c).max(0.0)).sum()
        }
        TraceQuadrature::PiecewiseLinear => boundary
            .edges()
            .iter()
            .zip(boundary.edge_lengths())
            .map(|(&[i, j], &len)| {
                let (a, b) = (trace.values[i].abs(), trace.values[j].abs());
                let (p, q) = (a.min(b), a.max(b));
                if c <= p {
                    len * (0.5 * (p + q) - c)
                } else if c >= q {
                    0.0
                } else {
                    len * (q - c) * (q - c) / (2.0 * (q - p))
                }
            })
            .sum(),
    }
}

fn active_measure(trace: &BoundaryTrace, boundary: &BoundaryMap, quadrature: TraceQuadrature, c: f64) -> f64 {
    match quadrature {
        TraceQuadrature::Lumped => {
            boundary.node_weights().iter().zip(&trace.values).filter(|(_, v)| v.abs() >= c).map(|(w, _)| w).sum()
        }
        TraceQuadrature::PiecewiseLinear => boundary
            .edges()
            .iter()
            .zip(boundary.edge_lengths())
            .map(|(&[i, j], &len)| {
                let (a, b) = (trace.values[i].abs(), trace.values[j].abs());
                let (p, q) = (a.min(b), a.max(b));
                if p >= c {
                    len
                } else if q < c {
                    0.0
                } else {
                    len * (q - c) / (q - p)
                }
            })
            .sum(),
    }
}

/// Root of `g₁(c) = mβc` with the quadrature used by the energy.
pub fn threshold_constant(trace: &BoundaryTrace, boundary: &BoundaryMap, params: &ProblemParams) -> FixedPointResult {
    threshold_constant_with(trace, boundary, params, TraceQuadrature::Lumped)
}

/// Bisection on `[0, max|v|]` until no breakpoint of `g₁` is left inside
/// the bracket, then the exact root of the linear (lumped) or quadratic
/// (piecewise-linear) equation on that bracket.
pub fn threshold_constant_with(
    trace: &BoundaryTrace,
    boundary: &BoundaryMap,
    params: &ProblemParams,
    quadrature: TraceQuadrature,
) -> FixedPointResult {
    let mb = params.mass * params.beta;
    let mut breaks: Vec<f64> = trace.values.iter().map(|v| v.abs()).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let max_abs = breaks.last().copied().unwrap_or(0.0);
    let g1_zero = threshold_function(trace, boundary, quadrature, 0.0);
    let scale = g1_zero + mb * max_abs;
    if !(g1_zero > 0.0) {
        return FixedPointResult {
            c: 0.0,
            active_set_measure: boundary.perimeter(),
            iterations: 0,
            residual: 0.0,
            scale,
        };
    }

    let excess = |c: f64| threshold_function(trace, boundary, quadrature, c) - mb * c;
    let has_break_inside = |lo: f64, hi: f64| {
        let k = breaks.partition_point(|&b| b <= lo);
        k < breaks.len() && breaks[k] < hi
    };
    let (mut lo, mut hi) = (0.0, max_abs);
    let mut iterations = 0;
    while has_break_inside(lo, hi) && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }

    let c = closed_form(trace, boundary, quadrature, mb, lo, hi).unwrap_or(0.5 * (lo + hi));
    FixedPointResult {
        c,
        active_set_measure: active_measure(trace, boundary, quadrature, c),
        iterations,
        residual: excess(c).abs(),
        scale,
    }
}

// On a bracket without breakpoints the active set is fixed, which makes
// the balance equation linear or quadratic in c.
fn closed_form(
    trace: &BoundaryTrace,
    boundary: &BoundaryMap,
    quadrature: TraceQuadrature,
    mb: f64,
    lo: f64,
    hi: f64,
) -> Option<f64> {
    let slack = 1e-12 * hi.max(1e-300);
    let accept = |c: f64| (c >= lo - slack && c <= hi + slack).then(|| c.clamp(lo, hi));
    match quadrature {
        TraceQuadrature::Lumped => {
            let (mut sw, mut swa) = (0.0, 0.0);
            for (w, v) in boundary.node_weights().iter().zip(&trace.values) {
                if v.abs() >= hi {
                    sw += w;
                    swa += w * v.abs();
                }
            }
            accept(swa / (sw + mb))
        }
        TraceQuadrature::PiecewiseLinear => {
            // A c² + B c + C = 0
            let (mut a2, mut b1, mut c0) = (0.0, -mb, 0.0);
            for (&[i, j], &len) in boundary.edges().iter().zip(boundary.edge_lengths()) {
                let (x, y) = (trace.values[i].abs(), trace.values[j].abs());
                let (p, q) = (x.min(y), x.max(y));
                if p >= hi {
                    c0 += len * 0.5 * (p + q);
                    b1 -= len;
                } else if q > lo && q > p {
                    let k = len / (2.0 * (q - p));
                    a2 += k;
                    b1 -= 2.0 * k * q;
                    c0 += k * q * q;
                }
            }
            if a2 == 0.0 {
                return accept(-c0 / b1);
            }
            let disc = b1 * b1 - 4.0 * a2 * c0;
            if disc < 0.0 {
                return None;
            }
            let sq = disc.sqrt();
            let t = -0.5 * (b1 + b1.signum() * sq);
            let roots = [t / a2, c0 / t];
            roots.into_iter().find_map(|r| if r.is_finite() { accept(r) } else { None })
        }
    }
}
