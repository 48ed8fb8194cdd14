use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fem::{basis_gradients, ProblemParams, ScalarField};
use crate::insulation::InsulationDistribution;
use crate::mesh::{dist, Point, Region, TriangleMesh};

// 5-point Gauss-Legendre rule on [0, 1]
const GAUSS_NODES: [f64; 5] =
    [0.046_910_077_030_668_0, 0.230_765_344_947_158_5, 0.5, 0.769_234_655_052_841_5, 0.953_089_922_969_332];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.118_463_442_528_094_5,
    0.239_314_335_249_683_2,
    0.284_444_444_444_444_4,
    0.239_314_335_249_683_2,
    0.118_463_442_528_094_5,
];

/// Superlevel-set quantities of a field at one threshold `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSetSample {
    pub t: f64,
    /// `μ(t) = |{u > t}|`
    pub mu: f64,
    /// `P(t)`: length of `{u = t}` plus length of `∂Ω ∩ {u > t}`.
    pub per: f64,
    /// `−μ'(t)`, exact for the piecewise-linear field.
    pub neg_dmu: f64,
    /// `∫_{u=t} 1/|∇u|` with the recovered gradient. Equals `−μ'(t)` for
    /// smooth fields without plateaus; used in both inequalities.
    pub coarea: f64,
    /// `∫_{u=t} |∇u|` with the recovered gradient.
    pub level_flux: f64,
    /// `∫_{∂Ω ∩ {u>t}} (1+βh)/(βu)`
    pub boundary_resistance: f64,
    /// `∫_{∂Ω ∩ {u>t}} βu/(1+βh)`
    pub boundary_flux: f64,
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        (lhs - rhs) / rhs
    } else if lhs > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

impl LevelSetSample {
    /// `(P², μ(−μ' + ∫(1+βh)/(βu)))`
    pub fn psquare(&self) -> (f64, f64) {
        (self.per * self.per, self.mu * (self.coarea + self.boundary_resistance))
    }

    /// `(μ, (1/(4π))(−μ'μ + |Ω| ∫(1+βh)/(βu)))` in two dimensions.
    pub fn master(&self, area: f64) -> (f64, f64) {
        (self.mu, (self.coarea * self.mu + area * self.boundary_resistance) / (4.0 * PI))
    }

    /// Relative violation `(lhs − rhs)/rhs`; negative when the inequality holds.
    pub fn psquare_violation(&self) -> f64 {
        let (l, r) = self.psquare();
        ratio(l, r)
    }

    pub fn master_violation(&self, area: f64) -> f64 {
        let (l, r) = self.master(area);
        ratio(l, r)
    }

    /// Relative defect of `μ(t) = ∫_{u=t}|∇u| + ∫_{∂Ω∩{u>t}} βu/(1+βh)`.
    pub fn flux_defect(&self) -> f64 {
        let rhs = self.level_flux + self.boundary_flux;
        if self.mu > 0.0 {
            (self.mu - rhs).abs() / self.mu
        } else {
            rhs
        }
    }
}

fn lerp(a: Point, b: Point, s: f64) -> Point {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

struct Cut {
    area: f64,
    len: f64,
    /// `∫ 1/|G|` and `∫ |G|` along the level segment, `G` the recovered gradient
    inv_grad: f64,
    grad: f64,
}

/// Area of `{u > t}` inside a triangle and the level segment `{u = t}`
/// across it, with the recovered gradient interpolated along the segment.
fn cut_triangle(p: [Point; 3], u: [f64; 3], g: [[f64; 2]; 3], t: f64, area: f64) -> Cut {
    let above: Vec<usize> = (0..3).filter(|&k| u[k] > t).collect();
    let (inner, ends) = match above.len() {
        0 => return Cut { area: 0.0, len: 0.0, inv_grad: 0.0, grad: 0.0 },
        3 => return Cut { area, len: 0.0, inv_grad: 0.0, grad: 0.0 },
        1 => {
            let a = above[0];
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            let sb = (u[a] - t) / (u[a] - u[b]);
            let sc = (u[a] - t) / (u[a] - u[c]);
            (area * sb * sc, [(a, b, sb), (a, c, sc)])
        }
        _ => {
            let c = (0..3).find(|k| !above.contains(k)).unwrap();
            let (a, b) = ((c + 1) % 3, (c + 2) % 3);
            let ra = (t - u[c]) / (u[a] - u[c]);
            let rb = (t - u[c]) / (u[b] - u[c]);
            (area * (1.0 - ra * rb), [(c, a, ra), (c, b, rb)])
        }
    };
    let [(i0, j0, s0), (i1, j1, s1)] = ends;
    let len = dist(lerp(p[i0], p[j0], s0), lerp(p[i1], p[j1], s1));
    let (g0, g1) = (lerp(g[i0], g[j0], s0), lerp(g[i1], g[j1], s1));
    let (mut inv_grad, mut grad) = (0.0, 0.0);
    for (x, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
        let gq = lerp(g0, g1, *x);
        let n = gq[0].hypot(gq[1]);
        inv_grad += w * len / n;
        grad += w * len * n;
    }
    Cut { area: inner, len, inv_grad, grad }
}

/// Area-weighted average of the element gradients around each vertex.
fn recovered_gradients(mesh: &TriangleMesh, v: &[f64]) -> Vec<[f64; 2]> {
    let mut acc = vec![[0.0; 2]; mesh.vertex_count()];
    let mut weight = vec![0.0; mesh.vertex_count()];
    for (k, tri) in mesh.triangles().iter().enumerate() {
        if mesh.regions()[k] != Region::Body {
            continue;
        }
        let (g, area) = basis_gradients(mesh.triangle_points(k));
        let gx: f64 = (0..3).map(|i| v[tri[i]] * g[i][0]).sum();
        let gy: f64 = (0..3).map(|i| v[tri[i]] * g[i][1]).sum();
        for &n in tri {
            acc[n][0] += area * gx;
            acc[n][1] += area * gy;
            weight[n] += area;
        }
    }
    acc.iter().zip(&weight).map(|(a, &w)| if w > 0.0 { [a[0] / w, a[1] / w] } else { [0.0; 2] }).collect()
}

/// Evaluates the superlevel-set quantities at a single threshold.
pub fn level_set_sample(
    mesh: &TriangleMesh,
    u: &ScalarField,
    h: &InsulationDistribution,
    params: &ProblemParams,
    t: f64,
) -> Result<LevelSetSample> {
    u.check_mesh(mesh)?;
    sample_with(mesh, u, &recovered_gradients(mesh, &u.values), h, params, t)
}

fn sample_with(
    mesh: &TriangleMesh,
    u: &ScalarField,
    rec: &[[f64; 2]],
    h: &InsulationDistribution,
    params: &ProblemParams,
    t: f64,
) -> Result<LevelSetSample> {
    let v = &u.values;
    let mut s = LevelSetSample {
        t,
        mu: 0.0,
        per: 0.0,
        neg_dmu: 0.0,
        coarea: 0.0,
        level_flux: 0.0,
        boundary_resistance: 0.0,
        boundary_flux: 0.0,
    };
    for (k, tri) in mesh.triangles().iter().enumerate() {
        if mesh.regions()[k] != Region::Body {
            continue;
        }
        let p = mesh.triangle_points(k);
        let (g, area) = basis_gradients(p);
        let vals = [v[tri[0]], v[tri[1]], v[tri[2]]];
        let cut = cut_triangle(p, vals, [rec[tri[0]], rec[tri[1]], rec[tri[2]]], t, area);
        s.mu += cut.area;
        if cut.len > 0.0 {
            let gx: f64 = (0..3).map(|i| vals[i] * g[i][0]).sum();
            let gy: f64 = (0..3).map(|i| vals[i] * g[i][1]).sum();
            s.per += cut.len;
            s.neg_dmu += cut.len / gx.hypot(gy);
            s.coarea += cut.inv_grad;
            s.level_flux += cut.grad;
        }
    }
    let b = h.boundary();
    let hv = h.values();
    let beta = params.beta;
    for (&[i, j], &len) in b.edges().iter().zip(b.edge_lengths()) {
        let (ui, uj) = (v[b.node_ids()[i]], v[b.node_ids()[j]]);
        let (hi, hj) = (hv[i], hv[j]);
        // parameter interval of the edge where u > t
        let (s0, s1) = if ui > t && uj > t {
            (0.0, 1.0)
        } else if ui > t {
            (0.0, (ui - t) / (ui - uj))
        } else if uj > t {
            ((t - ui) / (uj - ui), 1.0)
        } else {
            continue;
        };
        let sub = len * (s1 - s0);
        s.per += sub;
        for (x, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
            let q = s0 + x * (s1 - s0);
            let uq = ui + q * (uj - ui);
            let hq = hi + q * (hj - hi);
            s.boundary_resistance += w * sub * (1.0 + beta * hq) / (beta * uq);
            s.boundary_flux += w * sub * beta * uq / (1.0 + beta * hq);
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetProfile {
    pub samples: Vec<LevelSetSample>,
    /// `|Ω|`
    pub area: f64,
}

impl LevelSetProfile {
    /// CSV with header `t,mu,per,lhs_psquare,rhs_psquare,lhs_master,rhs_master`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,mu,per,lhs_psquare,rhs_psquare,lhs_master,rhs_master\n");
        for s in &self.samples {
            let (lp, rp) = s.psquare();
            let (lm, rm) = s.master(self.area);
            let _ = writeln!(out, "{:?},{:?},{:?},{lp:?},{rp:?},{lm:?},{rm:?}", s.t, s.mu, s.per);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetReport {
    pub profile: LevelSetProfile,
    /// Largest relative violation of `P² ≤ μ(−μ' + ∫(1+βh)/(βu))`.
    pub worst_psquare: f64,
    /// Largest relative violation of the isoperimetric consequence.
    pub worst_master: f64,
    /// Largest relative defect of the flux identity for `μ(t)`.
    pub worst_flux_defect: f64,
}

/// Samples the superlevel sets of a positive field at the midpoints
/// `t_k = (k + ½) max u / samples` and checks both level-set inequalities.
pub fn level_set_diagnostic(
    mesh: &TriangleMesh,
    u: &ScalarField,
    h: &InsulationDistribution,
    params: &ProblemParams,
    samples: usize,
) -> Result<LevelSetReport> {
    u.check_mesh(mesh)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one threshold is needed".into()));
    }
    let max = u.max();
    let min = u.min();
    if !(max > 0.0) || min < -1e-8 * max {
        return Err(Error::SignIndefinite { min });
    }
    let area = mesh.region_area(Region::Body);
    let rec = recovered_gradients(mesh, &u.values);
    let mut out = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = (k as f64 + 0.5) / samples as f64 * max;
        out.push(sample_with(mesh, u, &rec, h, params, t)?);
    }
    let worst = |f: &dyn Fn(&LevelSetSample) -> f64| out.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let worst_psquare = worst(&|s| s.psquare_violation());
    let worst_master = worst(&|s| s.master_violation(area));
    let worst_flux_defect = worst(&|s| s.flux_defect());
    Ok(LevelSetReport {
        profile: LevelSetProfile { samples: out, area },
        worst_psquare,
        worst_master,
        worst_flux_defect,
    })
}
