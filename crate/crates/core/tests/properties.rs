use std::f64::consts::PI;

use proptest::prelude::*;
use robin_insulate_core::fem::{assemble_limit_energy, limit_energy, solve, ProblemParams, ScalarField, SourceField};
use robin_insulate_core::insulation::{
    optimal_h_detailed, threshold_constant, threshold_constant_with, threshold_function, InsulationDistribution,
    TraceQuadrature,
};
use robin_insulate_core::mesh::{make_disk_mesh, make_polygon_mesh, BoundaryMap, BoundaryTrace};

fn circle(level: u32) -> BoundaryMap {
    make_disk_mesh(1.0, level).unwrap().boundary_map()
}

fn trace_strategy() -> impl Strategy<Value = (u32, Vec<f64>)> {
    (1u32..=3).prop_flat_map(|level| {
        let n = circle(level).len();
        (Just(level), prop::collection::vec(prop_oneof![Just(0.0), -3.0..3.0f64], n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn threshold_balances_both_sides((level, vals) in trace_strategy(), beta in 0.01..50.0f64, mass in 0.01..50.0f64, pl in any::<bool>()) {
        let b = circle(level);
        let p = ProblemParams::new(beta, mass).unwrap();
        let q = if pl { TraceQuadrature::PiecewiseLinear } else { TraceQuadrature::Lumped };
        let trace = BoundaryTrace::new(vals);
        let r = threshold_constant_with(&trace, &b, &p, q);
        prop_assert!(r.c >= 0.0 && r.c <= trace.max_abs());
        prop_assert_eq!(r.c == 0.0, trace.max_abs() == 0.0);
        let g = threshold_function(&trace, &b, q, r.c) - mass * beta * r.c;
        prop_assert!(g.abs() <= 1e-12 * r.scale, "residual {} scale {}", g, r.scale);
        // g₁ − g₂ is decreasing: positive below c, negative above
        if r.c > 0.0 {
            prop_assert!(threshold_function(&trace, &b, q, 0.5 * r.c) - mass * beta * 0.5 * r.c > 0.0);
            let up = 0.5 * (r.c + trace.max_abs()) + 1e-3;
            prop_assert!(threshold_function(&trace, &b, q, up) - mass * beta * up < 0.0);
        }
    }

    #[test]
    fn optimal_h_conserves_mass((level, vals) in trace_strategy(), beta in 0.01..50.0f64, mass in 0.01..50.0f64) {
        let b = circle(level);
        let p = ProblemParams::new(beta, mass).unwrap();
        let trace = BoundaryTrace::new(vals);
        prop_assume!(trace.max_abs() > 0.0);
        let o = optimal_h_detailed(&trace, &b, &p).unwrap();
        prop_assert!((o.h.mass() - mass).abs() <= 1e-8 * mass);
        prop_assert!((o.renormalization - 1.0).abs() < 1e-9);
        prop_assert!(o.h.values().iter().all(|&h| h >= 0.0));
        for (h, v) in o.h.values().iter().zip(&trace.values) {
            prop_assert_eq!(*h > 0.0, v.abs() > o.threshold.c);
        }
    }

    #[test]
    fn lumped_and_linear_thresholds_agree_for_constant_traces(a in 0.01..10.0f64, beta in 0.1..10.0f64, mass in 0.1..10.0f64) {
        let b = circle(2);
        let p = ProblemParams::new(beta, mass).unwrap();
        let t = BoundaryTrace::constant(&b, a);
        let c1 = threshold_constant(&t, &b, &p).c;
        let c2 = threshold_constant_with(&t, &b, &p, TraceQuadrature::PiecewiseLinear).c;
        prop_assert!((c1 - c2).abs() <= 1e-13 * a);
    }
}

#[test]
fn galerkin_minimizer_beats_perturbations() {
    use rand::{Rng, SeedableRng};
    let m = make_disk_mesh(1.0, 3).unwrap();
    let p = ProblemParams::new(1.0, 1.0).unwrap();
    let f = SourceField::Constant(1.0);
    let h = InsulationDistribution::uniform_mass(m.boundary_map(), p.mass).unwrap();
    let u = solve(&assemble_limit_energy(&m, &h, &p, &f).unwrap(), 1e-12, 10_000).unwrap();
    let e = limit_energy(&m, &u, &h, &p, &f).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let scale = 10f64.powi(rng.gen_range(-4..=0));
        let w = ScalarField::new(u.values.iter().map(|x| x + scale * rng.gen_range(-1.0..1.0)).collect());
        assert!(limit_energy(&m, &w, &h, &p, &f).unwrap() > e);
    }
}

#[test]
fn minimizer_is_positive_with_radial_floor() {
    // the bare (h = 0) radial solution bounds every insulated solution from below
    let m = make_disk_mesh(1.0, 4).unwrap();
    let p = ProblemParams::new(1.0, 2.0 * PI).unwrap();
    let h = InsulationDistribution::uniform_mass(m.boundary_map(), p.mass).unwrap();
    let u = solve(&assemble_limit_energy(&m, &h, &p, &SourceField::Constant(1.0)).unwrap(), 1e-10, 20_000).unwrap();
    let floor = 1.0 / 2.0;
    assert!(u.min() >= floor * (1.0 - 1e-3), "min {}", u.min());
}

#[test]
fn polygon_boundary_normals_close_up() {
    let m = make_polygon_mesh(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]], 0.2).unwrap();
    for lp in m.boundary_loops() {
        let (mut sx, mut sy, mut per) = (0.0, 0.0, 0.0);
        for &e in &lp {
            let be = &m.boundary_edges()[e];
            sx += be.normal[0] * be.length;
            sy += be.normal[1] * be.length;
            per += be.length;
        }
        assert!(sx.hypot(sy) <= 1e-10 * per);
    }
}
