use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::{Vector2, Vector3};
use proptest::prelude::*;

use jamgraph::corpus::random_planar;
use jamgraph::graph::{compare_embeddings, edge_length_vector, Edge, Embedding, Graph, VertexRole};
use jamgraph::io::{parse_graph, to_json, GraphFile};
use jamgraph::mcenter::{
    m_center_exact_plane, m_center_iterative, m_center_minover_sphere, radius_at, EpsilonSchedule,
    WeightedPoint,
};
use jamgraph::solver::{
    initial_embedding, is_m_representation, move_to_center, solve_stable, InitStrategy,
    SolverParams,
};
use jamgraph::surface::{distance, interpolate, tangent_frame, Shift, Surface, SurfacePoint};
use jamgraph::validation::{
    check_pseudo_embedding, faces_from_embedding, with_outer_cycle, TOL_FLAT,
};

type Vec2 = Vector2<f64>;
type Vec3 = Vector3<f64>;

fn flat() -> impl Strategy<Value = Vec2> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y)| Vec2::new(x, y))
}

fn unit(upper: bool) -> impl Strategy<Value = Vec3> {
    let z = if upper { 0.0..1.0f64 } else { -1.0..1.0f64 };
    (z, 0.0..2.0 * PI).prop_map(|(z, phi)| {
        let s = (1.0 - z * z).sqrt();
        Vec3::new(s * phi.cos(), s * phi.sin(), z)
    })
}

fn weighted(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<(Vec2, f64)>> {
    prop::collection::vec(((0.0..1.0f64, 0.0..1.0f64), 0.5..=2.0f64), n).prop_map(|v| {
        v.into_iter()
            .map(|((x, y), g)| (Vec2::new(x, y), g))
            .collect()
    })
}

fn as_weighted(pts: &[(Vec2, f64)]) -> Vec<WeightedPoint> {
    pts.iter()
        .map(|(p, g)| WeightedPoint::new(SurfacePoint::Flat(*p), *g))
        .collect()
}

fn shift() -> impl Strategy<Value = Shift> {
    (-2i64..=2, -2i64..=2).prop_map(|(a, b)| Shift::new(a, b))
}

fn solved(g: &Graph, seed: u64) -> Embedding {
    let params = SolverParams {
        rng_seed: seed,
        init: InitStrategy::Random,
        ..SolverParams::default()
    };
    let e0 = initial_embedding(g, &params, None).unwrap();
    let (e, trace) = solve_stable(g, &e0, &params).unwrap();
    assert!(trace.converged);
    e
}

fn small_planar() -> impl Strategy<Value = Graph> {
    (0u64..10_000, 3usize..=5, 2usize..=9)
        .prop_map(|(seed, outer, inner)| random_planar(seed, outer, inner, (0.5, 2.0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn triangle_inequality_plane(p in flat(), q in flat(), r in flat()) {
        let s = Surface::Plane;
        let (p, q, r) = (SurfacePoint::Flat(p), SurfacePoint::Flat(q), SurfacePoint::Flat(r));
        let d = |a, b| distance(&s, a, b, Shift::ZERO).unwrap();
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r) + 1e-12);
    }

    #[test]
    fn triangle_inequality_torus(p in flat(), q in flat(), r in flat(), s1 in shift(), s2 in shift()) {
        let s = Surface::torus(1.5, 2.0).unwrap();
        let c = |v: Vec2| s.canonicalize(SurfacePoint::Flat(v)).0;
        let (p, q, r) = (c(p), c(q), c(r));
        let lhs = distance(&s, &p, &r, s1 + s2).unwrap();
        let rhs = distance(&s, &p, &q, s1).unwrap() + distance(&s, &q, &r, s2).unwrap();
        prop_assert!(lhs <= rhs + 1e-12);
    }

    #[test]
    fn triangle_inequality_sphere(p in unit(false), q in unit(false), r in unit(false)) {
        let s = Surface::Sphere;
        let (p, q, r) = (SurfacePoint::Spherical(p), SurfacePoint::Spherical(q), SurfacePoint::Spherical(r));
        let d = |a, b| distance(&s, a, b, Shift::ZERO).unwrap();
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r) + 1e-12);
    }

    #[test]
    fn torus_distance_ignores_common_translation(p in flat(), q in flat(), t in flat(), sh in shift()) {
        let s = Surface::torus(1.5, 2.0).unwrap();
        let (p0, _) = s.canonicalize(SurfacePoint::Flat(p));
        let (q0, _) = s.canonicalize(SurfacePoint::Flat(q));
        let (p1, sp) = s.canonicalize(SurfacePoint::Flat(p0.xy() + t));
        let (q1, sq) = s.canonicalize(SurfacePoint::Flat(q0.xy() + t));
        let before = distance(&s, &p0, &q0, sh).unwrap();
        let after = distance(&s, &p1, &q1, sh + sq - sp).unwrap();
        prop_assert!((before - after).abs() <= 1e-12 * (1.0 + before));
    }

    #[test]
    fn plane_midpoint_inequality(r1 in flat(), r2 in flat(), s1 in flat(), s2 in flat()) {
        let s = Surface::Plane;
        let mid = |a: Vec2, b: Vec2| {
            interpolate(&s, &SurfacePoint::Flat(a), &SurfacePoint::Flat(b), Shift::ZERO, 0.5).unwrap().xy()
        };
        let lhs = (mid(r1, s1) - mid(r2, s2)).norm();
        prop_assert!(lhs <= ((r1 - r2).norm() + (s1 - s2).norm()) / 2.0 + 1e-12);
    }

    #[test]
    fn plane_midpoint_equality_under_parallel_transport(r1 in flat(), s1 in flat(), t in flat()) {
        let s = Surface::Plane;
        let mid = |a: Vec2, b: Vec2| {
            interpolate(&s, &SurfacePoint::Flat(a), &SurfacePoint::Flat(b), Shift::ZERO, 0.5).unwrap().xy()
        };
        let lhs = (mid(r1, s1) - mid(r1 + t, s1 + t)).norm();
        prop_assert!((lhs - t.norm()).abs() <= 1e-12);
    }

    #[test]
    fn sphere_midpoint_inequality(r1 in unit(true), r2 in unit(true), s1 in unit(true), s2 in unit(true)) {
        let s = Surface::Hemisphere;
        let mid = |a: Vec3, b: Vec3| {
            interpolate(&s, &SurfacePoint::Spherical(a), &SurfacePoint::Spherical(b), Shift::ZERO, 0.5).unwrap().xyz()
        };
        let lhs = (mid(r1, s1) - mid(r2, s2)).norm_squared();
        prop_assert!(lhs <= ((r1 - r2).norm_squared() + (s1 - s2).norm_squared()) / 2.0 + 1e-12);
    }

    #[test]
    fn radius_is_convex(pts in weighted(1..=8), a in flat(), b in flat()) {
        let w = as_weighted(&pts);
        let f = |p: Vec2| radius_at(&Surface::Plane, &SurfacePoint::Flat(p), &w).unwrap();
        prop_assert!(f((a + b) / 2.0) <= (f(a) + f(b)) / 2.0 + 1e-12);
    }

    #[test]
    fn non_centers_have_an_improving_direction(pts in weighted(2..=8), x in flat()) {
        let w = as_weighted(&pts);
        let c = m_center_exact_plane(&w).unwrap();
        prop_assume!((x - c.center.xy()).norm() > 1e-3);
        let f = |p: Vec2| radius_at(&Surface::Plane, &SurfacePoint::Flat(p), &w).unwrap();
        let (fx, h) = (f(x), 1e-6);
        let improves = (0..64).any(|k| {
            let a = 2.0 * PI * k as f64 / 64.0;
            f(x + Vec2::new(a.cos(), a.sin()) * h) < fx
        });
        prop_assert!(improves);
    }

    #[test]
    fn active_set_determines_the_center(pts in weighted(1..=10)) {
        let w = as_weighted(&pts);
        let full = m_center_exact_plane(&w).unwrap();
        let active: Vec<WeightedPoint> = full.active_set.iter().map(|&i| w[i]).collect();
        let reduced = m_center_exact_plane(&active).unwrap();
        prop_assert!((full.center.xy() - reduced.center.xy()).norm() <= 1e-9);
        prop_assert!((full.radius - reduced.radius).abs() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_and_iterative_centers_agree(pts in weighted(1..=10)) {
        let w = as_weighted(&pts);
        let exact = m_center_exact_plane(&w).unwrap();
        let start = SurfacePoint::Flat(pts.iter().map(|(p, _)| p).sum::<Vec2>() / pts.len() as f64);
        let schedule = EpsilonSchedule::new(0.5, 3.0).unwrap();
        let it = m_center_iterative(&Surface::Plane, &w, schedule, start, 0.0, 150_000).unwrap();
        prop_assert!((it.center.xy() - exact.center.xy()).norm() <= 1e-5);
    }

    #[test]
    fn minover_matches_iterative_in_a_cap(
        axis in unit(false),
        offsets in prop::collection::vec((0.5..1.0f64, 0.0..2.0 * PI), 3..=10),
    ) {
        let (e1, e2) = tangent_frame(&axis);
        let pts: Vec<Vec3> = offsets
            .iter()
            .map(|&(z, phi)| {
                let s = (1.0 - z * z).sqrt();
                axis * z + e1 * (s * phi.cos()) + e2 * (s * phi.sin())
            })
            .collect();
        let mo = m_center_minover_sphere(&pts, 100_000).unwrap();
        let w: Vec<WeightedPoint> = pts.iter().map(|p| WeightedPoint::new(SurfacePoint::Spherical(*p), 1.0)).collect();
        let start = SurfacePoint::Spherical(pts.iter().sum::<Vec3>().normalize());
        let schedule = EpsilonSchedule::new(0.5, 3.0).unwrap();
        let it = m_center_iterative(&Surface::Sphere, &w, schedule, start, 0.0, 150_000).unwrap();
        prop_assert!(mo.converged);
        prop_assert!((mo.center.xyz() - it.center.xyz()).norm() <= 1e-4);
    }

    #[test]
    fn comparison_is_a_total_preorder(g in small_planar(), seeds in (0u64..100, 100u64..200, 200u64..300)) {
        let init = |s| {
            let params = SolverParams { rng_seed: s, init: InitStrategy::Random, ..SolverParams::default() };
            initial_embedding(&g, &params, None).unwrap()
        };
        let es = [init(seeds.0), init(seeds.1), init(seeds.2)];
        for a in &es {
            for b in &es {
                prop_assert_eq!(compare_embeddings(&g, a, b), compare_embeddings(&g, b, a).reverse());
                for c in &es {
                    let (ab, bc) = (compare_embeddings(&g, a, b), compare_embeddings(&g, b, c));
                    if ab == Ordering::Less && bc == Ordering::Less {
                        prop_assert_eq!(compare_embeddings(&g, a, c), Ordering::Less);
                    }
                }
            }
        }
    }

    #[test]
    fn length_vector_ignores_edge_order(g in small_planar(), seed in 0u64..1000, rot in 0usize..100) {
        let params = SolverParams { rng_seed: seed, init: InitStrategy::Random, ..SolverParams::default() };
        let e = initial_embedding(&g, &params, None).unwrap();
        let mut edges: Vec<Edge> = g.edges().to_vec();
        edges.reverse();
        let k = rot % edges.len();
        edges.rotate_left(k);
        let h = Graph::new(*g.surface(), g.roles().to_vec(), edges);
        prop_assert_eq!(edge_length_vector(&g, &e), edge_length_vector(&h, &e));
    }

    #[test]
    fn graph_files_round_trip(g in small_planar()) {
        let text = to_json(&GraphFile::from_graph(&g, None));
        let (back, _) = parse_graph(&text).unwrap().to_graph().unwrap();
        prop_assert_eq!(to_json(&GraphFile::from_graph(&back, None)), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solved_planar_graphs_are_convex_pseudo_embeddings(g in small_planar(), seed in 0u64..1000) {
        let e = solved(&g, seed);
        prop_assert!(is_m_representation(&g, &e, SolverParams::default().tol_mrep).unwrap().is_m_representation);
        let go = with_outer_cycle(&g);
        let faces = faces_from_embedding(&go, &e, TOL_FLAT).unwrap();
        prop_assert_eq!(faces.euler_characteristic(&go), 2);
        prop_assert!(check_pseudo_embedding(&go, &e, &faces).unwrap().is_pseudo_embedding);
    }

    #[test]
    fn solves_are_deterministic(g in small_planar(), seed in 0u64..1000) {
        let params = SolverParams { rng_seed: seed, init: InitStrategy::Random, ..SolverParams::default() };
        let run = || {
            let e0 = initial_embedding(&g, &params, None).unwrap();
            solve_stable(&g, &e0, &params).unwrap()
        };
        let ((e1, t1), (e2, t2)) = (run(), run());
        prop_assert_eq!(e1, e2);
        prop_assert_eq!(to_json(&t1), to_json(&t2));
    }

    #[test]
    fn centering_a_nudged_vertex_compares_less(
        g in small_planar(),
        seed in 0u64..1000,
        pick in 0usize..100,
        angle in 0.0..2.0 * PI,
    ) {
        let e = solved(&g, seed);
        let inner: Vec<usize> = g.inner_vertices().collect();
        let v = inner[pick % inner.len()];
        let mut nudged = e.clone();
        nudged.positions[v] = SurfacePoint::Flat(e.positions[v].xy() + Vec2::new(angle.cos(), angle.sin()) * 1e-3);
        let moved = move_to_center(&g, &nudged, v).unwrap();
        prop_assert_eq!(compare_embeddings(&g, &moved, &nudged), Ordering::Less);
    }
}

#[test]
fn outer_vertices_stay_fixed_under_solving() {
    let g = random_planar(3, 4, 8, (0.5, 2.0));
    let e = solved(&g, 5);
    for v in g.outer_vertices() {
        if let VertexRole::OuterFixed(p) = g.role(v) {
            assert_eq!(&e.positions[v], p);
        }
    }
}

/// Steps shrink like 1/k, so after 150k steps the iterative radius is still
/// about 1e-7 above the exact one; 1e-9 would take on the order of 1e9 steps.
#[test]
#[ignore = "iterative radius is about 1e-7 above exact after 150k steps"]
fn exact_and_iterative_radii_agree_to_1e9() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    let schedule = EpsilonSchedule::new(0.5, 3.0).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=10);
        let pts: Vec<(Vec2, f64)> = (0..n)
            .map(|_| {
                let p = Vec2::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
                (p, rng.gen_range(0.5..=2.0))
            })
            .collect();
        let w = as_weighted(&pts);
        let exact = m_center_exact_plane(&w).unwrap();
        let start = SurfacePoint::Flat(pts.iter().map(|(p, _)| p).sum::<Vec2>() / n as f64);
        let it = m_center_iterative(&Surface::Plane, &w, schedule, start, 0.0, 150_000).unwrap();
        worst = worst.max((it.radius - exact.radius).abs());
    }
    assert!(worst <= 1e-9, "worst radius gap {worst:e}");
}
