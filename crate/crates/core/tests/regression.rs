use jamgraph::corpus::{
    demo13_plane, demo13_sphere, equator_bistable, icosahedron, pocket5, pull_equator, square4pack,
    square5, torus_hex, EQUATOR_N, EQUATOR_PULL, POCKET_TILT_DEG,
};
use jamgraph::graph::{Embedding, Graph};
use jamgraph::solver::{
    initial_embedding, is_m_representation, perturb_and_compare, solve_stable, SolverParams,
};
use jamgraph::surface::SurfacePoint;
use jamgraph::validation::{
    check_pseudo_embedding, faces_from_embedding, jamming_report, three_connected,
    with_outer_cycle, Verdict, TOL_FLAT,
};

fn solve(g: &Graph, start: Option<Vec<SurfacePoint>>) -> Embedding {
    let params = SolverParams::default();
    let given: Option<Vec<Option<SurfacePoint>>> = start.map(|s| s.into_iter().map(Some).collect());
    let e0 = initial_embedding(g, &params, given.as_deref()).unwrap();
    let (e, trace) = solve_stable(g, &e0, &params).unwrap();
    assert!(trace.converged);
    assert!(
        is_m_representation(g, &e, params.tol_mrep)
            .unwrap()
            .is_m_representation
    );
    e
}

fn solved_corpus() -> Vec<(&'static str, Graph, Embedding)> {
    let (eq, start) = equator_bistable(EQUATOR_N);
    let up = pull_equator(&start, true, EQUATOR_PULL);
    let down = pull_equator(&start, false, EQUATOR_PULL);
    let mut out = Vec::new();
    for (name, g, s) in [
        ("square5", square5(), None),
        ("demo13_plane", demo13_plane(), None),
        ("demo13_sphere", demo13_sphere(), None),
        ("icosahedron", icosahedron(), None),
        ("torus_hex", torus_hex(4, 4), None),
        ("equator_up", eq.clone(), Some(up)),
        ("equator_down", eq, Some(down)),
    ] {
        let e = solve(&g, s);
        out.push((name, g, e));
    }
    out
}

#[test]
fn solved_corpus_graphs_are_convex_pseudo_embeddings() {
    for (name, g, e) in solved_corpus() {
        if !three_connected(&g, true) {
            continue;
        }
        let go = with_outer_cycle(&g);
        let faces = faces_from_embedding(&go, &e, TOL_FLAT).unwrap();
        let report = check_pseudo_embedding(&go, &e, &faces).unwrap();
        assert!(
            report.is_pseudo_embedding,
            "{name}: {:?}",
            report.violations
        );
    }
}

#[test]
fn jammed_implies_three_connected() {
    let (sq, sq_e) = square4pack();
    let (po, po_e) = pocket5(POCKET_TILT_DEG);
    let mut cases: Vec<(&str, Graph, Embedding)> = solved_corpus();
    cases.push(("square4pack", sq, sq_e));
    cases.push(("pocket5", po, po_e));
    let mut jammed = 0;
    for (name, g, e) in cases {
        let report = jamming_report(&g, &e).unwrap();
        if report.verdict == Verdict::Jammed {
            jammed += 1;
            assert!(report.three_connected, "{name}");
            assert!(three_connected(&g, true), "{name}");
        }
    }
    assert!(jammed >= 3);
}

#[test]
fn pocket_perturbations_find_an_improvement() {
    let (g, e) = pocket5(POCKET_TILT_DEG);
    let evidence = perturb_and_compare(&g, &e, 1e-4, 100_000, 11).unwrap();
    assert!(evidence.less > 0, "{evidence:?}");
}

#[test]
fn square_pack_perturbations_never_improve() {
    let (g, e) = square4pack();
    let evidence = perturb_and_compare(&g, &e, 1e-4, 10_000, 3).unwrap();
    assert_eq!(evidence.less, 0);
}
