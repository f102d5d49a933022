//! Checks on solved embeddings: faces and pseudo-embeddings, regularity,
//! connectivity, hull containment, degree bounds and first-order jamming.

mod faces;
mod jamming;

use std::collections::HashMap;

use serde::Serialize;

pub use faces::{
    check_pseudo_embedding, faces_from_embedding, faces_match, outer_cycle_order, FaceList,
    FaceSource, PseudoEmbeddingReport, PseudoViolation, PseudoViolationKind, TOL_CORNER, TOL_FLAT,
};
pub use jamming::{
    check_first_order_jammed, flex_dimension, replay_witness, witness_derivatives, FirstOrder,
    LP_THRESHOLD,
};

use crate::error::Result;
use crate::geometry::{convex_hull, convex_margin, segment_distance};
use crate::graph::{Edge, Embedding, Graph, VertexId};
use crate::solver::{perturb_and_compare, StabilityEvidence};
use crate::surface::{Shift, Surface, Vec2};

/// Whether `g` (plus the cycle through its outer vertices in angular order,
/// if requested) has more than three vertices and no separating pair.
pub fn three_connected(g: &Graph, with_outer_cycle: bool) -> bool {
    let n = g.num_vertices();
    if n <= 3 {
        return false;
    }
    let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    let mut link = |a: VertexId, b: VertexId| {
        if a != b && !adj[a].contains(&b) {
            adj[a].push(b);
            adj[b].push(a);
        }
    };
    for e in g.edges() {
        link(e.u, e.v);
    }
    if with_outer_cycle {
        let cycle = outer_cycle_order(g);
        if cycle.len() >= 2 {
            for i in 0..cycle.len() {
                link(cycle[i], cycle[(i + 1) % cycle.len()]);
            }
        }
    }
    let connected_without = |a: VertexId, b: VertexId| -> bool {
        let start = (0..n)
            .find(|&v| v != a && v != b)
            .expect("more than three vertices");
        let mut seen = vec![false; n];
        seen[a] = true;
        seen[b] = true;
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n - 2
    };
    (0..n).all(|a| (a + 1..n).all(|b| connected_without(a, b)))
}

/// `g` plus the missing edges of the cycle through its outer vertices in
/// angular order; unchanged with fewer than three outer vertices.
pub fn with_outer_cycle(g: &Graph) -> Graph {
    let cycle = outer_cycle_order(g);
    if cycle.len() < 3 {
        return g.clone();
    }
    let adjacent = |a: VertexId, b: VertexId| g.neighbors(a).iter().any(|inc| inc.other == b);
    let missing: Vec<Edge> = (0..cycle.len())
        .map(|i| (cycle[i], cycle[(i + 1) % cycle.len()]))
        .filter(|&(a, b)| !adjacent(a, b))
        .map(|(a, b)| Edge::new(a, b))
        .collect();
    g.with_extra_edges(missing)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HullReport {
    pub ok: bool,
    /// Inner vertices outside the hull of the outer positions.
    pub outside: Vec<VertexId>,
    /// Outer vertices without an inner neighbor.
    pub isolated_outer: Vec<VertexId>,
}

/// Every inner vertex lies in the hull of the outer positions (projected to
/// the equator plane on the hemisphere) and every outer vertex has an inner
/// neighbor. Passes vacuously without outer vertices or on the sphere.
pub fn convex_hull_check(g: &Graph, e: &Embedding) -> Result<HullReport> {
    e.check(g)?;
    let isolated_outer: Vec<VertexId> = g
        .outer_vertices()
        .filter(|&v| !g.neighbors(v).iter().any(|inc| g.is_inner(inc.other)))
        .collect();
    let mut outside = Vec::new();
    let planar = matches!(g.surface(), Surface::Plane | Surface::Hemisphere);
    if planar && g.has_outer() {
        let proj = |v: VertexId| -> Vec2 {
            match g.surface() {
                Surface::Plane => e.positions[v].xy(),
                _ => e.positions[v].xyz().xy(),
            }
        };
        let outer: Vec<Vec2> = g.outer_vertices().map(proj).collect();
        let scale = outer.iter().map(|p| p.norm()).fold(1.0, f64::max);
        let tol = 1e-9 * scale;
        let hull: Vec<Vec2> = convex_hull(&outer).into_iter().map(|i| outer[i]).collect();
        for v in g.inner_vertices() {
            let p = proj(v);
            let inside = match hull.len() {
                0 => false,
                1 => (p - hull[0]).norm() <= tol,
                2 => segment_distance(&p, &hull[0], &hull[1]) <= tol,
                _ => convex_margin(&p, &hull) >= -tol,
            };
            if !inside {
                outside.push(v);
            }
        }
    }
    Ok(HullReport {
        ok: outside.is_empty() && isolated_outer.is_empty(),
        outside,
        isolated_outer,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityReport {
    pub regular: bool,
    /// Mean rescaled length of the contact edges.
    pub d: f64,
    /// Largest relative deviation of a contact edge's rescaled length from `d`.
    pub max_edge_deviation: f64,
    /// Non-adjacent pair with the smallest ratio of rescaled distance to
    /// `d`, and that ratio.
    pub closest_non_edge: Option<(VertexId, VertexId, f64)>,
}

/// Rescale factors for non-adjacent pairs (unordered), default 1.
#[derive(Clone, Debug, PartialEq)]
pub struct NonEdgeGamma {
    pub default: f64,
    pub pairs: HashMap<(VertexId, VertexId), f64>,
}

impl Default for NonEdgeGamma {
    fn default() -> Self {
        NonEdgeGamma {
            default: 1.0,
            pairs: HashMap::new(),
        }
    }
}

impl NonEdgeGamma {
    pub fn get(&self, u: VertexId, v: VertexId) -> f64 {
        *self
            .pairs
            .get(&(u.min(v), u.max(v)))
            .unwrap_or(&self.default)
    }
}

/// Contact edges: edges with at least one inner endpoint.
fn contact_edges(g: &Graph) -> impl Iterator<Item = usize> + '_ {
    (0..g.num_edges()).filter(|&i| g.is_inner_edge(i))
}

pub fn check_regular(g: &Graph, e: &Embedding, tol_rel: f64) -> Result<RegularityReport> {
    check_regular_with(g, e, tol_rel, &NonEdgeGamma::default())
}

/// Every contact edge has rescaled length `d` within `tol_rel`, and every
/// non-adjacent pair (all periodic images on the torus; pairs of outer
/// vertices excluded) has rescaled distance above `d (1 - tol_rel)`.
pub fn check_regular_with(
    g: &Graph,
    e: &Embedding,
    tol_rel: f64,
    gammas: &NonEdgeGamma,
) -> Result<RegularityReport> {
    e.check(g)?;
    let d_edges: Vec<f64> = contact_edges(g).map(|i| e.rescaled_length(g, i)).collect();
    if d_edges.is_empty() {
        return Ok(RegularityReport {
            regular: false,
            d: 0.0,
            max_edge_deviation: 0.0,
            closest_non_edge: None,
        });
    }
    let d = d_edges.iter().sum::<f64>() / d_edges.len() as f64;
    let max_edge_deviation = d_edges
        .iter()
        .map(|x| (x - d).abs() / d)
        .fold(0.0, f64::max);
    let surface = *g.surface();
    let n = g.num_vertices();
    let mut closest: Option<(VertexId, VertexId, f64)> = None;
    let mut consider = |u: VertexId, v: VertexId, dist: f64| {
        let ratio = gammas.get(u, v) * dist / d;
        if closest.is_none_or(|c| ratio < c.2) {
            closest = Some((u, v, ratio));
        }
    };
    let torus = matches!(surface, Surface::Torus { .. });
    let range: Vec<i64> = if torus { vec![-1, 0, 1] } else { vec![0] };
    for u in 0..n {
        for v in u..n {
            if !g.is_inner(u) && !g.is_inner(v) {
                continue;
            }
            for &wx in &range {
                for &wy in &range {
                    let w = Shift::new(wx, wy);
                    if u == v && w.is_zero() {
                        continue;
                    }
                    if u == v && !torus {
                        continue;
                    }
                    let adjacent = g
                        .neighbors(u)
                        .iter()
                        .any(|inc| inc.other == v && (!torus || e.incidence_shift(u, inc) == w));
                    if adjacent {
                        continue;
                    }
                    let dist = if surface.is_flat() {
                        (e.positions[v].xy() + surface.shift_vector(w) - e.positions[u].xy()).norm()
                    } else {
                        (e.positions[v].xyz() - e.positions[u].xyz()).norm()
                    };
                    consider(u, v, dist);
                }
            }
        }
    }
    let regular = max_edge_deviation <= tol_rel && closest.is_none_or(|c| c.2 > 1.0 - tol_rel);
    Ok(RegularityReport {
        regular,
        d,
        max_edge_deviation,
        closest_non_edge: closest,
    })
}

/// Inner degrees between 3 and 5 on spherical surfaces, 3 and 6 on flat
/// ones.
pub fn degree_bounds(g: &Graph) -> bool {
    let max = if g.surface().is_spherical() { 5 } else { 6 };
    g.inner_vertices().all(|v| (3..=max).contains(&g.degree(v)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PackingLimit {
    Pair(VertexId, VertexId),
    Boundary(VertexId),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PackingRadius {
    /// Length on flat surfaces, central angle in radians on spherical ones.
    pub radius: f64,
    pub limit: PackingLimit,
}

/// Largest common disk radius at the given centers: half the smallest pair
/// distance (central angle on the sphere), capped on bounded regions by the
/// distance to the boundary of the outer anchors' hull (the equator on the
/// hemisphere). Disks sit at inner vertices when outer vertices exist.
pub fn packing_radius(g: &Graph, e: &Embedding) -> Result<Option<PackingRadius>> {
    e.check(g)?;
    let centers: Vec<VertexId> = if g.has_outer() {
        g.inner_vertices().collect()
    } else {
        (0..g.num_vertices()).collect()
    };
    let surface = *g.surface();
    let mut best: Option<PackingRadius> = None;
    let mut offer = |radius: f64, limit: PackingLimit| {
        if best.is_none_or(|b| radius < b.radius) {
            best = Some(PackingRadius { radius, limit });
        }
    };
    for (k, &u) in centers.iter().enumerate() {
        for &v in &centers[k..] {
            match surface {
                Surface::Plane => {
                    if u != v {
                        offer(
                            (e.positions[v].xy() - e.positions[u].xy()).norm() / 2.0,
                            PackingLimit::Pair(u, v),
                        );
                    }
                }
                Surface::Torus { .. } => {
                    for wx in -1..=1 {
                        for wy in -1..=1 {
                            let w = Shift::new(wx, wy);
                            if u == v && w.is_zero() {
                                continue;
                            }
                            let d =
                                e.positions[v].xy() + surface.shift_vector(w) - e.positions[u].xy();
                            offer(d.norm() / 2.0, PackingLimit::Pair(u, v));
                        }
                    }
                }
                Surface::Sphere | Surface::Hemisphere => {
                    if u != v {
                        let c = e.positions[u]
                            .xyz()
                            .dot(&e.positions[v].xyz())
                            .clamp(-1.0, 1.0);
                        offer(c.acos() / 2.0, PackingLimit::Pair(u, v));
                    }
                }
            }
        }
    }
    match surface {
        Surface::Plane if g.has_outer() => {
            let anchors = g.outer_anchor_points();
            let hull: Vec<Vec2> = convex_hull(&anchors)
                .into_iter()
                .map(|i| anchors[i])
                .collect();
            if hull.len() >= 3 {
                for &v in &centers {
                    offer(
                        convex_margin(&e.positions[v].xy(), &hull).max(0.0),
                        PackingLimit::Boundary(v),
                    );
                }
            }
        }
        Surface::Hemisphere => {
            for &v in &centers {
                offer(
                    e.positions[v].xyz().z.clamp(0.0, 1.0).asin(),
                    PackingLimit::Boundary(v),
                );
            }
        }
        _ => {}
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Jammed,
    NotJammed,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JammingReport {
    pub regular: bool,
    pub d: f64,
    pub hull_ok: bool,
    pub three_connected: bool,
    pub degree_bounds_ok: bool,
    pub first_order_rigid: bool,
    pub lp_optimum: f64,
    pub flex_dim: usize,
    /// Per-vertex displacement (surface coordinates) of an unjamming motion.
    pub unjamming_motion: Option<Vec<Vec<f64>>>,
    pub verdict: Verdict,
    pub perturbation: Option<StabilityEvidence>,
    pub diagnostics: Vec<String>,
}

pub const REGULAR_TOL: f64 = 1e-6;

/// Runs every jamming condition. A first-order witness or a failed
/// condition gives NotJammed; a rigid LP with length-preserving flexes (or a
/// failed LP) gives Inconclusive. Jammed embeddings are additionally probed
/// with random perturbations, none of which may compare Less.
pub fn jamming_report(g: &Graph, e: &Embedding) -> Result<JammingReport> {
    e.check(g)?;
    let reg = check_regular(g, e, REGULAR_TOL)?;
    let hull = convex_hull_check(g, e)?;
    let tc = three_connected(g, true);
    let deg = degree_bounds(g);
    let fo = check_first_order_jammed(g, e)?;
    let mut diagnostics = Vec::new();
    diagnostics.extend(fo.diagnostic.clone());
    if !reg.regular {
        diagnostics.push(format!(
            "not regular: edge deviation {:.3e}, closest non-edge {:?}",
            reg.max_edge_deviation, reg.closest_non_edge
        ));
    }
    if !hull.ok {
        diagnostics.push(format!(
            "hull: outside {:?}, isolated outer {:?}",
            hull.outside, hull.isolated_outer
        ));
    }
    if !tc {
        diagnostics.push("graph with outer cycle is not three-connected".into());
    }
    if !deg {
        diagnostics.push("inner degree out of bounds".into());
    }
    let mut verdict = if !fo.rigid || !(reg.regular && hull.ok && tc && deg) {
        Verdict::NotJammed
    } else if fo.flex_dim > 0 || fo.diagnostic.is_some() {
        diagnostics.push(format!(
            "{} length-preserving first-order flexes",
            fo.flex_dim
        ));
        Verdict::Inconclusive
    } else {
        Verdict::Jammed
    };
    let mut perturbation = None;
    if verdict == Verdict::Jammed {
        let ev = perturb_and_compare(g, e, 1e-4, 1000, 0)?;
        if ev.less > 0 {
            diagnostics.push(format!("{} perturbations compared Less", ev.less));
            verdict = Verdict::Inconclusive;
        }
        perturbation = Some(ev);
    }
    let flat = g.surface().is_flat();
    let unjamming_motion = fo.witness.as_ref().map(|w| {
        w.iter()
            .map(|m| {
                if flat {
                    vec![m.x, m.y]
                } else {
                    vec![m.x, m.y, m.z]
                }
            })
            .collect()
    });
    Ok(JammingReport {
        regular: reg.regular,
        d: reg.d,
        hull_ok: hull.ok,
        three_connected: tc,
        degree_bounds_ok: deg,
        first_order_rigid: fo.rigid,
        lp_optimum: fo.optimum,
        flex_dim: fo.flex_dim,
        unjamming_motion,
        verdict,
        perturbation,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{
        icosahedron, icosahedron_points, square4pack, square5, torus_hex, torus_hex_lattice,
    };
    use crate::graph::VertexRole;
    use crate::surface::SurfacePoint;

    fn inner_graph(surface: Surface, n: usize, edges: &[(usize, usize)]) -> Graph {
        let edges = edges.iter().map(|&(u, v)| Edge::new(u, v)).collect();
        Graph::new(surface, vec![VertexRole::Inner; n], edges)
    }

    #[test]
    fn connectivity_examples() {
        let k4 = inner_graph(
            Surface::Plane,
            4,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        );
        assert!(three_connected(&k4, false));
        let c5 = inner_graph(Surface::Plane, 5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert!(!three_connected(&c5, false));
        let (g, _) = square4pack();
        assert!(three_connected(&g, true));
        assert!(!three_connected(&square5(), false));
        assert!(three_connected(&square5(), true));
    }

    #[test]
    fn outer_cycle_fills_in_missing_edges() {
        let g = square5();
        let go = with_outer_cycle(&g);
        assert_eq!(go.num_edges(), g.num_edges() + 4);
        assert_eq!(with_outer_cycle(&go).num_edges(), go.num_edges());
        let ico = icosahedron();
        assert_eq!(with_outer_cycle(&ico).num_edges(), 30);
    }

    #[test]
    fn hull_examples() {
        let g = square5();
        let mut e = Embedding::new(
            g.roles()
                .iter()
                .map(|r| match r {
                    VertexRole::OuterFixed(p) => *p,
                    _ => SurfacePoint::flat(0.5, 0.5),
                })
                .collect(),
        );
        assert!(convex_hull_check(&g, &e).unwrap().ok);
        let v = g.inner_vertices().next().unwrap();
        e.positions[v] = SurfacePoint::flat(2.0, 2.0);
        let report = convex_hull_check(&g, &e).unwrap();
        assert!(!report.ok);
        assert_eq!(report.outside, vec![v]);
    }

    #[test]
    fn regularity_of_the_square_pack() {
        let (g, mut e) = square4pack();
        let r = check_regular(&g, &e, REGULAR_TOL).unwrap();
        assert!(r.regular);
        assert!((r.d - 0.5).abs() < 1e-12);
        let v = g.inner_vertices().next().unwrap();
        e.positions[v] = SurfacePoint::Flat(e.positions[v].xy() + Vec2::new(1e-3, 0.0));
        assert!(!check_regular(&g, &e, REGULAR_TOL).unwrap().regular);
    }

    #[test]
    fn degree_examples() {
        assert!(degree_bounds(&icosahedron()));
        assert!(degree_bounds(&torus_hex(4, 4)));
        let path = inner_graph(Surface::Plane, 3, &[(0, 1), (1, 2)]);
        assert!(!degree_bounds(&path));
    }

    #[test]
    fn packing_radius_examples() {
        let (g, e) = square4pack();
        let r = packing_radius(&g, &e).unwrap().unwrap();
        assert!((r.radius - 0.25).abs() < 1e-12);

        let e = Embedding::new(
            icosahedron_points()
                .into_iter()
                .map(SurfacePoint::Spherical)
                .collect(),
        );
        let r = packing_radius(&icosahedron(), &e).unwrap().unwrap();
        let expected = (1.0 / 5f64.sqrt()).acos() / 2.0;
        assert!((r.radius - expected).abs() < 1e-12);
        assert!((r.radius.to_degrees() - 31.717).abs() < 1e-3);

        let g = inner_graph(Surface::Sphere, 2, &[(0, 1)]);
        let e = Embedding::new(vec![
            SurfacePoint::spherical(0.0, 0.0, 1.0),
            SurfacePoint::spherical(0.0, 0.0, -1.0),
        ]);
        let r = packing_radius(&g, &e).unwrap().unwrap();
        assert!((r.radius.to_degrees() - 90.0).abs() < 1e-12);
    }

    #[test]
    fn torus_lattice_is_regular_and_rigid() {
        let g = torus_hex(4, 4);
        let e = torus_hex_lattice(4, 4);
        let report = jamming_report(&g, &e).unwrap();
        assert!(report.regular && report.degree_bounds_ok);
        assert_eq!(report.verdict, Verdict::Jammed);
        assert!(report.perturbation.is_some_and(|p| p.less == 0));
    }
}
