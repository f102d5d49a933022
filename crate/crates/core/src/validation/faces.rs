//! Geometric face tracing and the convex pseudo-embedding check.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{cross, orient};
use crate::graph::{Embedding, Graph, VertexId, VertexRole};
use crate::surface::{tangent_frame, Surface, Vec2, Vec3};

/// Default absolute tolerance for flat-face detection.
pub const TOL_FLAT: f64 = 1e-7;
/// Per-corner tolerance of the convexity sign test.
pub const TOL_CORNER: f64 = 1e-9;
/// Directions closer than this (radians) count as coincident.
const ANGLE_TIE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceSource {
    Supplied,
    ComputedFromGeometry,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaceList {
    /// Vertex cycles in walk order.
    pub faces: Vec<Vec<VertexId>>,
    /// Half-edges of each face as `(edge, forward)`, parallel to `faces`.
    #[serde(skip)]
    pub walks: Vec<Vec<(usize, bool)>>,
    pub flat: Vec<bool>,
    pub source: FaceSource,
}

impl FaceList {
    pub fn num_flat(&self) -> usize {
        self.flat.iter().filter(|&&f| f).count()
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self, g: &Graph) -> i64 {
        g.num_vertices() as i64 - g.num_edges() as i64 + self.faces.len() as i64
    }
}

#[derive(Clone, Copy, Debug)]
struct HalfEdge {
    edge: usize,
    forward: bool,
}

impl HalfEdge {
    fn id(&self) -> usize {
        2 * self.edge + usize::from(!self.forward)
    }

    fn from_id(id: usize) -> Self {
        HalfEdge {
            edge: id / 2,
            forward: id.is_multiple_of(2),
        }
    }

    fn twin(&self) -> Self {
        HalfEdge {
            edge: self.edge,
            forward: !self.forward,
        }
    }

    fn ends(&self, g: &Graph) -> (VertexId, VertexId) {
        let e = &g.edges()[self.edge];
        if self.forward {
            (e.u, e.v)
        } else {
            (e.v, e.u)
        }
    }
}

/// Displacement along a half-edge on a flat surface (or the projected
/// hemisphere).
fn flat_step(g: &Graph, e: &Embedding, h: HalfEdge) -> Vec2 {
    let d = match g.surface() {
        Surface::Hemisphere => {
            let edge = &g.edges()[h.edge];
            e.positions[edge.v].xyz().xy() - e.positions[edge.u].xyz().xy()
        }
        _ => e.edge_vector_flat(g, h.edge),
    };
    if h.forward {
        d
    } else {
        -d
    }
}

/// Barycentric layout with every outer vertex held at its position; `None`
/// without outer vertices.
fn barycentric(g: &Graph, pts: &[Vec2]) -> Option<Vec<Vec2>> {
    if !g.has_outer() {
        return None;
    }
    let inner: Vec<VertexId> = g.inner_vertices().collect();
    let mut index = vec![usize::MAX; g.num_vertices()];
    for (k, &v) in inner.iter().enumerate() {
        index[v] = k;
    }
    let n = inner.len();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DMatrix::<f64>::zeros(n, 2);
    for (k, &v) in inner.iter().enumerate() {
        for inc in g.neighbors(v) {
            a[(k, k)] += 1.0;
            if g.is_inner(inc.other) {
                a[(k, index[inc.other])] -= 1.0;
            } else {
                b[(k, 0)] += pts[inc.other].x;
                b[(k, 1)] += pts[inc.other].y;
            }
        }
    }
    let sol = a.lu().solve(&b)?;
    let mut out = pts.to_vec();
    for (k, &v) in inner.iter().enumerate() {
        out[v] = Vec2::new(sol[(k, 0)], sol[(k, 1)]);
    }
    Some(out)
}

/// Direction angle of every half-edge at its tail, and on bounded regions
/// also its angle in the barycentric layout.
fn half_edge_angles(g: &Graph, e: &Embedding) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let m = g.num_edges();
    let mut angles = vec![0.0; 2 * m];
    let surface = *g.surface();
    if surface == Surface::Sphere {
        let frames: Vec<(Vec3, Vec3)> = e
            .positions
            .iter()
            .map(|p| tangent_frame(&p.xyz()))
            .collect();
        for (id, angle) in angles.iter_mut().enumerate() {
            let h = HalfEdge::from_id(id);
            let (a, b) = h.ends(g);
            let d = e.positions[b].xyz() - e.positions[a].xyz();
            if d.norm() == 0.0 {
                return Err(Error::DegenerateEdge { edge: h.edge });
            }
            let (e1, e2) = frames[a];
            *angle = d.dot(&e2).atan2(d.dot(&e1));
        }
        return Ok((angles, None));
    }
    for i in 0..m {
        if flat_step(
            g,
            e,
            HalfEdge {
                edge: i,
                forward: true,
            },
        )
        .norm()
            == 0.0
        {
            return Err(Error::DegenerateEdge { edge: i });
        }
    }
    for (id, a) in angles.iter_mut().enumerate() {
        let d = flat_step(g, e, HalfEdge::from_id(id));
        *a = d.y.atan2(d.x);
    }
    let pts: Vec<Vec2> = match surface {
        Surface::Plane => e.positions.iter().map(|p| p.xy()).collect(),
        Surface::Hemisphere => e.positions.iter().map(|p| p.xyz().xy()).collect(),
        _ => return Ok((angles, None)),
    };
    let layout = barycentric(g, &pts).map(|t| {
        (0..2 * m)
            .map(|id| {
                let (a, b) = HalfEdge::from_id(id).ends(g);
                let d = t[b] - t[a];
                d.y.atan2(d.x)
            })
            .collect()
    });
    Ok((angles, layout))
}

/// Angle `a - b` wrapped into `(-pi, pi]`.
fn relative_angle(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Rotation system from the angular order of incident edges, then face
/// walks turning to the next edge clockwise. Remaining direction ties are
/// broken by neighbor id.
pub fn faces_from_embedding(g: &Graph, e: &Embedding, tol_flat: f64) -> Result<FaceList> {
    e.check(g)?;
    let (angles, layout) = half_edge_angles(g, e)?;
    let n = g.num_vertices();
    let m = g.num_edges();
    let mut rot: Vec<Vec<usize>> = vec![Vec::new(); n];
    for id in 0..2 * m {
        rot[HalfEdge::from_id(id).ends(g).0].push(id);
    }
    let mut slot = vec![0; 2 * m];
    for list in rot.iter_mut() {
        list.sort_by(|&a, &b| angles[a].total_cmp(&angles[b]).then(a.cmp(&b)));
        // start after the widest gap so no run of coincident directions wraps
        let gap = |k: usize| {
            let next = list[(k + 1) % list.len()];
            (angles[next] - angles[list[k]]).rem_euclid(TAU)
        };
        let widest = (0..list.len()).max_by(|&a, &b| gap(a).total_cmp(&gap(b)));
        if let Some(k) = widest {
            let len = list.len();
            list.rotate_left((k + 1) % len);
        }
        // coincident directions (collapsed faces) follow the barycentric
        // layout, swept counter-clockwise from the preceding half-edge
        let mut i = 0;
        while i < list.len() {
            let mut j = i + 1;
            while j < list.len()
                && relative_angle(angles[list[j]], angles[list[j - 1]]).abs() < ANGLE_TIE
            {
                j += 1;
            }
            let prev = list[(i + list.len() - 1) % list.len()];
            let key = |h: usize| {
                layout
                    .as_ref()
                    .map_or(0.0, |t| (t[h] - t[prev]).rem_euclid(TAU))
            };
            let head = |h: usize| HalfEdge::from_id(h).ends(g).1;
            list[i..j].sort_by(|&a, &b| {
                key(a)
                    .total_cmp(&key(b))
                    .then(head(a).cmp(&head(b)))
                    .then(a.cmp(&b))
            });
            i = j;
        }
        for (k, &id) in list.iter().enumerate() {
            slot[id] = k;
        }
    }
    let mut seen = vec![false; 2 * m];
    let mut faces = Vec::new();
    let mut walks = Vec::new();
    for start in 0..2 * m {
        if seen[start] {
            continue;
        }
        let mut walk = Vec::new();
        let mut cycle = Vec::new();
        let mut id = start;
        while !seen[id] {
            seen[id] = true;
            let h = HalfEdge::from_id(id);
            walk.push((h.edge, h.forward));
            cycle.push(h.ends(g).0);
            let t = h.twin();
            let (at, _) = t.ends(g);
            let list = &rot[at];
            id = list[(slot[t.id()] + list.len() - 1) % list.len()];
        }
        faces.push(cycle);
        walks.push(walk);
    }
    let mut list = FaceList {
        flat: Vec::new(),
        faces,
        walks,
        source: FaceSource::ComputedFromGeometry,
    };
    list.flat = (0..list.faces.len())
        .map(|f| is_flat_face(g, e, &list, f, tol_flat))
        .collect();
    Ok(list)
}

/// Face corners in a common frame: unwrapped along the walk on flat
/// surfaces, unit vectors on spherical ones.
fn face_points(g: &Graph, e: &Embedding, faces: &FaceList, f: usize) -> FacePoints {
    let walk = &faces.walks[f];
    if *g.surface() == Surface::Sphere {
        return FacePoints::Sphere(
            faces.faces[f]
                .iter()
                .map(|&v| e.positions[v].xyz())
                .collect(),
        );
    }
    if *g.surface() == Surface::Hemisphere {
        return FacePoints::Sphere(
            faces.faces[f]
                .iter()
                .map(|&v| e.positions[v].xyz())
                .collect(),
        );
    }
    let mut p = e.positions[faces.faces[f][0]].xy();
    let mut out = Vec::with_capacity(walk.len());
    for &(edge, forward) in walk {
        out.push(p);
        p += flat_step(g, e, HalfEdge { edge, forward });
    }
    FacePoints::Flat(out)
}

enum FacePoints {
    Flat(Vec<Vec2>),
    Sphere(Vec<Vec3>),
}

fn farthest_pair<T>(pts: &[T], dist: impl Fn(&T, &T) -> f64) -> (usize, usize, f64) {
    let mut best = (0, 0, 0.0);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = dist(&pts[i], &pts[j]);
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    best
}

/// Supporting line of a flat face: `(origin, unit direction)` for flat
/// points, `(normal, _)` for a great circle.
fn flat_face_line(points: &FacePoints, tol: f64) -> Option<(Vec3, Vec3)> {
    match points {
        FacePoints::Flat(p) => {
            let (i, j, d) = farthest_pair(p, |a, b| (a - b).norm());
            if d == 0.0 {
                return None;
            }
            let dir = (p[j] - p[i]) / d;
            let ok = p.iter().all(|q| cross(&dir, &(q - p[i])).abs() <= tol);
            ok.then(|| (Vec3::new(p[i].x, p[i].y, 0.0), Vec3::new(dir.x, dir.y, 0.0)))
        }
        FacePoints::Sphere(p) => {
            let (i, j, _) = farthest_pair(p, |a, b| (a - b).norm());
            let n = p[i].cross(&p[j]);
            if n.norm() < 1e-12 {
                return None;
            }
            let n = n.normalize();
            p.iter().all(|q| n.dot(q).abs() <= tol).then_some((n, p[i]))
        }
    }
}

fn is_flat_face(g: &Graph, e: &Embedding, faces: &FaceList, f: usize, tol: f64) -> bool {
    flat_face_line(&face_points(g, e, faces, f), tol).is_some()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PseudoViolationKind {
    NonConvexFace,
    FlatFaceNotSubdivision,
    EdgeCrossing,
    EulerMismatch,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PseudoViolation {
    pub kind: PseudoViolationKind,
    pub faces: Vec<usize>,
    pub edges: Vec<usize>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PseudoEmbeddingReport {
    pub is_pseudo_embedding: bool,
    pub flat_faces: Vec<usize>,
    pub violations: Vec<PseudoViolation>,
}

/// Planar corners of a face: unwrapped flat points, or a gnomonic
/// projection around the face's mean direction.
fn planar_corners(points: &FacePoints) -> Option<Vec<Vec2>> {
    match points {
        FacePoints::Flat(p) => Some(p.clone()),
        FacePoints::Sphere(p) => {
            let c = p.iter().sum::<Vec3>();
            if c.norm() < 1e-12 {
                return None;
            }
            let c = c.normalize();
            let (e1, e2) = tangent_frame(&c);
            p.iter()
                .map(|q| {
                    let s = q.dot(&c);
                    (s > 1e-12).then(|| Vec2::new(q.dot(&e1) / s, q.dot(&e2) / s))
                })
                .collect()
        }
    }
}

/// Convexity of a closed corner sequence: every turn has the same sign (up
/// to `TOL_CORNER` on the normalized cross product) and the turns add up to
/// one full revolution.
fn is_convex(c: &[Vec2]) -> bool {
    let k = c.len();
    if k < 3 {
        return false;
    }
    let mut total = 0.0;
    let (mut pos, mut neg) = (false, false);
    for i in 0..k {
        let a = c[(i + k - 1) % k];
        let b = c[i];
        let d = c[(i + 1) % k];
        let (u, w) = (b - a, d - b);
        let (lu, lw) = (u.norm(), w.norm());
        if lu == 0.0 || lw == 0.0 {
            return false;
        }
        let s = cross(&u, &w) / (lu * lw);
        let turn = cross(&u, &w).atan2(u.dot(&w));
        if PI - turn.abs() < 1e-9 {
            return false;
        }
        pos |= s > TOL_CORNER;
        neg |= s < -TOL_CORNER;
        total += turn;
    }
    !(pos && neg) && (total.abs() - TAU).abs() < 1e-6
}

/// A flat face subdivides a 2-cycle when the positions along its line rise
/// from one extreme to the other and fall back: exactly two turning points.
fn is_two_cycle_subdivision(points: &FacePoints, line: (Vec3, Vec3), tol: f64) -> bool {
    let t: Vec<f64> = match points {
        FacePoints::Flat(p) => p
            .iter()
            .map(|q| (Vec3::new(q.x, q.y, 0.0) - line.0).dot(&line.1))
            .collect(),
        FacePoints::Sphere(p) => {
            let (n, a) = line;
            let b = n.cross(&a);
            p.iter().map(|q| q.dot(&b).atan2(q.dot(&a))).collect()
        }
    };
    let steps: Vec<f64> = (0..t.len())
        .map(|i| t[(i + 1) % t.len()] - t[i])
        .filter(|d| d.abs() > tol)
        .collect();
    if steps.is_empty() {
        return false;
    }
    let changes = (0..steps.len())
        .filter(|&i| (steps[i] > 0.0) != (steps[(i + 1) % steps.len()] > 0.0))
        .count();
    changes == 2
}

/// Proper crossing: each segment has the other's endpoints strictly on
/// opposite sides, farther than `TOL_FLAT` from its line. Touching within a
/// flat face is allowed.
fn segments_cross(a: &Vec2, b: &Vec2, c: &Vec2, d: &Vec2) -> bool {
    let (tab, tcd) = (TOL_FLAT * (b - a).norm(), TOL_FLAT * (d - c).norm());
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    ((o1 > tab && o2 < -tab) || (o1 < -tab && o2 > tab))
        && ((o3 > tcd && o4 < -tcd) || (o3 < -tcd && o4 > tcd))
}

fn on_arc(x: &Vec3, a: &Vec3, b: &Vec3, n: &Vec3) -> bool {
    let tol = TOL_FLAT * n.norm();
    a.cross(x).dot(n) > tol && x.cross(b).dot(n) > tol
}

fn arcs_cross(a: &Vec3, b: &Vec3, c: &Vec3, d: &Vec3) -> bool {
    let (n1, n2) = (a.cross(b), c.cross(d));
    let x = n1.cross(&n2);
    if x.norm() < 1e-12 {
        return false;
    }
    let x = x.normalize();
    [x, -x]
        .iter()
        .any(|p| on_arc(p, a, b, &n1) && on_arc(p, c, d, &n2))
}

fn crossing_pairs(g: &Graph, e: &Embedding) -> Vec<(usize, usize)> {
    let edges = g.edges();
    let m = edges.len();
    let mut out = Vec::new();
    let surface = *g.surface();
    for i in 0..m {
        for j in i + 1..m {
            let (ei, ej) = (&edges[i], &edges[j]);
            if ei.u == ej.u || ei.u == ej.v || ei.v == ej.u || ei.v == ej.v {
                continue;
            }
            let hit = if surface.is_spherical() {
                let p = |v: VertexId| e.positions[v].xyz();
                arcs_cross(&p(ei.u), &p(ei.v), &p(ej.u), &p(ej.v))
            } else {
                let a = e.positions[ei.u].xy();
                let b = a + e.edge_vector_flat(g, i);
                let c0 = e.positions[ej.u].xy();
                let d0 = c0 + e.edge_vector_flat(g, j);
                let shifts: &[(i64, i64)] = if surface == Surface::Plane {
                    &[(0, 0)]
                } else {
                    &[
                        (-1, -1),
                        (-1, 0),
                        (-1, 1),
                        (0, -1),
                        (0, 0),
                        (0, 1),
                        (1, -1),
                        (1, 0),
                        (1, 1),
                    ]
                };
                shifts.iter().any(|&(wx, wy)| {
                    let s = surface.shift_vector(crate::surface::Shift::new(wx, wy));
                    segments_cross(&a, &b, &(c0 + s), &(d0 + s))
                })
            };
            if hit {
                out.push((i, j));
            }
        }
    }
    out
}

/// Checks that non-flat faces are convex, flat faces subdivide a 2-cycle
/// and no two edges cross.
pub fn check_pseudo_embedding(
    g: &Graph,
    e: &Embedding,
    faces: &FaceList,
) -> Result<PseudoEmbeddingReport> {
    e.check(g)?;
    let mut violations = Vec::new();
    let expected = if matches!(g.surface(), Surface::Torus { .. }) {
        0
    } else {
        2
    };
    let chi = faces.euler_characteristic(g);
    if chi != expected {
        violations.push(PseudoViolation {
            kind: PseudoViolationKind::EulerMismatch,
            faces: Vec::new(),
            edges: Vec::new(),
            message: format!("V - E + F = {chi}, expected {expected}"),
        });
    }
    let mut flat_faces = Vec::new();
    for f in 0..faces.faces.len() {
        let pts = face_points(g, e, faces, f);
        if faces.flat[f] {
            flat_faces.push(f);
            let ok = flat_face_line(&pts, TOL_FLAT.max(1e-12))
                .is_some_and(|line| is_two_cycle_subdivision(&pts, line, TOL_FLAT));
            if !ok {
                violations.push(PseudoViolation {
                    kind: PseudoViolationKind::FlatFaceNotSubdivision,
                    faces: vec![f],
                    edges: faces.walks[f].iter().map(|w| w.0).collect(),
                    message: format!("flat face {f} is not a subdivided 2-cycle"),
                });
            }
        } else if !planar_corners(&pts).is_some_and(|c| is_convex(&c)) {
            violations.push(PseudoViolation {
                kind: PseudoViolationKind::NonConvexFace,
                faces: vec![f],
                edges: faces.walks[f].iter().map(|w| w.0).collect(),
                message: format!("face {f} {:?} is not convex", faces.faces[f]),
            });
        }
    }
    for (i, j) in crossing_pairs(g, e) {
        violations.push(PseudoViolation {
            kind: PseudoViolationKind::EdgeCrossing,
            faces: Vec::new(),
            edges: vec![i, j],
            message: format!("edges {i} and {j} cross"),
        });
    }
    Ok(PseudoEmbeddingReport {
        is_pseudo_embedding: violations.is_empty(),
        flat_faces,
        violations,
    })
}

/// Outer vertices in angular order around their centroid (projected to the
/// equator plane on the hemisphere, tangent plane on the sphere).
pub fn outer_cycle_order(g: &Graph) -> Vec<VertexId> {
    let outer: Vec<VertexId> = g.outer_vertices().collect();
    let anchor = |v: VertexId| -> Vec3 {
        match g.role(v) {
            VertexRole::OuterFixed(p) => crate::motion::ambient(p),
            VertexRole::OuterSegment { a, b } => {
                (crate::motion::ambient(a) + crate::motion::ambient(b)) / 2.0
            }
            VertexRole::Inner => unreachable!(),
        }
    };
    let pts: Vec<Vec3> = outer.iter().map(|&v| anchor(v)).collect();
    if pts.is_empty() {
        return outer;
    }
    let c = pts.iter().sum::<Vec3>() / pts.len() as f64;
    let (e1, e2) = if *g.surface() == Surface::Sphere && c.norm() > 1e-12 {
        tangent_frame(&c.normalize())
    } else {
        (Vec3::x(), Vec3::y())
    };
    let mut keyed: Vec<(f64, VertexId)> = outer
        .iter()
        .zip(&pts)
        .map(|(&v, p)| {
            let d = p - c;
            (d.dot(&e2).atan2(d.dot(&e1)), v)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().map(|(_, v)| v).collect()
}

/// Smallest rotation of `c` or of its reverse.
fn canonical_cycle(c: &[VertexId]) -> Vec<VertexId> {
    let mut rev = c.to_vec();
    rev.reverse();
    let mut best: Option<Vec<VertexId>> = None;
    for seq in [c.to_vec(), rev] {
        for k in 0..seq.len() {
            let mut r = seq[k..].to_vec();
            r.extend_from_slice(&seq[..k]);
            if best.as_ref().is_none_or(|b| r < *b) {
                best = Some(r);
            }
        }
    }
    best.unwrap_or_default()
}

/// Whether `supplied` lists the same face cycles as `computed`, up to
/// rotation, orientation and order.
pub fn faces_match(supplied: &[Vec<VertexId>], computed: &FaceList) -> bool {
    let canon = |faces: &[Vec<VertexId>]| {
        let mut v: Vec<Vec<VertexId>> = faces.iter().map(|f| canonical_cycle(f)).collect();
        v.sort();
        v
    };
    canon(supplied) == canon(&computed.faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{icosahedron, icosahedron_points, torus_hex, torus_hex_lattice};
    use crate::graph::Edge;
    use crate::surface::SurfacePoint;

    #[test]
    fn square_cycle_has_two_faces() {
        let g = Graph::new(
            Surface::Plane,
            vec![VertexRole::Inner; 4],
            (0..4).map(|i| Edge::new(i, (i + 1) % 4)).collect(),
        );
        let e = Embedding::new(vec![
            SurfacePoint::flat(0.0, 0.0),
            SurfacePoint::flat(1.0, 0.0),
            SurfacePoint::flat(1.0, 1.0),
            SurfacePoint::flat(0.0, 1.0),
        ]);
        let f = faces_from_embedding(&g, &e, TOL_FLAT).unwrap();
        assert_eq!(f.faces.len(), 2);
        assert_eq!(f.euler_characteristic(&g), 2);
        assert!(
            check_pseudo_embedding(&g, &e, &f)
                .unwrap()
                .is_pseudo_embedding
        );
    }

    #[test]
    fn icosahedron_faces() {
        let g = icosahedron();
        let e = Embedding::new(
            icosahedron_points()
                .into_iter()
                .map(SurfacePoint::Spherical)
                .collect(),
        );
        let f = faces_from_embedding(&g, &e, TOL_FLAT).unwrap();
        assert_eq!(f.faces.len(), 20);
        assert!(f.faces.iter().all(|c| c.len() == 3));
        assert_eq!(f.num_flat(), 0);
        assert!(
            check_pseudo_embedding(&g, &e, &f)
                .unwrap()
                .is_pseudo_embedding
        );
    }

    #[test]
    fn torus_lattice_faces() {
        let g = torus_hex(4, 4);
        let e = torus_hex_lattice(4, 4);
        let f = faces_from_embedding(&g, &e, TOL_FLAT).unwrap();
        assert_eq!(f.faces.len(), 32);
        assert_eq!(f.euler_characteristic(&g), 0);
        let r = check_pseudo_embedding(&g, &e, &f).unwrap();
        assert!(r.is_pseudo_embedding, "{:?}", r.violations);
    }

    #[test]
    fn degenerate_edge_is_an_error() {
        let g = Graph::new(
            Surface::Plane,
            vec![VertexRole::Inner; 2],
            vec![Edge::new(0, 1)],
        );
        let e = Embedding::new(vec![SurfacePoint::flat(0.0, 0.0); 2]);
        assert!(matches!(
            faces_from_embedding(&g, &e, TOL_FLAT),
            Err(Error::DegenerateEdge { edge: 0 })
        ));
    }

    #[test]
    fn reflex_face_is_reported() {
        // Inner vertex beyond the diagonal 1-3 makes face 1-2-3-4 reflex at 4.
        let fixed = |x, y| VertexRole::OuterFixed(SurfacePoint::flat(x, y));
        let g = Graph::new(
            Surface::Plane,
            vec![
                fixed(0.0, 0.0),
                fixed(2.0, 0.0),
                fixed(2.0, 2.0),
                fixed(0.0, 2.0),
                VertexRole::Inner,
            ],
            vec![
                Edge::new(0, 1),
                Edge::new(1, 2),
                Edge::new(2, 3),
                Edge::new(3, 0),
                Edge::new(4, 0),
                Edge::new(4, 1),
                Edge::new(4, 3),
            ],
        );
        let e = Embedding::new(vec![
            SurfacePoint::flat(0.0, 0.0),
            SurfacePoint::flat(2.0, 0.0),
            SurfacePoint::flat(2.0, 2.0),
            SurfacePoint::flat(0.0, 2.0),
            SurfacePoint::flat(1.5, 1.5),
        ]);
        let f = faces_from_embedding(&g, &e, TOL_FLAT).unwrap();
        let r = check_pseudo_embedding(&g, &e, &f).unwrap();
        assert!(r
            .violations
            .iter()
            .any(|v| v.kind == PseudoViolationKind::NonConvexFace));
    }

    #[test]
    fn flat_face_shapes() {
        let line = (Vec3::zeros(), Vec3::x());
        let pts = |xs: &[f64]| FacePoints::Flat(xs.iter().map(|&x| Vec2::new(x, 0.0)).collect());
        assert!(is_two_cycle_subdivision(
            &pts(&[0.0, 1.0, 2.0, 1.5, 0.5]),
            line,
            1e-9
        ));
        assert!(!is_two_cycle_subdivision(
            &pts(&[0.0, 2.0, 1.0, 3.0, 1.5]),
            line,
            1e-9
        ));
    }

    #[test]
    fn supplied_faces_compare_as_cycles() {
        let list = FaceList {
            faces: vec![vec![0, 1, 2], vec![2, 1, 3]],
            walks: vec![],
            flat: vec![false; 2],
            source: FaceSource::ComputedFromGeometry,
        };
        assert!(faces_match(&[vec![3, 2, 1], vec![1, 0, 2]], &list));
        assert!(!faces_match(&[vec![0, 1, 2]], &list));
        assert!(!faces_match(&[vec![0, 1, 2], vec![2, 3, 0]], &list));
    }
}
