//! Graphs with inner and outer vertices, their embeddings, and the
//! lexicographic ordering of embeddings by descending edge lengths.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{convex_hull, segment_distance};
use crate::surface::{Shift, Surface, SurfacePoint, Vec2, Vec3};

pub type VertexId = usize;

/// Per-entry tolerance of [`compare_embeddings`].
pub const COMPARE_TOL: f64 = 1e-12;
/// Tolerance for outer vertices sitting on their constraint.
pub const CONSTRAINT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum VertexRole {
    Inner,
    OuterFixed(SurfacePoint),
    /// Restricted to the closed segment `a`-`b` (plane only).
    OuterSegment {
        a: SurfacePoint,
        b: SurfacePoint,
    },
}

impl VertexRole {
    pub fn is_inner(&self) -> bool {
        matches!(self, VertexRole::Inner)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub gamma: f64,
    /// Periodic copy of `v` that `u` connects to (torus only).
    pub shift: Shift,
}

impl Edge {
    pub fn new(u: VertexId, v: VertexId) -> Self {
        Edge {
            u,
            v,
            gamma: 1.0,
            shift: Shift::ZERO,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_shift(mut self, shift: Shift) -> Self {
        self.shift = shift;
        self
    }
}

/// One end of an edge as seen from a vertex: the neighbor is the copy of
/// `other` translated by `shift`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Incidence {
    pub edge: usize,
    pub other: VertexId,
    pub shift: Shift,
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    surface: Surface,
    roles: Vec<VertexRole>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<Incidence>>,
}

impl Graph {
    /// Builds a graph without validating it; see [`validate_graph`].
    /// Edges with out-of-range endpoints are kept but not linked.
    pub fn new(surface: Surface, roles: Vec<VertexRole>, edges: Vec<Edge>) -> Self {
        let n = roles.len();
        let mut adjacency = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            if e.u < n && e.v < n {
                adjacency[e.u].push(Incidence {
                    edge: i,
                    other: e.v,
                    shift: e.shift,
                    gamma: e.gamma,
                });
                adjacency[e.v].push(Incidence {
                    edge: i,
                    other: e.u,
                    shift: -e.shift,
                    gamma: e.gamma,
                });
            }
        }
        Graph {
            surface,
            roles,
            edges,
            adjacency,
        }
    }

    /// Builds a graph and rejects it if [`validate_graph`] reports anything.
    pub fn validated(surface: Surface, roles: Vec<VertexRole>, edges: Vec<Edge>) -> Result<Self> {
        let g = Graph::new(surface, roles, edges);
        let report = validate_graph(&g);
        if report.is_valid() {
            Ok(g)
        } else {
            Err(Error::InvalidGraph(report.summary()))
        }
    }

    pub fn surface(&self) -> &Surface {
        &self.surface
    }

    pub fn roles(&self) -> &[VertexRole] {
        &self.roles
    }

    pub fn role(&self, v: VertexId) -> &VertexRole {
        &self.roles[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.roles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_inner(&self, v: VertexId) -> bool {
        self.roles[v].is_inner()
    }

    pub fn inner_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.roles.len()).filter(|&v| self.is_inner(v))
    }

    pub fn outer_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.roles.len()).filter(|&v| !self.is_inner(v))
    }

    pub fn has_outer(&self) -> bool {
        self.roles.iter().any(|r| !r.is_inner())
    }

    pub fn neighbors(&self, v: VertexId) -> &[Incidence] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    /// Whether edge `e` has at least one inner endpoint.
    pub fn is_inner_edge(&self, e: usize) -> bool {
        let edge = &self.edges[e];
        self.is_inner(edge.u) || self.is_inner(edge.v)
    }

    /// Returns a copy of this graph with extra edges appended.
    pub fn with_extra_edges(&self, extra: impl IntoIterator<Item = Edge>) -> Graph {
        let mut edges = self.edges.clone();
        edges.extend(extra);
        Graph::new(self.surface, self.roles.clone(), edges)
    }

    /// Outer anchor points on the plane or the projected hemisphere: fixed
    /// positions and segment endpoints.
    pub fn outer_anchor_points(&self) -> Vec<Vec2> {
        let mut pts = Vec::new();
        for r in &self.roles {
            match r {
                VertexRole::Inner => {}
                VertexRole::OuterFixed(p) => pts.push(project_xy(p)),
                VertexRole::OuterSegment { a, b } => {
                    pts.push(project_xy(a));
                    pts.push(project_xy(b));
                }
            }
        }
        pts
    }
}

fn project_xy(p: &SurfacePoint) -> Vec2 {
    match p {
        SurfacePoint::Flat(v) => *v,
        SurfacePoint::Spherical(v) => Vec2::new(v.x, v.y),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    InvalidSurface,
    InvalidVertex,
    EndpointOutOfRange,
    SelfLoop,
    NonPositiveGamma,
    ShiftOffTorus,
    DuplicateEdge,
    Disconnected,
    IsolatedInner,
    NotProperToroidal,
    OuterNotConvex,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub vertices: Vec<VertexId>,
    pub edges: Vec<usize>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn summary(&self) -> String {
        self.violations
            .iter()
            .map(|v| v.message.as_str())
            .collect::<Vec<_>>()
            .join("; ")
    }

    fn push(
        &mut self,
        kind: ViolationKind,
        vertices: Vec<VertexId>,
        edges: Vec<usize>,
        message: String,
    ) {
        self.violations.push(Violation {
            kind,
            vertices,
            edges,
            message,
        });
    }
}

/// Lists every structural problem of `g`.
pub fn validate_graph(g: &Graph) -> ValidationReport {
    let mut report = ValidationReport::default();
    let surface = g.surface();
    if let Err(e) = surface.validate() {
        report.push(ViolationKind::InvalidSurface, vec![], vec![], e.to_string());
    }
    let n = g.num_vertices();

    for (v, role) in g.roles().iter().enumerate() {
        let problem = match role {
            VertexRole::Inner => None,
            VertexRole::OuterFixed(p) => surface.check_point(p).err().map(|e| e.to_string()),
            VertexRole::OuterSegment { a, b } => {
                if *surface != Surface::Plane {
                    Some(
                        "segment-restricted outer vertices are only supported on the plane"
                            .to_string(),
                    )
                } else if let Some(e) = surface
                    .check_point(a)
                    .err()
                    .or(surface.check_point(b).err())
                {
                    Some(e.to_string())
                } else if a == b {
                    Some("segment endpoints coincide".to_string())
                } else {
                    None
                }
            }
        };
        if let Some(msg) = problem {
            report.push(
                ViolationKind::InvalidVertex,
                vec![v],
                vec![],
                format!("vertex {v}: {msg}"),
            );
        }
    }

    let mut seen: HashSet<(VertexId, VertexId, Shift)> = HashSet::new();
    for (i, e) in g.edges().iter().enumerate() {
        if e.u >= n || e.v >= n {
            report.push(
                ViolationKind::EndpointOutOfRange,
                vec![],
                vec![i],
                format!("edge {i}: endpoint out of range ({}, {})", e.u, e.v),
            );
            continue;
        }
        if e.u == e.v {
            report.push(
                ViolationKind::SelfLoop,
                vec![e.u],
                vec![i],
                format!("edge {i}: self-loop at {}", e.u),
            );
        }
        if !(e.gamma > 0.0 && e.gamma.is_finite()) {
            report.push(
                ViolationKind::NonPositiveGamma,
                vec![e.u, e.v],
                vec![i],
                format!("edge {i}: rescale factor {} is not positive", e.gamma),
            );
        }
        if !e.shift.is_zero() && !matches!(surface, Surface::Torus { .. }) {
            report.push(
                ViolationKind::ShiftOffTorus,
                vec![e.u, e.v],
                vec![i],
                format!("edge {i}: nonzero shift {} off the torus", e.shift),
            );
        }
        let key = if e.u <= e.v {
            (e.u, e.v, e.shift)
        } else {
            (e.v, e.u, -e.shift)
        };
        if !seen.insert(key) {
            report.push(
                ViolationKind::DuplicateEdge,
                vec![e.u, e.v],
                vec![i],
                format!(
                    "edge {i}: duplicates an earlier edge {}-{} with shift {}",
                    e.u, e.v, e.shift
                ),
            );
        }
    }

    if n > 0 {
        let comp = components(g);
        let count = comp.iter().copied().max().map_or(0, |m| m + 1);
        if count > 1 {
            let stray: Vec<VertexId> = (0..n).filter(|&v| comp[v] != comp[0]).collect();
            report.push(
                ViolationKind::Disconnected,
                stray.clone(),
                vec![],
                format!("graph is disconnected ({count} components); vertices {stray:?} unreachable from 0"),
            );
        }
    }
    for v in g.inner_vertices() {
        if g.degree(v) == 0 {
            report.push(
                ViolationKind::IsolatedInner,
                vec![v],
                vec![],
                format!("inner vertex {v} has no edges"),
            );
        }
    }

    if matches!(surface, Surface::Torus { .. }) && !g.has_outer() {
        let crosses_x = g.edges().iter().any(|e| e.shift.wx != 0);
        let crosses_y = g.edges().iter().any(|e| e.shift.wy != 0);
        if !(crosses_x && crosses_y) {
            report.push(
                ViolationKind::NotProperToroidal,
                vec![],
                vec![],
                "not proper toroidal: edges must cross both pairs of rectangle sides".to_string(),
            );
        }
    }

    if matches!(surface, Surface::Plane | Surface::Hemisphere) {
        check_outer_convexity(g, &mut report);
    }
    report
}

fn check_outer_convexity(g: &Graph, report: &mut ValidationReport) {
    let anchors = g.outer_anchor_points();
    let hull_idx = convex_hull(&anchors);
    if hull_idx.len() < 3 {
        return;
    }
    let hull: Vec<Vec2> = hull_idx.iter().map(|&i| anchors[i]).collect();
    let scale = hull.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let tol = 1e-9 * scale;
    let on_boundary = |p: &Vec2| {
        let k = hull.len();
        (0..k).any(|i| segment_distance(p, &hull[i], &hull[(i + 1) % k]) <= tol)
    };
    let mut offenders = Vec::new();
    for (v, role) in g.roles().iter().enumerate() {
        let ok = match role {
            VertexRole::Inner => true,
            VertexRole::OuterFixed(p) => on_boundary(&project_xy(p)),
            VertexRole::OuterSegment { a, b } => {
                let (a, b) = (project_xy(a), project_xy(b));
                let k = hull.len();
                // the whole segment must run along one hull edge
                (0..k).any(|i| {
                    let (h0, h1) = (&hull[i], &hull[(i + 1) % k]);
                    segment_distance(&a, h0, h1) <= tol && segment_distance(&b, h0, h1) <= tol
                })
            }
        };
        if !ok {
            offenders.push(v);
        }
    }
    if !offenders.is_empty() {
        report.push(
            ViolationKind::OuterNotConvex,
            offenders.clone(),
            vec![],
            format!(
                "outer vertices {offenders:?} do not lie on the boundary of the outer convex hull"
            ),
        );
    }
}

/// Connected-component label of every vertex.
pub fn components(g: &Graph) -> Vec<usize> {
    let n = g.num_vertices();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for inc in g.neighbors(v) {
                if label[inc.other] == usize::MAX {
                    label[inc.other] = next;
                    queue.push_back(inc.other);
                }
            }
        }
        next += 1;
    }
    label
}

/// Positions of all vertices. On the torus each vertex also carries the
/// periodic cell its canonical position was reduced from, so that edge
/// representatives stay fixed when a vertex wraps across the rectangle.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    pub positions: Vec<SurfacePoint>,
    pub cells: Vec<Shift>,
}

impl Embedding {
    pub fn new(positions: Vec<SurfacePoint>) -> Self {
        let cells = vec![Shift::ZERO; positions.len()];
        Embedding { positions, cells }
    }

    pub fn with_cells(positions: Vec<SurfacePoint>, cells: Vec<Shift>) -> Self {
        Embedding { positions, cells }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Checks the embedding against the graph's surface and outer constraints.
    pub fn check(&self, g: &Graph) -> Result<()> {
        if self.positions.len() != g.num_vertices() || self.cells.len() != g.num_vertices() {
            return Err(Error::Mismatch(format!(
                "embedding has {} positions for {} vertices",
                self.positions.len(),
                g.num_vertices()
            )));
        }
        let surface = g.surface();
        for (v, p) in self.positions.iter().enumerate() {
            surface
                .check_point(p)
                .map_err(|e| Error::Mismatch(format!("vertex {v}: {e}")))?;
            match g.role(v) {
                VertexRole::Inner => {}
                VertexRole::OuterFixed(q) => {
                    if point_gap(p, q) > CONSTRAINT_TOL {
                        return Err(Error::Mismatch(format!(
                            "fixed outer vertex {v} moved to {p}"
                        )));
                    }
                }
                VertexRole::OuterSegment { a, b } => {
                    if segment_distance(&p.xy(), &a.xy(), &b.xy()) > CONSTRAINT_TOL {
                        return Err(Error::Mismatch(format!(
                            "segment outer vertex {v} left its segment"
                        )));
                    }
                }
            }
            if (!surface.is_flat() || matches!(surface, Surface::Plane)) && !self.cells[v].is_zero()
            {
                return Err(Error::Mismatch(format!(
                    "vertex {v}: periodic cell off the torus"
                )));
            }
        }
        Ok(())
    }

    /// Shift from `u`'s copy to the representative of `inc.other` across
    /// incidence `inc` of `u`, including both vertices' cells.
    pub fn incidence_shift(&self, u: VertexId, inc: &Incidence) -> Shift {
        inc.shift + self.cells[inc.other] - self.cells[u]
    }

    /// Position of neighbor `inc.other` in the frame of `u` (flat surfaces).
    pub fn neighbor_flat(&self, surface: &Surface, u: VertexId, inc: &Incidence) -> Vec2 {
        self.positions[inc.other].xy() + surface.shift_vector(self.incidence_shift(u, inc))
    }

    /// Vector from `u` to the neighbor across edge `e` of graph `g`.
    pub fn edge_vector_flat(&self, g: &Graph, e: usize) -> Vec2 {
        let edge = &g.edges()[e];
        let shift = edge.shift + self.cells[edge.v] - self.cells[edge.u];
        self.positions[edge.v].xy() + g.surface().shift_vector(shift) - self.positions[edge.u].xy()
    }

    /// Unscaled length of edge `e`.
    pub fn edge_length(&self, g: &Graph, e: usize) -> f64 {
        let edge = &g.edges()[e];
        if g.surface().is_flat() {
            self.edge_vector_flat(g, e).norm()
        } else {
            (self.positions[edge.v].xyz() - self.positions[edge.u].xyz()).norm()
        }
    }

    pub fn rescaled_length(&self, g: &Graph, e: usize) -> f64 {
        g.edges()[e].gamma * self.edge_length(g, e)
    }

    pub fn sphere_points(&self) -> Vec<Vec3> {
        self.positions.iter().map(|p| p.xyz()).collect()
    }
}

fn point_gap(p: &SurfacePoint, q: &SurfacePoint) -> f64 {
    match (p, q) {
        (SurfacePoint::Flat(a), SurfacePoint::Flat(b)) => (a - b).norm(),
        (SurfacePoint::Spherical(a), SurfacePoint::Spherical(b)) => (a - b).norm(),
        _ => f64::INFINITY,
    }
}

/// Rescaled lengths of the edges with an inner endpoint, sorted descending.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeLengthVector(pub Vec<f64>);

impl EdgeLengthVector {
    pub fn lengths(&self) -> &[f64] {
        &self.0
    }

    pub fn head(&self, k: usize) -> Vec<f64> {
        self.0.iter().take(k).copied().collect()
    }

    /// Lexicographic comparison with per-entry tolerance [`COMPARE_TOL`].
    pub fn compare(&self, other: &EdgeLengthVector) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            if *a > b + COMPARE_TOL {
                return Ordering::Greater;
            }
            if *a < b - COMPARE_TOL {
                return Ordering::Less;
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

pub fn edge_length_vector(g: &Graph, e: &Embedding) -> EdgeLengthVector {
    let mut lengths: Vec<f64> = (0..g.num_edges())
        .filter(|&i| g.is_inner_edge(i))
        .map(|i| e.rescaled_length(g, i))
        .collect();
    lengths.sort_by(|a, b| b.total_cmp(a));
    EdgeLengthVector(lengths)
}

/// Orders two embeddings of `g` by their descending inner-edge length vectors.
pub fn compare_embeddings(g: &Graph, e1: &Embedding, e2: &Embedding) -> Ordering {
    edge_length_vector(g, e1).compare(&edge_length_vector(g, e2))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn square5() -> Graph {
        let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        let mut roles: Vec<VertexRole> = corners
            .iter()
            .map(|&(x, y)| VertexRole::OuterFixed(SurfacePoint::flat(x, y)))
            .collect();
        roles.push(VertexRole::Inner);
        let edges = (0..4).map(|i| Edge::new(4, i)).collect();
        Graph::new(Surface::Plane, roles, edges)
    }

    fn path3() -> Graph {
        Graph::new(
            Surface::Plane,
            vec![
                VertexRole::OuterFixed(SurfacePoint::flat(0.0, 0.0)),
                VertexRole::Inner,
                VertexRole::OuterFixed(SurfacePoint::flat(2.0, 0.0)),
            ],
            vec![Edge::new(0, 1), Edge::new(1, 2)],
        )
    }

    fn path_embedding(x: f64) -> Embedding {
        Embedding::new(vec![
            SurfacePoint::flat(0.0, 0.0),
            SurfacePoint::flat(x, 0.0),
            SurfacePoint::flat(2.0, 0.0),
        ])
    }

    #[test]
    fn square_with_center_is_valid() {
        let r = validate_graph(&square5());
        assert!(r.is_valid(), "{}", r.summary());
    }

    #[test]
    fn torus_without_crossings_is_not_proper() {
        let t = Surface::torus(1.0, 1.0).unwrap();
        let g = Graph::new(
            t,
            vec![VertexRole::Inner; 3],
            vec![Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 0)],
        );
        let r = validate_graph(&g);
        assert!(r.has(ViolationKind::NotProperToroidal));
    }

    #[test]
    fn zero_gamma_is_reported_with_ids() {
        let mut g = square5();
        g = Graph::new(*g.surface(), g.roles().to_vec(), {
            let mut e = g.edges().to_vec();
            e[2].gamma = 0.0;
            e
        });
        let r = validate_graph(&g);
        let v = r
            .violations
            .iter()
            .find(|v| v.kind == ViolationKind::NonPositiveGamma)
            .unwrap();
        assert_eq!(v.edges, vec![2]);
    }

    #[test]
    fn structural_violations() {
        let g = Graph::new(
            Surface::Plane,
            vec![
                VertexRole::Inner,
                VertexRole::Inner,
                VertexRole::Inner,
                VertexRole::Inner,
            ],
            vec![
                Edge::new(0, 1),
                Edge::new(1, 0),
                Edge::new(2, 2),
                Edge::new(0, 9),
                Edge::new(0, 1).with_shift(Shift::new(1, 0)),
            ],
        );
        let r = validate_graph(&g);
        for k in [
            ViolationKind::DuplicateEdge,
            ViolationKind::SelfLoop,
            ViolationKind::EndpointOutOfRange,
            ViolationKind::ShiftOffTorus,
            ViolationKind::Disconnected,
            ViolationKind::IsolatedInner,
        ] {
            assert!(r.has(k), "missing {k:?}: {}", r.summary());
        }
    }

    #[test]
    fn torus_multi_edges_with_distinct_shifts_are_fine() {
        let t = Surface::torus(1.0, 1.0).unwrap();
        let g = Graph::new(
            t,
            vec![VertexRole::Inner, VertexRole::Inner],
            vec![
                Edge::new(0, 1),
                Edge::new(0, 1).with_shift(Shift::new(-1, 0)),
                Edge::new(0, 1).with_shift(Shift::new(0, -1)),
            ],
        );
        assert!(validate_graph(&g).is_valid());
    }

    #[test]
    fn outer_vertex_inside_hull_is_rejected() {
        let mut roles: Vec<VertexRole> = [(0.0, 0.0), (2.0, 0.0), (1.0, 2.0), (1.0, 0.5)]
            .iter()
            .map(|&(x, y)| VertexRole::OuterFixed(SurfacePoint::flat(x, y)))
            .collect();
        roles.push(VertexRole::Inner);
        let g = Graph::new(
            Surface::Plane,
            roles,
            (0..4).map(|i| Edge::new(4, i)).collect(),
        );
        let r = validate_graph(&g);
        let v = r
            .violations
            .iter()
            .find(|v| v.kind == ViolationKind::OuterNotConvex)
            .unwrap();
        assert_eq!(v.vertices, vec![3]);
    }

    #[test]
    fn length_vector_examples() {
        let g = path3();
        assert_eq!(
            edge_length_vector(&g, &path_embedding(0.5)).0,
            vec![1.5, 0.5]
        );
        assert_eq!(
            edge_length_vector(&g, &path_embedding(1.0)).0,
            vec![1.0, 1.0]
        );
    }

    #[test]
    fn comparison_examples() {
        let g = path3();
        assert_eq!(
            compare_embeddings(&g, &path_embedding(0.5), &path_embedding(1.0)),
            Ordering::Greater
        );
        assert_eq!(
            compare_embeddings(&g, &path_embedding(1.0), &path_embedding(0.5)),
            Ordering::Less
        );
        assert_eq!(
            compare_embeddings(&g, &path_embedding(0.7), &path_embedding(0.7)),
            Ordering::Equal
        );
    }

    #[test]
    fn outer_edges_are_ignored_by_the_ordering() {
        let g = square5().with_extra_edges([Edge::new(0, 1)]);
        let e = Embedding::new(
            [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.5)]
                .iter()
                .map(|&(x, y)| SurfacePoint::flat(x, y))
                .collect(),
        );
        assert_eq!(edge_length_vector(&g, &e).0.len(), 4);
    }

    #[test]
    fn embedding_check_catches_moved_outer() {
        let g = path3();
        assert!(path_embedding(0.3).check(&g).is_ok());
        let mut e = path_embedding(0.3);
        e.positions[2] = SurfacePoint::flat(2.0, 1e-9);
        assert!(matches!(e.check(&g), Err(Error::Mismatch(_))));
        assert!(Embedding::new(vec![]).check(&g).is_err());
    }
}
