//! JSON graph and embedding files.
//!
//! Floats are written by `serde_json` in shortest round-trip form, so
//! `read(write(x)) == x` holds bit for bit.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{validate_graph, Edge, Embedding, Graph, VertexRole};
use crate::solver::{CenterMethod, InitStrategy, SolverParams, SolverTrace};
use crate::surface::{Shift, Surface, SurfacePoint};

pub const FORMAT: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSurface", into = "RawSurface")]
pub enum SurfaceSpec {
    Plane,
    Torus { width: f64, height: f64 },
    Sphere,
    Hemisphere,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SurfaceKind {
    Plane,
    Torus,
    Sphere,
    Hemisphere,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSurface {
    kind: SurfaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    height: Option<f64>,
}

impl TryFrom<RawSurface> for SurfaceSpec {
    type Error = String;

    fn try_from(r: RawSurface) -> std::result::Result<Self, String> {
        match (r.kind, r.width, r.height) {
            (SurfaceKind::Torus, Some(width), Some(height)) => {
                Ok(SurfaceSpec::Torus { width, height })
            }
            (SurfaceKind::Torus, _, _) => Err("torus needs width and height".into()),
            (_, None, None) => Ok(match r.kind {
                SurfaceKind::Plane => SurfaceSpec::Plane,
                SurfaceKind::Sphere => SurfaceSpec::Sphere,
                _ => SurfaceSpec::Hemisphere,
            }),
            _ => Err("width and height apply to the torus only".into()),
        }
    }
}

impl From<SurfaceSpec> for RawSurface {
    fn from(s: SurfaceSpec) -> Self {
        let (kind, width, height) = match s {
            SurfaceSpec::Plane => (SurfaceKind::Plane, None, None),
            SurfaceSpec::Torus { width, height } => (SurfaceKind::Torus, Some(width), Some(height)),
            SurfaceSpec::Sphere => (SurfaceKind::Sphere, None, None),
            SurfaceSpec::Hemisphere => (SurfaceKind::Hemisphere, None, None),
        };
        RawSurface {
            kind,
            width,
            height,
        }
    }
}

impl From<Surface> for SurfaceSpec {
    fn from(s: Surface) -> Self {
        match s {
            Surface::Plane => SurfaceSpec::Plane,
            Surface::Torus { width, height } => SurfaceSpec::Torus { width, height },
            Surface::Sphere => SurfaceSpec::Sphere,
            Surface::Hemisphere => SurfaceSpec::Hemisphere,
        }
    }
}

impl From<SurfaceSpec> for Surface {
    fn from(s: SurfaceSpec) -> Self {
        match s {
            SurfaceSpec::Plane => Surface::Plane,
            SurfaceSpec::Torus { width, height } => Surface::Torus { width, height },
            SurfaceSpec::Sphere => Surface::Sphere,
            SurfaceSpec::Hemisphere => Surface::Hemisphere,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoleKind {
    Inner,
    Fixed,
    Segment,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec {
    pub id: usize,
    pub role: RoleKind,
    /// Fixed position of a `fixed` vertex; optional start position otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segment: Option<[Vec<f64>; 2]>,
}

fn one() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

fn is_zero_shift(s: &[i64; 2]) -> bool {
    *s == [0, 0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub u: usize,
    pub v: usize,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "is_zero_shift")]
    pub shift: [i64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub format: u32,
    pub surface: SurfaceSpec,
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faces: Option<Vec<Vec<usize>>>,
}

fn point(c: &[f64], what: &str) -> Result<SurfacePoint> {
    SurfacePoint::from_coords(c).map_err(|e| Error::InvalidGraph(format!("{what}: {e}")))
}

fn check_format(format: u32) -> Result<()> {
    if format != FORMAT {
        return Err(Error::InvalidArgument(format!(
            "unsupported format {format}, expected {FORMAT}"
        )));
    }
    Ok(())
}

impl GraphFile {
    /// Describes `g`; `start` adds positions for inner and segment vertices.
    pub fn from_graph(g: &Graph, start: Option<&[Option<SurfacePoint>]>) -> Self {
        let vertices = g
            .roles()
            .iter()
            .enumerate()
            .map(|(id, role)| {
                let given = start
                    .and_then(|s| s.get(id).copied().flatten())
                    .map(|p| p.coords());
                match role {
                    VertexRole::Inner => VertexSpec {
                        id,
                        role: RoleKind::Inner,
                        position: given,
                        segment: None,
                    },
                    VertexRole::OuterFixed(p) => VertexSpec {
                        id,
                        role: RoleKind::Fixed,
                        position: Some(p.coords()),
                        segment: None,
                    },
                    VertexRole::OuterSegment { a, b } => VertexSpec {
                        id,
                        role: RoleKind::Segment,
                        position: given,
                        segment: Some([a.coords(), b.coords()]),
                    },
                }
            })
            .collect();
        let edges = g
            .edges()
            .iter()
            .map(|e| EdgeSpec {
                u: e.u,
                v: e.v,
                gamma: e.gamma,
                shift: [e.shift.wx, e.shift.wy],
            })
            .collect();
        GraphFile {
            format: FORMAT,
            surface: (*g.surface()).into(),
            vertices,
            edges,
            faces: None,
        }
    }

    /// Builds and validates the graph. Vertex ids must be `0..n` in any order.
    /// Returns the optional per-vertex start positions alongside.
    pub fn to_graph(&self) -> Result<(Graph, Vec<Option<SurfacePoint>>)> {
        check_format(self.format)?;
        let surface: Surface = self.surface.into();
        surface.validate()?;
        let n = self.vertices.len();
        let mut slots: Vec<Option<&VertexSpec>> = vec![None; n];
        for v in &self.vertices {
            match slots.get_mut(v.id) {
                Some(slot @ None) => *slot = Some(v),
                Some(Some(_)) => {
                    return Err(Error::InvalidGraph(format!("duplicate vertex id {}", v.id)))
                }
                None => {
                    return Err(Error::InvalidGraph(format!(
                        "vertex id {} out of range 0..{n}",
                        v.id
                    )))
                }
            }
        }
        let mut roles = Vec::with_capacity(n);
        let mut start = Vec::with_capacity(n);
        for (id, v) in slots.into_iter().enumerate() {
            let v = v.expect("ids are a permutation of 0..n");
            let pos = v
                .position
                .as_deref()
                .map(|c| point(c, &format!("vertex {id} position")))
                .transpose()?;
            let role = match v.role {
                RoleKind::Inner => VertexRole::Inner,
                RoleKind::Fixed => VertexRole::OuterFixed(pos.ok_or_else(|| {
                    Error::InvalidGraph(format!("fixed vertex {id} needs a position"))
                })?),
                RoleKind::Segment => {
                    let [a, b] = v.segment.as_ref().ok_or_else(|| {
                        Error::InvalidGraph(format!("segment vertex {id} needs a segment"))
                    })?;
                    let what = format!("vertex {id} segment");
                    VertexRole::OuterSegment {
                        a: point(a, &what)?,
                        b: point(b, &what)?,
                    }
                }
            };
            if v.role != RoleKind::Segment && v.segment.is_some() {
                return Err(Error::InvalidGraph(format!(
                    "vertex {id} is not a segment vertex"
                )));
            }
            start.push(if v.role == RoleKind::Fixed { None } else { pos });
            roles.push(role);
        }
        let edges = self
            .edges
            .iter()
            .map(|e| {
                Edge::new(e.u, e.v)
                    .with_gamma(e.gamma)
                    .with_shift(Shift::new(e.shift[0], e.shift[1]))
            })
            .collect();
        let g = Graph::new(surface, roles, edges);
        let report = validate_graph(&g);
        if !report.is_valid() {
            return Err(Error::InvalidGraph(report.summary()));
        }
        if let Some(faces) = &self.faces {
            if let Some(bad) = faces.iter().flatten().find(|&&v| v >= n) {
                return Err(Error::InvalidGraph(format!(
                    "face refers to missing vertex {bad}"
                )));
            }
        }
        Ok((g, start))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsMeta {
    pub seed: u64,
    pub max_sweeps: usize,
    pub tol_displacement: f64,
    pub tol_mrep: f64,
    pub center_method: String,
    pub init: String,
    pub descent: bool,
}

impl From<&SolverParams> for ParamsMeta {
    fn from(p: &SolverParams) -> Self {
        let method = match p.center_method {
            CenterMethod::Exact => "exact",
            CenterMethod::Incremental => "incremental",
            CenterMethod::Iterative => "iterative",
        };
        let init = match p.init {
            InitStrategy::Auto => "auto",
            InitStrategy::Centroid => "centroid",
            InitStrategy::Random => "random",
            InitStrategy::Spectral => "spectral",
        };
        ParamsMeta {
            seed: p.rng_seed,
            max_sweeps: p.max_sweeps,
            tol_displacement: p.tol_displacement,
            tol_mrep: p.tol_mrep,
            center_method: method.into(),
            init: init.into(),
            descent: p.descent,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceMeta {
    pub sweeps: usize,
    pub descent_steps: usize,
    pub converged: bool,
    pub final_displacement: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl From<&SolverTrace> for TraceMeta {
    fn from(t: &SolverTrace) -> Self {
        TraceMeta {
            sweeps: t.sweeps,
            descent_steps: t.descent_steps,
            converged: t.converged,
            final_displacement: t.displacements.last().copied(),
            warnings: t.warnings.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<ParamsMeta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceMeta>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingFile {
    pub format: u32,
    /// Inline graph; exactly one of `graph` and `graph_ref` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphFile>,
    /// Path of a graph file, relative to the embedding file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_ref: Option<String>,
    pub positions: BTreeMap<usize, Vec<f64>>,
    /// Torus cell of each vertex, omitted when zero.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub cells: BTreeMap<usize, [i64; 2]>,
    #[serde(default)]
    pub meta: Meta,
}

impl EmbeddingFile {
    pub fn new(g: &Graph, e: &Embedding, meta: Meta) -> Self {
        let positions = e
            .positions
            .iter()
            .enumerate()
            .map(|(v, p)| (v, p.coords()))
            .collect();
        let cells = e
            .cells
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(v, c)| (v, [c.wx, c.wy]))
            .collect();
        EmbeddingFile {
            format: FORMAT,
            graph: Some(GraphFile::from_graph(g, None)),
            graph_ref: None,
            positions,
            cells,
            meta,
        }
    }

    /// The graph file this embedding refers to; `base` resolves `graph_ref`.
    pub fn graph_file(&self, base: Option<&Path>) -> Result<GraphFile> {
        match (&self.graph, &self.graph_ref) {
            (Some(g), None) => Ok(g.clone()),
            (None, Some(r)) => {
                let path = base.map_or_else(|| Path::new(r).to_path_buf(), |b| b.join(r));
                read_graph(&path)
            }
            _ => Err(Error::InvalidArgument(
                "exactly one of graph and graph_ref must be given".into(),
            )),
        }
    }

    /// Builds the graph and the embedding and checks that they match.
    pub fn resolve(&self, base: Option<&Path>) -> Result<(Graph, Embedding, GraphFile)> {
        check_format(self.format)?;
        let gf = self.graph_file(base)?;
        let (g, _) = gf.to_graph()?;
        let e = self.embedding(&g)?;
        Ok((g, e, gf))
    }

    pub fn embedding(&self, g: &Graph) -> Result<Embedding> {
        let n = g.num_vertices();
        if self.positions.len() != n || self.positions.keys().any(|&v| v >= n) {
            return Err(Error::Mismatch(format!(
                "positions must cover vertex ids 0..{n} exactly, got {} entries",
                self.positions.len()
            )));
        }
        if let Some(&v) = self.cells.keys().find(|&&v| v >= n) {
            return Err(Error::Mismatch(format!(
                "cell given for missing vertex {v}"
            )));
        }
        let positions = self
            .positions
            .iter()
            .map(|(v, c)| {
                SurfacePoint::from_coords(c)
                    .map_err(|e| Error::Mismatch(format!("vertex {v}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let cells = (0..n)
            .map(|v| {
                self.cells
                    .get(&v)
                    .map_or(Shift::ZERO, |c| Shift::new(c[0], c[1]))
            })
            .collect();
        let e = Embedding::with_cells(positions, cells);
        e.check(g).map_err(|err| match err {
            Error::Mismatch(m) => Error::Mismatch(m),
            other => Error::Mismatch(other.to_string()),
        })?;
        Ok(e)
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("file types always serialize");
    s.push('\n');
    s
}

pub fn parse_graph(text: &str) -> Result<GraphFile> {
    Ok(serde_json::from_str(text)?)
}

pub fn parse_embedding(text: &str) -> Result<EmbeddingFile> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_graph(path: &Path) -> Result<GraphFile> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn read_embedding(path: &Path) -> Result<EmbeddingFile> {
    parse_embedding(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{icosahedron, square4pack, square5, torus_hex, torus_hex_lattice};

    #[test]
    fn graph_round_trip() {
        for g in [square5(), icosahedron(), torus_hex(4, 4), square4pack().0] {
            let f = GraphFile::from_graph(&g, None);
            let text = to_json(&f);
            let back = parse_graph(&text).unwrap();
            assert_eq!(back, f);
            assert_eq!(to_json(&back), text);
            assert_eq!(back.to_graph().unwrap().0, g);
        }
    }

    #[test]
    fn embedding_round_trip_is_bit_exact() {
        let g = torus_hex(4, 4);
        let mut e = torus_hex_lattice(4, 4);
        e.positions[3] = SurfacePoint::flat(0.1 + 0.2, 1.0 / 3.0);
        e.cells[3] = Shift::new(-1, 2);
        let f = EmbeddingFile::new(&g, &e, Meta::default());
        let back = parse_embedding(&to_json(&f)).unwrap();
        let (g2, e2, _) = back.resolve(None).unwrap();
        assert_eq!(g2, g);
        for (a, b) in e.positions.iter().zip(&e2.positions) {
            for (x, y) in a.coords().iter().zip(b.coords()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        assert_eq!(e2.cells, e.cells);
    }

    #[test]
    fn defaults_and_unknown_fields() {
        let text = r#"{"format":1,"surface":{"kind":"plane"},
            "vertices":[{"id":1,"role":"fixed","position":[0,0]},{"id":0,"role":"inner"},
                        {"id":2,"role":"fixed","position":[1,0]},{"id":3,"role":"fixed","position":[0,1]}],
            "edges":[{"u":0,"v":1},{"u":0,"v":2,"gamma":2},{"u":0,"v":3}]}"#;
        let (g, start) = parse_graph(text).unwrap().to_graph().unwrap();
        assert_eq!(g.edges()[0].gamma, 1.0);
        assert_eq!(g.edges()[1].gamma, 2.0);
        assert!(g.is_inner(0) && start.iter().all(Option::is_none));
        let bad = text.replacen(r#""u":0,"v":1"#, r#""u":0,"v":1,"weight":3"#, 1);
        assert!(matches!(parse_graph(&bad), Err(Error::Json(_))));
        let bad = text.replacen(r#"{"kind":"plane"}"#, r#"{"kind":"plane","w":1}"#, 1);
        assert!(parse_graph(&bad).is_err());
    }

    #[test]
    fn rejects_bad_ids_and_roles() {
        let mut f = GraphFile::from_graph(&square5(), None);
        f.vertices[1].id = 0;
        assert!(matches!(f.to_graph(), Err(Error::InvalidGraph(_))));
        let mut f = GraphFile::from_graph(&square5(), None);
        f.vertices[1].position = None;
        assert!(f.to_graph().is_err());
        let mut f = GraphFile::from_graph(&square5(), None);
        f.format = 2;
        assert!(f.to_graph().is_err());
    }

    #[test]
    fn mismatch_is_reported() {
        let g = square5();
        let f = GraphFile::from_graph(&g, None);
        let mut ef = EmbeddingFile {
            format: 1,
            graph: Some(f),
            graph_ref: None,
            positions: (0..4).map(|v| (v, vec![0.0, 0.0])).collect(),
            cells: BTreeMap::new(),
            meta: Meta::default(),
        };
        assert!(matches!(ef.resolve(None), Err(Error::Mismatch(_))));
        ef.positions.insert(4, vec![0.5, 0.5, 0.0]);
        assert!(matches!(ef.resolve(None), Err(Error::Mismatch(_))));
    }
}
