//! Infinitesimal motions of an embedding: one coordinate per degree of
//! freedom of each movable vertex, and first-order edge-length gradients.

use crate::graph::{Embedding, Graph, VertexId, VertexRole};
use crate::surface::{tangent_frame, Surface, SurfacePoint, Vec3};

/// One degree of freedom: vertex `v` moves along `dir` (ambient, `z = 0` on
/// flat surfaces). `lo..=hi` bounds the step (finite only for segments).
#[derive(Clone, Debug)]
pub struct Dof {
    pub v: VertexId,
    pub dir: Vec3,
    pub lo: f64,
    pub hi: f64,
}

pub fn ambient(p: &SurfacePoint) -> Vec3 {
    match p {
        SurfacePoint::Flat(v) => Vec3::new(v.x, v.y, 0.0),
        SurfacePoint::Spherical(v) => *v,
    }
}

/// Degrees of freedom of inner vertices and, unless `pin_segments`, of
/// segment outer vertices.
pub fn dofs(g: &Graph, e: &Embedding, pin_segments: bool) -> Vec<Dof> {
    let mut out = Vec::new();
    let flat = g.surface().is_flat();
    for v in 0..g.num_vertices() {
        match g.role(v) {
            VertexRole::Inner => {
                let (a, b) = if flat {
                    (Vec3::x(), Vec3::y())
                } else {
                    tangent_frame(&e.positions[v].xyz())
                };
                for dir in [a, b] {
                    out.push(Dof {
                        v,
                        dir,
                        lo: f64::NEG_INFINITY,
                        hi: f64::INFINITY,
                    });
                }
            }
            VertexRole::OuterSegment { a, b } if !pin_segments => {
                let (a, b) = (a.xy(), b.xy());
                let len = (b - a).norm();
                if len > 0.0 {
                    let t = (e.positions[v].xy() - a).dot(&(b - a)) / len;
                    let d = (b - a) / len;
                    out.push(Dof {
                        v,
                        dir: Vec3::new(d.x, d.y, 0.0),
                        lo: -t,
                        hi: len - t,
                    });
                }
            }
            _ => {}
        }
    }
    out
}

/// Vector from `u` to `v` across edge `i` in ambient coordinates.
pub fn edge_vector(g: &Graph, e: &Embedding, i: usize) -> Vec3 {
    if g.surface().is_flat() {
        let d = e.edge_vector_flat(g, i);
        Vec3::new(d.x, d.y, 0.0)
    } else {
        let edge = &g.edges()[i];
        e.positions[edge.v].xyz() - e.positions[edge.u].xyz()
    }
}

/// Gradient of the rescaled length of edge `i` with respect to `dofs`.
pub fn length_gradient(g: &Graph, e: &Embedding, dofs: &[Dof], i: usize) -> Vec<f64> {
    let edge = &g.edges()[i];
    let d = edge_vector(g, e, i);
    let len = d.norm();
    let w = if len > 0.0 {
        d * (edge.gamma / len)
    } else {
        Vec3::zeros()
    };
    dofs.iter()
        .map(|f| {
            let mut c = 0.0;
            if f.v == edge.v {
                c += w.dot(&f.dir);
            }
            if f.v == edge.u {
                c -= w.dot(&f.dir);
            }
            c
        })
        .collect()
}

/// Applies the step `x` (one entry per dof) and maps back onto the surface.
pub fn apply(g: &Graph, e: &Embedding, dofs: &[Dof], x: &[f64]) -> Embedding {
    apply_moves(g, e, &moves(g, dofs, x))
}

/// Per-vertex ambient displacement of the step `x`.
pub fn moves(g: &Graph, dofs: &[Dof], x: &[f64]) -> Vec<Vec3> {
    let mut moves = vec![Vec3::zeros(); g.num_vertices()];
    for (f, s) in dofs.iter().zip(x) {
        moves[f.v] += f.dir * *s;
    }
    moves
}

/// Moves every vertex by its ambient displacement and maps back onto the
/// surface (segment vertices are clamped to their segment).
pub fn apply_moves(g: &Graph, e: &Embedding, moves: &[Vec3]) -> Embedding {
    let surface = *g.surface();
    let mut out = e.clone();
    for (v, m) in moves.iter().enumerate() {
        if m.norm_squared() == 0.0 {
            continue;
        }
        let p = ambient(&e.positions[v]) + m;
        match (g.role(v), surface) {
            (VertexRole::OuterSegment { a, b }, _) => {
                let (a, b) = (a.xy(), b.xy());
                let d = b - a;
                let t = ((p.xy() - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
                out.positions[v] = SurfacePoint::Flat(a + d * t);
            }
            (_, Surface::Plane) => out.positions[v] = SurfacePoint::Flat(p.xy()),
            (_, Surface::Torus { .. }) => {
                let (q, dc) = surface.canonicalize(SurfacePoint::Flat(p.xy()));
                out.positions[v] = q;
                out.cells[v] = out.cells[v] + dc;
            }
            (_, Surface::Hemisphere) => {
                let mut q = p.normalize();
                if q.z < 0.0 {
                    q.z = 0.0;
                    q = q.normalize();
                }
                out.positions[v] = SurfacePoint::Spherical(q);
            }
            (_, Surface::Sphere) => out.positions[v] = SurfacePoint::Spherical(p.normalize()),
        }
    }
    out
}
