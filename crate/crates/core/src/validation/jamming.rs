//! First-order jamming test: a linear program over infinitesimal motions.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::graph::{Embedding, Graph, VertexId, VertexRole};
use crate::lp::{Cmp, Lp, LpOutcome};
use crate::motion::{self, Dof};
use crate::surface::{Surface, Vec3};

/// LP optimum above which the embedding is not first-order jammed.
pub const LP_THRESHOLD: f64 = 1e-7;
/// Relative singular-value cutoff for the rank of the rigidity matrix.
const RANK_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct FirstOrder {
    pub rigid: bool,
    pub optimum: f64,
    /// Per-vertex ambient displacement lengthening some edge and shortening
    /// none to first order.
    pub witness: Option<Vec<Vec3>>,
    /// Dimension of the length-preserving first-order motions, with segment
    /// vertices pinned and rigid motions quotiented.
    pub flex_dim: usize,
    pub diagnostic: Option<String>,
}

/// Removes the rigid motions of an unanchored embedding: translations on the
/// torus (first inner vertex pinned), rotations on the sphere (one vertex
/// pinned, a second restricted to its great circle through the first), and
/// translations plus rotation in the plane.
fn quotient(g: &Graph, e: &Embedding, dofs: Vec<Dof>) -> Vec<Dof> {
    if g.has_outer() {
        return dofs;
    }
    let inner: Vec<VertexId> = g.inner_vertices().collect();
    let Some(&v0) = inner.first() else {
        return dofs;
    };
    let p0 = motion::ambient(&e.positions[v0]);
    let mut out: Vec<Dof> = dofs.into_iter().filter(|d| d.v != v0).collect();
    let second = match g.surface() {
        Surface::Sphere => inner.iter().skip(1).find_map(|&v| {
            let p = e.positions[v].xyz();
            let axis = p0.cross(&p);
            (axis.norm() > 1e-6).then(|| (v, axis.cross(&p).normalize()))
        }),
        Surface::Plane => inner.iter().skip(1).find_map(|&v| {
            let d = motion::ambient(&e.positions[v]) - p0;
            (d.norm() > 1e-12).then(|| (v, d.normalize()))
        }),
        _ => None,
    };
    if let Some((v1, dir)) = second {
        out.retain(|d| d.v != v1);
        out.push(Dof {
            v: v1,
            dir,
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        });
    }
    out
}

fn free_dofs(g: &Graph, e: &Embedding, pin_segments: bool) -> Vec<Dof> {
    quotient(g, e, motion::dofs(g, e, pin_segments))
}

/// Maximizes the total first-order lengthening `sum s_e` subject to
/// `grad_e . delta >= s_e >= 0` and `|delta|_inf <= 1`.
pub fn check_first_order_jammed(g: &Graph, e: &Embedding) -> Result<FirstOrder> {
    e.check(g)?;
    let dofs = free_dofs(g, e, false);
    let nd = dofs.len();
    let bounds: Vec<(f64, f64)> = dofs
        .iter()
        .map(|d| (d.lo.max(-1.0), d.hi.min(1.0)))
        .collect();
    let grads: Vec<Vec<f64>> = (0..g.num_edges())
        .map(|i| motion::length_gradient(g, e, &dofs, i))
        .collect();
    let active: Vec<usize> = (0..g.num_edges())
        .filter(|&i| grads[i].iter().any(|c| *c != 0.0))
        .collect();
    let ns = active.len();
    let mut lp = Lp::new(nd + ns);
    for k in 0..ns {
        lp.objective[nd + k] = -1.0;
    }
    for (j, (lo, hi)) in bounds.iter().enumerate() {
        let mut row = vec![0.0; nd + ns];
        row[j] = 1.0;
        lp.add_row(row, Cmp::Le, (hi - lo).max(0.0));
    }
    for (k, &i) in active.iter().enumerate() {
        let mut row = grads[i].clone();
        let shift: f64 = row.iter().zip(&bounds).map(|(c, (lo, _))| c * lo).sum();
        row.resize(nd + ns, 0.0);
        row[nd + k] = -1.0;
        lp.add_row(row, Cmp::Ge, -shift);
    }
    let (optimum, witness, diagnostic) = match lp.solve() {
        LpOutcome::Optimal { x, value } => {
            let opt = -value;
            let witness = (opt > LP_THRESHOLD).then(|| {
                let delta: Vec<f64> = x[..nd]
                    .iter()
                    .zip(&bounds)
                    .map(|(y, (lo, _))| y + lo)
                    .collect();
                motion::moves(g, &dofs, &delta)
            });
            (opt, witness, None)
        }
        other => (0.0, None, Some(format!("linear program failed: {other:?}"))),
    };
    let flex_dim = flex_dimension(g, e);
    Ok(FirstOrder {
        rigid: witness.is_none(),
        optimum,
        witness,
        flex_dim,
        diagnostic,
    })
}

/// Kernel dimension of the rigidity matrix (edge-length gradients) over the
/// quotiented inner degrees of freedom, segment vertices pinned.
pub fn flex_dimension(g: &Graph, e: &Embedding) -> usize {
    let dofs = free_dofs(g, e, true);
    let nd = dofs.len();
    if nd == 0 {
        return 0;
    }
    let rows: Vec<Vec<f64>> = (0..g.num_edges())
        .map(|i| motion::length_gradient(g, e, &dofs, i))
        .collect();
    let m = DMatrix::from_fn(rows.len().max(1), nd, |r, c| {
        rows.get(r).map_or(0.0, |row| row[c])
    });
    let sv = m.svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv
        .iter()
        .filter(|&&s| s > RANK_TOL * top.max(1e-300))
        .count();
    nd - rank
}

/// Applies `step * witness` to `e`.
pub fn replay_witness(g: &Graph, e: &Embedding, witness: &[Vec3], step: f64) -> Embedding {
    let scaled: Vec<Vec3> = witness.iter().map(|w| w * step).collect();
    motion::apply_moves(g, e, &scaled)
}

/// First derivatives of all edge lengths along `witness`.
pub fn witness_derivatives(g: &Graph, e: &Embedding, witness: &[Vec3]) -> Vec<f64> {
    (0..g.num_edges())
        .map(|i| {
            let edge = &g.edges()[i];
            let d = motion::edge_vector(g, e, i);
            let len = d.norm();
            let (mu, mv) = (move_of(g, witness, edge.u), move_of(g, witness, edge.v));
            if len == 0.0 {
                0.0
            } else {
                edge.gamma * d.dot(&(mv - mu)) / len
            }
        })
        .collect()
}

fn move_of(g: &Graph, witness: &[Vec3], v: VertexId) -> Vec3 {
    match g.role(v) {
        VertexRole::OuterFixed(_) => Vec3::zeros(),
        _ => witness[v],
    }
}
