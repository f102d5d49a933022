//! Gauss-Seidel relaxation toward stable representations: every inner vertex
//! is moved, in id order, to the M-center of its neighbors until the sweep
//! displacement falls below a tolerance.

use std::cmp::Ordering;

use nalgebra::{DMatrix, Matrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::graph::{
    compare_embeddings, edge_length_vector, validate_graph, Embedding, Graph, VertexId, VertexRole,
};
use crate::lp::{Cmp, Lp, LpOutcome};
use crate::mcenter::{
    iterate_flat, iterate_sphere, m_center_minover_sphere, plane_center, plane_value,
    segment_center, sphere_center, sphere_value, EpsilonSchedule,
};
use crate::motion;
use crate::surface::{tangent_frame, Surface, SurfacePoint, Vec2, Vec3};

/// How the M-center of a vertex's neighbors is computed during a sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterMethod {
    /// Pair/triple enumeration on every surface.
    #[default]
    Exact,
    /// Exact on flat surfaces, minover on the sphere when all rescale factors
    /// agree, the epsilon iteration otherwise.
    Incremental,
    /// The epsilon iteration everywhere.
    Iterative,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub enum InitStrategy {
    /// Positions stored in the graph if present for every inner vertex,
    /// otherwise the surface default: anchor centroid plus jitter when outer
    /// vertices exist, a uniform random start on the torus, and a spectral
    /// layout plus jitter on the sphere.
    #[default]
    Auto,
    /// Anchor centroid plus jitter (normalized centroid on the sphere).
    Centroid,
    /// Uniform random positions.
    Random,
    /// Laplacian eigenvectors 2-4 as sphere coordinates, plus jitter.
    Spectral,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverParams {
    pub tol_displacement: f64,
    pub tol_mrep: f64,
    pub max_sweeps: usize,
    pub schedule: EpsilonSchedule,
    pub rng_seed: u64,
    pub center_method: CenterMethod,
    /// Window-improvement tolerance and step budget of the epsilon iteration.
    pub iter_tol: f64,
    pub iter_max: usize,
    pub minover_steps: usize,
    /// Magnitude of the seeded start jitter.
    pub jitter: f64,
    pub init: InitStrategy,
    /// Run the lexicographic descent after the sweeps converge.
    pub descent: bool,
    /// Trust-region steps allowed in the descent.
    pub descent_steps: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            tol_displacement: 1e-10,
            tol_mrep: 1e-8,
            max_sweeps: 100_000,
            schedule: EpsilonSchedule::default(),
            rng_seed: 0,
            center_method: CenterMethod::Exact,
            iter_tol: 1e-15,
            iter_max: 100_000,
            minover_steps: 100_000,
            jitter: 1e-3,
            init: InitStrategy::Auto,
            descent: true,
            descent_steps: 5_000,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_displacement > 0.0 && self.tol_mrep > 0.0) {
            return invalid("solver tolerances must be positive");
        }
        if self.max_sweeps == 0 {
            return invalid("max_sweeps must be at least 1");
        }
        if !(self.jitter >= 0.0 && self.jitter.is_finite()) {
            return invalid("jitter must be nonnegative");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SolverTrace {
    pub displacements: Vec<f64>,
    /// Five largest inner-edge lengths after each sweep.
    pub heads: Vec<Vec<f64>>,
    pub sweeps: usize,
    pub converged: bool,
    pub descent_steps: usize,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub embedding: Embedding,
    pub max_displacement: f64,
    pub warnings: Vec<String>,
}

fn jitter2(rng: &mut ChaCha8Rng, mag: f64) -> Vec2 {
    if mag == 0.0 {
        return Vec2::zeros();
    }
    let a = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = mag * rng.gen_range(0.0f64..1.0).sqrt();
    Vec2::new(r * a.cos(), r * a.sin())
}

fn jitter_sphere(rng: &mut ChaCha8Rng, p: &Vec3, mag: f64) -> Vec3 {
    let (e1, e2) = tangent_frame(p);
    let j = jitter2(rng, mag);
    (p + e1 * j.x + e2 * j.y).normalize()
}

fn random_sphere(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Starting position of an outer vertex.
fn outer_start(role: &VertexRole) -> Option<SurfacePoint> {
    match role {
        VertexRole::Inner => None,
        VertexRole::OuterFixed(p) => Some(*p),
        VertexRole::OuterSegment { a, b } => Some(SurfacePoint::Flat((a.xy() + b.xy()) / 2.0)),
    }
}

/// Builds a start embedding for `g`. `given` supplies optional start
/// positions (used by [`InitStrategy::Auto`] when complete for inner
/// vertices).
pub fn initial_embedding(
    g: &Graph,
    params: &SolverParams,
    given: Option<&[Option<SurfacePoint>]>,
) -> Result<Embedding> {
    let n = g.num_vertices();
    let surface = *g.surface();
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut strategy = params.init.clone();
    if strategy == InitStrategy::Auto {
        if let Some(given) = given {
            if given.len() == n && g.inner_vertices().all(|v| given[v].is_some()) {
                let mut positions = Vec::with_capacity(n);
                let mut cells = Vec::with_capacity(n);
                for (v, &start) in given.iter().enumerate() {
                    let p = outer_start(g.role(v)).or(start).expect("checked above");
                    let (p, c) = surface.canonicalize(p);
                    positions.push(p);
                    cells.push(c);
                }
                let e = Embedding::with_cells(positions, cells);
                e.check(g)?;
                return Ok(e);
            }
        }
        strategy = match surface {
            Surface::Torus { .. } => InitStrategy::Random,
            Surface::Sphere if !g.has_outer() => InitStrategy::Spectral,
            _ => InitStrategy::Centroid,
        };
    }
    if strategy == InitStrategy::Spectral && !surface.is_spherical() {
        return invalid("spectral start is only available on the sphere");
    }
    let spectral = if strategy == InitStrategy::Spectral {
        Some(spectral_layout(g))
    } else {
        None
    };

    let anchors: Vec<SurfacePoint> = g.roles().iter().filter_map(outer_start).collect();
    let mut positions = Vec::with_capacity(n);
    for v in 0..n {
        if let Some(p) = outer_start(g.role(v)) {
            positions.push(p);
            continue;
        }
        let p = match (&strategy, surface) {
            (InitStrategy::Spectral, _) => SurfacePoint::Spherical(jitter_sphere(
                &mut rng,
                &spectral.as_ref().unwrap()[v],
                params.jitter,
            )),
            (InitStrategy::Random, Surface::Plane) => {
                SurfacePoint::flat(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))
            }
            (InitStrategy::Random, Surface::Torus { width, height }) => {
                SurfacePoint::flat(rng.gen_range(0.0..width), rng.gen_range(0.0..height))
            }
            (InitStrategy::Random, Surface::Sphere) => {
                SurfacePoint::Spherical(random_sphere(&mut rng))
            }
            (InitStrategy::Random, Surface::Hemisphere) => {
                let mut r = random_sphere(&mut rng);
                r.z = r.z.abs();
                SurfacePoint::Spherical(r)
            }
            (_, Surface::Plane | Surface::Torus { .. }) => {
                let c = if anchors.is_empty() {
                    Vec2::zeros()
                } else {
                    anchors.iter().map(|a| a.xy()).sum::<Vec2>() / anchors.len() as f64
                };
                SurfacePoint::Flat(c + jitter2(&mut rng, params.jitter))
            }
            (_, Surface::Sphere | Surface::Hemisphere) => {
                let s: Vec3 = anchors.iter().map(|a| a.xyz()).sum();
                let c = if s.norm() > 1e-9 {
                    s.normalize()
                } else {
                    Vec3::z()
                };
                let mut r = jitter_sphere(&mut rng, &c, params.jitter);
                if surface == Surface::Hemisphere && r.z < 0.0 {
                    r.z = -r.z;
                }
                SurfacePoint::Spherical(r)
            }
        };
        positions.push(p);
    }
    let mut cells = Vec::with_capacity(n);
    for p in positions.iter_mut() {
        let (q, c) = surface.canonicalize(*p);
        *p = q;
        cells.push(c);
    }
    Ok(Embedding::with_cells(positions, cells))
}

/// Unit vectors from Laplacian eigenvectors 2-4 (a spread-out start for
/// sphere graphs without outer vertices).
pub fn spectral_layout(g: &Graph) -> Vec<Vec3> {
    let n = g.num_vertices();
    let mut lap = DMatrix::<f64>::zeros(n, n);
    for e in g.edges() {
        lap[(e.u, e.v)] -= 1.0;
        lap[(e.v, e.u)] -= 1.0;
        lap[(e.u, e.u)] += 1.0;
        lap[(e.v, e.v)] += 1.0;
    }
    let eig = lap.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    (0..n)
        .map(|v| {
            let mut p = Vec3::zeros();
            for (k, &col) in order.iter().skip(1).take(3).enumerate() {
                p[k] = eig.eigenvectors[(v, col)];
            }
            if p.norm() > 1e-12 {
                p.normalize()
            } else {
                Vec3::z()
            }
        })
        .collect()
}

/// Neighbor targets of `v` as planar points in `v`'s frame.
fn flat_neighbors(g: &Graph, e: &Embedding, v: VertexId) -> Vec<(Vec2, f64)> {
    g.neighbors(v)
        .iter()
        .map(|inc| (e.neighbor_flat(g.surface(), v, inc), inc.gamma))
        .collect()
}

fn sphere_neighbors(g: &Graph, e: &Embedding, v: VertexId) -> Vec<(Vec3, f64)> {
    g.neighbors(v)
        .iter()
        .map(|inc| (e.positions[inc.other].xyz(), inc.gamma))
        .collect()
}

/// M-center of the neighbors of inner vertex `v` by the configured method,
/// with an optional warning.
fn vertex_center(
    g: &Graph,
    e: &Embedding,
    v: VertexId,
    params: &SolverParams,
) -> (SurfacePoint, Option<String>) {
    let surface = g.surface();
    if surface.is_flat() {
        let pts = flat_neighbors(g, e, v);
        let c = match params.center_method {
            CenterMethod::Exact | CenterMethod::Incremental => plane_center(&pts).0,
            CenterMethod::Iterative => {
                iterate_flat(
                    &pts,
                    params.schedule,
                    e.positions[v].xy(),
                    params.iter_tol,
                    params.iter_max,
                )
                .center
            }
        };
        (SurfacePoint::Flat(c), None)
    } else {
        let pts = sphere_neighbors(g, e, v);
        let uniform = pts.iter().all(|(_, g)| *g == pts[0].1);
        let mut warning = None;
        let c = match params.center_method {
            CenterMethod::Exact => sphere_center(&pts).0,
            CenterMethod::Incremental if uniform => {
                let raw: Vec<Vec3> = pts.iter().map(|(p, _)| *p).collect();
                let r = m_center_minover_sphere(&raw, params.minover_steps).expect("unit vectors");
                if let Some(d) = r.diagnostic {
                    warning = Some(format!("vertex {v}: {d}"));
                }
                r.center.xyz()
            }
            _ => {
                iterate_sphere(
                    &pts,
                    params.schedule,
                    e.positions[v].xyz(),
                    params.iter_tol,
                    params.iter_max,
                )
                .center
            }
        };
        let mut c = c;
        if *surface == Surface::Hemisphere && c.z < 0.0 {
            c.z = 0.0;
            c = c.normalize();
        }
        (SurfacePoint::Spherical(c), warning)
    }
}

/// One Gauss-Seidel sweep in vertex id order.
pub fn relax_sweep(g: &Graph, e: &Embedding, params: &SolverParams) -> Result<Sweep> {
    e.check(g)?;
    let mut out = e.clone();
    let mut max_disp: f64 = 0.0;
    let mut warnings = Vec::new();
    let surface = *g.surface();
    for v in 0..g.num_vertices() {
        match g.role(v).clone() {
            VertexRole::OuterFixed(_) => {}
            VertexRole::OuterSegment { a, b } => {
                let pts = flat_neighbors(g, &out, v);
                let (_, x, _) = segment_center(&a.xy(), &b.xy(), &pts);
                max_disp = max_disp.max((x - out.positions[v].xy()).norm());
                out.positions[v] = SurfacePoint::Flat(x);
            }
            VertexRole::Inner => {
                let (c, warning) = vertex_center(g, &out, v, params);
                warnings.extend(warning);
                if surface.is_flat() {
                    max_disp = max_disp.max((c.xy() - out.positions[v].xy()).norm());
                    let (p, dc) = surface.canonicalize(c);
                    out.positions[v] = p;
                    out.cells[v] = out.cells[v] + dc;
                } else {
                    max_disp = max_disp.max((c.xyz() - out.positions[v].xyz()).norm());
                    out.positions[v] = c;
                }
            }
        }
    }
    Ok(Sweep {
        embedding: out,
        max_displacement: max_disp,
        warnings,
    })
}

fn sweep_until_still(
    g: &Graph,
    e: &mut Embedding,
    params: &SolverParams,
    trace: &mut SolverTrace,
) -> Result<bool> {
    while trace.sweeps < params.max_sweeps {
        let s = relax_sweep(g, e, params)?;
        *e = s.embedding;
        trace.sweeps += 1;
        trace.displacements.push(s.max_displacement);
        trace.heads.push(edge_length_vector(g, e).head(5));
        for w in s.warnings {
            if !trace.warnings.contains(&w) {
                trace.warnings.push(w);
            }
        }
        if s.max_displacement < params.tol_displacement {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Trust-region descent on the sorted length vector. Sweeps only move one
/// vertex at a time and can come to rest at an M-representation that a
/// joint motion still improves. Each step solves a linear program for the
/// motion that most reduces the longest unfrozen edges while not lengthening
/// frozen ones, then re-sweeps and keeps the result only if it compares
/// Less. A level of equal edges is frozen once no such step exists.
fn lex_descent(
    g: &Graph,
    mut e: Embedding,
    params: &SolverParams,
    trace: &mut SolverTrace,
) -> Result<Embedding> {
    let edges: Vec<usize> = (0..g.num_edges()).filter(|&i| g.is_inner_edge(i)).collect();
    let scale = edges
        .iter()
        .map(|&i| e.rescaled_length(g, i))
        .fold(0.0, f64::max);
    if edges.is_empty() || scale == 0.0 {
        return Ok(e);
    }
    let rho_start = 1e-2 * scale;
    let rho_min = 1e-11 * scale;
    let level_tol = 1e-9 * scale;
    // Sweeps stop once vertices move less than tol_displacement, so smaller
    // length changes are not resolved.
    let drop_tol = (1e-13 * scale).max(params.tol_displacement);
    let mut rho = rho_start;
    let mut frozen = vec![false; edges.len()];
    for _ in 0..params.descent_steps {
        let lengths: Vec<f64> = edges.iter().map(|&i| e.rescaled_length(g, i)).collect();
        let Some(m) = (0..edges.len())
            .filter(|&k| !frozen[k])
            .map(|k| lengths[k])
            .reduce(f64::max)
        else {
            break;
        };
        let dofs = motion::dofs(g, &e, false);
        let nd = dofs.len();
        let bounds: Vec<(f64, f64)> = dofs
            .iter()
            .map(|f| {
                let (lo, hi) = (f.lo.max(-rho), f.hi.min(rho));
                if hi > lo {
                    (lo, hi)
                } else {
                    (0.0, 0.0)
                }
            })
            .collect();
        let mut lp = Lp::new(nd + 2);
        lp.objective[nd] = 1.0;
        lp.objective[nd + 1] = -1.0;
        for (j, (lo, hi)) in bounds.iter().enumerate() {
            let mut row = vec![0.0; nd + 2];
            row[j] = 1.0;
            lp.add_row(row, Cmp::Le, hi - lo);
        }
        for (k, &i) in edges.iter().enumerate() {
            let mut row = motion::length_gradient(g, &e, &dofs, i);
            let shift: f64 = row.iter().zip(&bounds).map(|(c, (lo, _))| c * lo).sum();
            row.extend([0.0, 0.0]);
            if frozen[k] {
                lp.add_row(row, Cmp::Le, -shift);
            } else {
                row[nd] = -1.0;
                row[nd + 1] = 1.0;
                lp.add_row(row, Cmp::Le, m - lengths[k] - shift);
            }
        }
        let mut cap = vec![0.0; nd + 2];
        cap[nd + 1] = 1.0;
        lp.add_row(cap, Cmp::Le, 2.0 * scale);
        let step = match lp.solve() {
            LpOutcome::Optimal { x, value } if value < -drop_tol => Some(
                x[..nd]
                    .iter()
                    .zip(&bounds)
                    .map(|(y, (lo, _))| y + lo)
                    .collect::<Vec<f64>>(),
            ),
            _ => None,
        };
        let mut improved = false;
        let found = step.is_some();
        if let Some(step) = step {
            let mut cand = motion::apply(g, &e, &dofs, &step);
            if !sweep_until_still(g, &mut cand, params, trace)? {
                break;
            }
            // The decisive entry must drop clearly; entries before it may only
            // move by rounding, so the top of the vector cannot creep up over
            // many accepted steps.
            let (a, b) = (edge_length_vector(g, &cand), edge_length_vector(g, &e));
            let decisive =
                a.0.iter()
                    .zip(&b.0)
                    .position(|(x, y)| (x - y).abs() > drop_tol);
            if decisive.is_some_and(|i| {
                a.0[i] < b.0[i] && (0..i).all(|j| a.0[j] <= b.0[j] + 1e-15 * scale)
            }) {
                e = cand;
                improved = true;
            }
        }
        trace.descent_steps += 1;
        if improved {
            rho = (2.0 * rho).min(rho_start);
            frozen.iter_mut().for_each(|f| *f = false);
            continue;
        }
        rho /= 8.0;
        if !found || rho < rho_min {
            for k in 0..edges.len() {
                if !frozen[k] && lengths[k] >= m - level_tol {
                    frozen[k] = true;
                }
            }
            rho = rho_start;
        }
    }
    Ok(e)
}

/// Sweeps until the maximum displacement drops below `tol_displacement` or
/// `max_sweeps` is reached, then (if enabled) runs the lexicographic descent.
/// A run that comes to rest away from an M-representation is reported as
/// not converged.
pub fn solve_stable(
    g: &Graph,
    e0: &Embedding,
    params: &SolverParams,
) -> Result<(Embedding, SolverTrace)> {
    params.validate()?;
    let report = validate_graph(g);
    if !report.is_valid() {
        return Err(Error::InvalidGraph(report.summary()));
    }
    e0.check(g)?;
    let mut e = e0.clone();
    let mut trace = SolverTrace::default();
    trace.converged = sweep_until_still(g, &mut e, params, &mut trace)?;
    if trace.converged && params.descent {
        e = lex_descent(g, e, params, &mut trace)?;
    }
    if trace.converged {
        let m = is_m_representation(g, &e, params.tol_mrep)?;
        if !m.is_m_representation {
            trace.converged = false;
            trace.warnings.push(format!(
                "sweeps stalled {:.3e} away from an M-representation",
                m.max_deviation
            ));
        }
    }
    Ok((e, trace))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MRepFlag {
    pub vertex: VertexId,
    /// Distance from the vertex to the M-center of its neighbors.
    pub deviation: f64,
    /// Radius at the vertex minus the radius at the M-center.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MRepReport {
    pub is_m_representation: bool,
    pub tol: f64,
    pub max_deviation: f64,
    pub flagged: Vec<MRepFlag>,
}

/// Compares every inner vertex with the exact M-center of its neighbors.
pub fn is_m_representation(g: &Graph, e: &Embedding, tol: f64) -> Result<MRepReport> {
    e.check(g)?;
    let mut flagged = Vec::new();
    let mut max_dev: f64 = 0.0;
    for v in g.inner_vertices() {
        let (dev, margin) = if g.surface().is_flat() {
            let pts = flat_neighbors(g, e, v);
            let (c, r) = plane_center(&pts);
            let p = e.positions[v].xy();
            ((c - p).norm(), plane_value(&p, &pts) - r)
        } else {
            let pts = sphere_neighbors(g, e, v);
            let (c, r) = sphere_center(&pts);
            let p = e.positions[v].xyz();
            ((c - p).norm(), sphere_value(&p, &pts) - r)
        };
        max_dev = max_dev.max(dev);
        if dev > tol {
            flagged.push(MRepFlag {
                vertex: v,
                deviation: dev,
                margin,
            });
        }
    }
    Ok(MRepReport {
        is_m_representation: flagged.is_empty(),
        tol,
        max_deviation: max_dev,
        flagged,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityEvidence {
    pub trials: usize,
    pub delta: f64,
    pub less: usize,
    pub equal: usize,
    pub greater: usize,
}

/// Moves `v` of `e` by `d` (tangent displacement on the sphere).
fn displace(surface: &Surface, e: &mut Embedding, v: VertexId, d: Vec2) {
    match e.positions[v] {
        SurfacePoint::Flat(p) => {
            let (q, dc) = surface.canonicalize(SurfacePoint::Flat(p + d));
            e.positions[v] = q;
            e.cells[v] = e.cells[v] + dc;
        }
        SurfacePoint::Spherical(r) => {
            let (e1, e2) = tangent_frame(&r);
            let mut q = (r + e1 * d.x + e2 * d.y).normalize();
            if *surface == Surface::Hemisphere && q.z < 0.0 {
                q.z = 0.0;
                q = q.normalize();
            }
            e.positions[v] = SurfacePoint::Spherical(q);
        }
    }
}

/// Samples random perturbations of magnitude at most `delta` per vertex and
/// counts how they compare with `e`.
pub fn perturb_and_compare(
    g: &Graph,
    e: &Embedding,
    delta: f64,
    trials: usize,
    rng_seed: u64,
) -> Result<StabilityEvidence> {
    e.check(g)?;
    if !(delta >= 0.0 && delta.is_finite()) {
        return invalid(format!(
            "perturbation size must be nonnegative, got {delta}"
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut ev = StabilityEvidence {
        trials,
        delta,
        less: 0,
        equal: 0,
        greater: 0,
    };
    let surface = *g.surface();
    for _ in 0..trials {
        let mut p = e.clone();
        for v in 0..g.num_vertices() {
            match g.role(v) {
                VertexRole::OuterFixed(_) => {}
                VertexRole::Inner => {
                    let d = jitter2(&mut rng, delta);
                    displace(&surface, &mut p, v, d);
                }
                VertexRole::OuterSegment { a, b } => {
                    let (a, b) = (a.xy(), b.xy());
                    let dir = (b - a).normalize();
                    let s = if delta > 0.0 {
                        rng.gen_range(-delta..=delta)
                    } else {
                        0.0
                    };
                    let len = (b - a).norm();
                    let t = ((p.positions[v].xy() - a).dot(&dir) + s).clamp(0.0, len);
                    p.positions[v] = SurfacePoint::Flat(a + dir * t);
                }
            }
        }
        match compare_embeddings(g, &p, e) {
            Ordering::Less => ev.less += 1,
            Ordering::Equal => ev.equal += 1,
            Ordering::Greater => ev.greater += 1,
        }
    }
    Ok(ev)
}

/// Nearest-image reduction of a planar difference on the torus.
fn min_image(surface: &Surface, d: Vec2) -> Vec2 {
    match *surface {
        Surface::Torus { width, height } => Vec2::new(
            d.x - (d.x / width).round() * width,
            d.y - (d.y / height).round() * height,
        ),
        _ => d,
    }
}

/// Best rigid alignment of `e2` onto `e1`: a translation on the plane and
/// torus, an orthogonal map on the sphere and a rotation on the hemisphere.
/// Returns the aligned copy of `e2` and the largest remaining per-vertex
/// distance.
pub fn align_for_comparison(g: &Graph, e1: &Embedding, e2: &Embedding) -> Result<(Embedding, f64)> {
    e1.check(g)?;
    e2.check(g)?;
    let surface = *g.surface();
    let n = g.num_vertices();
    if n == 0 {
        return Ok((e2.clone(), 0.0));
    }
    if surface.is_flat() {
        let raw: Vec<Vec2> = (0..n)
            .map(|v| e1.positions[v].xy() - e2.positions[v].xy())
            .collect();
        // lift all displacements next to the first one so the mean is meaningful
        let base = raw[0];
        let lifted: Vec<Vec2> = raw
            .iter()
            .map(|d| base + min_image(&surface, d - base))
            .collect();
        let t = lifted.iter().sum::<Vec2>() / n as f64;
        let mut aligned = e2.clone();
        let mut residual: f64 = 0.0;
        for v in 0..n {
            let (p, dc) = surface.canonicalize(SurfacePoint::Flat(e2.positions[v].xy() + t));
            aligned.positions[v] = p;
            aligned.cells[v] = e2.cells[v] + dc;
            residual = residual.max(min_image(&surface, e1.positions[v].xy() - p.xy()).norm());
        }
        Ok((aligned, residual))
    } else {
        let a: Vec<Vec3> = e1.sphere_points();
        let b: Vec<Vec3> = e2.sphere_points();
        let mut h = Matrix3::zeros();
        for (p, q) in a.iter().zip(&b) {
            h += q * p.transpose();
        }
        let svd = h.svd(true, true);
        let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
        // Mirror images are equally stable on the full sphere, so any
        // orthogonal map is allowed there; the hemisphere keeps orientation.
        let d = if surface == Surface::Sphere {
            1.0
        } else {
            (vt.transpose() * u.transpose()).determinant().signum()
        };
        let rot = vt.transpose() * Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, d)) * u.transpose();
        let mut aligned = e2.clone();
        let mut residual: f64 = 0.0;
        for v in 0..n {
            let q = (rot * b[v]).normalize();
            aligned.positions[v] = SurfacePoint::Spherical(q);
            residual = residual.max((a[v] - q).norm());
        }
        Ok((aligned, residual))
    }
}

/// Moves `v` to the M-center of its neighbors, keeping everything else.
pub fn move_to_center(g: &Graph, e: &Embedding, v: VertexId) -> Result<Embedding> {
    e.check(g)?;
    if !g.is_inner(v) {
        return invalid(format!("vertex {v} is not inner"));
    }
    let mut out = e.clone();
    let (c, _) = vertex_center(g, e, v, &SolverParams::default());
    if g.surface().is_flat() {
        let (p, dc) = g.surface().canonicalize(c);
        out.positions[v] = p;
        out.cells[v] = out.cells[v] + dc;
    } else {
        out.positions[v] = c;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::surface::Shift;

    fn square5() -> Graph {
        let mut roles: Vec<VertexRole> = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
            .iter()
            .map(|&(x, y)| VertexRole::OuterFixed(SurfacePoint::flat(x, y)))
            .collect();
        roles.push(VertexRole::Inner);
        Graph::new(
            Surface::Plane,
            roles,
            (0..4).map(|i| Edge::new(4, i)).collect(),
        )
    }

    fn with_inner(g: &Graph, p: (f64, f64)) -> Embedding {
        let mut pos: Vec<SurfacePoint> = (0..4).map(|v| outer_start(g.role(v)).unwrap()).collect();
        pos.push(SurfacePoint::flat(p.0, p.1));
        Embedding::new(pos)
    }

    #[test]
    fn square_center_in_one_sweep() {
        let g = square5();
        let s = relax_sweep(&g, &with_inner(&g, (0.9, 0.9)), &SolverParams::default()).unwrap();
        assert!((s.embedding.positions[4].xy() - Vec2::new(0.5, 0.5)).norm() < 1e-15);
        assert!((s.max_displacement - 0.4 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn path_center() {
        let g = Graph::new(
            Surface::Plane,
            vec![
                VertexRole::OuterFixed(SurfacePoint::flat(0.0, 0.0)),
                VertexRole::Inner,
                VertexRole::OuterFixed(SurfacePoint::flat(2.0, 0.0)),
            ],
            vec![Edge::new(0, 1), Edge::new(1, 2)],
        );
        let e0 = initial_embedding(&g, &SolverParams::default(), None).unwrap();
        let (e, t) = solve_stable(&g, &e0, &SolverParams::default()).unwrap();
        assert!(t.converged);
        assert!((e.positions[1].xy() - Vec2::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn stable_input_stays_put() {
        let g = square5();
        let e = with_inner(&g, (0.5, 0.5));
        let (out, t) = solve_stable(&g, &e, &SolverParams::default()).unwrap();
        assert_eq!(t.sweeps, 1);
        assert_eq!(t.displacements[0], 0.0);
        assert_eq!(out, e);
    }

    #[test]
    fn nudged_vertex_is_flagged() {
        let g = square5();
        assert!(
            is_m_representation(&g, &with_inner(&g, (0.5, 0.5)), 1e-8)
                .unwrap()
                .is_m_representation
        );
        let r = is_m_representation(&g, &with_inner(&g, (0.501, 0.5)), 1e-8).unwrap();
        assert_eq!(r.flagged.len(), 1);
        assert_eq!(r.flagged[0].vertex, 4);
        assert!((r.flagged[0].deviation - 1e-3).abs() < 1e-12);
        // the corners at distance sqrt(0.499^2 + 0.5^2) vs sqrt(0.5)
        let expect = (0.501f64.powi(2) + 0.25).sqrt() - 0.5f64.sqrt();
        assert!((r.flagged[0].margin - expect).abs() < 1e-12);
    }

    #[test]
    fn zero_delta_gives_only_equal() {
        let g = square5();
        let ev = perturb_and_compare(&g, &with_inner(&g, (0.5, 0.5)), 0.0, 20, 3).unwrap();
        assert_eq!(ev.equal, 20);
        let ev = perturb_and_compare(&g, &with_inner(&g, (0.5, 0.5)), 1e-4, 200, 3).unwrap();
        assert_eq!(ev.less, 0);
    }

    #[test]
    fn translation_aligns_exactly() {
        let g = Graph::new(
            Surface::Plane,
            vec![VertexRole::Inner; 3],
            vec![Edge::new(0, 1), Edge::new(1, 2)],
        );
        let e1 = Embedding::new(vec![
            SurfacePoint::flat(0.0, 0.0),
            SurfacePoint::flat(1.0, 0.2),
            SurfacePoint::flat(0.4, 2.0),
        ]);
        let e2 = Embedding::new(
            e1.positions
                .iter()
                .map(|p| SurfacePoint::Flat(p.xy() + Vec2::new(0.3, 0.7)))
                .collect(),
        );
        let (_, res) = align_for_comparison(&g, &e1, &e2).unwrap();
        assert!(res < 1e-12);
    }

    #[test]
    fn torus_alignment_wraps() {
        let t = Surface::torus(1.0, 1.0).unwrap();
        let g = Graph::new(
            t,
            vec![VertexRole::Inner; 2],
            vec![
                Edge::new(0, 1),
                Edge::new(0, 1).with_shift(Shift::new(1, 0)),
                Edge::new(0, 1).with_shift(Shift::new(0, 1)),
            ],
        );
        let e1 = Embedding::new(vec![
            SurfacePoint::flat(0.95, 0.5),
            SurfacePoint::flat(0.05, 0.5),
        ]);
        let e2 = Embedding::new(vec![
            SurfacePoint::flat(0.15, 0.6),
            SurfacePoint::flat(0.25, 0.6),
        ]);
        let (a, res) = align_for_comparison(&g, &e1, &e2).unwrap();
        assert!(res < 1e-12, "{res}");
        a.check(&g).unwrap();
    }

    #[test]
    fn sphere_rotation_aligns() {
        let g = Graph::new(
            Surface::Sphere,
            vec![VertexRole::Inner; 4],
            vec![Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 3)],
        );
        let pts = [
            Vec3::x(),
            Vec3::y(),
            Vec3::new(0.0, 0.6, 0.8),
            Vec3::new(-0.36, 0.48, 0.8),
        ];
        let rot = nalgebra::Rotation3::from_euler_angles(0.3, -1.1, 2.0);
        let e1 = Embedding::new(pts.iter().map(|p| SurfacePoint::Spherical(*p)).collect());
        let e2 = Embedding::new(
            pts.iter()
                .map(|p| SurfacePoint::Spherical(rot * p))
                .collect(),
        );
        let (_, res) = align_for_comparison(&g, &e1, &e2).unwrap();
        assert!(res < 1e-9);
    }

    #[test]
    fn init_respects_outers_and_surface() {
        let g = square5();
        let e = initial_embedding(&g, &SolverParams::default(), None).unwrap();
        e.check(&g).unwrap();
        assert!((e.positions[4].xy() - Vec2::new(0.5, 0.5)).norm() <= 1e-3);
    }
}
