//! Builders for the bundled example graphs and embeddings.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use serde::Deserialize;

use crate::graph::{Edge, Embedding, Graph, VertexRole};
use crate::io::{self, EmbeddingFile, GraphFile, Meta};
use crate::surface::{Shift, Surface, SurfacePoint, Vec3};
use crate::validation::three_connected;

/// Square with fixed corners and one inner vertex joined to all of them.
pub fn square5() -> Graph {
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

/// Path outer - inner - outer with outers at (0, 0) and (2, 0).
pub fn path3() -> Graph {
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

/// Four disks of radius 1/4 in the unit square. Vertices 0-3 are the disk
/// centers; 4-11 are wall contacts restricted to half walls. Disk-wall edges
/// carry rescale factor 2 so that every edge has rescaled length 1/2.
pub fn square4pack() -> (Graph, Embedding) {
    let centers = [(0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75)];
    let mut roles = vec![VertexRole::Inner; 4];
    let mut positions: Vec<SurfacePoint> = centers
        .iter()
        .map(|&(x, y)| SurfacePoint::flat(x, y))
        .collect();
    let mut edges: Vec<Edge> = (0..4).map(|i| Edge::new(i, (i + 1) % 4)).collect();
    // (disk, contact point, half-wall endpoints)
    let walls = [
        (0, (0.25, 0.0), (0.0, 0.0), (0.5, 0.0)),
        (0, (0.0, 0.25), (0.0, 0.0), (0.0, 0.5)),
        (1, (0.75, 0.0), (0.5, 0.0), (1.0, 0.0)),
        (1, (1.0, 0.25), (1.0, 0.0), (1.0, 0.5)),
        (2, (1.0, 0.75), (1.0, 0.5), (1.0, 1.0)),
        (2, (0.75, 1.0), (0.5, 1.0), (1.0, 1.0)),
        (3, (0.25, 1.0), (0.0, 1.0), (0.5, 1.0)),
        (3, (0.0, 0.75), (0.0, 0.5), (0.0, 1.0)),
    ];
    for (disk, c, a, b) in walls {
        let id = roles.len();
        roles.push(VertexRole::OuterSegment {
            a: SurfacePoint::flat(a.0, a.1),
            b: SurfacePoint::flat(b.0, b.1),
        });
        positions.push(SurfacePoint::flat(c.0, c.1));
        edges.push(Edge::new(disk, id).with_gamma(2.0));
    }
    (
        Graph::new(Surface::Plane, roles, edges),
        Embedding::new(positions),
    )
}

/// Three mutually touching unit-distance disks in a cradle of three fixed
/// outer contacts at distance 1, each tilted by `tilt_deg` from the radial
/// direction. Vertices 0-2 are inner, 3-5 the outer contacts of 0-2.
///
/// For a nonzero tilt the configuration is an M-representation that a joint
/// rotation of the inner triangle can unjam; for zero tilt the rotation
/// keeps all lengths to first order.
pub fn pocket5(tilt_deg: f64) -> (Graph, Embedding) {
    let r = 1.0 / 3f64.sqrt();
    let tilt = tilt_deg.to_radians();
    let mut roles = vec![VertexRole::Inner; 3];
    let mut positions = Vec::new();
    let mut outers = Vec::new();
    for k in 0..3 {
        let a = PI / 2.0 + 2.0 * PI * k as f64 / 3.0;
        let (x, y) = (r * a.cos(), r * a.sin());
        positions.push(SurfacePoint::flat(x, y));
        outers.push(SurfacePoint::flat(
            x + (a + tilt).cos(),
            y + (a + tilt).sin(),
        ));
    }
    for p in &outers {
        roles.push(VertexRole::OuterFixed(*p));
    }
    positions.extend(outers);
    let mut edges = vec![Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 0)];
    edges.extend((0..3).map(|k| Edge::new(k, k + 3)));
    (
        Graph::new(Surface::Plane, roles, edges),
        Embedding::new(positions),
    )
}

#[derive(Deserialize)]
struct Tammes {
    min_angle_deg: f64,
    points: Vec<[f64; 3]>,
    contacts: Vec<[usize; 2]>,
}

fn tammes() -> Tammes {
    serde_json::from_str(include_str!("../corpus/tammes13_reference.json"))
        .expect("bundled reference parses")
}

/// Best-known 13-point configuration (independent numerical optimum) and its
/// minimum pairwise angle in degrees.
pub fn tammes13_reference() -> (Vec<Vec3>, f64) {
    let t = tammes();
    let pts = t
        .points
        .iter()
        .map(|p| Vec3::new(p[0], p[1], p[2]).normalize())
        .collect();
    (pts, t.min_angle_deg)
}

fn tammes_edges() -> Vec<Edge> {
    tammes()
        .contacts
        .iter()
        .map(|c| Edge::new(c[0], c[1]))
        .collect()
}

/// Ring size of the bundled equator example.
pub const EQUATOR_N: usize = 6;
/// Height the central cycle is pulled to in the bundled equator starts.
pub const EQUATOR_PULL: f64 = 0.05;
/// Tilt of the outer vertices in the bundled pocket example.
pub const POCKET_TILT_DEG: f64 = 15.0;

/// Triangle of the 13-vertex contact graph used as the fixed outer face.
pub const DEMO13_OUTER: [usize; 3] = [0, 1, 7];

/// The 13-vertex contact graph on the sphere, no outer vertices.
pub fn demo13_sphere() -> Graph {
    Graph::new(Surface::Sphere, vec![VertexRole::Inner; 13], tammes_edges())
}

/// The 13-vertex contact graph in the plane with one triangle fixed as an
/// equilateral outer face of circumradius 1.
pub fn demo13_plane() -> Graph {
    let mut roles = vec![VertexRole::Inner; 13];
    for (k, &v) in DEMO13_OUTER.iter().enumerate() {
        let a = PI / 2.0 + 2.0 * PI * k as f64 / 3.0;
        roles[v] = VertexRole::OuterFixed(SurfacePoint::flat(a.cos(), a.sin()));
    }
    Graph::new(Surface::Plane, roles, tammes_edges())
}

/// Vertices of the regular icosahedron on the unit sphere.
pub fn icosahedron_points() -> Vec<Vec3> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts = Vec::new();
    for &a in &[-1.0, 1.0] {
        for &b in &[-phi, phi] {
            pts.push(Vec3::new(0.0, a, b));
            pts.push(Vec3::new(a, b, 0.0));
            pts.push(Vec3::new(b, 0.0, a));
        }
    }
    pts.iter().map(|p| p.normalize()).collect()
}

/// Icosahedron graph on the sphere (12 vertices, 30 edges).
pub fn icosahedron() -> Graph {
    let pts = icosahedron_points();
    let min = 1.0 / 5f64.sqrt();
    let mut edges = Vec::new();
    for i in 0..12 {
        for j in i + 1..12 {
            if (pts[i].dot(&pts[j]) - min).abs() < 1e-9 {
                edges.push(Edge::new(i, j));
            }
        }
    }
    Graph::new(Surface::Sphere, vec![VertexRole::Inner; 12], edges)
}

/// Triangular lattice of `m` x `k` vertices with unit spacing on the torus
/// `m` x `k sqrt(3)/2` (`k` even). Vertex `(i, j)` has id `j m + i`.
pub fn torus_hex(m: usize, k: usize) -> Graph {
    assert!(
        m >= 3 && k >= 4 && k.is_multiple_of(2),
        "torus_hex needs m >= 3 and even k >= 4"
    );
    let surface = Surface::torus(m as f64, k as f64 * 3f64.sqrt() / 2.0).expect("positive size");
    let id = |i: usize, j: usize| j * m + i;
    let wrap = |i: i64, n: usize| -> (usize, i64) {
        let n = n as i64;
        (i.rem_euclid(n) as usize, i.div_euclid(n))
    };
    let mut edges = Vec::new();
    for j in 0..k {
        for i in 0..m {
            let forward: [(i64, i64); 3] = if j % 2 == 0 {
                [(1, 0), (0, 1), (-1, 1)]
            } else {
                [(1, 0), (0, 1), (1, 1)]
            };
            for (di, dj) in forward {
                let (ni, wx) = wrap(i as i64 + di, m);
                let (nj, wy) = wrap(j as i64 + dj, k);
                edges.push(Edge::new(id(i, j), id(ni, nj)).with_shift(Shift::new(wx, wy)));
            }
        }
    }
    Graph::new(surface, vec![VertexRole::Inner; m * k], edges)
}

/// Lattice positions of [`torus_hex`].
pub fn torus_hex_lattice(m: usize, k: usize) -> Embedding {
    let mut pos = Vec::new();
    for j in 0..k {
        for i in 0..m {
            pos.push(SurfacePoint::flat(
                i as f64 + 0.5 * (j % 2) as f64,
                j as f64 * 3f64.sqrt() / 2.0,
            ));
        }
    }
    Embedding::new(pos)
}

/// Sphere graph with a north pole, an upper ring, a central cycle, a lower
/// ring and a south pole, consecutive rings joined as antiprism bands.
/// Returns the graph and the equator start (central cycle at `z = 0`).
///
/// Ids: 0 north, `1..=n` upper ring, `n+1..=2n` central cycle,
/// `2n+1..=3n` lower ring, `3n+1` south.
pub fn equator_bistable(n: usize) -> (Graph, Vec<SurfacePoint>) {
    assert!(n >= 3);
    let upper = |i: usize| 1 + i % n;
    let central = |i: usize| 1 + n + i % n;
    let lower = |i: usize| 1 + 2 * n + i % n;
    let south = 3 * n + 1;
    let mut edges = Vec::new();
    for i in 0..n {
        edges.push(Edge::new(0, upper(i)));
        edges.push(Edge::new(upper(i), upper(i + 1)));
        edges.push(Edge::new(upper(i), central(i)));
        edges.push(Edge::new(upper(i + 1), central(i)));
        edges.push(Edge::new(central(i), central(i + 1)));
        edges.push(Edge::new(central(i), lower(i)));
        edges.push(Edge::new(central(i), lower(i + 1)));
        edges.push(Edge::new(lower(i), lower(i + 1)));
        edges.push(Edge::new(lower(i), south));
    }
    let ring = |z: f64, offset: f64| -> Vec<SurfacePoint> {
        let s = (1.0 - z * z).sqrt();
        (0..n)
            .map(|i| {
                let a = 2.0 * PI * (i as f64 + offset) / n as f64;
                SurfacePoint::spherical(s * a.cos(), s * a.sin(), z)
            })
            .collect()
    };
    let zr = 0.6;
    let mut start = vec![SurfacePoint::spherical(0.0, 0.0, 1.0)];
    start.extend(ring(zr, 0.0));
    start.extend(ring(0.0, 0.5));
    start.extend(ring(-zr, 0.0));
    start.push(SurfacePoint::spherical(0.0, 0.0, -1.0));
    (
        Graph::new(Surface::Sphere, vec![VertexRole::Inner; 3 * n + 2], edges),
        start,
    )
}

/// Lifts every start point on the equator to `z = +-dz` (then renormalizes).
pub fn pull_equator(start: &[SurfacePoint], up: bool, dz: f64) -> Vec<SurfacePoint> {
    start
        .iter()
        .map(|p| match p {
            SurfacePoint::Spherical(r) if r.z.abs() < 1e-12 => {
                SurfacePoint::spherical(r.x, r.y, if up { dz } else { -dz })
            }
            _ => *p,
        })
        .collect()
}

/// Random three-connected planar graph with `outer` fixed vertices on the
/// unit circle and `inner` inner vertices: a wheel over the outer polygon,
/// grown by inserting vertices into random triangles, then mixed by random
/// edge flips and thinned by deleting edges while three-connectivity (with
/// the outer cycle) survives. Rescale factors are drawn from `gamma`.
pub fn random_planar(seed: u64, outer: usize, inner: usize, gamma: (f64, f64)) -> Graph {
    assert!(outer >= 3 && inner >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = outer + inner;
    let hub = outer;
    let mut faces: Vec<[usize; 3]> = (0..outer).map(|i| [hub, i, (i + 1) % outer]).collect();
    let mut edges: BTreeSet<(usize, usize)> = (0..outer).map(|i| (i, hub)).collect();
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    for w in outer + 1..n {
        let f = faces.swap_remove(rng.gen_range(0..faces.len()));
        for k in 0..3 {
            edges.insert(key(f[k], w));
            faces.push([f[k], f[(k + 1) % 3], w]);
        }
    }
    let is_outer = |v: usize| v < outer;
    for _ in 0..4 * n {
        let fi = rng.gen_range(0..faces.len());
        let k = rng.gen_range(0..3);
        let (u, v) = (faces[fi][k], faces[fi][(k + 1) % 3]);
        if is_outer(u) && is_outer(v) {
            continue;
        }
        let a = faces[fi][(k + 2) % 3];
        let Some(fj) = faces
            .iter()
            .position(|f| (0..3).any(|m| f[m] == v && f[(m + 1) % 3] == u))
        else {
            continue;
        };
        let b = faces[fj]
            .iter()
            .copied()
            .find(|&x| x != u && x != v)
            .expect("triangle");
        if a == b || edges.contains(&key(a, b)) || (is_outer(a) && is_outer(b)) {
            continue;
        }
        edges.remove(&key(u, v));
        edges.insert(key(a, b));
        faces[fi] = [a, u, b];
        faces[fj] = [b, v, a];
    }
    let mut roles: Vec<VertexRole> = (0..outer)
        .map(|i| {
            let t = PI / 2.0 + 2.0 * PI * i as f64 / outer as f64;
            VertexRole::OuterFixed(SurfacePoint::flat(t.cos(), t.sin()))
        })
        .collect();
    roles.resize(n, VertexRole::Inner);
    let build = |edges: &BTreeSet<(usize, usize)>, rng: &mut ChaCha8Rng| {
        let list = edges
            .iter()
            .map(|&(u, v)| Edge::new(u, v).with_gamma(rng.gen_range(gamma.0..=gamma.1)))
            .collect();
        Graph::new(Surface::Plane, roles.clone(), list)
    };
    let mut order: Vec<(usize, usize)> = edges.iter().copied().collect();
    order.shuffle(&mut rng);
    for e in order.into_iter().take(n / 2) {
        edges.remove(&e);
        if !three_connected(&build(&edges, &mut ChaCha8Rng::seed_from_u64(0)), true) {
            edges.insert(e);
        }
    }
    build(&edges, &mut rng)
}

/// Bundled example files as `(file name, JSON text)`, in the format read by
/// the command-line tool.
pub fn example_files() -> Vec<(&'static str, String)> {
    let graph = |g: &Graph, start: Option<&[SurfacePoint]>| {
        let start: Option<Vec<Option<SurfacePoint>>> =
            start.map(|s| s.iter().copied().map(Some).collect());
        io::to_json(&GraphFile::from_graph(g, start.as_deref()))
    };
    let embedding =
        |(g, e): (Graph, Embedding)| io::to_json(&EmbeddingFile::new(&g, &e, Meta::default()));
    let (eq, start) = equator_bistable(EQUATOR_N);
    vec![
        ("square5.json", graph(&square5(), None)),
        ("path3.json", graph(&path3(), None)),
        ("square4pack.json", embedding(square4pack())),
        ("pocket5.json", embedding(pocket5(POCKET_TILT_DEG))),
        ("demo13_plane.json", graph(&demo13_plane(), None)),
        ("icosahedron.json", graph(&icosahedron(), None)),
        ("torus_hex.json", graph(&torus_hex(4, 4), None)),
        (
            "equator_bistable_up.json",
            graph(&eq, Some(&pull_equator(&start, true, EQUATOR_PULL))),
        ),
        (
            "equator_bistable_down.json",
            graph(&eq, Some(&pull_equator(&start, false, EQUATOR_PULL))),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_graph;

    #[test]
    fn builders_are_valid() {
        for g in [
            square5(),
            path3(),
            square4pack().0,
            pocket5(15.0).0,
            pocket5(0.0).0,
            demo13_plane(),
            demo13_sphere(),
            icosahedron(),
            torus_hex(4, 4),
            equator_bistable(6).0,
        ] {
            let r = validate_graph(&g);
            assert!(r.is_valid(), "{}", r.summary());
        }
    }

    #[test]
    fn icosahedron_counts() {
        let g = icosahedron();
        assert_eq!(g.num_edges(), 30);
        assert!((0..12).all(|v| g.degree(v) == 5));
    }

    #[test]
    fn torus_lattice_is_unit() {
        let g = torus_hex(4, 4);
        let e = torus_hex_lattice(4, 4);
        assert_eq!(g.num_edges(), 48);
        for i in 0..g.num_edges() {
            assert!((e.edge_length(&g, i) - 1.0).abs() < 1e-12);
        }
        assert!((0..16).all(|v| g.degree(v) == 6));
    }

    #[test]
    fn packs_are_embedded_consistently() {
        let (g, e) = square4pack();
        e.check(&g).unwrap();
        for i in 0..g.num_edges() {
            assert!((e.rescaled_length(&g, i) - 0.5).abs() < 1e-15);
        }
        let (g, e) = pocket5(15.0);
        e.check(&g).unwrap();
        for i in 0..g.num_edges() {
            assert!((e.edge_length(&g, i) - 1.0).abs() < 1e-12);
        }
    }
}
