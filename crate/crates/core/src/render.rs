//! Deterministic SVG drawings of embeddings.
//!
//! Flat surfaces are drawn to scale with y pointing up. The torus is clipped
//! to its fundamental rectangle and edges that cross it are drawn as two
//! stubs, one from each endpoint. Spherical surfaces use an orthographic
//! view; anything on the far side is dashed.

use std::fmt::Write as _;

use crate::error::Result;
use crate::graph::{Embedding, Graph, VertexId, VertexRole};
use crate::surface::{tangent_frame, Surface, Vec2, Vec3};
use crate::validation::packing_radius;

const MARGIN: f64 = 20.0;
const VERTEX_R: f64 = 4.0;
const ARC_STEPS: usize = 32;
const CAP_STEPS: usize = 96;

#[derive(Clone, Debug, PartialEq)]
pub struct RenderOptions {
    pub width: u32,
    /// Overlay disks of the packing radius at the packing centers.
    pub disks: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            width: 800,
            disks: false,
        }
    }
}

/// Unit vector toward the viewer, and the screen basis, for the sphere.
pub fn sphere_view(surface: &Surface) -> (Vec3, Vec3, Vec3) {
    if *surface == Surface::Hemisphere {
        return (Vec3::z(), Vec3::x(), Vec3::y());
    }
    let view = Vec3::new(0.35, -0.8, 0.5).normalize();
    let right = Vec3::z().cross(&view).normalize();
    let up = view.cross(&right);
    (view, right, up)
}

struct Canvas {
    out: String,
}

impl Canvas {
    fn new(width: f64, height: f64) -> Self {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
            w = fmt(width),
            h = fmt(height)
        );
        let _ = writeln!(
            out,
            r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#,
            fmt(width),
            fmt(height)
        );
        Canvas { out }
    }

    fn line(&mut self, class: &str, a: Vec2, b: Vec2, extra: &str) {
        let _ = writeln!(
            self.out,
            r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"{extra}/>"#,
            fmt(a.x),
            fmt(a.y),
            fmt(b.x),
            fmt(b.y)
        );
    }

    fn polyline(&mut self, class: &str, pts: &[Vec2], dashed: bool) {
        if pts.len() < 2 {
            return;
        }
        let coords: Vec<String> = pts
            .iter()
            .map(|p| format!("{},{}", fmt(p.x), fmt(p.y)))
            .collect();
        let dash = if dashed {
            r#" stroke-dasharray="4 3" stroke="gray""#
        } else {
            r#" stroke="black""#
        };
        let _ = writeln!(
            self.out,
            r#"<polyline class="{class}" points="{}" fill="none"{dash}/>"#,
            coords.join(" ")
        );
    }

    fn vertex(&mut self, v: VertexId, p: Vec2, outer: bool, hidden: bool) {
        let fill = if outer { "black" } else { "white" };
        let stroke = if hidden {
            r#" stroke="gray" stroke-dasharray="2 2""#
        } else {
            r#" stroke="black""#
        };
        let _ = writeln!(
            self.out,
            r#"<circle class="vertex" data-id="{v}" cx="{}" cy="{}" r="{}" fill="{fill}"{stroke}/>"#,
            fmt(p.x),
            fmt(p.y),
            fmt(VERTEX_R)
        );
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn fmt(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Maps surface coordinates to pixels, y up.
struct Frame {
    lo: Vec2,
    hi_y: f64,
    scale: f64,
    offset: Vec2,
}

impl Frame {
    fn fit(lo: Vec2, hi: Vec2, width: f64) -> (Frame, f64) {
        let span = (hi - lo).max().max(1e-12);
        let scale = (width - 2.0 * MARGIN) / span;
        let height = (hi.y - lo.y) * scale + 2.0 * MARGIN;
        let offset = Vec2::new(
            MARGIN + ((width - 2.0 * MARGIN) - (hi.x - lo.x) * scale) / 2.0,
            MARGIN,
        );
        (
            Frame {
                lo,
                hi_y: hi.y,
                scale,
                offset,
            },
            height,
        )
    }

    fn map(&self, p: Vec2) -> Vec2 {
        Vec2::new(
            self.offset.x + (p.x - self.lo.x) * self.scale,
            self.offset.y + (self.hi_y - p.y) * self.scale,
        )
    }
}

fn disk_centers(g: &Graph) -> Vec<VertexId> {
    if g.has_outer() {
        g.inner_vertices().collect()
    } else {
        (0..g.num_vertices()).collect()
    }
}

pub fn render_svg(g: &Graph, e: &Embedding, opts: &RenderOptions) -> Result<String> {
    e.check(g)?;
    let radius = if opts.disks {
        packing_radius(g, e)?.map(|p| p.radius)
    } else {
        None
    };
    if g.surface().is_flat() {
        Ok(render_flat(g, e, opts, radius))
    } else {
        Ok(render_sphere(g, e, opts, radius))
    }
}

fn render_flat(g: &Graph, e: &Embedding, opts: &RenderOptions, radius: Option<f64>) -> String {
    let surface = *g.surface();
    let width = opts.width as f64;
    let (lo, hi) = match surface {
        Surface::Torus { width, height } => (Vec2::zeros(), Vec2::new(width, height)),
        _ => {
            let mut pts: Vec<Vec2> = e.positions.iter().map(|p| p.xy()).collect();
            for role in g.roles() {
                if let VertexRole::OuterSegment { a, b } = role {
                    pts.extend([a.xy(), b.xy()]);
                }
            }
            let r = radius.unwrap_or(0.0);
            let mut lo = pts
                .iter()
                .fold(Vec2::repeat(f64::INFINITY), |m, p| m.inf(p));
            let mut hi = pts
                .iter()
                .fold(Vec2::repeat(f64::NEG_INFINITY), |m, p| m.sup(p));
            if pts.is_empty() {
                (lo, hi) = (Vec2::zeros(), Vec2::repeat(1.0));
            }
            (lo - Vec2::repeat(r), hi + Vec2::repeat(r))
        }
    };
    let (frame, height) = Frame::fit(lo, hi, width);
    let mut c = Canvas::new(width, height);
    let torus = matches!(surface, Surface::Torus { .. });
    let clip = if torus {
        let (a, b) = (
            frame.map(Vec2::new(lo.x, hi.y)),
            frame.map(Vec2::new(hi.x, lo.y)),
        );
        let _ = writeln!(
            c.out,
            r#"<defs><clipPath id="cell"><rect x="{}" y="{}" width="{}" height="{}"/></clipPath></defs>"#,
            fmt(a.x),
            fmt(a.y),
            fmt(b.x - a.x),
            fmt(b.y - a.y)
        );
        let _ = writeln!(
            c.out,
            r#"<rect class="cell" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="gray"/>"#,
            fmt(a.x),
            fmt(a.y),
            fmt(b.x - a.x),
            fmt(b.y - a.y)
        );
        r#" clip-path="url(#cell)""#
    } else {
        ""
    };
    for role in g.roles() {
        if let VertexRole::OuterSegment { a, b } = role {
            c.line(
                "wall",
                frame.map(a.xy()),
                frame.map(b.xy()),
                r#" stroke-width="3" stroke-opacity="0.4""#,
            );
        }
    }
    if let Some(r) = radius {
        let _ = writeln!(c.out, r#"<g class="disks"{clip}>"#);
        let shifts: Vec<Vec2> = if torus {
            let p = surface.period();
            (-1..=1)
                .flat_map(|i| (-1..=1).map(move |j| Vec2::new(i as f64 * p.x, j as f64 * p.y)))
                .collect()
        } else {
            vec![Vec2::zeros()]
        };
        for v in disk_centers(g) {
            for s in &shifts {
                let p = frame.map(e.positions[v].xy() + s);
                let _ = writeln!(
                    c.out,
                    r#"<circle class="disk" data-id="{v}" cx="{}" cy="{}" r="{}" fill="steelblue" fill-opacity="0.25" stroke="steelblue"/>"#,
                    fmt(p.x),
                    fmt(p.y),
                    fmt(r * frame.scale)
                );
            }
        }
        c.out.push_str("</g>\n");
    }
    let _ = writeln!(c.out, r#"<g class="edges"{clip}>"#);
    let (cell_lo, cell_hi) = (lo - Vec2::repeat(1e-9), hi + Vec2::repeat(1e-9));
    for (i, edge) in g.edges().iter().enumerate() {
        let pu = e.positions[edge.u].xy();
        let pv = e.positions[edge.v].xy();
        let d = e.edge_vector_flat(g, i);
        c.line("edge", frame.map(pu), frame.map(pu + d), "");
        let end = pu + d;
        let inside =
            end.x >= cell_lo.x && end.y >= cell_lo.y && end.x <= cell_hi.x && end.y <= cell_hi.y;
        if torus && !inside {
            c.line("edge stub", frame.map(pv), frame.map(pv - d), "");
        }
    }
    c.out.push_str("</g>\n");
    for v in 0..g.num_vertices() {
        c.vertex(v, frame.map(e.positions[v].xy()), !g.is_inner(v), false);
    }
    c.finish()
}

fn render_sphere(g: &Graph, e: &Embedding, opts: &RenderOptions, radius: Option<f64>) -> String {
    let width = opts.width as f64;
    let (view, right, up) = sphere_view(g.surface());
    let center = Vec2::repeat(width / 2.0);
    let scale = width / 2.0 - MARGIN;
    let project = |p: &Vec3| center + Vec2::new(p.dot(&right), -p.dot(&up)) * scale;
    let split = |pts: &[Vec3]| split_runs(pts, &view, &project);
    let mut c = Canvas::new(width, width);
    let _ = writeln!(
        c.out,
        r#"<circle class="horizon" cx="{}" cy="{}" r="{}" fill="none" stroke="gray"/>"#,
        fmt(center.x),
        fmt(center.y),
        fmt(scale)
    );
    if let Some(r) = radius {
        c.out.push_str("<g class=\"disks\">\n");
        for v in disk_centers(g) {
            let p = e.positions[v].xyz();
            let (t1, t2) = tangent_frame(&p);
            let pts: Vec<Vec3> = (0..=CAP_STEPS)
                .map(|k| {
                    let phi = std::f64::consts::TAU * k as f64 / CAP_STEPS as f64;
                    p * r.cos() + (t1 * phi.cos() + t2 * phi.sin()) * r.sin()
                })
                .collect();
            let _ = writeln!(c.out, r#"<g class="disk" data-id="{v}">"#);
            for (run, hidden) in split(&pts) {
                c.polyline("cap", &run, hidden);
            }
            c.out.push_str("</g>\n");
        }
        c.out.push_str("</g>\n");
    }
    let mut runs = Vec::new();
    for edge in g.edges() {
        let (a, b) = (e.positions[edge.u].xyz(), e.positions[edge.v].xyz());
        let pts: Vec<Vec3> = (0..=ARC_STEPS)
            .map(|k| slerp(&a, &b, k as f64 / ARC_STEPS as f64))
            .collect();
        runs.extend(split(&pts));
    }
    for hidden_pass in [true, false] {
        for (pts, hidden) in &runs {
            if *hidden == hidden_pass {
                c.polyline("edge", pts, *hidden);
            }
        }
    }
    for v in 0..g.num_vertices() {
        let p = e.positions[v].xyz();
        c.vertex(v, project(&p), !g.is_inner(v), p.dot(&view) < 0.0);
    }
    c.finish()
}

/// Splits a sampled curve into runs on the near and far side of the sphere.
fn split_runs(
    pts: &[Vec3],
    view: &Vec3,
    project: &dyn Fn(&Vec3) -> Vec2,
) -> Vec<(Vec<Vec2>, bool)> {
    let mut runs = Vec::new();
    let mut cur: Vec<Vec2> = Vec::new();
    let mut cur_hidden = None;
    for p in pts {
        let hidden = p.dot(view) < 0.0;
        let q = project(p);
        if let Some(h) = cur_hidden.filter(|&h| h != hidden) {
            runs.push((std::mem::take(&mut cur), h));
            cur.push(*runs.last().unwrap().0.last().unwrap());
        }
        cur_hidden = Some(hidden);
        cur.push(q);
    }
    if let Some(h) = cur_hidden {
        runs.push((cur, h));
    }
    runs
}

fn slerp(a: &Vec3, b: &Vec3, t: f64) -> Vec3 {
    let p = a * (1.0 - t) + b * t;
    let n = p.norm();
    if n > 1e-12 {
        p / n
    } else {
        *a
    }
}
