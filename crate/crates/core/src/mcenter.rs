//! Weighted minimax centers ("M-centers") of finite point sets.
//!
//! The exact solvers enumerate the possible active sets of the optimum:
//! single points, pairs and triples. On the plane the objective
//! `max_i gamma_i |x - p_i|` is convex, so the smallest feasible candidate is
//! the global minimizer. The same enumeration is used on the sphere, where
//! chord length is monotone in angle.

use crate::error::{invalid, Result};
use crate::surface::{distance, Shift, Surface, SurfacePoint, Vec2, Vec3};

/// Relative slack used when testing whether a candidate circle covers all
/// points.
const FEASIBLE_REL: f64 = 1e-12;
/// Relative slack for membership in the active set.
const ACTIVE_REL: f64 = 1e-9;

pub const NO_HEMISPHERE: &str = "no open hemisphere contains all points";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedPoint {
    pub point: SurfacePoint,
    pub gamma: f64,
    pub shift: Shift,
}

impl WeightedPoint {
    pub fn new(point: SurfacePoint, gamma: f64) -> Self {
        WeightedPoint {
            point,
            gamma,
            shift: Shift::ZERO,
        }
    }

    pub fn with_shift(mut self, shift: Shift) -> Self {
        self.shift = shift;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MCenterResult {
    pub center: SurfacePoint,
    pub radius: f64,
    pub active_set: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    pub diagnostic: Option<String>,
}

/// Step sizes `eps_k = eps0 / (1 + k / tau)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonSchedule {
    pub eps0: f64,
    pub tau: f64,
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        EpsilonSchedule {
            eps0: 0.5,
            tau: 50.0,
        }
    }
}

impl EpsilonSchedule {
    pub fn new(eps0: f64, tau: f64) -> Result<Self> {
        if !(eps0 > 0.0 && eps0.is_finite() && tau > 0.0 && tau.is_finite()) {
            return invalid(format!(
                "schedule needs eps0 > 0 and tau > 0, got {eps0}, {tau}"
            ));
        }
        Ok(EpsilonSchedule { eps0, tau })
    }

    pub fn eps(&self, k: usize) -> f64 {
        self.eps0 / (1.0 + k as f64 / self.tau)
    }
}

fn check_points(pts: &[WeightedPoint]) -> Result<()> {
    if pts.is_empty() {
        return invalid("M-center of an empty point set");
    }
    for (i, p) in pts.iter().enumerate() {
        if !(p.gamma > 0.0 && p.gamma.is_finite()) {
            return invalid(format!(
                "point {i}: rescale factor {} is not positive",
                p.gamma
            ));
        }
    }
    Ok(())
}

/// Maximum rescaled distance from `r` to the points.
pub fn radius_at(surface: &Surface, r: &SurfacePoint, pts: &[WeightedPoint]) -> Result<f64> {
    check_points(pts)?;
    let mut m: f64 = 0.0;
    for p in pts {
        m = m.max(p.gamma * distance(surface, r, &p.point, p.shift)?);
    }
    Ok(m)
}

/// Planar targets in the universal cover: each point translated by its shift.
fn flat_targets(surface: &Surface, pts: &[WeightedPoint]) -> Result<Vec<(Vec2, f64)>> {
    pts.iter()
        .map(|p| match p.point {
            SurfacePoint::Flat(v) => {
                if !p.shift.is_zero() && !matches!(surface, Surface::Torus { .. }) {
                    return invalid(format!("shift {} is only meaningful on a torus", p.shift));
                }
                Ok((v + surface.shift_vector(p.shift), p.gamma))
            }
            SurfacePoint::Spherical(_) => invalid("spherical point given to a flat M-center"),
        })
        .collect()
}

fn sphere_targets(pts: &[WeightedPoint]) -> Result<Vec<(Vec3, f64)>> {
    pts.iter()
        .map(|p| match p.point {
            SurfacePoint::Spherical(v) if p.shift.is_zero() => Ok((v, p.gamma)),
            SurfacePoint::Spherical(_) => invalid("shift given on the sphere"),
            SurfacePoint::Flat(_) => invalid("flat point given to a spherical M-center"),
        })
        .collect()
}

pub(crate) fn plane_value(x: &Vec2, pts: &[(Vec2, f64)]) -> f64 {
    pts.iter()
        .map(|(p, g)| g * (x - p).norm())
        .fold(0.0, f64::max)
}

pub(crate) fn sphere_value(x: &Vec3, pts: &[(Vec3, f64)]) -> f64 {
    pts.iter()
        .map(|(p, g)| g * (x - p).norm())
        .fold(0.0, f64::max)
}

fn active_indices<V>(radius: f64, pts: &[(V, f64)], dist: impl Fn(&V) -> f64) -> Vec<usize> {
    let cut = radius * (1.0 - ACTIVE_REL) - 1e-12;
    pts.iter()
        .enumerate()
        .filter(|(_, (p, g))| g * dist(p) >= cut)
        .map(|(i, _)| i)
        .collect()
}

/// Picks the feasible candidate of smallest radius, falling back to the best
/// objective value if rounding made every candidate infeasible.
struct Selector<V> {
    best_feasible: Option<(V, f64)>,
    best_any: Option<(V, f64)>,
}

impl<V: Copy> Selector<V> {
    fn new() -> Self {
        Selector {
            best_feasible: None,
            best_any: None,
        }
    }

    fn offer(&mut self, x: V, claimed: f64, value: f64) {
        if self.best_any.is_none_or(|(_, v)| value < v) {
            self.best_any = Some((x, value));
        }
        let scale = claimed.abs().max(1e-300);
        if value <= claimed + FEASIBLE_REL * scale + 1e-15
            && self.best_feasible.is_none_or(|(_, v)| value < v)
        {
            self.best_feasible = Some((x, value));
        }
    }

    fn finish(self) -> (V, f64) {
        self.best_feasible
            .or(self.best_any)
            .expect("at least one candidate")
    }
}

/// Exact weighted minimax center of planar points; returns `(center, radius)`.
pub(crate) fn plane_center(pts: &[(Vec2, f64)]) -> (Vec2, f64) {
    let n = pts.len();
    if n == 1 {
        return (pts[0].0, 0.0);
    }
    let mut sel = Selector::new();
    for (p, _) in pts {
        sel.offer(*p, 0.0, plane_value(p, pts));
    }
    for i in 0..n {
        for j in i + 1..n {
            let (pi, gi) = pts[i];
            let (pj, gj) = pts[j];
            let t = gj / (gi + gj);
            let x = pi + (pj - pi) * t;
            let claimed = gi * gj * (pj - pi).norm() / (gi + gj);
            sel.offer(x, claimed, plane_value(&x, pts));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for (x, r) in plane_triple(&pts[i], &pts[j], &pts[k]) {
                    sel.offer(x, r, plane_value(&x, pts));
                }
            }
        }
    }
    sel.finish()
}

/// Points equidistant (in rescaled distance) from three weighted points.
fn plane_triple(a: &(Vec2, f64), b: &(Vec2, f64), c: &(Vec2, f64)) -> Vec<(Vec2, f64)> {
    let origin = a.0;
    let g1 = a.1 * a.1;
    let rows: Vec<(Vec2, f64, f64)> = [b, c]
        .iter()
        .map(|(p, g)| {
            let q = p - origin;
            let gk = g * g;
            // 2 gk q.x = gk |q|^2 - (g1 - gk) u
            (2.0 * gk * q, gk * q.norm_squared(), -(g1 - gk))
        })
        .collect();
    let det = rows[0].0.x * rows[1].0.y - rows[0].0.y * rows[1].0.x;
    let scale = rows[0].0.norm() * rows[1].0.norm();
    if det.abs() <= 1e-12 * scale || scale == 0.0 {
        return Vec::new();
    }
    let solve = |r0: f64, r1: f64| {
        Vec2::new(
            (r0 * rows[1].0.y - rows[0].0.y * r1) / det,
            (rows[0].0.x * r1 - r0 * rows[1].0.x) / det,
        )
    };
    let x0 = solve(rows[0].1, rows[1].1);
    let x1 = solve(rows[0].2, rows[1].2);
    let qa = x1.norm_squared();
    let qb = 2.0 * x0.dot(&x1) - 1.0;
    let qc = x0.norm_squared();
    let mut us = Vec::new();
    if qa.abs() <= 1e-14 * (qb.abs() + qc.abs()) {
        if qb != 0.0 {
            us.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let s = disc.sqrt();
            let q = -0.5 * (qb + qb.signum() * s);
            if q != 0.0 {
                us.push(q / qa);
                us.push(qc / q);
            } else {
                us.push(-qb / (2.0 * qa));
            }
        }
    }
    let tri = [a, b, c];
    us.into_iter()
        .filter(|u| *u >= 0.0 && u.is_finite())
        .map(|u| {
            let x = polish_triple(x0 + x1 * u + origin, &tri);
            let r = tri
                .iter()
                .map(|(p, g)| g * (x - p).norm())
                .fold(0.0, f64::max);
            (x, r)
        })
        .collect()
}

/// Newton steps on `g_k |x - p_k| = r` for three points.
fn polish_triple(mut x: Vec2, tri: &[&(Vec2, f64); 3]) -> Vec2 {
    use nalgebra::{Matrix3, Vector3};
    let mut r = tri[0].1 * (x - tri[0].0).norm();
    for _ in 0..3 {
        let mut jac = Matrix3::zeros();
        let mut f = Vector3::zeros();
        for (k, (p, g)) in tri.iter().enumerate() {
            let d = x - p;
            let n = d.norm();
            if n == 0.0 {
                return x;
            }
            f[k] = g * n - r;
            jac[(k, 0)] = g * d.x / n;
            jac[(k, 1)] = g * d.y / n;
            jac[(k, 2)] = -1.0;
        }
        match jac.lu().solve(&f) {
            Some(step) if step.iter().all(|s| s.is_finite()) => {
                x -= Vec2::new(step[0], step[1]);
                r -= step[2];
            }
            _ => return x,
        }
    }
    x
}

/// Exact weighted minimax center on the unit sphere (chord metric).
pub(crate) fn sphere_center(pts: &[(Vec3, f64)]) -> (Vec3, f64) {
    let n = pts.len();
    if n == 1 {
        return (pts[0].0, 0.0);
    }
    let mut sel = Selector::new();
    for (p, _) in pts {
        sel.offer(*p, 0.0, sphere_value(p, pts));
    }
    for i in 0..n {
        for j in i + 1..n {
            for x in sphere_pair(&pts[i], &pts[j]) {
                let claimed = pts[i].1 * (x - pts[i].0).norm();
                sel.offer(x, claimed, sphere_value(&x, pts));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for x in sphere_triple(&pts[i], &pts[j], &pts[k]) {
                    let claimed = pts[i].1 * (x - pts[i].0).norm();
                    sel.offer(x, claimed, sphere_value(&x, pts));
                }
            }
        }
    }
    sel.finish()
}

/// Points on the great circle through two points, on the minor and on the
/// major arc, where the rescaled chords agree.
fn sphere_pair(a: &(Vec3, f64), b: &(Vec3, f64)) -> Vec<Vec3> {
    let (ri, gi) = *a;
    let (rj, gj) = *b;
    let perp = rj - ri * rj.dot(&ri);
    let pn = perp.norm();
    if pn < 1e-15 {
        return Vec::new();
    }
    let e2 = perp / pn;
    let phi = rj.dot(&ri).clamp(-1.0, 1.0).acos();
    let mut out = Vec::with_capacity(2);
    for (b, e2) in [(phi / 2.0, e2), (std::f64::consts::PI - phi / 2.0, -e2)] {
        let half = (gj * b.sin()).atan2(gi + gj * b.cos());
        let theta = 2.0 * half;
        out.push((ri * theta.cos() + e2 * theta.sin()).normalize());
    }
    out
}

/// Unit vectors with equal rescaled chords to three points.
fn sphere_triple(a: &(Vec3, f64), b: &(Vec3, f64), c: &(Vec3, f64)) -> Vec<Vec3> {
    let row = |p: &(Vec3, f64), q: &(Vec3, f64)| {
        let (gp, gq) = (p.1 * p.1, q.1 * q.1);
        (p.0 * gp - q.0 * gq, gp - gq)
    };
    let (n1, c1) = row(a, b);
    let (n2, c2) = row(a, c);
    let d = n1.cross(&n2);
    let dn = d.norm();
    if dn <= 1e-12 * n1.norm() * n2.norm() || dn == 0.0 {
        return Vec::new();
    }
    let dir = d / dn;
    // minimum-norm solution in span(n1, n2)
    let (g11, g12, g22) = (n1.dot(&n1), n1.dot(&n2), n2.dot(&n2));
    let det = g11 * g22 - g12 * g12;
    let alpha = (c1 * g22 - c2 * g12) / det;
    let beta = (g11 * c2 - g12 * c1) / det;
    let r0 = n1 * alpha + n2 * beta;
    let rem = 1.0 - r0.norm_squared();
    if rem < -1e-12 {
        return Vec::new();
    }
    let t = rem.max(0.0).sqrt();
    let mut out = vec![(r0 + dir * t).normalize()];
    if t > 0.0 {
        out.push((r0 - dir * t).normalize());
    }
    out
}

fn result_from(center: SurfacePoint, radius: f64, active_set: Vec<usize>) -> MCenterResult {
    MCenterResult {
        center,
        radius,
        active_set,
        iterations: 0,
        converged: true,
        diagnostic: None,
    }
}

/// Exact M-center on the plane.
pub fn m_center_exact_plane(pts: &[WeightedPoint]) -> Result<MCenterResult> {
    m_center_exact(&Surface::Plane, pts)
}

/// Exact M-center on any surface. On the torus the points are first moved to
/// the translates selected by their shifts and the result is reduced into the
/// fundamental rectangle.
pub fn m_center_exact(surface: &Surface, pts: &[WeightedPoint]) -> Result<MCenterResult> {
    check_points(pts)?;
    if surface.is_flat() {
        let t = flat_targets(surface, pts)?;
        let (c, r) = plane_center(&t);
        let active = active_indices(r, &t, |p| (c - p).norm());
        Ok(result_from(
            surface.canonicalize(SurfacePoint::Flat(c)).0,
            r,
            active,
        ))
    } else {
        let t = sphere_targets(pts)?;
        let (c, r) = sphere_center(&t);
        let active = active_indices(r, &t, |p| (c - p).norm());
        Ok(result_from(SurfacePoint::Spherical(c), r, active))
    }
}

/// Moves toward the farthest point with step `eps_k` until the best radius
/// seen improves by less than `tol` over a window of 100 steps.
///
/// The reported center is the best, by radius, among the iterates and the
/// window averages of the iterates.
pub fn m_center_iterative(
    surface: &Surface,
    pts: &[WeightedPoint],
    schedule: EpsilonSchedule,
    start: SurfacePoint,
    tol: f64,
    max_iter: usize,
) -> Result<MCenterResult> {
    check_points(pts)?;
    surface.check_point(&start)?;
    if surface.is_flat() {
        let t = flat_targets(surface, pts)?;
        let out = iterate_flat(&t, schedule, start.xy(), tol, max_iter);
        let active = active_indices(out.radius, &t, |p| (out.center - p).norm());
        Ok(MCenterResult {
            center: surface.canonicalize(SurfacePoint::Flat(out.center)).0,
            radius: out.radius,
            active_set: active,
            iterations: out.iterations,
            converged: out.converged,
            diagnostic: None,
        })
    } else {
        let t = sphere_targets(pts)?;
        let out = iterate_sphere(&t, schedule, start.xyz(), tol, max_iter);
        let active = active_indices(out.radius, &t, |p| (out.center - p).norm());
        Ok(MCenterResult {
            center: SurfacePoint::Spherical(out.center),
            radius: out.radius,
            active_set: active,
            iterations: out.iterations,
            converged: out.converged,
            diagnostic: None,
        })
    }
}

pub(crate) struct IterOutcome<V> {
    pub center: V,
    pub radius: f64,
    pub iterations: usize,
    pub converged: bool,
}

const WINDOW: usize = 100;

pub(crate) fn iterate_flat(
    pts: &[(Vec2, f64)],
    schedule: EpsilonSchedule,
    start: Vec2,
    tol: f64,
    max_iter: usize,
) -> IterOutcome<Vec2> {
    let xs: Vec<f64> = pts.iter().map(|(p, _)| p.x).collect();
    let ys: Vec<f64> = pts.iter().map(|(p, _)| p.y).collect();
    let g2: Vec<f64> = pts.iter().map(|(_, g)| g * g).collect();
    let farthest = |x: f64, y: f64| {
        let mut imax = 0;
        let mut dmax = -1.0;
        for i in 0..xs.len() {
            let (dx, dy) = (xs[i] - x, ys[i] - y);
            let d = g2[i] * (dx * dx + dy * dy);
            if d > dmax {
                dmax = d;
                imax = i;
            }
        }
        (imax, dmax)
    };
    let (mut x, mut y) = (start.x, start.y);
    // best values are tracked squared
    let mut best = (x, y, farthest(x, y).1);
    let mut window_best = best.2;
    let (mut sx, mut sy) = (0.0, 0.0);
    let scale = schedule.eps0 * schedule.tau;
    let mut k = 0;
    let mut converged = false;
    while k < max_iter {
        let (imax, dmax) = farthest(x, y);
        if dmax < best.2 {
            best = (x, y, dmax);
        }
        let eps = scale / (schedule.tau + k as f64);
        x += (xs[imax] - x) * eps;
        y += (ys[imax] - y) * eps;
        sx += x;
        sy += y;
        k += 1;
        if k % WINDOW == 0 {
            let (ax, ay) = (sx / WINDOW as f64, sy / WINDOW as f64);
            sx = 0.0;
            sy = 0.0;
            let v = farthest(ax, ay).1;
            if v < best.2 {
                best = (ax, ay, v);
            }
            if window_best.sqrt() - best.2.sqrt() < tol {
                converged = true;
                break;
            }
            window_best = best.2;
        }
    }
    if !converged {
        let v = farthest(x, y).1;
        if v < best.2 {
            best = (x, y, v);
        }
    }
    IterOutcome {
        center: Vec2::new(best.0, best.1),
        radius: best.2.sqrt(),
        iterations: k,
        converged,
    }
}

pub(crate) fn iterate_sphere(
    pts: &[(Vec3, f64)],
    schedule: EpsilonSchedule,
    start: Vec3,
    tol: f64,
    max_iter: usize,
) -> IterOutcome<Vec3> {
    let g2: Vec<f64> = pts.iter().map(|(_, g)| g * g).collect();
    let mut r = start;
    let mut best = (r, sphere_value(&r, pts));
    let mut window_best = best.1;
    let mut sum = Vec3::zeros();
    let mut k = 0;
    while k < max_iter {
        let mut imax = 0;
        let mut dmax = -1.0;
        for (i, (p, _)) in pts.iter().enumerate() {
            let d = g2[i] * (r - p).norm_squared();
            if d > dmax {
                dmax = d;
                imax = i;
            }
        }
        let value = dmax.sqrt();
        if value < best.1 {
            best = (r, value);
        }
        let q = pts[imax].0;
        let tangent = q - r * q.dot(&r);
        let next = r + tangent * schedule.eps(k);
        let nn = next.norm();
        if nn > 0.0 {
            r = next / nn;
        }
        sum += r;
        k += 1;
        if k % WINDOW == 0 {
            let n = sum.norm();
            let avg = sum / n;
            sum = Vec3::zeros();
            if n > 0.0 {
                let v = sphere_value(&avg, pts);
                if v < best.1 {
                    best = (avg, v);
                }
            }
            if window_best - best.1 < tol {
                return IterOutcome {
                    center: best.0,
                    radius: best.1,
                    iterations: k,
                    converged: true,
                };
            }
            window_best = best.1;
        }
    }
    let v = sphere_value(&r, pts);
    if v < best.1 {
        best = (r, v);
    }
    IterOutcome {
        center: best.0,
        radius: best.1,
        iterations: k,
        converged: false,
    }
}

/// Minimum-overlap iteration for unit vectors: `R += r_imin` where `r_imin`
/// has the smallest scalar product with `R`. The center is the best, by
/// radius, of the normalized iterates.
pub fn m_center_minover_sphere(pts: &[Vec3], max_iter: usize) -> Result<MCenterResult> {
    if pts.is_empty() {
        return invalid("M-center of an empty point set");
    }
    if max_iter == 0 {
        return invalid("minover needs at least one step");
    }
    for (i, p) in pts.iter().enumerate() {
        if (p.norm() - 1.0).abs() > crate::surface::UNIT_TOL {
            return invalid(format!("point {i} is not a unit vector"));
        }
    }
    let mut acc = Vec3::zeros();
    let mut best: Option<(Vec3, f64)> = None;
    for _ in 0..max_iter {
        let mut imin = 0;
        let mut smin = f64::INFINITY;
        for (i, p) in pts.iter().enumerate() {
            let s = acc.dot(p);
            if s < smin {
                smin = s;
                imin = i;
            }
        }
        acc += pts[imin];
        let n = acc.norm();
        if n > 0.0 {
            let c = acc / n;
            let v = pts
                .iter()
                .map(|p| (c - p).norm_squared())
                .fold(0.0, f64::max);
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((c, v));
            }
        }
    }
    let n = acc.norm();
    let last = if n > 0.0 { acc / n } else { pts[0] };
    let min_dot = pts
        .iter()
        .map(|p| last.dot(p))
        .fold(f64::INFINITY, f64::min);
    let (center, v) = best.unwrap_or((last, 4.0));
    let radius = v.sqrt();
    let t: Vec<(Vec3, f64)> = pts.iter().map(|p| (*p, 1.0)).collect();
    let active = active_indices(radius, &t, |p| (center - p).norm());
    let ok = min_dot > 0.0;
    Ok(MCenterResult {
        center: SurfacePoint::Spherical(center),
        radius,
        active_set: active,
        iterations: max_iter,
        converged: ok,
        diagnostic: (!ok).then(|| NO_HEMISPHERE.to_string()),
    })
}

/// Point of segment `a`-`b` minimizing the maximum rescaled distance to the
/// points. Returns `(t, x, radius)` with `x = a + t (b - a)`.
pub fn segment_center(a: &Vec2, b: &Vec2, pts: &[(Vec2, f64)]) -> (f64, Vec2, f64) {
    let d = b - a;
    let dd = d.norm_squared();
    let at = |t: f64| a + d * t;
    let mut cands = vec![0.0, 1.0];
    if dd > 0.0 {
        for (p, _) in pts {
            cands.push((p - a).dot(&d) / dd);
        }
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                // g_i^2 |a + t d - p_i|^2 = g_j^2 |a + t d - p_j|^2
                let (pi, gi) = pts[i];
                let (pj, gj) = pts[j];
                let (wi, wj) = (gi * gi, gj * gj);
                let (ui, uj) = (a - pi, a - pj);
                let qa = (wi - wj) * dd;
                let qb = 2.0 * (wi * ui.dot(&d) - wj * uj.dot(&d));
                let qc = wi * ui.norm_squared() - wj * uj.norm_squared();
                if qa.abs() <= 1e-14 * (qb.abs() + qc.abs()) {
                    if qb != 0.0 {
                        cands.push(-qc / qb);
                    }
                } else {
                    let disc = qb * qb - 4.0 * qa * qc;
                    if disc >= 0.0 {
                        let s = disc.sqrt();
                        cands.push((-qb + s) / (2.0 * qa));
                        cands.push((-qb - s) / (2.0 * qa));
                    }
                }
            }
        }
    }
    let mut best = (0.0, *a, plane_value(a, pts));
    for t in cands {
        if !t.is_finite() {
            continue;
        }
        let t = t.clamp(0.0, 1.0);
        let x = at(t);
        let v = plane_value(&x, pts);
        if v < best.2 {
            best = (t, x, v);
        }
    }
    best
}
