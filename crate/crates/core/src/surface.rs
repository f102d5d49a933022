//! Points, distances and interpolation on the plane, a rectangular flat
//! torus, the unit sphere and the upper unit hemisphere.
//!
//! Sphere distances are 3-D chord lengths. Torus points live in the
//! fundamental rectangle `[0, W) x [0, H)`; an edge reaches the periodic copy
//! of its second endpoint selected by an explicit integer [`Shift`].

use std::fmt;
use std::ops::{Add, Neg, Sub};

use nalgebra::{Vector2, Vector3};

use crate::error::{invalid, Error, Result};

pub type Vec2 = Vector2<f64>;
pub type Vec3 = Vector3<f64>;

/// Tolerance on `|r| = 1` for sphere points and on `z >= 0` for hemisphere
/// points.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Surface {
    Plane,
    /// Axis-aligned rectangle with opposite sides identified.
    Torus {
        width: f64,
        height: f64,
    },
    Sphere,
    /// Unit sphere with inner vertices restricted to `z >= 0`.
    Hemisphere,
}

impl Surface {
    pub fn torus(width: f64, height: f64) -> Result<Self> {
        let s = Surface::Torus { width, height };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if let Surface::Torus { width, height } = *self {
            if !(width.is_finite() && width > 0.0 && height.is_finite() && height > 0.0) {
                return invalid(format!(
                    "torus dimensions must be positive, got {width} x {height}"
                ));
            }
        }
        Ok(())
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, Surface::Plane | Surface::Torus { .. })
    }

    pub fn is_spherical(&self) -> bool {
        !self.is_flat()
    }

    /// Dimension of the ambient coordinates (2 or 3).
    pub fn ambient_dim(&self) -> usize {
        if self.is_flat() {
            2
        } else {
            3
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Surface::Plane => "plane",
            Surface::Torus { .. } => "torus",
            Surface::Sphere => "sphere",
            Surface::Hemisphere => "hemisphere",
        }
    }

    /// Period vector `(W, H)` of a torus, zero otherwise.
    pub fn period(&self) -> Vec2 {
        match *self {
            Surface::Torus { width, height } => Vec2::new(width, height),
            _ => Vec2::zeros(),
        }
    }

    /// Translation vector of a shift on this surface.
    pub fn shift_vector(&self, shift: Shift) -> Vec2 {
        let p = self.period();
        Vec2::new(shift.wx as f64 * p.x, shift.wy as f64 * p.y)
    }

    /// Checks that `p` is a valid point of this surface.
    pub fn check_point(&self, p: &SurfacePoint) -> Result<()> {
        match (self, p) {
            (Surface::Plane, SurfacePoint::Flat(v)) => {
                if v.iter().all(|c| c.is_finite()) {
                    Ok(())
                } else {
                    invalid("non-finite plane coordinate")
                }
            }
            (Surface::Torus { width, height }, SurfacePoint::Flat(v)) => {
                if v.x >= 0.0 && v.x < *width && v.y >= 0.0 && v.y < *height {
                    Ok(())
                } else {
                    invalid(format!(
                        "torus point ({}, {}) outside the fundamental rectangle",
                        v.x, v.y
                    ))
                }
            }
            (Surface::Sphere | Surface::Hemisphere, SurfacePoint::Spherical(v)) => {
                if (v.norm() - 1.0).abs() > UNIT_TOL {
                    return invalid(format!("sphere point has norm {}", v.norm()));
                }
                if matches!(self, Surface::Hemisphere) && v.z < -UNIT_TOL {
                    return invalid(format!("hemisphere point has z = {}", v.z));
                }
                Ok(())
            }
            _ => invalid(format!("point {p} does not belong to the {}", self.name())),
        }
    }

    /// Maps a point onto the surface's canonical representative, returning
    /// the number of periods removed on the torus.
    pub fn canonicalize(&self, p: SurfacePoint) -> (SurfacePoint, Shift) {
        match (*self, p) {
            (Surface::Torus { width, height }, SurfacePoint::Flat(v)) => {
                let (x, cx) = wrap(v.x, width);
                let (y, cy) = wrap(v.y, height);
                (SurfacePoint::Flat(Vec2::new(x, y)), Shift::new(cx, cy))
            }
            (Surface::Sphere | Surface::Hemisphere, SurfacePoint::Spherical(v)) => {
                (SurfacePoint::Spherical(v.normalize()), Shift::ZERO)
            }
            _ => (p, Shift::ZERO),
        }
    }

    fn check_shift(&self, shift: Shift) -> Result<()> {
        if !shift.is_zero() && !matches!(self, Surface::Torus { .. }) {
            return invalid(format!("shift {shift} is only meaningful on a torus"));
        }
        Ok(())
    }
}

/// Reduces `x` into `[0, period)` and returns the removed period count.
fn wrap(x: f64, period: f64) -> (f64, i64) {
    let k = (x / period).floor();
    let mut r = x - k * period;
    let mut k = k as i64;
    // floor can leave r == period after rounding
    if r >= period {
        r -= period;
        k += 1;
    }
    if r < 0.0 {
        r = 0.0;
    }
    (r, k)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SurfacePoint {
    Flat(Vec2),
    Spherical(Vec3),
}

impl SurfacePoint {
    pub fn flat(x: f64, y: f64) -> Self {
        SurfacePoint::Flat(Vec2::new(x, y))
    }

    /// A point of the unit sphere; the input is normalized.
    pub fn spherical(x: f64, y: f64, z: f64) -> Self {
        SurfacePoint::Spherical(Vec3::new(x, y, z).normalize())
    }

    pub fn as_flat(&self) -> Option<Vec2> {
        match self {
            SurfacePoint::Flat(v) => Some(*v),
            SurfacePoint::Spherical(_) => None,
        }
    }

    pub fn as_spherical(&self) -> Option<Vec3> {
        match self {
            SurfacePoint::Spherical(v) => Some(*v),
            SurfacePoint::Flat(_) => None,
        }
    }

    /// Flat coordinates; panics on a spherical point.
    pub fn xy(&self) -> Vec2 {
        self.as_flat().expect("flat point expected")
    }

    /// Unit-sphere coordinates; panics on a flat point.
    pub fn xyz(&self) -> Vec3 {
        self.as_spherical().expect("spherical point expected")
    }

    pub fn coords(&self) -> Vec<f64> {
        match self {
            SurfacePoint::Flat(v) => vec![v.x, v.y],
            SurfacePoint::Spherical(v) => vec![v.x, v.y, v.z],
        }
    }

    pub fn from_coords(c: &[f64]) -> Result<Self> {
        match *c {
            [x, y] => Ok(SurfacePoint::flat(x, y)),
            [x, y, z] => Ok(SurfacePoint::Spherical(Vec3::new(x, y, z))),
            _ => invalid(format!("expected 2 or 3 coordinates, got {}", c.len())),
        }
    }
}

impl fmt::Display for SurfacePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfacePoint::Flat(v) => write!(f, "({}, {})", v.x, v.y),
            SurfacePoint::Spherical(v) => write!(f, "({}, {}, {})", v.x, v.y, v.z),
        }
    }
}

/// Integer offset selecting a periodic copy on the torus.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shift {
    pub wx: i64,
    pub wy: i64,
}

impl Shift {
    pub const ZERO: Shift = Shift { wx: 0, wy: 0 };

    pub const fn new(wx: i64, wy: i64) -> Self {
        Shift { wx, wy }
    }

    pub fn is_zero(&self) -> bool {
        self.wx == 0 && self.wy == 0
    }
}

impl Add for Shift {
    type Output = Shift;
    fn add(self, o: Shift) -> Shift {
        Shift::new(self.wx + o.wx, self.wy + o.wy)
    }
}

impl Sub for Shift {
    type Output = Shift;
    fn sub(self, o: Shift) -> Shift {
        Shift::new(self.wx - o.wx, self.wy - o.wy)
    }
}

impl Neg for Shift {
    type Output = Shift;
    fn neg(self) -> Shift {
        Shift::new(-self.wx, -self.wy)
    }
}

impl fmt::Display for Shift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.wx, self.wy)
    }
}

/// Euclidean distance `|p - q|`, with `q` translated by `shift` on the torus
/// and measured as a chord on the sphere.
pub fn distance(
    surface: &Surface,
    p: &SurfacePoint,
    q: &SurfacePoint,
    shift: Shift,
) -> Result<f64> {
    surface.check_shift(shift)?;
    match (p, q) {
        (SurfacePoint::Flat(a), SurfacePoint::Flat(b)) if surface.is_flat() => {
            Ok((b + surface.shift_vector(shift) - a).norm())
        }
        (SurfacePoint::Spherical(a), SurfacePoint::Spherical(b)) if surface.is_spherical() => {
            Ok((b - a).norm())
        }
        _ => invalid(format!(
            "points {p} and {q} do not both lie on the {}",
            surface.name()
        )),
    }
}

/// `gamma * distance(..)`.
pub fn rescaled_distance(
    surface: &Surface,
    p: &SurfacePoint,
    q: &SurfacePoint,
    shift: Shift,
    gamma: f64,
) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return invalid(format!("rescale factor must be positive, got {gamma}"));
    }
    Ok(gamma * distance(surface, p, q, shift)?)
}

/// Point at fraction `alpha` between `p0` and `p1`.
///
/// On the torus the path runs to the copy of `p1` selected by `shift` and the
/// result is reduced into the fundamental rectangle. On the sphere and
/// hemisphere the `(x, y)` projections are interpolated linearly and the
/// point is lifted back with `z = +sqrt(1 - x^2 - y^2)`, so both endpoints
/// must satisfy `z >= 0`.
pub fn interpolate(
    surface: &Surface,
    p0: &SurfacePoint,
    p1: &SurfacePoint,
    shift: Shift,
    alpha: f64,
) -> Result<SurfacePoint> {
    if !(0.0..=1.0).contains(&alpha) {
        return invalid(format!("interpolation fraction {alpha} outside [0, 1]"));
    }
    surface.check_shift(shift)?;
    if alpha == 0.0 {
        return Ok(*p0);
    }
    if alpha == 1.0 && shift.is_zero() {
        return Ok(*p1);
    }
    match (p0, p1) {
        (SurfacePoint::Flat(a), SurfacePoint::Flat(b)) if surface.is_flat() => {
            let b = b + surface.shift_vector(shift);
            let x = a + (b - a) * alpha;
            Ok(surface.canonicalize(SurfacePoint::Flat(x)).0)
        }
        (SurfacePoint::Spherical(a), SurfacePoint::Spherical(b)) if surface.is_spherical() => {
            if a.z < -UNIT_TOL || b.z < -UNIT_TOL {
                return Err(Error::Domain(
                    "projected interpolation needs both points in the upper hemisphere".into(),
                ));
            }
            Ok(SurfacePoint::Spherical(lift(
                a.x + (b.x - a.x) * alpha,
                a.y + (b.y - a.y) * alpha,
            )?))
        }
        _ => invalid(format!(
            "points {p0} and {p1} do not both lie on the {}",
            surface.name()
        )),
    }
}

/// Lifts an equatorial-disk point to the upper hemisphere.
pub fn lift(x: f64, y: f64) -> Result<Vec3> {
    let s = 1.0 - x * x - y * y;
    if s < -UNIT_TOL {
        return Err(Error::Domain(format!(
            "projection ({x}, {y}) lies outside the unit disk"
        )));
    }
    Ok(Vec3::new(x, y, s.max(0.0).sqrt()))
}

/// Orthonormal tangent frame `(e1, e2)` at unit vector `n`, with
/// `e1 x e2 = n` (counter-clockwise seen from outside).
pub fn tangent_frame(n: &Vec3) -> (Vec3, Vec3) {
    let helper = if n.x.abs() < 0.9 {
        Vec3::x()
    } else {
        Vec3::y()
    };
    let e1 = (helper - n * n.dot(&helper)).normalize();
    let e2 = n.cross(&e1);
    (e1, e2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn distance_examples() {
        let d = distance(
            &Surface::Plane,
            &SurfacePoint::flat(0.0, 0.0),
            &SurfacePoint::flat(3.0, 4.0),
            Shift::ZERO,
        )
        .unwrap();
        assert_eq!(d, 5.0);

        let t = Surface::torus(1.0, 1.0).unwrap();
        let d = distance(
            &t,
            &SurfacePoint::flat(0.1, 0.5),
            &SurfacePoint::flat(0.9, 0.5),
            Shift::new(-1, 0),
        )
        .unwrap();
        assert!(close(d, 0.2, 1e-15));

        let d = distance(
            &Surface::Sphere,
            &SurfacePoint::spherical(0.0, 0.0, 1.0),
            &SurfacePoint::spherical(0.0, 0.0, -1.0),
            Shift::ZERO,
        )
        .unwrap();
        assert_eq!(d, 2.0);
    }

    #[test]
    fn nonzero_shift_off_torus_is_rejected() {
        let r = distance(
            &Surface::Plane,
            &SurfacePoint::flat(0.0, 0.0),
            &SurfacePoint::flat(1.0, 0.0),
            Shift::new(1, 0),
        );
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn rescaled_examples() {
        let p = SurfacePoint::flat(0.0, 0.0);
        let q = SurfacePoint::flat(1.0, 0.0);
        assert_eq!(
            rescaled_distance(&Surface::Plane, &p, &q, Shift::ZERO, 2.0).unwrap(),
            2.0
        );
        assert_eq!(
            rescaled_distance(&Surface::Plane, &p, &q, Shift::ZERO, 1.0).unwrap(),
            distance(&Surface::Plane, &p, &q, Shift::ZERO).unwrap()
        );
        let a = SurfacePoint::spherical(1.0, 0.0, 0.0);
        let b = SurfacePoint::spherical(0.0, 1.0, 0.0);
        let d = rescaled_distance(&Surface::Sphere, &a, &b, Shift::ZERO, 0.5).unwrap();
        assert!(close(d, 0.5 * 2f64.sqrt(), 1e-15));
        assert!(rescaled_distance(&Surface::Plane, &p, &q, Shift::ZERO, 0.0).is_err());
        assert!(rescaled_distance(&Surface::Plane, &p, &q, Shift::ZERO, -1.0).is_err());
    }

    #[test]
    fn interpolate_examples() {
        let m = interpolate(
            &Surface::Plane,
            &SurfacePoint::flat(0.0, 0.0),
            &SurfacePoint::flat(2.0, 2.0),
            Shift::ZERO,
            0.5,
        )
        .unwrap();
        assert_eq!(m, SurfacePoint::flat(1.0, 1.0));

        let a = SurfacePoint::spherical(1.0, 0.0, 0.0);
        let b = SurfacePoint::spherical(0.0, 0.0, 1.0);
        let m = interpolate(&Surface::Hemisphere, &a, &b, Shift::ZERO, 0.5)
            .unwrap()
            .xyz();
        assert!((m - Vec3::new(0.5, 0.0, 0.75f64.sqrt())).norm() < 1e-15);

        assert_eq!(
            interpolate(&Surface::Hemisphere, &a, &b, Shift::ZERO, 0.0).unwrap(),
            a
        );
        assert_eq!(
            interpolate(&Surface::Hemisphere, &a, &b, Shift::ZERO, 1.0).unwrap(),
            b
        );
    }

    #[test]
    fn interpolate_rejects_lower_hemisphere() {
        let a = SurfacePoint::spherical(0.0, 0.6, -0.8);
        let b = SurfacePoint::spherical(0.0, 0.0, 1.0);
        assert!(matches!(
            interpolate(&Surface::Sphere, &a, &b, Shift::ZERO, 0.5),
            Err(Error::Domain(_))
        ));
        assert!(lift(0.9, 0.9).is_err());
    }

    #[test]
    fn torus_interpolation_follows_shift() {
        let t = Surface::torus(1.0, 1.0).unwrap();
        let m = interpolate(
            &t,
            &SurfacePoint::flat(0.9, 0.5),
            &SurfacePoint::flat(0.1, 0.5),
            Shift::new(1, 0),
            0.5,
        )
        .unwrap();
        let v = m.xy();
        assert!(v.x.abs() < 1e-15 || (v.x - 1.0).abs() < 1e-15, "{v}");
        t.check_point(&m).unwrap();
    }

    #[test]
    fn canonicalize_reports_removed_periods() {
        let t = Surface::torus(2.0, 1.0).unwrap();
        let (p, c) = t.canonicalize(SurfacePoint::flat(-0.5, 3.25));
        assert_eq!(c, Shift::new(-1, 3));
        assert!((p.xy() - Vec2::new(1.5, 0.25)).norm() < 1e-15);
        let (p, c) = t.canonicalize(SurfacePoint::flat(-1e-18, 0.0));
        t.check_point(&p).unwrap();
        assert!((p.xy().x + c.wx as f64 * 2.0 + 1e-18).abs() < 1e-15);
    }

    #[test]
    fn frame_is_right_handed() {
        for n in [
            Vec3::x(),
            Vec3::y(),
            Vec3::z(),
            Vec3::new(1.0, 2.0, -3.0).normalize(),
        ] {
            let (e1, e2) = tangent_frame(&n);
            assert!((e1.cross(&e2) - n).norm() < 1e-14);
            assert!(e1.dot(&n).abs() < 1e-14);
        }
    }

    #[test]
    fn point_checks() {
        let t = Surface::torus(1.0, 2.0).unwrap();
        assert!(t.check_point(&SurfacePoint::flat(0.5, 1.5)).is_ok());
        assert!(t.check_point(&SurfacePoint::flat(1.0, 1.5)).is_err());
        assert!(Surface::Sphere
            .check_point(&SurfacePoint::Spherical(Vec3::new(1.0, 1.0, 0.0)))
            .is_err());
        assert!(Surface::Plane
            .check_point(&SurfacePoint::spherical(1.0, 0.0, 0.0))
            .is_err());
        assert!(Surface::torus(0.0, 1.0).is_err());
    }
}
