//! Plane geometry primitives: points, unit directions, angles, line
//! intersection, Fermat points and rigid alignment.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::scalar::{canonical_angle, lit, Scalar};

/// Absolute degeneracy guard for lengths when no scale is known.
pub const EPS_DEG: f64 = 1e-12;
/// Threshold on the normalized cross product below which lines are parallel.
pub const EPS_PAR: f64 = 1e-12;
/// Slack on the `2π/3` bound for Fermat point existence.
pub const FERMAT_ANGLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("degenerate edge: points closer than {guard:e}")]
    DegenerateEdge { guard: f64 },
    #[error("triangle has no Fermat point: corner {corner} has interior angle {angle} rad >= 2pi/3")]
    NoFermatPoint { corner: usize, angle: f64 },
    #[error("lines are parallel")]
    ParallelLines,
    #[error("id sets differ between reference and candidate")]
    IdMismatch,
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    pub fn origin() -> Self {
        Point::new(T::zero(), T::zero())
    }

    /// Point at distance `r` from the origin in direction `theta`.
    pub fn polar(r: T, theta: T) -> Self {
        Point::new(r * theta.cos(), r * theta.sin())
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Self) -> T {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Self) -> T {
        (other - self).norm()
    }

    /// Counterclockwise quarter turn.
    pub fn perp(self) -> Self {
        Point::new(-self.y, self.x)
    }

    pub fn rotate(self, theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn midpoint(self, other: Self) -> Self {
        (self + other) * lit::<T>(0.5)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Polar angle in `[0, 2π)`.
    pub fn angle(self) -> T {
        canonical_angle(self.y.atan2(self.x))
    }
}

impl<T: Scalar> Add for Point<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Scalar> Sub for Point<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Scalar> Mul<T> for Point<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl<T: Scalar> Neg for Point<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Point::new(-self.x, -self.y)
    }
}

/// Direction of unit length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector<T> {
    dx: T,
    dy: T,
}

impl<T: Scalar> UnitVector<T> {
    pub fn from_angle(theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        UnitVector { dx: c, dy: s }
    }

    /// Normalizes `v`; fails when `|v| <= guard`.
    pub fn try_new(v: Point<T>, guard: T) -> Result<Self, GeomError> {
        let n = v.norm();
        if !(n > guard) {
            return Err(GeomError::DegenerateEdge {
                guard: guard.to_f64_lossy(),
            });
        }
        Ok(UnitVector {
            dx: v.x / n,
            dy: v.y / n,
        })
    }

    pub fn dx(self) -> T {
        self.dx
    }

    pub fn dy(self) -> T {
        self.dy
    }

    pub fn as_point(self) -> Point<T> {
        Point::new(self.dx, self.dy)
    }

    pub fn angle(self) -> T {
        self.as_point().angle()
    }
}

impl<T: Scalar> Neg for UnitVector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        UnitVector {
            dx: -self.dx,
            dy: -self.dy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle<T> {
    pub corners: [Point<T>; 3],
}

impl<T: Scalar> Triangle<T> {
    /// Builds a triangle, rejecting coincident corners.
    pub fn new(a: Point<T>, b: Point<T>, c: Point<T>) -> Result<Self, GeomError> {
        let guard = lit::<T>(EPS_DEG);
        for (p, q) in [(a, b), (b, c), (c, a)] {
            if !(p.distance(q) > guard) {
                return Err(GeomError::DegenerateEdge { guard: EPS_DEG });
            }
        }
        Ok(Triangle { corners: [a, b, c] })
    }

    /// Interior angle at corner `i`.
    pub fn interior_angle(&self, i: usize) -> T {
        let v = self.corners[i];
        let p = self.corners[(i + 1) % 3] - v;
        let q = self.corners[(i + 2) % 3] - v;
        p.cross(q).abs().atan2(p.dot(q))
    }

    pub fn interior_angles(&self) -> [T; 3] {
        [
            self.interior_angle(0),
            self.interior_angle(1),
            self.interior_angle(2),
        ]
    }
}

/// Unit vector pointing from `p` toward `q`.
pub fn unit_toward<T: Scalar>(p: Point<T>, q: Point<T>) -> Result<UnitVector<T>, GeomError> {
    UnitVector::try_new(q - p, lit(EPS_DEG))
}

/// Counterclockwise angle at `v` from the direction toward `p` to the
/// direction toward `q`, in `[0, 2π)`.
pub fn angle_ccw<T: Scalar>(v: Point<T>, p: Point<T>, q: Point<T>) -> Result<T, GeomError> {
    let a = unit_toward(v, p)?.as_point();
    let b = unit_toward(v, q)?.as_point();
    Ok(canonical_angle(a.cross(b).atan2(a.dot(b))))
}

/// Intersection of the infinite lines through `(a1, a2)` and `(b1, b2)`.
pub fn line_intersection<T: Scalar>(
    a1: Point<T>,
    a2: Point<T>,
    b1: Point<T>,
    b2: Point<T>,
) -> Result<Point<T>, GeomError> {
    let da = a2 - a1;
    let db = b2 - b1;
    let na = da.norm();
    let nb = db.norm();
    let guard = lit::<T>(EPS_DEG);
    if !(na > guard) || !(nb > guard) {
        return Err(GeomError::DegenerateEdge { guard: EPS_DEG });
    }
    let denom = da.cross(db);
    if !((denom / (na * nb)).abs() > lit(EPS_PAR)) {
        return Err(GeomError::ParallelLines);
    }
    let t = (b1 - a1).cross(db) / denom;
    Ok(a1 + da * t)
}

/// Perpendicular distance from `x` to the infinite line through `a` and `b`.
pub fn distance_to_line<T: Scalar>(x: Point<T>, a: Point<T>, b: Point<T>) -> T {
    let d = b - a;
    (x - a).cross(d).abs() / d.norm()
}

/// Orthogonal projection of `x` onto the line through `a` and `b`.
pub fn project_onto_line<T: Scalar>(x: Point<T>, a: Point<T>, b: Point<T>) -> Point<T> {
    let d = b - a;
    a + d * ((x - a).dot(d) / d.dot(d))
}

/// Fermat (first isogonic) point of a triangle whose angles are all below
/// `2π/3`, where each pair of corners subtends `2π/3`.
///
/// Erects an equilateral triangle outward on each side and intersects the
/// lines joining each apex to the opposite corner.
pub fn fermat_point<T: Scalar>(t: &Triangle<T>) -> Result<Point<T>, GeomError> {
    let limit = T::TAU() / lit(3.0) - lit(FERMAT_ANGLE_TOL);
    for (i, angle) in t.interior_angles().into_iter().enumerate() {
        if !(angle < limit) {
            return Err(GeomError::NoFermatPoint {
                corner: i,
                angle: angle.to_f64_lossy(),
            });
        }
    }
    let [a, b, c] = t.corners;
    let apex_a = outward_apex(b, c, a);
    let apex_b = outward_apex(c, a, b);
    let x = line_intersection(a, apex_a, b, apex_b)?;
    debug_assert!({
        let apex_c = outward_apex(a, b, c);
        let scale = (b - a).norm() + (c - b).norm() + (a - c).norm();
        distance_to_line(x, c, apex_c) <= lit::<T>(1e-6) * scale
    });
    Ok(x)
}

/// Apex of the equilateral triangle on side `(p, q)` lying away from `opposite`.
fn outward_apex<T: Scalar>(p: Point<T>, q: Point<T>, opposite: Point<T>) -> Point<T> {
    let side = q - p;
    let normal = side.perp() * (lit::<T>(3.0).sqrt() / lit(2.0));
    let mid = p.midpoint(q);
    if (opposite - mid).dot(normal) > T::zero() {
        mid - normal
    } else {
        mid + normal
    }
}

/// Proper rotation plus translation, optionally preceded by a reflection
/// across the x-axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform<T> {
    pub rotation: T,
    pub translation: Point<T>,
    pub reflected: bool,
}

impl<T: Scalar> RigidTransform<T> {
    pub fn identity() -> Self {
        RigidTransform {
            rotation: T::zero(),
            translation: Point::origin(),
            reflected: false,
        }
    }

    pub fn apply(&self, p: Point<T>) -> Point<T> {
        let p = if self.reflected { Point::new(p.x, -p.y) } else { p };
        p.rotate(self.rotation) + self.translation
    }
}

/// Best-fit rigid motion taking `candidate` onto `reference`, with the
/// root-mean-square deviation over matched ids after alignment.
///
/// With `allow_reflection`, the mirrored fit is also tried and kept when it
/// is strictly better; the returned transform then has `reflected` set.
pub fn align_rigid<K: Ord, T: Scalar>(
    reference: &BTreeMap<K, Point<T>>,
    candidate: &BTreeMap<K, Point<T>>,
    allow_reflection: bool,
) -> Result<(RigidTransform<T>, T), GeomError> {
    if reference.len() != candidate.len() || reference.keys().ne(candidate.keys()) {
        return Err(GeomError::IdMismatch);
    }
    if reference.len() < 3 {
        return Err(GeomError::DegenerateConfiguration("fewer than three points"));
    }
    let n = lit::<T>(reference.len() as f64);
    let centroid = |m: &BTreeMap<K, Point<T>>| {
        m.values().fold(Point::origin(), |acc, &p| acc + p) * (T::one() / n)
    };
    let rc = centroid(reference);

    // Reject collinear references via the smaller eigenvalue of the scatter.
    let (mut sxx, mut syy, mut sxy) = (T::zero(), T::zero(), T::zero());
    for &p in reference.values() {
        let d = p - rc;
        sxx = sxx + d.x * d.x;
        syy = syy + d.y * d.y;
        sxy = sxy + d.x * d.y;
    }
    let trace = sxx + syy;
    let det = sxx * syy - sxy * sxy;
    let disc = (trace * trace * lit(0.25) - det).max(T::zero()).sqrt();
    let lambda_min = trace * lit(0.5) - disc;
    if !(trace > T::zero()) || lambda_min <= trace * lit(1e-12) {
        return Err(GeomError::DegenerateConfiguration("reference points are collinear"));
    }

    let fit = |reflected: bool| {
        let flip = |p: Point<T>| if reflected { Point::new(p.x, -p.y) } else { p };
        let cc = flip(centroid(candidate));
        let (mut sc, mut ss) = (T::zero(), T::zero());
        for (r, c) in reference.values().zip(candidate.values()) {
            let a = flip(*c) - cc;
            let b = *r - rc;
            sc = sc + a.dot(b);
            ss = ss + a.cross(b);
        }
        let rotation = ss.atan2(sc);
        let transform = RigidTransform {
            rotation,
            translation: rc - cc.rotate(rotation),
            reflected,
        };
        let mut sq = T::zero();
        for (r, c) in reference.values().zip(candidate.values()) {
            let d = transform.apply(*c) - *r;
            sq = sq + d.dot(d);
        }
        (transform, (sq / n).sqrt())
    };

    let direct = fit(false);
    if allow_reflection {
        let mirrored = fit(true);
        if mirrored.1 < direct.1 {
            return Ok(mirrored);
        }
    }
    Ok(direct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    #[test]
    fn unit_toward_axis_and_diagonal() {
        let u = unit_toward(p(0.0, 0.0), p(2.0, 0.0)).unwrap();
        assert_eq!((u.dx(), u.dy()), (1.0, 0.0));
        let u = unit_toward(p(0.0, 0.0), p(1.0, 1.0)).unwrap();
        let h = 2f64.sqrt() / 2.0;
        assert!((u.dx() - h).abs() < 1e-15 && (u.dy() - h).abs() < 1e-15);
    }

    #[test]
    fn unit_toward_zero_length_is_degenerate() {
        assert!(matches!(
            unit_toward(p(0.0, 0.0), p(0.0, 0.0)),
            Err(GeomError::DegenerateEdge { .. })
        ));
    }

    #[test]
    fn angle_ccw_examples() {
        let o = p(0.0, 0.0);
        assert!((angle_ccw(o, p(1.0, 0.0), p(0.0, 1.0)).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((angle_ccw(o, p(0.0, 1.0), p(1.0, 0.0)).unwrap() - 1.5 * PI).abs() < 1e-15);
        assert_eq!(angle_ccw(o, p(1.0, 0.0), p(1.0, 0.0)).unwrap(), 0.0);
        assert!(angle_ccw(o, o, p(1.0, 0.0)).is_err());
    }

    #[test]
    fn fermat_point_of_equilateral_is_centroid() {
        let t = Triangle::new(p(0.0, 0.0), p(1.0, 0.0), p(0.5, 3f64.sqrt() / 2.0)).unwrap();
        let x = fermat_point(&t).unwrap();
        assert!((x.x - 0.5).abs() < 1e-14);
        assert!((x.y - 3f64.sqrt() / 6.0).abs() < 1e-14);
    }

    #[test]
    fn fermat_point_matches_figure_coordinates() {
        let t = Triangle::new(
            p(1.9780798571642149, 1.2247448713915854),
            p(1.9780798571642162, 1.9780798571642115),
            p(0.3766674928863143, 1.6014123642779008),
        )
        .unwrap();
        let x = fermat_point(&t).unwrap();
        assert!((x.x - 1.7606107787513212).abs() < 1e-12);
        assert!((x.y - 1.6014123642778983).abs() < 1e-12);
    }

    #[test]
    fn fermat_point_rejects_obtuse_150() {
        let apex = p(0.0, 0.0);
        let b = Point::polar(1.0, 0.0);
        let c = Point::polar(1.0, 150f64.to_radians());
        let t = Triangle::new(apex, b, c).unwrap();
        assert!(matches!(
            fermat_point(&t),
            Err(GeomError::NoFermatPoint { corner: 0, .. })
        ));
    }

    #[test]
    fn fermat_point_works_in_f32() {
        let t = Triangle::new(
            Point::new(0.0_f32, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.5, 3f32.sqrt() / 2.0),
        )
        .unwrap();
        let x = fermat_point(&t).unwrap();
        assert!((x.y - 3f32.sqrt() / 6.0).abs() < 1e-6);
    }

    #[test]
    fn line_intersection_examples() {
        let x = line_intersection(p(0.0, 0.0), p(1.0, 1.0), p(0.0, 1.0), p(1.0, 0.0)).unwrap();
        assert!((x.x - 0.5).abs() < 1e-15 && (x.y - 0.5).abs() < 1e-15);
        assert_eq!(
            line_intersection(p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(1.0, 1.0)),
            Err(GeomError::ParallelLines)
        );
        let c = line_intersection(
            p(0.753334985772626, 0.0),
            p(7.269540714670677, 1.6014123642778986),
            p(1.9780798571642149, 1.2247448713915854),
            p(0.376667492886313, -5.291460857506463),
        )
        .unwrap();
        assert!((c.x - 1.7364669163212336).abs() < 1e-12);
        assert!((c.y - 0.24161294084298132).abs() < 1e-12);
    }

    #[test]
    fn align_rigid_identity_and_errors() {
        let mut r = BTreeMap::new();
        r.insert("a", p(0.0, 0.0));
        r.insert("b", p(1.0, 0.0));
        r.insert("c", p(0.0, 2.0));
        let (_, rmsd) = align_rigid(&r, &r, false).unwrap();
        assert!(rmsd < 1e-15);

        let mut other = r.clone();
        other.remove("c");
        other.insert("z", p(0.0, 2.0));
        assert_eq!(align_rigid(&r, &other, false).unwrap_err(), GeomError::IdMismatch);

        let mut line = BTreeMap::new();
        for (i, k) in ["a", "b", "c"].into_iter().enumerate() {
            line.insert(k, p(i as f64, 2.0 * i as f64));
        }
        assert!(matches!(
            align_rigid(&line, &line, false),
            Err(GeomError::DegenerateConfiguration(_))
        ));
    }

    #[test]
    fn align_rigid_detects_reflection() {
        let mut r = BTreeMap::new();
        r.insert(0, p(0.0, 0.0));
        r.insert(1, p(2.0, 0.0));
        r.insert(2, p(0.5, 1.0));
        r.insert(3, p(-0.3, 0.7));
        let mirrored: BTreeMap<_, _> = r.iter().map(|(k, q)| (*k, p(-q.x, q.y))).collect();
        let (_, plain) = align_rigid(&r, &mirrored, false).unwrap();
        assert!(plain > 1e-3);
        let (t, rmsd) = align_rigid(&r, &mirrored, true).unwrap();
        assert!(t.reflected);
        assert!(rmsd < 1e-12);
    }
}
