//! Small fixed-size vector type and bounding boxes used throughout the mesher.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A point (or vector) in model coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ZERO: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    #[inline]
    pub fn dist(self, o: Point3) -> f64 {
        (self - o).norm()
    }

    #[inline]
    pub fn dist_sq(self, o: Point3) -> f64 {
        (self - o).norm_sq()
    }

    /// Unit vector in the same direction, or `None` for a zero vector.
    pub fn normalized(self) -> Option<Point3> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    pub fn midpoint(self, o: Point3) -> Point3 {
        (self + o) * 0.5
    }

    pub fn lerp(self, o: Point3, t: f64) -> Point3 {
        self + (o - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn min(self, o: Point3) -> Point3 {
        Point3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max(self, o: Point3) -> Point3 {
        Point3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Index<usize> for Point3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Point3 index {i} out of range"),
        }
    }
}

impl Add for Point3 {
    type Output = Point3;
    #[inline]
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Point3 {
    fn add_assign(&mut self, o: Point3) {
        *self = *self + o;
    }
}

impl Sub for Point3 {
    type Output = Point3;
    #[inline]
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    #[inline]
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Point3 {
    type Output = Point3;
    #[inline]
    fn div(self, s: f64) -> Point3 {
        Point3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    pub const EMPTY: Aabb = Aabb {
        min: Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
        max: Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
    };

    pub fn from_points<I: IntoIterator<Item = Point3>>(pts: I) -> Aabb {
        pts.into_iter().fold(Aabb::EMPTY, |b, p| b.grow(p))
    }

    pub fn around(c: Point3, r: f64) -> Aabb {
        let d = Point3::new(r, r, r);
        Aabb { min: c - d, max: c + d }
    }

    pub fn grow(self, p: Point3) -> Aabb {
        Aabb { min: self.min.min(p), max: self.max.max(p) }
    }

    pub fn union(self, o: Aabb) -> Aabb {
        Aabb { min: self.min.min(o.min), max: self.max.max(o.max) }
    }

    pub fn inflate(self, d: f64) -> Aabb {
        let v = Point3::new(d, d, d);
        Aabb { min: self.min - v, max: self.max + v }
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x || self.min.y > self.max.y || self.min.z > self.max.z
    }

    pub fn centre(&self) -> Point3 {
        self.min.midpoint(self.max)
    }

    pub fn extent(&self) -> Point3 {
        self.max - self.min
    }

    pub fn diagonal(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.extent().norm()
        }
    }

    pub fn overlaps(&self, o: &Aabb) -> bool {
        self.min.x <= o.max.x
            && self.max.x >= o.min.x
            && self.min.y <= o.max.y
            && self.max.y >= o.min.y
            && self.min.z <= o.max.z
            && self.max.z >= o.min.z
    }

    pub fn contains(&self, p: Point3) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }

    /// Slab test for the segment `a + t (b - a)`, `t` in `[0, 1]`.
    pub fn hits_segment(&self, a: Point3, b: Point3) -> bool {
        let d = b - a;
        let mut t0 = 0.0_f64;
        let mut t1 = 1.0_f64;
        for k in 0..3 {
            let (o, dk, lo, hi) = (a[k], d[k], self.min[k], self.max[k]);
            if dk.abs() < 1e-300 {
                if o < lo || o > hi {
                    return false;
                }
            } else {
                let inv = 1.0 / dk;
                let (mut ta, mut tb) = ((lo - o) * inv, (hi - o) * inv);
                if ta > tb {
                    std::mem::swap(&mut ta, &mut tb);
                }
                t0 = t0.max(ta);
                t1 = t1.min(tb);
                if t0 > t1 {
                    return false;
                }
            }
        }
        true
    }
}

/// Circumcentre of a triangle in its own plane.
pub fn tri_circumcentre(a: Point3, b: Point3, c: Point3) -> Option<Point3> {
    let ab = b - a;
    let ac = c - a;
    let n = ab.cross(ac);
    let den = 2.0 * n.norm_sq();
    if den <= 0.0 || !den.is_finite() {
        return None;
    }
    let off = (n.cross(ab) * ac.norm_sq() + ac.cross(n) * ab.norm_sq()) / den;
    Some(a + off)
}

/// Relative volume below which circumcentres are computed exactly.
const FLAT_TET: f64 = 1e-6;

/// Circumcentre of a tetrahedron, or `None` when the four points are coplanar.
pub fn tet_circumcentre(a: Point3, b: Point3, c: Point3, d: Point3) -> Option<Point3> {
    let ba = b - a;
    let ca = c - a;
    let da = d - a;
    let det = ba.dot(ca.cross(da));
    if !det.is_finite() {
        return None;
    }
    if det.abs() <= FLAT_TET * ba.norm() * ca.norm() * da.norm() {
        return crate::predicates::tet_circumcentre_exact(a, b, c, d);
    }
    let off = (ca.cross(da) * ba.norm_sq() + da.cross(ba) * ca.norm_sq() + ba.cross(ca) * da.norm_sq())
        / (2.0 * det);
    let c = a + off;
    c.is_finite().then_some(c)
}

/// Unit normal of the triangle `abc` (right-hand rule), if non-degenerate.
pub fn tri_normal(a: Point3, b: Point3, c: Point3) -> Option<Point3> {
    (b - a).cross(c - a).normalized()
}

pub fn tri_area(a: Point3, b: Point3, c: Point3) -> f64 {
    0.5 * (b - a).cross(c - a).norm()
}

/// Signed volume, positive for a right-handed tetrahedron.
pub fn tet_volume(a: Point3, b: Point3, c: Point3, d: Point3) -> f64 {
    (b - a).dot((c - a).cross(d - a)) / 6.0
}

/// Closest point to `p` on the segment `ab`.
pub fn closest_on_segment(p: Point3, a: Point3, b: Point3) -> Point3 {
    let d = b - a;
    let l2 = d.norm_sq();
    if l2 == 0.0 {
        return a;
    }
    let t = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    a + d * t
}

/// Closest point to `p` on triangle `abc` (Ericson's region test).
pub fn closest_on_triangle(p: Point3, a: Point3, b: Point3, c: Point3) -> Point3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circumcentres_are_equidistant() {
        let a = Point3::new(0.0, 0.0, 0.0);
        let b = Point3::new(1.0, 0.0, 0.0);
        let c = Point3::new(0.0, 1.0, 0.0);
        let d = Point3::new(0.0, 0.0, 1.0);
        let cc = tet_circumcentre(a, b, c, d).unwrap();
        assert!((cc - Point3::new(0.5, 0.5, 0.5)).norm() < 1e-15);
        let tc = tri_circumcentre(a, b, c).unwrap();
        assert!((tc - Point3::new(0.5, 0.5, 0.0)).norm() < 1e-15);
        assert!(tet_circumcentre(a, b, c, Point3::new(1.0, 1.0, 0.0)).is_none());
    }

    #[test]
    fn slab_test() {
        let bx = Aabb { min: Point3::ZERO, max: Point3::new(1.0, 1.0, 1.0) };
        assert!(bx.hits_segment(Point3::new(-1.0, 0.5, 0.5), Point3::new(2.0, 0.5, 0.5)));
        assert!(!bx.hits_segment(Point3::new(-1.0, 2.5, 0.5), Point3::new(2.0, 2.5, 0.5)));
        assert!(!bx.hits_segment(Point3::new(-2.0, 0.5, 0.5), Point3::new(-1.0, 0.5, 0.5)));
    }
}
