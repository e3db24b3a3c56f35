use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{CurveId, PatchId, PiecewiseComplex};
use crate::geometry::{Aabb, Point3};
use crate::predicates::{orient3d, Sign};

const RAY_RETRIES: usize = 32;

#[derive(Debug, Error, PartialEq)]
pub enum VolumeError {
    #[error("surface is not closed; membership queries are undefined")]
    NotClosed,
    #[error("membership ray stayed degenerate after {0} retries")]
    DegenerateRay(usize),
}

/// Result of clipping the curve network against a convex polygon.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolygonHits {
    pub points: Vec<(Point3, CurveId)>,
    pub degenerate: bool,
}

fn push_unique<T: Copy>(out: &mut Vec<(Point3, T)>, p: Point3, tag: T, tol: f64) {
    if !out.iter().any(|(q, _)| q.dist(p) <= tol) {
        out.push((p, tag));
    }
}

/// Newell normal of a polygon loop (unnormalised).
fn newell_normal(poly: &[Point3]) -> Point3 {
    let mut n = Point3::ZERO;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        n.x += (a.y - b.y) * (a.z + b.z);
        n.y += (a.z - b.z) * (a.x + b.x);
        n.z += (a.x - b.x) * (a.y + b.y);
    }
    n
}

/// Whether `p` (assumed in the polygon plane) lies inside the convex loop.
/// Polygon vertices closer than this fraction of the diameter are merged.
const MERGE_REL: f64 = 1e-9;

/// Drops cyclically consecutive vertices that nearly coincide; their short
/// edges have no reliable direction.
fn merge_close(poly: &[Point3], rel: f64) -> Vec<Point3> {
    if poly.is_empty() {
        return Vec::new();
    }
    let eps = rel * Aabb::from_points(poly.iter().copied()).diagonal();
    let mut out: Vec<Point3> = Vec::with_capacity(poly.len());
    for &p in poly {
        if out.last().is_none_or(|q| q.dist(p) > eps) {
            out.push(p);
        }
    }
    while out.len() > 1 && out[0].dist(out[out.len() - 1]) <= eps {
        out.pop();
    }
    out
}

/// Twice the area over the squared diameter below which a polygon is flat.
const FLAT_POLYGON: f64 = 1e-9;

fn inside_convex(poly: &[Point3], normal: Point3, p: Point3, tol: f64) -> bool {
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let e = b - a;
        let len = e.norm();
        if len <= tol {
            continue;
        }
        // signed distance from p to the edge line, positive inside
        if normal.cross(e).dot(p - a) / len < -tol {
            return false;
        }
    }
    true
}

/// Barycentric inside test for a point already in the triangle plane.
fn inside_triangle(p: Point3, a: Point3, b: Point3, c: Point3, tol: f64) -> bool {
    let n = (b - a).cross(c - a);
    let nn = n.norm();
    if nn == 0.0 {
        return false;
    }
    let n = n / nn;
    [(a, b), (b, c), (c, a)].iter().all(|&(u, v)| {
        let e = v - u;
        let l = e.norm();
        l > 0.0 && n.cross(e).dot(p - u) / l >= -tol
    })
}

/// Projects `x` onto the plane through `a` with normal `n`. Exact for
/// axis-aligned planes, so hits on planar inputs stay in the plane.
fn snap_to_plane(x: Point3, a: Point3, n: Point3) -> Point3 {
    match n.normalized() {
        Some(u) => x - u * u.dot(x - a),
        None => x,
    }
}

/// Crossing point of segment `ab` with triangle `tri` (Moller-Trumbore with
/// tolerance), if any.
pub(crate) fn segment_triangle(a: Point3, b: Point3, tri: [Point3; 3], tol: f64) -> Option<Point3> {
    let [p0, p1, p2] = tri;
    let d = b - a;
    let e1 = p1 - p0;
    let e2 = p2 - p0;
    let n = e1.cross(e2);
    let denom = n.dot(d);
    if denom == 0.0 {
        return None;
    }
    let t = n.dot(p0 - a) / denom;
    let len = d.norm();
    let ttol = if len > 0.0 { tol / len } else { 0.0 };
    if t < -ttol || t > 1.0 + ttol {
        return None;
    }
    let x = snap_to_plane(a + d * t.clamp(0.0, 1.0), p0, n);
    inside_triangle(x, p0, p1, p2, tol).then_some(x)
}

impl PiecewiseComplex {
    /// All transversal crossings of curve segments with a convex planar polygon.
    pub fn intersect_polygon_curve(&self, poly: &[Point3]) -> PolygonHits {
        let tol = self.tolerance();
        let poly = &merge_close(poly, MERGE_REL);
        if poly.len() < 3 {
            return PolygonHits { points: Vec::new(), degenerate: true };
        }
        let nraw = newell_normal(poly);
        let area2 = nraw.norm();
        let bbox = Aabb::from_points(poly.iter().copied()).inflate(tol);
        // the normal of a sliver polygon is dominated by rounding
        let flat = area2 <= tol * tol || area2 <= FLAT_POLYGON * bbox.diagonal().powi(2);
        let Some(normal) = nraw.normalized().filter(|_| !flat) else {
            return PolygonHits { points: Vec::new(), degenerate: true };
        };
        let origin = poly[0];
        let mut points = Vec::new();
        for s in self.seg_tree().query_box(&bbox) {
            let (a, b) = self.segment_points(s);
            let da = normal.dot(a - origin);
            let db = normal.dot(b - origin);
            // in-plane segments are not transversal
            if (da.abs() <= tol && db.abs() <= tol) || (da > tol && db > tol) || (da < -tol && db < -tol) {
                continue;
            }
            let t = (da / (da - db)).clamp(0.0, 1.0);
            // the hit stays on the segment; its projection is only tested
            let x = a.lerp(b, t);
            let xp = x - normal * normal.dot(x - origin);
            if bbox.contains(xp) && inside_convex(poly, normal, xp, tol) {
                push_unique(&mut points, x, self.segments()[s].curve, 1e3 * tol);
            }
        }
        PolygonHits { points, degenerate: false }
    }

    /// All crossings of segment `ab` with the surface triangles.
    pub fn intersect_segment_surface(&self, a: Point3, b: Point3) -> Vec<(Point3, PatchId)> {
        let tol = self.tolerance();
        let mut out = Vec::new();
        for t in self.tri_tree().query_segment(a, b, tol) {
            if let Some(x) = segment_triangle(a, b, self.triangle_points(t), tol) {
                push_unique(&mut out, x, self.triangles()[t].patch, 1e3 * tol);
            }
        }
        out
    }

    /// Ray-parity membership in the enclosed volume. Points on the surface
    /// are reported outside.
    pub fn point_in_volume(&self, p: Point3) -> Result<bool, VolumeError> {
        if !self.is_closed() {
            return Err(VolumeError::NotClosed);
        }
        let bbox = self.bbox();
        if !bbox.inflate(self.tolerance()).contains(p) {
            return Ok(false);
        }
        let reach = 2.0 * bbox.diagonal() + 2.0 * p.dist(bbox.centre()) + 1.0;
        let mut dir = Point3::new(0.5773502691896258, 0.6123724356957945, 0.5400617248673217);
        let seed = p.x.to_bits() ^ p.y.to_bits().rotate_left(21) ^ p.z.to_bits().rotate_left(42);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..RAY_RETRIES {
            let q = p + dir * reach;
            match self.ray_parity(p, q) {
                RayParity::Inside => return Ok(true),
                RayParity::Outside | RayParity::OnSurface => return Ok(false),
                RayParity::Degenerate => {
                    let d = Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    dir = d.normalized().unwrap_or(dir);
                }
            }
        }
        Err(VolumeError::DegenerateRay(RAY_RETRIES))
    }

    fn ray_parity(&self, p: Point3, q: Point3) -> RayParity {
        let mut crossings = 0usize;
        for t in self.tri_tree().query_segment(p, q, self.tolerance()) {
            let [a, b, c] = self.triangle_points(t);
            let sp = orient3d(a, b, c, p);
            let sq = orient3d(a, b, c, q);
            if sp == Sign::Zero {
                // the ray only touches this plane at p itself
                if inside_triangle(p, a, b, c, self.tolerance()) {
                    return RayParity::OnSurface;
                }
                continue;
            }
            if sq == Sign::Zero {
                return RayParity::Degenerate;
            }
            if sp == sq {
                continue;
            }
            let o1 = orient3d(p, q, a, b);
            let o2 = orient3d(p, q, b, c);
            let o3 = orient3d(p, q, c, a);
            if o1 == o2 && o2 == o3 {
                crossings += 1;
            } else if [o1, o2, o3].contains(&Sign::Zero) {
                let nz: Vec<Sign> = [o1, o2, o3].into_iter().filter(|s| *s != Sign::Zero).collect();
                if nz.windows(2).all(|w| w[0] == w[1]) {
                    return RayParity::Degenerate;
                }
            }
        }
        if crossings % 2 == 1 {
            RayParity::Inside
        } else {
            RayParity::Outside
        }
    }

    /// Points of the curve network at distance exactly `radius` from `centre`.
    pub fn intersect_sphere_curve(&self, centre: Point3, radius: f64) -> Vec<(Point3, CurveId)> {
        let tol = self.tolerance();
        let mut out = Vec::new();
        if radius <= 0.0 {
            return out;
        }
        for s in self.seg_tree().query_box(&Aabb::around(centre, radius + tol)) {
            let (a, b) = self.segment_points(s);
            let d = b - a;
            let f = a - centre;
            let qa = d.norm_sq();
            if qa == 0.0 {
                continue;
            }
            let qb = 2.0 * f.dot(d);
            let qc = f.norm_sq() - radius * radius;
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                continue;
            }
            let sq = disc.sqrt();
            // numerically stable pair of roots
            let sgn = if qb >= 0.0 { 1.0 } else { -1.0 };
            let qq = -0.5 * (qb + sgn * sq);
            let mut roots = vec![];
            if qq != 0.0 {
                roots.push(qq / qa);
                roots.push(qc / qq);
            } else {
                roots.push(0.0);
            }
            let ttol = tol / qa.sqrt();
            for t in roots {
                if t >= -ttol && t <= 1.0 + ttol {
                    push_unique(&mut out, a + d * t.clamp(0.0, 1.0), self.segments()[s].curve, 1e3 * tol);
                }
            }
        }
        out
    }

    /// Crossings of the boundary circle of an oriented disk with the surface.
    pub fn intersect_disk_surface(&self, centre: Point3, normal: Point3, radius: f64) -> Vec<(Point3, PatchId)> {
        let tol = self.tolerance();
        let mut out = Vec::new();
        let Some(n) = normal.normalized() else {
            return out;
        };
        if radius <= 0.0 {
            return out;
        }
        let helper = if n.x.abs() < 0.9 { Point3::new(1., 0., 0.) } else { Point3::new(0., 1., 0.) };
        let u = n.cross(helper).normalized().expect("non-parallel helper");
        let v = n.cross(u);
        for t in self.tri_tree().query_box(&Aabb::around(centre, radius + tol)) {
            let [a, b, c] = self.triangle_points(t);
            let Some(nt) = (b - a).cross(c - a).normalized() else {
                continue;
            };
            // nt . (centre + r(cos u + sin v) - a) = 0
            let ca = radius * nt.dot(u);
            let cb = radius * nt.dot(v);
            let cd = nt.dot(centre - a);
            let r = (ca * ca + cb * cb).sqrt();
            if r <= 1e-14 * radius {
                continue;
            }
            let ratio = -cd / r;
            if ratio.abs() > 1.0 + 1e-12 {
                continue;
            }
            let phi = cb.atan2(ca);
            let delta = ratio.clamp(-1.0, 1.0).acos();
            for theta in [phi + delta, phi - delta] {
                let x = snap_to_plane(centre + (u * theta.cos() + v * theta.sin()) * radius, a, nt);
                if inside_triangle(x, a, b, c, tol) {
                    push_unique(&mut out, x, self.triangles()[t].patch, 1e3 * tol);
                }
            }
        }
        out
    }
}

enum RayParity {
    Inside,
    Outside,
    OnSurface,
    Degenerate,
}
