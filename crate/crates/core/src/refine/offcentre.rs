use super::RefineConfig;
use crate::geometry::{tri_circumcentre, Point3};
use crate::oracle::PiecewiseComplex;
use crate::restricted::{RestrictedEdge, RestrictedTet, RestrictedTri};

pub const SIZE_ITERATIONS: usize = 8;
pub const SIZE_TOLERANCE: f64 = 1e-3;

/// A size-optimal candidate and the length it was built for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffCentre {
    pub point: Point3,
    pub h_sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Edge,
    Tri,
    Tet,
}

/// Solves `hs = (h(x1) + h(c(hs))) / 2` by fixed-point iteration, clamped to
/// `[h(x1)/2, 2 h(x1)]`; `place` builds the candidate for a given length.
pub fn solve_length(h1: f64, h: impl Fn(Point3) -> f64, place: impl Fn(f64) -> Option<Point3>) -> Option<OffCentre> {
    let mut hs = h1;
    let mut point = place(hs)?;
    for _ in 0..SIZE_ITERATIONS {
        let next = (0.5 * (h1 + h(point))).clamp(0.5 * h1, 2.0 * h1);
        let done = (next - hs).abs() <= SIZE_TOLERANCE * hs;
        hs = next;
        point = place(hs)?;
        if done {
            break;
        }
    }
    Some(OffCentre { point, h_sigma: hs })
}

fn closest_direction(from: Point3, toward: Point3, cands: impl Iterator<Item = Point3>) -> Option<Point3> {
    let v = (toward - from).normalized()?;
    let mut best: Option<(f64, Point3)> = None;
    for p in cands {
        let Some(u) = (p - from).normalized() else {
            continue;
        };
        let c = u.dot(v);
        if best.is_none_or(|(bc, _)| c > bc) {
            best = Some((c, p));
        }
    }
    best.map(|(_, p)| p)
}

/// Point of Γ at distance `hs` from the frontal vertex `x1`, closest in
/// angle to the direction towards the surface ball centre. Declined when
/// the ball is no larger than `hs`.
pub fn type2_offcentre_edge(g: &PiecewiseComplex, e: &RestrictedEdge, x1: Point3, cfg: &RefineConfig) -> Option<OffCentre> {
    let place = |hs: f64| closest_direction(x1, e.centre, g.intersect_sphere_curve(x1, hs).into_iter().map(|(p, _)| p));
    let c = solve_length(cfg.h(x1), |p| cfg.h(p), place)?;
    (e.radius > c.h_sigma).then_some(c)
}

/// Point of Σ in the bisector plane of the frontal edge `(a, b)` at distance
/// `hs` from both endpoints, on the side of the surface ball centre.
pub fn type2_offcentre_tri(
    g: &PiecewiseComplex,
    f: &RestrictedTri,
    a: Point3,
    b: Point3,
    cfg: &RefineConfig,
) -> Option<OffCentre> {
    let c0 = a.midpoint(b);
    let half = 0.5 * a.dist(b);
    let place = |hs: f64| {
        if hs <= half {
            return None;
        }
        let rad = (hs * hs - half * half).sqrt();
        closest_direction(c0, f.centre, g.intersect_disk_surface(c0, b - a, rad).into_iter().map(|(p, _)| p))
    };
    let c = solve_length(cfg.h(c0), |p| cfg.h(p), place)?;
    (f.radius > c.h_sigma).then_some(c)
}

/// Point on the line from the frontal facet's circumcentre towards the tet
/// circumcentre, at distance `hs` from the facet vertices.
pub fn type2_offcentre_tet(t: &RestrictedTet, facet: [Point3; 3], apex: Point3, cfg: &RefineConfig) -> Option<OffCentre> {
    let [a, b, c] = facet;
    let c0 = tri_circumcentre(a, b, c)?;
    let r0 = c0.dist(a);
    let dir = (t.centre - c0).normalized().or_else(|| {
        let n = (b - a).cross(c - a).normalized()?;
        Some(if n.dot(apex - a) < 0.0 { -n } else { n })
    })?;
    let place = |hs: f64| (hs > r0).then(|| c0 + dir * (hs * hs - r0 * r0).sqrt());
    let off = solve_length(cfg.h(c0), |p| cfg.h(p), place)?;
    (t.radius > off.h_sigma).then_some(off)
}

/// Chooses between the circumcentre-type point `c1` and the off-centre
/// `c2` given the frontal ball `B(c0, r0)`.
pub fn select_refinement_point(c1: Point3, c2: Option<Point3>, kind: Kind, c0: Point3, r0: f64) -> Point3 {
    let Some(c2) = c2 else {
        return c1;
    };
    let (d1, d2) = (c1.dist(c0), c2.dist(c0));
    let take = match kind {
        Kind::Edge => d2 <= d1,
        Kind::Tri | Kind::Tet => d2 <= d1 && d2 >= r0,
    };
    if take {
        c2
    } else {
        c1
    }
}
