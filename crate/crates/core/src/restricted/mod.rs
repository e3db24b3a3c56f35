//! Restricted Delaunay sub-complexes: the Delaunay edges, faces and tets whose
//! Voronoi duals meet the curves, surfaces and enclosed volume.

mod complex;
mod topo;

use crate::delaunay::{TetId, TetMesh, VertId, FACE, NONE};
use crate::geometry::{tet_circumcentre, tri_circumcentre, Point3};
use crate::oracle::{CurveId, PatchId, PiecewiseComplex};

pub use complex::{RestrictedComplex, RestrictedDelta, Strata};
pub use topo::{fan_components, topo_disk_1, topo_disk_2, DiskExpectation};

/// A Delaunay edge whose Voronoi face meets the curve network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictedEdge {
    pub edge: [VertId; 2],
    /// Surface Delaunay ball centre on the curve.
    pub centre: Point3,
    pub radius: f64,
    /// Distance between the ball centre and the edge midpoint.
    pub err: f64,
    pub curve: CurveId,
}

/// A Delaunay face whose Voronoi edge meets the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictedTri {
    pub tri: [VertId; 3],
    pub centre: Point3,
    pub radius: f64,
    /// Distance between the ball centre and the in-plane circumcentre.
    pub err: f64,
    pub patch: PatchId,
}

/// A Delaunay tet whose circumcentre lies inside the volume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictedTet {
    pub tet: TetId,
    pub verts: [VertId; 4],
    pub centre: Point3,
    pub radius: f64,
    /// False when the circumcentre was replaced by the centroid.
    pub reliable: bool,
}

fn any_shell(v: &[VertId]) -> bool {
    v.iter().any(|&w| TetMesh::is_shell_vertex(w))
}

fn lex_less(a: Point3, b: Point3) -> bool {
    (a.x, a.y, a.z) < (b.x, b.y, b.z)
}

/// Rotates and orients a cyclic polygon so it starts at its least vertex,
/// making the result independent of where the ring walk began.
fn canonical_ring(mut poly: Vec<Point3>) -> Vec<Point3> {
    let n = poly.len();
    if n < 3 {
        return poly;
    }
    let k = (0..n).fold(0, |k, i| if lex_less(poly[i], poly[k]) { i } else { k });
    poly.rotate_left(k);
    if lex_less(poly[n - 1], poly[1]) {
        poly[1..].reverse();
    }
    poly
}

/// The ball of maximum radius among `hits`, measured from `anchor`.
fn widest<T: Copy>(hits: &[(Point3, T)], anchor: Point3) -> Option<(Point3, f64, T)> {
    let mut best: Option<(Point3, f64, T)> = None;
    for &(x, tag) in hits {
        let r = x.dist(anchor);
        if best.is_none_or(|(_, br, _)| r > br) {
            best = Some((x, r, tag));
        }
    }
    best
}

/// Classifies edge `(u, w)`, using `hint` as a tet containing it if given.
pub fn classify_edge_at(
    m: &TetMesh,
    g: &PiecewiseComplex,
    hint: Option<TetId>,
    u: VertId,
    w: VertId,
) -> Option<RestrictedEdge> {
    if any_shell(&[u, w]) {
        return None;
    }
    let face = match hint {
        Some(t) => m.voronoi_face_at(t, u, w).ok()?,
        None => m.voronoi_face(u, w).ok()?,
    };
    if face.unbounded {
        return None;
    }
    let hits = g.intersect_polygon_curve(&canonical_ring(face.polygon));
    let (u, w) = (u.min(w), u.max(w));
    let (pu, pw) = (m.point(u), m.point(w));
    let (centre, radius, curve) = widest(&hits.points, pu)?;
    Some(RestrictedEdge { edge: [u.min(w), u.max(w)], centre, radius, err: centre.dist(pu.midpoint(pw)), curve })
}

pub fn classify_edge(m: &TetMesh, g: &PiecewiseComplex, e: [VertId; 2]) -> Option<RestrictedEdge> {
    classify_edge_at(m, g, None, e[0], e[1])
}

/// Classifies face `i` of tet `t`.
pub fn classify_face_of(m: &TetMesh, g: &PiecewiseComplex, t: TetId, i: usize) -> Option<RestrictedTri> {
    let f = m.face(t, i);
    if any_shell(&f) || m.neighbour(t, i) == NONE {
        return None;
    }
    let dual = m.voronoi_edge(t, i);
    let (p, q) = if lex_less(dual.b, dual.a) { (dual.b, dual.a) } else { (dual.a, dual.b) };
    let hits = g.intersect_segment_surface(p, q);
    let mut tri = f;
    tri.sort_unstable();
    let [a, b, c] = tri.map(|v| m.point(v));
    let (centre, radius, patch) = widest(&hits, a)?;
    let cc = tri_circumcentre(a, b, c).unwrap_or((a + b + c) / 3.0);
    Some(RestrictedTri { tri, centre, radius, err: centre.dist(cc), patch })
}

/// Classifies the Delaunay face with vertices `f`.
pub fn classify_facet(m: &TetMesh, g: &PiecewiseComplex, f: [VertId; 3]) -> Option<RestrictedTri> {
    let t = m.edge_tet(f[0], f[1]).and_then(|_| {
        m.star(f[0]).into_iter().find(|&t| {
            let v = m.tet_vertices(t);
            v.contains(&f[1]) && v.contains(&f[2])
        })
    })?;
    let v = m.tet_vertices(t);
    let i = (0..4).find(|&k| !f.contains(&v[k]))?;
    classify_face_of(m, g, t, i)
}

/// Classifies a tet by membership of its circumcentre in the volume.
pub fn classify_tet(m: &TetMesh, g: &PiecewiseComplex, t: TetId) -> Option<RestrictedTet> {
    if m.is_ghost(t) {
        return None;
    }
    let vv = m.voronoi_vertex(t);
    let pts = m.tet_points(t);
    let inside = match g.point_in_volume(vv.point) {
        Ok(b) => b,
        Err(e) => {
            log::warn!("volume membership failed for tet {t}: {e}");
            false
        }
    };
    if !inside {
        return None;
    }
    let mut verts = m.tet_vertices(t);
    verts.sort_unstable();
    Some(RestrictedTet { tet: t, verts, centre: vv.point, radius: vv.point.dist(pts[0]), reliable: vv.reliable })
}

/// Mean edge length implied by a circumball radius for a `kind`-simplex
/// (1 edge, 2 triangle, 3 tet); exact for regular elements.
pub fn element_size(kind: u8, r: f64) -> f64 {
    match kind {
        1 => 2.0 * r,
        2 => 3f64.sqrt() * r,
        3 => (8.0f64 / 3.0).sqrt() * r,
        _ => panic!("simplex kind must be 1, 2 or 3"),
    }
}

fn shortest_edge(pts: &[Point3]) -> f64 {
    let mut l = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            l = l.min(pts[i].dist(pts[j]));
        }
    }
    l
}

/// Circumradius over shortest edge for an edge, triangle or tet. Infinite
/// for a zero-length edge or a flat simplex.
pub fn radius_edge(pts: &[Point3]) -> f64 {
    let l = shortest_edge(pts);
    let r = match pts.len() {
        2 => 0.5 * pts[0].dist(pts[1]),
        3 => match tri_circumcentre(pts[0], pts[1], pts[2]) {
            Some(c) => c.dist(pts[0]),
            None => return f64::INFINITY,
        },
        4 => match tet_circumcentre(pts[0], pts[1], pts[2], pts[3]) {
            Some(c) => c.dist(pts[0]),
            None => return f64::INFINITY,
        },
        _ => panic!("radius_edge takes 2, 3 or 4 points"),
    };
    if l == 0.0 {
        f64::INFINITY
    } else {
        r / l
    }
}

/// Ratio of a given ball radius to the shortest edge of `pts`.
pub fn ball_edge_ratio(r: f64, pts: &[Point3]) -> f64 {
    let l = shortest_edge(pts);
    if l == 0.0 {
        f64::INFINITY
    } else {
        r / l
    }
}

/// Sorted vertex pairs of the six edges of a tet.
pub(crate) fn tet_edges(v: [VertId; 4]) -> [[VertId; 2]; 6] {
    let k = |a: VertId, b: VertId| if a < b { [a, b] } else { [b, a] };
    [k(v[0], v[1]), k(v[0], v[2]), k(v[0], v[3]), k(v[1], v[2]), k(v[1], v[3]), k(v[2], v[3])]
}

/// Sorted vertex triples of the faces of a tet.
pub(crate) fn tet_faces(v: [VertId; 4]) -> [[VertId; 3]; 4] {
    FACE.map(|f| {
        let mut t = f.map(|k| v[k]);
        t.sort_unstable();
        t
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Aabb;
    use crate::oracle::{parse_complex, Segment};

    #[test]
    fn element_size_anchors() {
        let l = 0.7;
        assert!((element_size(2, l / 3f64.sqrt()) - l).abs() < 1e-12);
        assert!((element_size(3, l * (3.0f64 / 8.0).sqrt()) - l).abs() < 1e-12);
        assert_eq!(element_size(1, 0.5), 1.0);
    }

    #[test]
    fn radius_edge_anchors() {
        let s3 = 3f64.sqrt();
        let tri = [Point3::ZERO, Point3::new(1., 0., 0.), Point3::new(0.5, s3 / 2.0, 0.)];
        assert!((radius_edge(&tri) - 1.0 / s3).abs() < 1e-12);
        let tet = [
            Point3::new(1., 1., 1.),
            Point3::new(1., -1., -1.),
            Point3::new(-1., 1., -1.),
            Point3::new(-1., -1., 1.),
        ];
        assert!((radius_edge(&tet) - (3.0f64 / 8.0).sqrt()).abs() < 1e-12);
        let needle = [Point3::ZERO, Point3::new(1., 0., 0.), Point3::new(0.5, 1e-3, 0.)];
        // circumradius of an isosceles triangle with base 1 and height h
        let h: f64 = 1e-3;
        let r = (0.25 + h * h) / (2.0 * h);
        let l = (0.25 + h * h).sqrt();
        assert!((radius_edge(&needle) - r / l).abs() < 1e-9 * r / l);
        assert_eq!(radius_edge(&[Point3::ZERO, Point3::ZERO, Point3::new(1., 0., 0.)]), f64::INFINITY);
    }

    #[test]
    fn collinear_samples_restrict_consecutive_edges() {
        let v: Vec<Point3> = (0..2).map(|i| Point3::new(i as f64, 0., 0.)).collect();
        let g = PiecewiseComplex::new(v, vec![Segment { v: [0, 1], curve: 0 }], vec![]).unwrap();
        let mut m = TetMesh::new(Aabb::from_points([Point3::new(0., -0.5, -0.5), Point3::new(1., 0.5, 0.5)]));
        let ids: Vec<VertId> =
            (0..8).map(|i| m.insert_point(Point3::new(i as f64 / 7.0, 0., 0.)).unwrap().vertex).collect();
        for k in 0..7 {
            let e = classify_edge(&m, &g, [ids[k], ids[k + 1]]).expect("consecutive edge restricted");
            assert!(e.centre.x > m.point(ids[k]).x && e.centre.x < m.point(ids[k + 1]).x);
            assert!(e.err < 1e-9);
        }
    }

    #[test]
    fn far_edge_not_restricted() {
        let g = parse_complex("v 0 0 0\nv 1 0 0\ne 0 1 0\n").unwrap();
        let mut m = TetMesh::new(Aabb::from_points([Point3::new(0., 0., 0.), Point3::new(1., 5., 5.)]));
        for p in [Point3::new(0., 0., 0.), Point3::new(1., 0., 0.), Point3::new(0.5, 4., 4.), Point3::new(0.6, 4.5, 4.1)]
        {
            m.insert_point(p).unwrap();
        }
        assert!(classify_edge(&m, &g, [10, 11]).is_none());
    }
}
