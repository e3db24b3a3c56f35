//! Generators for the bundled benchmark geometries.

use std::collections::HashMap;

use crate::geometry::Point3;
use crate::oracle::{PiecewiseComplex, Segment, Triangle};

/// Subdivided icosahedron projected onto the sphere of `radius` about the
/// origin; `level` 3 gives 1280 triangles. Outward oriented, one patch.
pub fn icosphere(level: u32, radius: f64) -> PiecewiseComplex {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v: Vec<Point3> = [
        (-1., t, 0.),
        (1., t, 0.),
        (-1., -t, 0.),
        (1., -t, 0.),
        (0., -1., t),
        (0., 1., t),
        (0., -1., -t),
        (0., 1., -t),
        (t, 0., -1.),
        (t, 0., 1.),
        (-t, 0., -1.),
        (-t, 0., 1.),
    ]
    .iter()
    .map(|&(x, y, z)| Point3::new(x, y, z).normalized().expect("non-zero"))
    .collect();
    let mut f: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut split = |a: usize, b: usize, v: &mut Vec<Point3>| {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                v.push(v[a].midpoint(v[b]).normalized().expect("non-zero"));
                v.len() - 1
            })
        };
        let mut next = Vec::with_capacity(4 * f.len());
        for [a, b, c] in f {
            let ab = split(a, b, &mut v);
            let bc = split(b, c, &mut v);
            let ca = split(c, a, &mut v);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        f = next;
    }
    let v = v.into_iter().map(|p| p * radius).collect();
    let tris = f.into_iter().map(|v| Triangle { v, patch: 0 }).collect();
    PiecewiseComplex::new(v, vec![], tris).expect("valid icosphere")
}

/// Unit cube `[0,1]^3`: one patch per face, one curve per edge.
pub fn unit_cube() -> PiecewiseComplex {
    let v: Vec<Point3> =
        (0..8).map(|k| Point3::new((k & 1) as f64, ((k >> 1) & 1) as f64, ((k >> 2) & 1) as f64)).collect();
    // outward quads, counter-clockwise seen from outside
    let quads = [[0, 2, 3, 1], [4, 5, 7, 6], [0, 1, 5, 4], [2, 6, 7, 3], [0, 4, 6, 2], [1, 3, 7, 5]];
    let mut tris = Vec::new();
    for (p, q) in quads.iter().enumerate() {
        tris.push(Triangle { v: [q[0], q[1], q[2]], patch: p as u32 });
        tris.push(Triangle { v: [q[0], q[2], q[3]], patch: p as u32 });
    }
    let edges = [[0, 1], [2, 3], [4, 5], [6, 7], [0, 2], [1, 3], [4, 6], [5, 7], [0, 4], [1, 5], [2, 6], [3, 7]];
    let segs = edges.iter().enumerate().map(|(c, &e)| Segment { v: e, curve: c as u32 }).collect();
    PiecewiseComplex::new(v, segs, tris).expect("valid cube")
}

/// Flat isosceles triangle with apex angle `apex_deg` at the origin and unit
/// legs, subdivided `n` times per side. Its three sides are curves 0 (apex
/// to right corner), 1 (base) and 2 (left corner to apex).
pub fn wedge(apex_deg: f64, n: usize) -> PiecewiseComplex {
    let h = apex_deg.to_radians() / 2.0;
    let a = Point3::ZERO;
    let b = Point3::new(h.cos(), -h.sin(), 0.0);
    let c = Point3::new(h.cos(), h.sin(), 0.0);
    // barycentric lattice: row i has i+1 points between the apex and the base
    let mut id = vec![vec![0usize; n + 1]; n + 1];
    let mut v = Vec::new();
    for i in 0..=n {
        for j in 0..=i {
            let s = i as f64 / n as f64;
            let t = if i == 0 { 0.0 } else { j as f64 / i as f64 };
            let base = b.lerp(c, t);
            id[i][j] = v.len();
            v.push(a.lerp(base, s));
        }
    }
    let mut tris = Vec::new();
    for i in 0..n {
        for j in 0..=i {
            tris.push(Triangle { v: [id[i][j], id[i + 1][j], id[i + 1][j + 1]], patch: 0 });
            if j < i {
                tris.push(Triangle { v: [id[i][j], id[i + 1][j + 1], id[i][j + 1]], patch: 0 });
            }
        }
    }
    let mut segs = Vec::new();
    for i in 0..n {
        segs.push(Segment { v: [id[i][0], id[i + 1][0]], curve: 0 });
        segs.push(Segment { v: [id[n][i], id[n][i + 1]], curve: 1 });
        segs.push(Segment { v: [id[i + 1][i + 1], id[i][i]], curve: 2 });
    }
    PiecewiseComplex::new(v, segs, tris).expect("valid wedge")
}
