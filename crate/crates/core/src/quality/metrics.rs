use crate::geometry::{tet_volume, tri_area, Point3};

fn rms_sq(edges: &[f64]) -> f64 {
    edges.iter().map(|l| l * l).sum::<f64>() / edges.len() as f64
}

/// `(4/√3)·A / e_rms²`, 1 for an equilateral triangle.
pub fn area_length(a: Point3, b: Point3, c: Point3) -> f64 {
    let e2 = rms_sq(&[a.dist(b), b.dist(c), c.dist(a)]);
    if e2 == 0.0 {
        return 0.0;
    }
    4.0 / 3f64.sqrt() * tri_area(a, b, c) / e2
}

/// `6√2·|V| / e_rms³`, 1 for a regular tet.
pub fn volume_length(a: Point3, b: Point3, c: Point3, d: Point3) -> f64 {
    let e2 = rms_sq(&[a.dist(b), a.dist(c), a.dist(d), b.dist(c), b.dist(d), c.dist(d)]);
    if e2 == 0.0 {
        return 0.0;
    }
    6.0 * 2f64.sqrt() * tet_volume(a, b, c, d).abs() / (e2 * e2.sqrt())
}

fn angle_between(u: Point3, v: Point3) -> Option<f64> {
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return None;
    }
    Some((u.dot(v) / (nu * nv)).clamp(-1.0, 1.0).acos().to_degrees())
}

/// Interior angles in degrees at `a`, `b`, `c`; `None` when degenerate.
pub fn triangle_angles(a: Point3, b: Point3, c: Point3) -> Option<[f64; 3]> {
    if tri_area(a, b, c) <= 0.0 {
        return None;
    }
    Some([angle_between(b - a, c - a)?, angle_between(a - b, c - b)?, angle_between(a - c, b - c)?])
}

/// Dihedral angles in degrees at edges ab, ac, ad, bc, bd, cd; `None` for a
/// flat tet.
pub fn dihedral_angles(a: Point3, b: Point3, c: Point3, d: Point3) -> Option<[f64; 6]> {
    if tet_volume(a, b, c, d) == 0.0 {
        return None;
    }
    let p = [a, b, c, d];
    // dihedral at edge (i,j) between faces (i,j,k) and (i,j,l)
    let at = |i: usize, j: usize, k: usize, l: usize| -> Option<f64> {
        let e = p[j] - p[i];
        let e2 = e.norm_sq();
        let proj = |w: Point3| {
            let r = w - p[i];
            r - e * (r.dot(e) / e2)
        };
        angle_between(proj(p[k]), proj(p[l]))
    };
    Some([at(0, 1, 2, 3)?, at(0, 2, 1, 3)?, at(0, 3, 1, 2)?, at(1, 2, 0, 3)?, at(1, 3, 0, 2)?, at(2, 3, 0, 1)?])
}

/// Edge length over the target length at its midpoint.
pub fn relative_edge_length(a: Point3, b: Point3, h: impl Fn(Point3) -> f64) -> f64 {
    a.dist(b) / h(a.midpoint(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regular() -> [Point3; 4] {
        [Point3::new(1., 1., 1.), Point3::new(1., -1., -1.), Point3::new(-1., 1., -1.), Point3::new(-1., -1., 1.)]
    }

    #[test]
    fn anchors() {
        let s3 = 3f64.sqrt();
        let (a, b, c) = (Point3::ZERO, Point3::new(1., 0., 0.), Point3::new(0.5, s3 / 2.0, 0.));
        assert!((area_length(a, b, c) - 1.0).abs() < 1e-12);
        assert_eq!(area_length(a, b, Point3::new(2., 0., 0.)), 0.0);
        let right = area_length(a, b, Point3::new(0., 1., 0.));
        assert!((right - s3 / 2.0).abs() < 1e-12);
        let [p, q, r, s] = regular();
        assert!((volume_length(p, q, r, s) - 1.0).abs() < 1e-12);
        let corner = volume_length(Point3::ZERO, b, Point3::new(0., 1., 0.), Point3::new(0., 0., 1.));
        assert!((corner - 6.0 * 2f64.sqrt() / 6.0 / 1.5f64.powf(1.5)).abs() < 1e-12);
        assert_eq!(volume_length(a, b, c, Point3::new(0.3, 0.2, 0.0)), 0.0);
    }

    #[test]
    fn angle_anchors() {
        let [p, q, r, s] = regular();
        for t in dihedral_angles(p, q, r, s).unwrap() {
            assert!((t - (1.0f64 / 3.0).acos().to_degrees()).abs() < 1e-9);
        }
        let o = Point3::ZERO;
        let (x, y, z) = (Point3::new(1., 0., 0.), Point3::new(0., 1., 0.), Point3::new(0., 0., 1.));
        let d = dihedral_angles(o, x, y, z).unwrap();
        // independent oracle: pi minus the angle between outward face normals
        let pts = [o, x, y, z];
        let outward = |f: [usize; 3], opp: usize| {
            let n = (pts[f[1]] - pts[f[0]]).cross(pts[f[2]] - pts[f[0]]);
            if n.dot(pts[opp] - pts[f[0]]) > 0.0 { -n } else { n }
        };
        let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for (k, &(i, j)) in edges.iter().enumerate() {
            let o2: Vec<usize> = (0..4).filter(|&m| m != i && m != j).collect();
            let n1 = outward([i, j, o2[0]], o2[1]);
            let n2 = outward([i, j, o2[1]], o2[0]);
            let want = 180.0 - (n1.dot(n2) / (n1.norm() * n2.norm())).acos().to_degrees();
            assert!((d[k] - want).abs() < 1e-9, "{d:?}");
        }
        assert!((d[0] - 90.0).abs() < 1e-9 && (d[5] - (1.0 / 3f64.sqrt()).acos().to_degrees()).abs() < 1e-9);
        assert!(triangle_angles(o, x, Point3::new(2., 0., 0.)).is_none());
        assert!(dihedral_angles(o, x, y, Point3::new(1., 1., 0.)).is_none());
    }

    #[test]
    fn relative_length() {
        let a = Point3::ZERO;
        assert!((relative_edge_length(a, Point3::new(0.2, 0., 0.), |_| 0.2) - 1.0).abs() < 1e-15);
        assert!((relative_edge_length(a, Point3::new(0.3, 0., 0.), |_| 0.2) - 1.5).abs() < 1e-12);
    }
}
