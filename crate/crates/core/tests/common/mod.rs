//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use psmesh::geometry::Point3;
use psmesh::predicates::Sign;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn q(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn sign_of<T: Signed>(v: &T) -> Sign {
    if v.is_zero() {
        Sign::Zero
    } else if v.is_positive() {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

fn det3<T: Clone + Signed>(m: &[[T; 3]; 3]) -> T {
    let [[a, b, c], [d, e, f], [g, h, i]] = m.clone();
    a * (e.clone() * i.clone() - f.clone() * h.clone()) - b * (d.clone() * i - f * g.clone()) + c * (d * h - e * g)
}

fn orient_rows<T: Clone + Signed>(rows: [[T; 3]; 3]) -> Sign {
    sign_of(&det3(&rows))
}

/// Lifted determinant of rows `p - e` for the four tet vertices; positive
/// when `e` is inside the circumsphere of a right-handed tet.
fn insphere_rows<T: Clone + Signed>(rows: [[T; 3]; 4]) -> Sign {
    let lift = |r: &[T; 3]| r[0].clone() * r[0].clone() + r[1].clone() * r[1].clone() + r[2].clone() * r[2].clone();
    let mut det = T::zero();
    for skip in 0..4 {
        let m: Vec<[T; 3]> = (0..4).filter(|&r| r != skip).map(|r| rows[r].clone()).collect();
        let term = lift(&rows[skip]) * det3(&[m[0].clone(), m[1].clone(), m[2].clone()]);
        // cofactor sign of column 3, row `skip`
        if skip % 2 == 1 {
            det = det + term;
        } else {
            det = det - term;
        }
    }
    // the lifted determinant is negative for inside points of a right-handed tet
    sign_of(&-det)
}

fn diff(p: Point3, o: Point3) -> [BigRational; 3] {
    [q(p.x) - q(o.x), q(p.y) - q(o.y), q(p.z) - q(o.z)]
}

/// Sign of `det[b - a; c - a; d - a]` in exact rationals.
pub fn rational_orient(a: Point3, b: Point3, c: Point3, d: Point3) -> Sign {
    orient_rows([diff(b, a), diff(c, a), diff(d, a)])
}

/// Positive iff `e` is strictly inside the circumsphere of the positively
/// oriented `abcd`, by the lifted 4x4 determinant in exact rationals.
pub fn rational_insphere(a: Point3, b: Point3, c: Point3, d: Point3, e: Point3) -> Sign {
    insphere_rows([diff(a, e), diff(b, e), diff(c, e), diff(d, e)])
}

/// Mantissa and binary exponent with `x = m * 2^e`.
fn decode(x: f64) -> (i64, i32) {
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1 << 52) - 1)) as i64;
    if exp == 0 {
        (sign * frac, -1074)
    } else {
        (sign * (frac | (1 << 52)), exp - 1075)
    }
}

/// Coordinates of `pts` as integers over the common denominator
/// `2^-emin`, which preserves every determinant sign.
fn integer_coords(pts: &[Point3]) -> Vec<[BigInt; 3]> {
    let dec: Vec<[(i64, i32); 3]> = pts.iter().map(|p| [decode(p.x), decode(p.y), decode(p.z)]).collect();
    let emin = dec.iter().flatten().filter(|(m, _)| *m != 0).map(|(_, e)| *e).min().unwrap_or(0);
    dec.iter().map(|c| c.map(|(m, e)| if m == 0 { BigInt::zero() } else { BigInt::from(m) << (e - emin) as usize })).collect()
}

fn int_diff(p: &[BigInt; 3], o: &[BigInt; 3]) -> [BigInt; 3] {
    [&p[0] - &o[0], &p[1] - &o[1], &p[2] - &o[2]]
}

/// Same as [`rational_orient`] in scaled integers; much faster on inputs
/// with widely spread exponents.
pub fn integer_orient(a: Point3, b: Point3, c: Point3, d: Point3) -> Sign {
    let v = integer_coords(&[a, b, c, d]);
    orient_rows([int_diff(&v[1], &v[0]), int_diff(&v[2], &v[0]), int_diff(&v[3], &v[0])])
}

pub fn integer_insphere(a: Point3, b: Point3, c: Point3, d: Point3, e: Point3) -> Sign {
    let v = integer_coords(&[a, b, c, d, e]);
    insphere_rows([int_diff(&v[0], &v[4]), int_diff(&v[1], &v[4]), int_diff(&v[2], &v[4]), int_diff(&v[3], &v[4])])
}

/// Whether no point of `pts` is strictly inside the circumball of `quad`:
/// a float check with the exact rational oracle deciding near-ties.
pub fn circumball_empty(quad: [Point3; 4], pts: &[Point3]) -> bool {
    let [a, b, c, d] = quad;
    let cc = circumcentre(a, b, c, d);
    pts.iter().all(|&p| {
        if let Some(cc) = cc {
            let r2 = cc.dist_sq(a);
            let d2 = cc.dist_sq(p);
            if (d2 - r2).abs() > 1e-6 * r2 {
                return d2 > r2;
            }
        }
        rational_insphere(a, b, c, d, p) != Sign::Positive
    })
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point3> {
    (0..n).map(|_| Point3::new(rng.gen(), rng.gen(), rng.gen())).collect()
}

/// Result of brute-force Delaunay enumeration.
pub struct BruteDelaunay {
    /// Sorted index quadruples whose open circumball contains no point.
    pub tets: Vec<[usize; 4]>,
    /// A comparison came within the general-position margin.
    pub ambiguous: bool,
}

/// Enumerates every quadruple of `pts[skip..]` and keeps those whose open
/// circumball contains no point of `pts` (the skipped points included).
pub fn brute_delaunay(pts: &[Point3], skip: usize) -> BruteDelaunay {
    let n = pts.len();
    let mut tets = Vec::new();
    let mut ambiguous = false;
    for i in skip..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    let (a, b, c, d) = (pts[i], pts[j], pts[k], pts[l]);
                    let vol = (b - a).cross(c - a).dot(d - a);
                    let scale = (b - a).norm() * (c - a).norm() * (d - a).norm();
                    if vol.abs() <= 1e-10 * scale {
                        continue;
                    }
                    let Some(cc) = circumcentre(a, b, c, d) else { continue };
                    let r2 = cc.dist_sq(a);
                    let mut empty = true;
                    for (m, p) in pts.iter().enumerate() {
                        if m == i || m == j || m == k || m == l {
                            continue;
                        }
                        let d2 = cc.dist_sq(*p);
                        if (d2 - r2).abs() <= 1e-9 * r2 {
                            ambiguous = true;
                        }
                        if d2 < r2 {
                            empty = false;
                            break;
                        }
                    }
                    if empty {
                        tets.push([i, j, k, l]);
                    }
                }
            }
        }
    }
    BruteDelaunay { tets, ambiguous }
}

/// Circumcentre by Cramer's rule on the perpendicular-bisector system.
pub fn circumcentre(a: Point3, b: Point3, c: Point3, d: Point3) -> Option<Point3> {
    let rows = [b - a, c - a, d - a];
    let rhs = rows.map(|r| 0.5 * r.dot(r));
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let m = rows.map(|r| [r.x, r.y, r.z]);
    let d0 = det(m);
    if d0 == 0.0 {
        return None;
    }
    let mut x = [0.0; 3];
    for (col, xc) in x.iter_mut().enumerate() {
        let mut mc = m;
        for r in 0..3 {
            mc[r][col] = rhs[r];
        }
        *xc = det(mc) / d0;
    }
    Some(a + Point3::new(x[0], x[1], x[2]))
}
