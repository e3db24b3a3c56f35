//! Exact orientation and in-sphere predicates.
//!
//! Both predicates evaluate a floating-point determinant first and accept its
//! sign when it clears a forward error bound. Otherwise the determinant is
//! recomputed exactly over big integers: every `f64` is `m * 2^e`, so after
//! aligning all inputs to the smallest exponent the whole computation is
//! integral and the sign is the true sign of the real determinant.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::geometry::Point3;

const EPS: f64 = f64::EPSILON * 0.5;
// Generous multiples of Shewchuk's first-stage bounds; a loose bound only costs
// an extra exact evaluation.
const ORIENT_BOUND: f64 = (16.0 + 128.0 * EPS) * EPS;
const INSPHERE_BOUND: f64 = (48.0 + 512.0 * EPS) * EPS;
// Outside this magnitude window products may overflow or lose bits to
// underflow, so the float stage is skipped.
const SAFE_MIN: f64 = 1e-50;
const SAFE_MAX: f64 = 1e50;

/// Sign of a predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn from_ordering(o: Ordering) -> Sign {
        match o {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

fn in_safe_window(vals: &[f64]) -> bool {
    vals.iter().all(|v| {
        let a = v.abs();
        a == 0.0 || (SAFE_MIN..=SAFE_MAX).contains(&a)
    })
}

/// Orientation of `d` relative to the plane through `a, b, c`.
///
/// Positive when `(b - a, c - a, d - a)` is a right-handed frame, so
/// `orient3d(0, e_x, e_y, e_z)` is positive.
pub fn orient3d(a: Point3, b: Point3, c: Point3, d: Point3) -> Sign {
    let adx = a.x - d.x;
    let bdx = b.x - d.x;
    let cdx = c.x - d.x;
    let ady = a.y - d.y;
    let bdy = b.y - d.y;
    let cdy = c.y - d.y;
    let adz = a.z - d.z;
    let bdz = b.z - d.z;
    let cdz = c.z - d.z;

    if in_safe_window(&[adx, bdx, cdx, ady, bdy, cdy, adz, bdz, cdz]) {
        let bdxcdy = bdx * cdy;
        let cdxbdy = cdx * bdy;
        let cdxady = cdx * ady;
        let adxcdy = adx * cdy;
        let adxbdy = adx * bdy;
        let bdxady = bdx * ady;
        let det = adz * (bdxcdy - cdxbdy) + bdz * (cdxady - adxcdy) + cdz * (adxbdy - bdxady);
        let permanent = (bdxcdy.abs() + cdxbdy.abs()) * adz.abs()
            + (cdxady.abs() + adxcdy.abs()) * bdz.abs()
            + (adxbdy.abs() + bdxady.abs()) * cdz.abs();
        let bound = ORIENT_BOUND * permanent;
        // This determinant is positive when d lies below abc; flip to the
        // right-handed convention.
        if det > bound {
            return Sign::Negative;
        }
        if -det > bound {
            return Sign::Positive;
        }
    }
    orient3d_exact(a, b, c, d)
}

/// In-sphere test: positive iff `e` is strictly inside the circumsphere of the
/// positively oriented tetrahedron `abcd`. The sign flips for a negatively
/// oriented `abcd`.
pub fn insphere(a: Point3, b: Point3, c: Point3, d: Point3, e: Point3) -> Sign {
    let aex = a.x - e.x;
    let bex = b.x - e.x;
    let cex = c.x - e.x;
    let dex = d.x - e.x;
    let aey = a.y - e.y;
    let bey = b.y - e.y;
    let cey = c.y - e.y;
    let dey = d.y - e.y;
    let aez = a.z - e.z;
    let bez = b.z - e.z;
    let cez = c.z - e.z;
    let dez = d.z - e.z;

    if in_safe_window(&[aex, bex, cex, dex, aey, bey, cey, dey, aez, bez, cez, dez]) {
        let aexbey = aex * bey;
        let bexaey = bex * aey;
        let ab = aexbey - bexaey;
        let bexcey = bex * cey;
        let cexbey = cex * bey;
        let bc = bexcey - cexbey;
        let cexdey = cex * dey;
        let dexcey = dex * cey;
        let cd = cexdey - dexcey;
        let dexaey = dex * aey;
        let aexdey = aex * dey;
        let da = dexaey - aexdey;
        let aexcey = aex * cey;
        let cexaey = cex * aey;
        let ac = aexcey - cexaey;
        let bexdey = bex * dey;
        let dexbey = dex * bey;
        let bd = bexdey - dexbey;

        let abc = aez * bc - bez * ac + cez * ab;
        let bcd = bez * cd - cez * bd + dez * bc;
        let cda = cez * da + dez * ac + aez * cd;
        let dab = dez * ab + aez * bd + bez * da;

        let alift = aex * aex + aey * aey + aez * aez;
        let blift = bex * bex + bey * bey + bez * bez;
        let clift = cex * cex + cey * cey + cez * cez;
        let dlift = dex * dex + dey * dey + dez * dez;

        let det = (dlift * abc - clift * dab) + (blift * cda - alift * bcd);

        let (aezp, bezp, cezp, dezp) = (aez.abs(), bez.abs(), cez.abs(), dez.abs());
        let aexbeyp = aexbey.abs();
        let bexaeyp = bexaey.abs();
        let bexceyp = bexcey.abs();
        let cexbeyp = cexbey.abs();
        let cexdeyp = cexdey.abs();
        let dexceyp = dexcey.abs();
        let dexaeyp = dexaey.abs();
        let aexdeyp = aexdey.abs();
        let aexceyp = aexcey.abs();
        let cexaeyp = cexaey.abs();
        let bexdeyp = bexdey.abs();
        let dexbeyp = dexbey.abs();
        let permanent = ((cexdeyp + dexceyp) * bezp
            + (dexbeyp + bexdeyp) * cezp
            + (bexceyp + cexbeyp) * dezp)
            * alift
            + ((dexaeyp + aexdeyp) * cezp + (aexceyp + cexaeyp) * dezp + (cexdeyp + dexceyp) * aezp)
                * blift
            + ((aexbeyp + bexaeyp) * dezp + (bexdeyp + dexbeyp) * aezp + (dexaeyp + aexdeyp) * bezp)
                * clift
            + ((bexceyp + cexbeyp) * aezp + (cexaeyp + aexceyp) * bezp + (aexbeyp + bexaeyp) * cezp)
                * dlift;
        let bound = INSPHERE_BOUND * permanent;
        // Same sign flip as orient3d: this form is positive-inside for
        // tetrahedra that are negative in the right-handed convention.
        if det > bound {
            return Sign::Negative;
        }
        if -det > bound {
            return Sign::Positive;
        }
    }
    insphere_exact(a, b, c, d, e)
}

/// Decomposes `v` into an integer mantissa and a binary exponent.
fn decompose(v: f64) -> (i64, i32) {
    if v == 0.0 {
        return (0, 0);
    }
    let bits = v.to_bits();
    let sign: i64 = if bits >> 63 == 0 { 1 } else { -1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & 0x000f_ffff_ffff_ffff) as i64;
    let (mant, exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1_i64 << 52), exp_bits - 1075)
    };
    (sign * mant, exp)
}

/// Converts the coordinates to big integers sharing a common scale.
fn to_fixed<const N: usize>(pts: [Point3; N]) -> [[BigInt; 3]; N] {
    to_fixed_scaled(pts).0
}

/// As [`to_fixed`], also returning the binary exponent of one unit.
fn to_fixed_scaled<const N: usize>(pts: [Point3; N]) -> ([[BigInt; 3]; N], i32) {
    let parts: Vec<(i64, i32)> = pts.iter().flat_map(|p| p.to_array()).map(decompose).collect();
    let emin = parts
        .iter()
        .filter(|(m, _)| *m != 0)
        .map(|&(_, e)| e)
        .min()
        .unwrap_or(0);
    let mut it = parts.into_iter().map(|(m, e)| {
        if m == 0 {
            BigInt::zero()
        } else {
            BigInt::from(m) << ((e - emin) as usize)
        }
    });
    (std::array::from_fn(|_| std::array::from_fn(|_| it.next().expect("coordinate count"))), emin)
}

/// `n / d * 2^e` rounded to about 60 significant bits.
fn ratio_to_f64(n: &BigInt, d: &BigInt, e: i32) -> f64 {
    if n.is_zero() {
        return 0.0;
    }
    let k = 62 + d.bits() as i64 - n.bits() as i64;
    let q = if k >= 0 { (n << k as usize) / d } else { n / (d << (-k) as usize) };
    let q = q.to_f64().unwrap_or(f64::NAN);
    let mut exp = e as i64 - k;
    let mut v = q;
    while exp > 0 {
        let s = exp.min(1000);
        v *= 2f64.powi(s as i32);
        exp -= s;
    }
    while exp < 0 {
        let s = exp.max(-1000);
        v *= 2f64.powi(s as i32);
        exp -= s;
    }
    v
}

/// Circumcentre in exact arithmetic, rounded once at the end. `None` for a
/// flat tet.
pub fn tet_circumcentre_exact(a: Point3, b: Point3, c: Point3, d: Point3) -> Option<Point3> {
    let ([pa, pb, pc, pd], e) = to_fixed_scaled([a, b, c, d]);
    let rel = |p: &[BigInt; 3]| -> [BigInt; 3] { std::array::from_fn(|k| &p[k] - &pa[k]) };
    let (u, v, w) = (rel(&pb), rel(&pc), rel(&pd));
    let cross = |x: &[BigInt; 3], y: &[BigInt; 3]| -> [BigInt; 3] {
        [&x[1] * &y[2] - &x[2] * &y[1], &x[2] * &y[0] - &x[0] * &y[2], &x[0] * &y[1] - &x[1] * &y[0]]
    };
    let sq = |x: &[BigInt; 3]| -> BigInt { &x[0] * &x[0] + &x[1] * &x[1] + &x[2] * &x[2] };
    let det = det3(&[u.clone(), v.clone(), w.clone()]);
    if det.is_zero() {
        return None;
    }
    let (vw, wu, uv) = (cross(&v, &w), cross(&w, &u), cross(&u, &v));
    let (lu, lv, lw) = (sq(&u), sq(&v), sq(&w));
    let den = det * 2;
    let off: [f64; 3] = std::array::from_fn(|k| {
        let num = &vw[k] * &lu + &wu[k] * &lv + &uv[k] * &lw;
        ratio_to_f64(&num, &den, e)
    });
    let c = a + Point3::new(off[0], off[1], off[2]);
    c.is_finite().then_some(c)
}

fn sign_of(v: &BigInt) -> Sign {
    if v.is_zero() {
        Sign::Zero
    } else if v.is_positive() {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

fn det3(m: &[[BigInt; 3]; 3]) -> BigInt {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

pub(crate) fn orient3d_exact(a: Point3, b: Point3, c: Point3, d: Point3) -> Sign {
    let [pa, pb, pc, pd] = to_fixed([a, b, c, d]);
    let row = |p: &[BigInt; 3]| -> [BigInt; 3] { std::array::from_fn(|k| &p[k] - &pa[k]) };
    let m = [row(&pb), row(&pc), row(&pd)];
    sign_of(&det3(&m))
}

pub(crate) fn insphere_exact(a: Point3, b: Point3, c: Point3, d: Point3, e: Point3) -> Sign {
    let [pa, pb, pc, pd, pe] = to_fixed([a, b, c, d, e]);
    // Rows are (p - e, |p - e|^2); the 4x4 determinant is expanded along the
    // lift column.
    let rel = |p: &[BigInt; 3]| -> [BigInt; 3] { std::array::from_fn(|k| &p[k] - &pe[k]) };
    let rows = [rel(&pa), rel(&pb), rel(&pc), rel(&pd)];
    let lifts: Vec<BigInt> = rows
        .iter()
        .map(|r| &r[0] * &r[0] + &r[1] * &r[1] + &r[2] * &r[2])
        .collect();
    let minor = |skip: usize| -> BigInt {
        let mut sel = rows.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, r)| r.clone());
        let m = [sel.next().unwrap(), sel.next().unwrap(), sel.next().unwrap()];
        det3(&m)
    };
    // det [r_i | l_i] along column 3: sum_i (-1)^(i+3) l_i M_i
    let mut det = BigInt::zero();
    for (i, l) in lifts.iter().enumerate() {
        let term = l * minor(i);
        if (i + 3) % 2 == 0 {
            det += term;
        } else {
            det -= term;
        }
    }
    // det [a-e, b-e, c-e, d-e | lift] is negative inside for right-handed abcd.
    sign_of(&det).flip()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, z: f64) -> Point3 {
        Point3::new(x, y, z)
    }

    #[test]
    fn right_handed_basis_is_positive() {
        let s = orient3d(p(0., 0., 0.), p(1., 0., 0.), p(0., 1., 0.), p(0., 0., 1.));
        assert_eq!(s, Sign::Positive);
        let s = orient3d(p(0., 0., 0.), p(0., 1., 0.), p(1., 0., 0.), p(0., 0., 1.));
        assert_eq!(s, Sign::Negative);
    }

    #[test]
    fn coplanar_is_zero() {
        let s = orient3d(p(0., 0., 0.), p(1., 0., 0.), p(0., 1., 0.), p(0.3, 0.7, 0.));
        assert_eq!(s, Sign::Zero);
        let s = orient3d(p(0.1, 0.2, 0.3), p(1.1, 0.2, 0.3), p(0.1, 1.2, 0.3), p(5.0, -3.0, 0.3));
        assert_eq!(s, Sign::Zero);
    }

    #[test]
    fn insphere_unit_right_tet() {
        let (a, b, c, d) = (p(0., 0., 0.), p(1., 0., 0.), p(0., 1., 0.), p(0., 0., 1.));
        assert_eq!(insphere(a, b, c, d, p(0.25, 0.25, 0.25)), Sign::Positive);
        assert_eq!(insphere(a, b, c, d, p(2., 2., 2.)), Sign::Negative);
        assert_eq!(insphere(a, b, c, d, p(1., 1., 0.)), Sign::Zero);
        // swapping two vertices flips the sign
        assert_eq!(insphere(b, a, c, d, p(0.25, 0.25, 0.25)), Sign::Negative);
    }

    #[test]
    fn tiny_scale_matches_unit_scale() {
        let s = 1e-300;
        let (a, b, c, d) = (p(0., 0., 0.), p(s, 0., 0.), p(0., s, 0.), p(0., 0., s));
        assert_eq!(orient3d(a, b, c, d), Sign::Positive);
        assert_eq!(insphere(a, b, c, d, p(0.25 * s, 0.25 * s, 0.25 * s)), Sign::Positive);
        assert_eq!(insphere(a, b, c, d, p(2. * s, 2. * s, 2. * s)), Sign::Negative);
    }

    #[test]
    fn exact_path_agrees_with_filter() {
        let pts = [p(0.3, 0.1, 0.9), p(1.7, -0.2, 0.4), p(0.2, 1.1, -0.5), p(-0.4, 0.3, 0.8), p(0.5, 0.5, 0.5)];
        assert_eq!(orient3d(pts[0], pts[1], pts[2], pts[3]), orient3d_exact(pts[0], pts[1], pts[2], pts[3]));
        assert_eq!(
            insphere(pts[0], pts[1], pts[2], pts[3], pts[4]),
            insphere_exact(pts[0], pts[1], pts[2], pts[3], pts[4])
        );
    }

    #[test]
    fn exact_circumcentre_matches_float_on_regular_tet() {
        let pts = [p(1., 1., 1.), p(1., -1., -1.), p(-1., 1., -1.), p(-1., -1., 1.)];
        let c = tet_circumcentre_exact(pts[0], pts[1], pts[2], pts[3]).unwrap();
        assert!(c.norm() < 1e-15);
        let shifted = pts.map(|q| q * 0.1 + p(0.25, 0.5, 0.75));
        let c = tet_circumcentre_exact(shifted[0], shifted[1], shifted[2], shifted[3]).unwrap();
        assert!(c.dist(p(0.25, 0.5, 0.75)) < 1e-15);
    }

    #[test]
    fn exact_circumcentre_of_near_flat_tet_is_equidistant() {
        // apex lifted 1e-13 off the plane of the other three
        let pts = [p(0., 0., 0.), p(1., 0., 0.), p(0., 1., 0.), p(0.6, 0.7, 1e-13)];
        let c = tet_circumcentre_exact(pts[0], pts[1], pts[2], pts[3]).unwrap();
        let r = c.dist(pts[0]);
        for q in &pts[1..] {
            assert!((c.dist(*q) - r).abs() <= 1e-12 * r, "{} {}", c.dist(*q), r);
        }
        assert!(tet_circumcentre_exact(pts[0], pts[1], pts[2], p(0.3, 0.3, 0.)).is_none());
    }
}
