//! Exact evaluation of predicate polynomials on `f64` inputs.
//!
//! Every finite `f64` is `m * 2^e` for integers `m`, `e`. Scaling all inputs of
//! one predicate by a common power of two turns them into integers without
//! changing the sign of a homogeneous polynomial.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

fn decompose(v: f64) -> (i64, i32) {
    if v == 0.0 {
        return (0, 0);
    }
    let bits = v.to_bits();
    let negative = bits >> 63 == 1;
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    let (m, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1i64 << 52), exp - 1075)
    };
    (if negative { -m } else { m }, e)
}

/// Integers `k_i` and an exponent `e` with `vals[i] == k_i * 2^e` exactly.
pub fn scaled<const N: usize>(vals: [f64; N]) -> ([BigInt; N], i32) {
    let parts = vals.map(decompose);
    let emin = parts
        .iter()
        .filter(|(m, _)| *m != 0)
        .map(|&(_, e)| e)
        .min()
        .unwrap_or(0);
    (
        parts.map(|(m, e)| {
            if m == 0 {
                BigInt::zero()
            } else {
                BigInt::from(m) << ((e - emin) as usize)
            }
        }),
        emin,
    )
}

pub fn sign(v: &BigInt) -> Ordering {
    if v.is_positive() {
        Ordering::Greater
    } else if v.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

pub fn orient(ax: f64, ay: f64, bx: f64, by: f64, cx: f64, cy: f64) -> Ordering {
    let ([ax, ay, bx, by, cx, cy], _) = scaled([ax, ay, bx, by, cx, cy]);
    let det = (&ax - &cx) * (&by - &cy) - (&ay - &cy) * (&bx - &cx);
    sign(&det)
}

#[allow(clippy::too_many_arguments)]
pub fn incircle(
    ax: f64,
    ay: f64,
    bx: f64,
    by: f64,
    cx: f64,
    cy: f64,
    dx: f64,
    dy: f64,
) -> Ordering {
    let ([ax, ay, bx, by, cx, cy, dx, dy], _) = scaled([ax, ay, bx, by, cx, cy, dx, dy]);
    let (adx, ady) = (&ax - &dx, &ay - &dy);
    let (bdx, bdy) = (&bx - &dx, &by - &dy);
    let (cdx, cdy) = (&cx - &dx, &cy - &dy);
    let alift = &adx * &adx + &ady * &ady;
    let blift = &bdx * &bdx + &bdy * &bdy;
    let clift = &cdx * &cdx + &cdy * &cdy;
    let det = alift * (&bdx * &cdy - &cdx * &bdy)
        + blift * (&cdx * &ady - &adx * &cdy)
        + clift * (&adx * &bdy - &bdx * &ady);
    sign(&det)
}

/// Sign of `(a - c) . (b - c)`.
pub fn dot(ax: f64, ay: f64, bx: f64, by: f64, cx: f64, cy: f64) -> Ordering {
    let ([ax, ay, bx, by, cx, cy], _) = scaled([ax, ay, bx, by, cx, cy]);
    let det = (&ax - &cx) * (&bx - &cx) + (&ay - &cy) * (&by - &cy);
    sign(&det)
}

/// Sign of `|p - a|^2 - |p - b|^2`.
pub fn dist_cmp(px: f64, py: f64, ax: f64, ay: f64, bx: f64, by: f64) -> Ordering {
    let ([px, py, ax, ay, bx, by], _) = scaled([px, py, ax, ay, bx, by]);
    let (dax, day) = (&px - &ax, &py - &ay);
    let (dbx, dby) = (&px - &bx, &py - &by);
    let det = &dax * &dax + &day * &day - &dbx * &dbx - &dby * &dby;
    sign(&det)
}
