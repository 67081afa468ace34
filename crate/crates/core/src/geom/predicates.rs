//! Robust geometric predicates: a floating-point filter with exact fallback.

use std::cmp::Ordering;

use super::exact;
use super::point::Point2;

const EPS: f64 = f64::EPSILON * 0.5;
const ORIENT_BOUND: f64 = (3.0 + 16.0 * EPS) * EPS;
const INCIRCLE_BOUND: f64 = (10.0 + 96.0 * EPS) * EPS;
const DIST_BOUND: f64 = 8.0 * EPS;

/// Sign of the orientation determinant: `Greater` when `a, b, c` turn
/// counter-clockwise, `Less` when clockwise, `Equal` when collinear.
pub fn orient(a: Point2, b: Point2, c: Point2) -> Ordering {
    let l = (a.x - c.x) * (b.y - c.y);
    let r = (a.y - c.y) * (b.x - c.x);
    let det = l - r;
    let bound = ORIENT_BOUND * (l.abs() + r.abs());
    if det > bound {
        Ordering::Greater
    } else if -det > bound {
        Ordering::Less
    } else {
        exact::orient(a.x, a.y, b.x, b.y, c.x, c.y)
    }
}

/// Sign of the in-circle determinant. For counter-clockwise `a, b, c` it is
/// `Greater` exactly when `d` lies strictly inside their circumcircle.
pub fn incircle(a: Point2, b: Point2, c: Point2, d: Point2) -> Ordering {
    let adx = a.x - d.x;
    let bdx = b.x - d.x;
    let cdx = c.x - d.x;
    let ady = a.y - d.y;
    let bdy = b.y - d.y;
    let cdy = c.y - d.y;

    let bdxcdy = bdx * cdy;
    let cdxbdy = cdx * bdy;
    let alift = adx * adx + ady * ady;
    let cdxady = cdx * ady;
    let adxcdy = adx * cdy;
    let blift = bdx * bdx + bdy * bdy;
    let adxbdy = adx * bdy;
    let bdxady = bdx * ady;
    let clift = cdx * cdx + cdy * cdy;

    let det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    let permanent = (bdxcdy.abs() + cdxbdy.abs()) * alift
        + (cdxady.abs() + adxcdy.abs()) * blift
        + (adxbdy.abs() + bdxady.abs()) * clift;
    let bound = INCIRCLE_BOUND * permanent;
    if det > bound {
        Ordering::Greater
    } else if -det > bound {
        Ordering::Less
    } else {
        exact::incircle(a.x, a.y, b.x, b.y, c.x, c.y, d.x, d.y)
    }
}

/// Position of `d` relative to the circle through `a, b, c` (any orientation):
/// `Greater` inside, `Less` outside, `Equal` on the circle. Collinear `a, b, c`
/// yield `Equal`.
pub fn in_circle_any(a: Point2, b: Point2, c: Point2, d: Point2) -> Ordering {
    match orient(a, b, c) {
        Ordering::Greater => incircle(a, b, c, d),
        Ordering::Less => incircle(b, a, c, d),
        Ordering::Equal => Ordering::Equal,
    }
}

/// Sign of `(a - c) . (b - c)`; `Less` means `c` is strictly inside the
/// circle with diameter `ab`.
pub fn diametral(a: Point2, b: Point2, c: Point2) -> Ordering {
    let l = (a.x - c.x) * (b.x - c.x);
    let r = (a.y - c.y) * (b.y - c.y);
    let det = l + r;
    let bound = ORIENT_BOUND * (l.abs() + r.abs());
    if det > bound {
        Ordering::Greater
    } else if -det > bound {
        Ordering::Less
    } else {
        exact::dot(a.x, a.y, b.x, b.y, c.x, c.y)
    }
}

/// Compares `|p - a|` with `|p - b|`.
pub fn dist_cmp(p: Point2, a: Point2, b: Point2) -> Ordering {
    let dax = p.x - a.x;
    let day = p.y - a.y;
    let dbx = p.x - b.x;
    let dby = p.y - b.y;
    let ta = dax * dax + day * day;
    let tb = dbx * dbx + dby * dby;
    let det = ta - tb;
    let bound = DIST_BOUND * (ta + tb);
    if det > bound {
        Ordering::Greater
    } else if -det > bound {
        Ordering::Less
    } else {
        exact::dist_cmp(p.x, p.y, a.x, a.y, b.x, b.y)
    }
}

/// Whether `p` lies in the closed triangle `a, b, c` (counter-clockwise).
pub fn in_closed_triangle(a: Point2, b: Point2, c: Point2, p: Point2) -> bool {
    orient(a, b, p) != Ordering::Less
        && orient(b, c, p) != Ordering::Less
        && orient(c, a, p) != Ordering::Less
}

/// Whether `p` lies strictly inside the triangle `a, b, c` (counter-clockwise).
pub fn in_open_triangle(a: Point2, b: Point2, c: Point2, p: Point2) -> bool {
    orient(a, b, p) == Ordering::Greater
        && orient(b, c, p) == Ordering::Greater
        && orient(c, a, p) == Ordering::Greater
}
