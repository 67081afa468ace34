//! Reference geometry for tests, written independently of the library:
//! rational arithmetic with a coarse floating-point shortcut.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Signed;
use sia_core::geom::Point2;

pub fn q(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap()
}

pub fn sgn(v: &BigRational) -> Ordering {
    if v.is_positive() {
        Ordering::Greater
    } else if v.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

pub fn q_orient(a: Point2, b: Point2, c: Point2) -> Ordering {
    let (ax, ay, bx, by, cx, cy) = (q(a.x), q(a.y), q(b.x), q(b.y), q(c.x), q(c.y));
    sgn(&((&bx - &ax) * (&cy - &ay) - (&by - &ay) * (&cx - &ax)))
}

pub fn q_incircle(a: Point2, b: Point2, c: Point2, d: Point2) -> Ordering {
    let rows: Vec<[BigRational; 3]> = [a, b, c]
        .iter()
        .map(|p| {
            let x = q(p.x) - q(d.x);
            let y = q(p.y) - q(d.y);
            let l = &x * &x + &y * &y;
            [x, y, l]
        })
        .collect();
    let m = |r: usize, s: usize| &rows[r][0] * &rows[s][1] - &rows[s][0] * &rows[r][1];
    let det = &rows[0][2] * m(1, 2) - &rows[1][2] * m(0, 2) + &rows[2][2] * m(0, 1);
    sgn(&det)
}

/// In-circle sign; trusts floating point only when the determinant clears a
/// deliberately loose relative margin.
pub fn ref_incircle(a: Point2, b: Point2, c: Point2, d: Point2) -> Ordering {
    let r = |p: Point2| {
        let x = p.x - d.x;
        let y = p.y - d.y;
        (x, y, x * x + y * y)
    };
    let (ax, ay, al) = r(a);
    let (bx, by, bl) = r(b);
    let (cx, cy, cl) = r(c);
    let det = al * (bx * cy - cx * by) - bl * (ax * cy - cx * ay) + cl * (ax * by - bx * ay);
    let mag = al * (bx * cy).abs().max((cx * by).abs())
        + bl * (ax * cy).abs().max((cx * ay).abs())
        + cl * (ax * by).abs().max((bx * ay).abs());
    if det.abs() > 1e-9 * mag {
        det.partial_cmp(&0.0).unwrap()
    } else {
        q_incircle(a, b, c, d)
    }
}

pub fn ref_orient(a: Point2, b: Point2, c: Point2) -> Ordering {
    let l = (b.x - a.x) * (c.y - a.y);
    let r = (b.y - a.y) * (c.x - a.x);
    if (l - r).abs() > 1e-9 * (l.abs() + r.abs()) {
        (l - r).partial_cmp(&0.0).unwrap()
    } else {
        q_orient(a, b, c)
    }
}

/// Delaunay triangles by exhaustive search over all triples: a triple is
/// kept when no other point lies strictly inside its circumcircle.
pub fn brute_force_delaunay(pts: &[Point2]) -> BTreeSet<[u32; 3]> {
    let n = pts.len();
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = match ref_orient(pts[i], pts[j], pts[k]) {
                    Ordering::Greater => (i, j, k),
                    Ordering::Less => (i, k, j),
                    Ordering::Equal => continue,
                };
                let empty = (0..n).all(|l| {
                    l == i
                        || l == j
                        || l == k
                        || ref_incircle(pts[a], pts[b], pts[c], pts[l]) != Ordering::Greater
                });
                if empty {
                    out.insert([i as u32, j as u32, k as u32]);
                }
            }
        }
    }
    out
}

/// Squared distance compared exactly.
pub fn q_dist_cmp(p: Point2, a: Point2, b: Point2) -> Ordering {
    let da = (q(p.x) - q(a.x)).pow(2) + (q(p.y) - q(a.y)).pow(2);
    let db = (q(p.x) - q(b.x)).pow(2) + (q(p.y) - q(b.y)).pow(2);
    da.cmp(&db)
}

/// Index of the nearest point, smallest index among ties.
pub fn nearest(points: &[Point2], p: Point2) -> usize {
    let d: Vec<f64> = points.iter().map(|a| a.dist2(&p)).collect();
    let best = d.iter().copied().fold(f64::INFINITY, f64::min);
    let slack = best * 1e-9 + 1e-300;
    (0..points.len())
        .filter(|&i| d[i] <= best + slack)
        .min_by(|&i, &j| q_dist_cmp(p, points[i], points[j]).then(i.cmp(&j)))
        .unwrap()
}

pub fn ref_dot_inside(a: Point2, b: Point2, p: Point2) -> bool {
    let l = (a.x - p.x) * (b.x - p.x);
    let r = (a.y - p.y) * (b.y - p.y);
    if (l + r).abs() > 1e-9 * (l.abs() + r.abs()) {
        l + r < 0.0
    } else {
        let v = (q(a.x) - q(p.x)) * (q(b.x) - q(p.x)) + (q(a.y) - q(p.y)) * (q(b.y) - q(p.y));
        sgn(&v) == Ordering::Less
    }
}

/// Every non-empty subset of distinct points in general position that an
/// open disk cuts out: the interior of each circle through two (diametral)
/// or three points, joined with any subset of the points on its boundary.
pub fn disk_sets(pts: &[Point2]) -> BTreeSet<Vec<u32>> {
    let m = pts.len();
    let mut out = BTreeSet::new();
    let mut emit = |interior: Vec<u32>, boundary: &[u32]| {
        for mask in 0..(1u32 << boundary.len()) {
            let mut s = interior.clone();
            for (k, &b) in boundary.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    s.push(b);
                }
            }
            if !s.is_empty() {
                s.sort_unstable();
                out.insert(s);
            }
        }
    };
    for i in 0..m {
        emit(Vec::new(), &[i as u32]);
        for j in i + 1..m {
            let inside: Vec<u32> = (0..m)
                .filter(|&k| k != i && k != j && ref_dot_inside(pts[i], pts[j], pts[k]))
                .map(|k| k as u32)
                .collect();
            emit(inside, &[i as u32, j as u32]);
            for l in j + 1..m {
                let (a, b, c) = (pts[i], pts[j], pts[l]);
                let (mut a2, mut b2) = (a, b);
                match ref_orient(a, b, c) {
                    Ordering::Equal => continue,
                    Ordering::Less => std::mem::swap(&mut a2, &mut b2),
                    Ordering::Greater => {}
                }
                let inside: Vec<u32> = (0..m)
                    .filter(|&k| {
                        k != i && k != j && k != l && ref_incircle(a2, b2, c, pts[k]) == Ordering::Greater
                    })
                    .map(|k| k as u32)
                    .collect();
                emit(inside, &[i as u32, j as u32, l as u32]);
            }
        }
    }
    out
}
