//! Points derived from input points (circumcenters, midpoints) and exact
//! predicates on them.
//!
//! A [`DerivedPoint`] carries an interval enclosure used as a filter and a
//! lazily computed exact homogeneous representation used when the filter
//! cannot decide.

use std::cell::OnceCell;
use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::exact::{scaled, sign};
use super::interval::Interval;
use super::point::Point2;

/// Exact point `(x / w, y / w)` with `w != 0`.
#[derive(Clone, Debug)]
pub struct HPoint {
    pub x: BigInt,
    pub y: BigInt,
    pub w: BigInt,
}

impl HPoint {
    pub fn from_point(p: Point2) -> Self {
        let ([x, y], e) = scaled([p.x, p.y]);
        if e >= 0 {
            Self {
                x: x << e as usize,
                y: y << e as usize,
                w: BigInt::one(),
            }
        } else {
            Self {
                x,
                y,
                w: BigInt::one() << (-e) as usize,
            }
        }
    }

    /// Circumcenter of a non-degenerate triangle.
    pub fn circumcenter(a: Point2, b: Point2, c: Point2) -> Option<Self> {
        let ([ax, ay, bx, by, cx, cy], e) = scaled([a.x, a.y, b.x, b.y, c.x, c.y]);
        let (bx, by) = (bx - &ax, by - &ay);
        let (cx, cy) = (cx - &ax, cy - &ay);
        let d: BigInt = (&bx * &cy - &by * &cx) * 2;
        if d.is_zero() {
            return None;
        }
        let bl = &bx * &bx + &by * &by;
        let cl = &cx * &cx + &cy * &cy;
        let ux = &cy * &bl - &by * &cl;
        let uy = &bx * &cl - &cx * &bl;
        let x = ax * &d + ux;
        let y = ay * &d + uy;
        Some(if e >= 0 {
            Self {
                x: x << e as usize,
                y: y << e as usize,
                w: d,
            }
        } else {
            Self {
                x,
                y,
                w: d << (-e) as usize,
            }
        })
    }

    pub fn midpoint(p: &HPoint, q: &HPoint) -> Self {
        Self {
            x: &p.x * &q.w + &q.x * &p.w,
            y: &p.y * &q.w + &q.y * &p.w,
            w: &p.w * &q.w * 2,
        }
    }

    fn wsign(&self) -> Ordering {
        sign(&self.w)
    }
}

fn mul_sign(a: Ordering, b: Ordering) -> Ordering {
    match (a, b) {
        (Ordering::Equal, _) | (_, Ordering::Equal) => Ordering::Equal,
        (x, y) if x == y => Ordering::Greater,
        _ => Ordering::Less,
    }
}

pub fn h_orient(p: &HPoint, q: &HPoint, r: &HPoint) -> Ordering {
    let det = &p.x * (&q.y * &r.w - &r.y * &q.w) - &p.y * (&q.x * &r.w - &r.x * &q.w)
        + &p.w * (&q.x * &r.y - &r.x * &q.y);
    let ws = mul_sign(mul_sign(p.wsign(), q.wsign()), r.wsign());
    mul_sign(sign(&det), ws)
}

/// Sign of `(b - a) . (d - c)`.
pub fn h_dot(a: &HPoint, b: &HPoint, c: &HPoint, d: &HPoint) -> Ordering {
    let ux = &b.x * &a.w - &a.x * &b.w;
    let uy = &b.y * &a.w - &a.y * &b.w;
    let vx = &d.x * &c.w - &c.x * &d.w;
    let vy = &d.y * &c.w - &c.y * &d.w;
    let s = sign(&(ux * vx + uy * vy));
    let ws = mul_sign(
        mul_sign(a.wsign(), b.wsign()),
        mul_sign(c.wsign(), d.wsign()),
    );
    mul_sign(s, ws)
}

/// Compares `|p - a|` with `|p - b|`.
pub fn h_dist_cmp(p: &HPoint, a: &HPoint, b: &HPoint) -> Ordering {
    let sq = |s: &HPoint| {
        let dx = &p.x * &s.w - &s.x * &p.w;
        let dy = &p.y * &s.w - &s.y * &p.w;
        dx.clone() * dx + dy.clone() * dy
    };
    let na = sq(a) * (&b.w * &b.w);
    let nb = sq(b) * (&a.w * &a.w);
    na.cmp(&nb)
}

pub fn h_lex_cmp(p: &HPoint, q: &HPoint) -> Ordering {
    let ws = mul_sign(p.wsign(), q.wsign());
    let cx = mul_sign(sign(&(&p.x * &q.w - &q.x * &p.w)), ws);
    if cx != Ordering::Equal {
        return cx;
    }
    mul_sign(sign(&(&p.y * &q.w - &q.y * &p.w)), ws)
}

#[derive(Clone, Debug)]
enum Origin {
    Input(Point2),
    Circumcenter([Point2; 3]),
    Midpoint(Box<(DerivedPoint, DerivedPoint)>),
}

/// An input point or a point constructed from input points.
#[derive(Clone, Debug)]
pub struct DerivedPoint {
    x: Interval,
    y: Interval,
    origin: Origin,
    exact: OnceCell<HPoint>,
}

impl DerivedPoint {
    pub fn input(p: Point2) -> Self {
        Self {
            x: Interval::point(p.x),
            y: Interval::point(p.y),
            origin: Origin::Input(p),
            exact: OnceCell::new(),
        }
    }

    /// Circumcenter of the non-degenerate triangle `a, b, c`.
    pub fn circumcenter(a: Point2, b: Point2, c: Point2) -> Self {
        let ax = Interval::point(a.x);
        let ay = Interval::point(a.y);
        let bx = Interval::point(b.x) - ax;
        let by = Interval::point(b.y) - ay;
        let cx = Interval::point(c.x) - ax;
        let cy = Interval::point(c.y) - ay;
        let d = (bx * cy - by * cx) * Interval::point(2.0);
        let bl = bx.square() + by.square();
        let cl = cx.square() + cy.square();
        let (x, y) = match (
            (cy * bl - by * cl).div(d),
            (bx * cl - cx * bl).div(d),
        ) {
            (Some(ux), Some(uy)) => (ax + ux, ay + uy),
            _ => (Interval::ENTIRE, Interval::ENTIRE),
        };
        Self {
            x,
            y,
            origin: Origin::Circumcenter([a, b, c]),
            exact: OnceCell::new(),
        }
    }

    pub fn midpoint(p: &DerivedPoint, q: &DerivedPoint) -> Self {
        let half = Interval::point(0.5);
        Self {
            x: (p.x + q.x) * half,
            y: (p.y + q.y) * half,
            origin: Origin::Midpoint(Box::new((p.clone(), q.clone()))),
            exact: OnceCell::new(),
        }
    }

    /// Floating-point approximation.
    pub fn approx(&self) -> Point2 {
        match &self.origin {
            Origin::Input(p) => *p,
            _ => Point2::new(self.x.mid(), self.y.mid()),
        }
    }

    pub fn exact(&self) -> &HPoint {
        self.exact.get_or_init(|| match &self.origin {
            Origin::Input(p) => HPoint::from_point(*p),
            Origin::Circumcenter([a, b, c]) => {
                HPoint::circumcenter(*a, *b, *c).expect("circumcenter of a degenerate triangle")
            }
            Origin::Midpoint(pq) => HPoint::midpoint(pq.0.exact(), pq.1.exact()),
        })
    }
}

/// Orientation of three derived points.
pub fn orient(p: &DerivedPoint, q: &DerivedPoint, r: &DerivedPoint) -> Ordering {
    let det = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    match det.sign() {
        Some(s) if s != Ordering::Equal => s,
        _ => h_orient(p.exact(), q.exact(), r.exact()),
    }
}

/// Sign of `(b - a) . (d - c)`.
pub fn dot(a: &DerivedPoint, b: &DerivedPoint, c: &DerivedPoint, d: &DerivedPoint) -> Ordering {
    let v = (b.x - a.x) * (d.x - c.x) + (b.y - a.y) * (d.y - c.y);
    match v.sign() {
        Some(s) if s != Ordering::Equal => s,
        _ => h_dot(a.exact(), b.exact(), c.exact(), d.exact()),
    }
}

/// Compares `|p - a|` with `|p - b|`.
pub fn dist_cmp(p: &DerivedPoint, a: &DerivedPoint, b: &DerivedPoint) -> Ordering {
    let da = (p.x - a.x).square() + (p.y - a.y).square();
    let db = (p.x - b.x).square() + (p.y - b.y).square();
    match (da - db).sign() {
        Some(s) if s != Ordering::Equal => s,
        _ => h_dist_cmp(p.exact(), a.exact(), b.exact()),
    }
}

/// Lexicographic comparison by `(x, y)`.
pub fn lex_cmp(p: &DerivedPoint, q: &DerivedPoint) -> Ordering {
    let cx = if p.x.hi < q.x.lo {
        Some(Ordering::Less)
    } else if p.x.lo > q.x.hi {
        Some(Ordering::Greater)
    } else {
        None
    };
    match cx {
        Some(o) => o,
        None => h_lex_cmp(p.exact(), q.exact()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circumcenter_of_right_triangle() {
        let c = HPoint::circumcenter(
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(0.0, 2.0),
        )
        .unwrap();
        let one = HPoint::from_point(Point2::new(1.0, 1.0));
        assert_eq!(h_lex_cmp(&c, &one), Ordering::Equal);
        let d = DerivedPoint::circumcenter(
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(0.0, 2.0),
        );
        assert!((d.approx().x - 1.0).abs() < 1e-12);
    }
}
