//! Nets for disks: a subset `V` of a multiset `I` such that every closed disk
//! holding more than `lambda` points of `I` (with multiplicity) contains a
//! point of `V`.
//!
//! Both verification and enumeration of point sets cut out by disks use a
//! sweep over the pencil of circles through two points `a, b`. A circle of
//! the pencil is identified by the signed position `t` of its center along
//! the bisector of `ab`, measured towards the left of `a -> b`. A point `c`
//! left of `ab` lies inside the circle exactly when `t > t_c`, where `t_c`
//! belongs to the circle through `a, b, c`; a point to the right lies inside
//! when `t < t_c`. All comparisons of these parameters reduce to exact
//! in-circle tests.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::derived::{self, DerivedPoint};
use crate::geom::predicates::{diametral, in_circle_any, orient};
use crate::geom::Point2;

/// Largest multiset accepted by the exhaustive enumeration of disk sets.
pub const ENUMERATION_LIMIT: usize = 500;

/// Distinct locations of a multiset with their multiplicities.
#[derive(Clone, Debug)]
pub struct Multiset {
    pub points: Vec<Point2>,
    pub mult: Vec<u32>,
}

impl Multiset {
    pub fn new(points: &[Point2]) -> Self {
        let mut index: HashMap<(u64, u64), usize> = HashMap::new();
        let mut out = Multiset {
            points: Vec::new(),
            mult: Vec::new(),
        };
        for p in points {
            match index.get(&p.key()) {
                Some(&i) => out.mult[i] += 1,
                None => {
                    index.insert(p.key(), out.points.len());
                    out.points.push(*p);
                    out.mult.push(1);
                }
            }
        }
        out
    }

    pub fn total(&self) -> u64 {
        self.mult.iter().map(|&m| u64::from(m)).sum()
    }
}

/// A closed disk, described by the input points on its boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DiskWitness {
    /// Radius zero at a single location.
    Point(Point2),
    /// The circumdisk of three points.
    Circumdisk(Point2, Point2, Point2),
    /// A disk with `a` and `b` on its boundary, strictly between the circles
    /// through `a`, `b` and `lower` (to the right of `a -> b`) and through
    /// `a`, `b` and `upper` (to the left). A missing bound is unconstrained.
    Pencil {
        a: Point2,
        b: Point2,
        lower: Option<Point2>,
        upper: Option<Point2>,
    },
}

/// A closed disk with too many points and no net point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub disk: DiskWitness,
    pub count: u64,
}

/// Position of a point relative to the pencil through `a, b`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    Left,
    Right,
    /// Strictly between `a` and `b` on their line: inside every circle.
    Between,
    /// On the line outside the segment: inside none.
    Beyond,
}

struct Pencil {
    a: Point2,
    b: Point2,
}

impl Pencil {
    fn side(&self, c: Point2) -> Side {
        match orient(self.a, self.b, c) {
            Ordering::Greater => Side::Left,
            Ordering::Less => Side::Right,
            Ordering::Equal => {
                if diametral(self.a, self.b, c) == Ordering::Less {
                    Side::Between
                } else {
                    Side::Beyond
                }
            }
        }
    }

    /// Compares `t_u` with `t_w` for points off the line.
    fn cmp_t(&self, u: Point2, su: Side, w: Point2) -> Ordering {
        match in_circle_any(self.a, self.b, w, u) {
            Ordering::Equal => Ordering::Equal,
            inside => {
                let u_below = inside == Ordering::Greater;
                match (su, u_below) {
                    (Side::Left, true) | (Side::Right, false) => Ordering::Less,
                    _ => Ordering::Greater,
                }
            }
        }
    }

    /// Whether the closed circle at parameter `t_e` holds a point with
    /// parameter `t_f` on side `sf`, given `ord = cmp(t_f, t_e)`.
    fn holds(sf: Side, ord: Ordering) -> bool {
        match sf {
            Side::Left => ord != Ordering::Greater,
            Side::Right => ord != Ordering::Less,
            Side::Between => true,
            Side::Beyond => false,
        }
    }
}

/// Uniform grid over the net for proximity-ordered scans.
struct Grid {
    x0: f64,
    y0: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
}

impl Grid {
    fn new(points: &[Point2]) -> Self {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for p in points {
            x0 = x0.min(p.x);
            y0 = y0.min(p.y);
            x1 = x1.max(p.x);
            y1 = y1.max(p.y);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-300);
        let side = ((points.len() as f64).sqrt().ceil() as usize).clamp(1, 1024);
        let cell = span / side as f64 * (1.0 + 1e-9);
        let nx = ((x1 - x0) / cell) as usize + 1;
        let ny = ((y1 - y0) / cell) as usize + 1;
        let mut cells = vec![Vec::new(); nx * ny];
        for (i, p) in points.iter().enumerate() {
            let (cx, cy) = Self::coord(x0, y0, cell, nx, ny, *p);
            cells[cy * nx + cx].push(i as u32);
        }
        Self {
            x0,
            y0,
            cell,
            nx,
            ny,
            cells,
        }
    }

    fn coord(x0: f64, y0: f64, cell: f64, nx: usize, ny: usize, p: Point2) -> (usize, usize) {
        let cx = (((p.x - x0) / cell).max(0.0) as usize).min(nx - 1);
        let cy = (((p.y - y0) / cell).max(0.0) as usize).min(ny - 1);
        (cx, cy)
    }

    /// Calls `f` on every point in rings of cells around `p`, nearest rings
    /// first; stops early when `f` returns false.
    fn scan<F: FnMut(u32) -> bool>(&self, p: Point2, mut f: F) {
        let (cx, cy) = Self::coord(self.x0, self.y0, self.cell, self.nx, self.ny, p);
        let maxr = self.nx.max(self.ny);
        for r in 0..=maxr {
            let (lx, hx) = (cx as isize - r as isize, cx as isize + r as isize);
            let (ly, hy) = (cy as isize - r as isize, cy as isize + r as isize);
            for gy in ly..=hy {
                if gy < 0 || gy >= self.ny as isize {
                    continue;
                }
                let on_edge_row = gy == ly || gy == hy;
                let mut gx = lx;
                while gx <= hx {
                    if gx >= 0 && gx < self.nx as isize {
                        for &i in &self.cells[gy as usize * self.nx + gx as usize] {
                            if !f(i) {
                                return;
                            }
                        }
                    }
                    gx += if on_edge_row || r == 0 { 1 } else { (hx - lx).max(1) };
                }
            }
        }
    }
}

/// Checks that `net` is a `lambda`-net for `points` (a multiset). Returns
/// `Ok(None)` when it is, or a disk that witnesses the failure.
pub fn verify_net(points: &[Point2], net: &[Point2], lambda: u64) -> Result<Option<Counterexample>> {
    let ms = Multiset::new(points);
    let net_keys: HashSet<(u64, u64)> = net.iter().map(|p| p.key()).collect();
    let in_net: Vec<bool> = ms.points.iter().map(|p| net_keys.contains(&p.key())).collect();
    let m = ms.points.len();
    for i in 0..m {
        if !in_net[i] && u64::from(ms.mult[i]) > lambda {
            return Ok(Some(Counterexample {
                disk: DiskWitness::Point(ms.points[i]),
                count: u64::from(ms.mult[i]),
            }));
        }
    }
    if ms.total() <= lambda {
        return Ok(None);
    }
    let grid = if net.is_empty() { None } else { Some(Grid::new(net)) };
    for i in 0..m {
        if in_net[i] {
            continue;
        }
        for j in i + 1..m {
            if in_net[j] {
                continue;
            }
            if let Some(c) = check_pair(&ms, i, j, net, grid.as_ref(), lambda) {
                return Ok(Some(c));
            }
        }
    }
    Ok(None)
}

/// Extends `net` until it is a `lambda`-net for `points`. Pairs are swept
/// once: a repaired pair is rechecked until it passes, and earlier pairs stay
/// valid because the net only grows. Each repair adds the point of the
/// offending disk nearest to its center. Returns the net and the number of
/// points added.
pub fn repair_net(points: &[Point2], net: &[Point2], lambda: u64) -> Result<(Vec<Point2>, u32)> {
    let ms = Multiset::new(points);
    let mut net = Multiset::new(net).points;
    let mut net_keys: HashSet<(u64, u64)> = net.iter().map(|p| p.key()).collect();
    let mut in_net: Vec<bool> = ms.points.iter().map(|p| net_keys.contains(&p.key())).collect();
    let m = ms.points.len();
    let mut added = 0;
    let mut add = |k: usize, net: &mut Vec<Point2>, in_net: &mut Vec<bool>| {
        in_net[k] = true;
        if net_keys.insert(ms.points[k].key()) {
            net.push(ms.points[k]);
            added += 1;
        }
    };
    for i in 0..m {
        if !in_net[i] && u64::from(ms.mult[i]) > lambda {
            add(i, &mut net, &mut in_net);
        }
    }
    if ms.total() <= lambda {
        return Ok((net, added));
    }
    let mut grid = (!net.is_empty()).then(|| Grid::new(&net));
    for i in 0..m {
        for j in i + 1..m {
            while !in_net[i] && !in_net[j] {
                let Some(c) = check_pair(&ms, i, j, &net, grid.as_ref(), lambda) else {
                    break;
                };
                let k = match c.disk {
                    DiskWitness::Circumdisk(a, b, d) => {
                        let center = DerivedPoint::circumcenter(a, b, d);
                        (0..m)
                            .filter(|&k| in_circle_any(a, b, d, ms.points[k]) != Ordering::Less)
                            .min_by(|&x, &y| {
                                derived::dist_cmp(
                                    &center,
                                    &DerivedPoint::input(ms.points[x]),
                                    &DerivedPoint::input(ms.points[y]),
                                )
                            })
                            .unwrap_or(i)
                    }
                    _ => i,
                };
                add(k, &mut net, &mut in_net);
                grid = Some(Grid::new(&net));
            }
        }
    }
    Ok((net, added))
}

fn check_pair(
    ms: &Multiset,
    i: usize,
    j: usize,
    net: &[Point2],
    grid: Option<&Grid>,
    lambda: u64,
) -> Option<Counterexample> {
    let (a, b) = (ms.points[i], ms.points[j]);
    let pencil = Pencil { a, b };
    // Net-free parameter interval (lo, hi): lo from net points to the right,
    // hi from net points to the left. `None` means unbounded.
    let mut lo: Option<Point2> = None;
    let mut hi: Option<Point2> = None;
    let mut blocked = false;
    let mid = Point2::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
    if let Some(g) = grid {
        g.scan(mid, |k| {
            let w = net[k as usize];
            match pencil.side(w) {
                Side::Between => {
                    blocked = true;
                    return false;
                }
                Side::Beyond => {}
                Side::Left => {
                    if hi.is_none_or(|h| pencil.cmp_t(w, Side::Left, h) == Ordering::Less) {
                        hi = Some(w);
                    }
                }
                Side::Right => {
                    if lo.is_none_or(|l| pencil.cmp_t(w, Side::Right, l) == Ordering::Greater) {
                        lo = Some(w);
                    }
                }
            }
            if let (Some(l), Some(h)) = (lo, hi) {
                if pencil.cmp_t(l, Side::Right, h) != Ordering::Less {
                    blocked = true;
                    return false;
                }
            }
            true
        });
    }
    if blocked {
        return None;
    }
    let base = u64::from(ms.mult[i]) + u64::from(ms.mult[j]);
    let mut always = 0u64;
    let mut events: Vec<(Point2, Side, u64)> = Vec::new();
    for k in 0..ms.points.len() {
        if k == i || k == j {
            continue;
        }
        let c = ms.points[k];
        let mk = u64::from(ms.mult[k]);
        let s = pencil.side(c);
        match s {
            Side::Between => always += mk,
            Side::Beyond => {}
            Side::Left | Side::Right => {
                // Left points are inside for t > t_c, right points for t < t_c.
                let above_lo = lo.is_none_or(|l| pencil.cmp_t(c, s, l) == Ordering::Greater);
                let below_hi = hi.is_none_or(|h| pencil.cmp_t(c, s, h) == Ordering::Less);
                match (s, above_lo, below_hi) {
                    (_, true, true) => events.push((c, s, mk)),
                    (Side::Left, false, _) | (Side::Right, _, false) => always += mk,
                    _ => {}
                }
            }
        }
    }
    if base + always + events.iter().map(|e| e.2).sum::<u64>() <= lambda {
        return None;
    }
    // The count is piecewise constant in the parameter; when there are
    // events, its maximum over the net-free interval is attained on a circle
    // through one of them.
    if events.is_empty() {
        return Some(Counterexample {
            disk: DiskWitness::Pencil {
                a,
                b,
                lower: lo,
                upper: hi,
            },
            count: base + always,
        });
    }
    for e in &events {
        let cnt = base
            + always
            + events
                .iter()
                .filter(|f| Pencil::holds(f.1, pencil.cmp_t(f.0, f.1, e.0)))
                .map(|f| f.2)
                .sum::<u64>();
        if cnt > lambda {
            return Some(Counterexample {
                disk: DiskWitness::Circumdisk(a, b, e.0),
                count: cnt,
            });
        }
    }
    None
}

/// All distinct location sets of total multiplicity exactly `lambda` that
/// some open disk cuts out of the multiset, in order of discovery. Sets are
/// given as sorted indices into `Multiset::new(points).points`.
pub fn enumerate_lambda_sets(points: &[Point2], lambda: u64) -> Result<Vec<Vec<u32>>> {
    if points.len() > ENUMERATION_LIMIT {
        return Err(Error::ScaleGuard(format!(
            "{} points exceed the enumeration limit of {ENUMERATION_LIMIT}; use the sampling method",
            points.len()
        )));
    }
    let ms = Multiset::new(points);
    let m = ms.points.len();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut out = Vec::new();
    for i in 0..m {
        if u64::from(ms.mult[i]) == lambda && seen.insert(vec![i as u32]) {
            out.push(vec![i as u32]);
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            let base = u64::from(ms.mult[i]) + u64::from(ms.mult[j]);
            if base > lambda {
                continue;
            }
            for (mass, set) in pencil_sets(&ms, i, j, Some(lambda - base)) {
                if mass == lambda && seen.insert(set.clone()) {
                    out.push(set);
                }
            }
        }
    }
    Ok(out)
}

/// A circle of the pencil: exactly through an event point, or strictly
/// between two consecutive event parameters.
#[derive(Clone, Copy)]
enum Probe {
    At(Point2),
    Between(Option<Point2>),
}

impl Probe {
    fn cmp(&self, pencil: &Pencil, f: Point2, sf: Side) -> Ordering {
        match *self {
            Probe::At(e) => pencil.cmp_t(f, sf, e),
            Probe::Between(lo) => match lo {
                Some(l) if pencil.cmp_t(f, sf, l) != Ordering::Greater => Ordering::Less,
                _ => Ordering::Greater,
            },
        }
    }
}

/// Every location set cut out by a circle through `points[i]` and
/// `points[j]`, with its total multiplicity. With `Some(extra)` only sets
/// whose multiplicity beyond `i, j` is at most `extra` are guaranteed to be
/// reported.
fn pencil_sets(ms: &Multiset, i: usize, j: usize, extra: Option<u64>) -> Vec<(u64, Vec<u32>)> {
    let pencil = Pencil {
        a: ms.points[i],
        b: ms.points[j],
    };
    let mut always: Vec<u32> = vec![i as u32, j as u32];
    let mut always_mass = u64::from(ms.mult[i]) + u64::from(ms.mult[j]);
    let mut left: Vec<(Point2, u32)> = Vec::new();
    let mut right: Vec<(Point2, u32)> = Vec::new();
    for k in 0..ms.points.len() {
        if k == i || k == j {
            continue;
        }
        match pencil.side(ms.points[k]) {
            Side::Between => {
                always.push(k as u32);
                always_mass += u64::from(ms.mult[k]);
            }
            Side::Beyond => {}
            Side::Left => left.push((ms.points[k], k as u32)),
            Side::Right => right.push((ms.points[k], k as u32)),
        }
    }
    let budget = match extra {
        Some(e) => {
            let inside = always_mass - u64::from(ms.mult[i]) - u64::from(ms.mult[j]);
            if inside > e {
                return Vec::new();
            }
            Some((e - inside) as usize)
        }
        None => None,
    };
    // Left points are inside for t >= t_c and right points for t <= t_c, so
    // only the `budget + 1` smallest left and largest right parameters can
    // matter; circles holding the last of those are already too heavy.
    let cmp_left = |x: &(Point2, u32), y: &(Point2, u32)| pencil.cmp_t(x.0, Side::Left, y.0);
    let cmp_right = |x: &(Point2, u32), y: &(Point2, u32)| pencil.cmp_t(y.0, Side::Right, x.0);
    let mut cut_left = None;
    let mut cut_right = None;
    if let Some(b) = budget {
        if left.len() > b {
            left.select_nth_unstable_by(b, cmp_left);
            left.truncate(b + 1);
            cut_left = Some(b);
        }
        if right.len() > b {
            right.select_nth_unstable_by(b, cmp_right);
            right.truncate(b + 1);
            cut_right = Some(b);
        }
    }
    left.sort_by(cmp_left);
    right.sort_by(cmp_right);
    let cut_left = cut_left.map(|b| left[b].0);
    let cut_right = cut_right.map(|b| right[b].0);

    let mut events: Vec<(Point2, Side)> = left.iter().map(|x| (x.0, Side::Left)).collect();
    events.extend(right.iter().map(|x| (x.0, Side::Right)));
    events.sort_by(|x, y| pencil.cmp_t(x.0, x.1, y.0));
    events.dedup_by(|x, y| pencil.cmp_t(x.0, x.1, y.0) == Ordering::Equal);

    let mut probes: Vec<Probe> = events.iter().map(|e| Probe::At(e.0)).collect();
    for k in 0..=events.len() {
        probes.push(Probe::Between(k.checked_sub(1).map(|x| events[x].0)));
    }
    let mut out = Vec::new();
    for probe in probes {
        if cut_left.is_some_and(|c| Pencil::holds(Side::Left, probe.cmp(&pencil, c, Side::Left))) {
            continue;
        }
        if cut_right.is_some_and(|c| Pencil::holds(Side::Right, probe.cmp(&pencil, c, Side::Right)))
        {
            continue;
        }
        let mut mass = always_mass;
        let mut set = always.clone();
        for (pts, side) in [(&left, Side::Left), (&right, Side::Right)] {
            for &(p, k) in pts {
                if Pencil::holds(side, probe.cmp(&pencil, p, side)) {
                    mass += u64::from(ms.mult[k as usize]);
                    set.push(k);
                }
            }
        }
        set.sort_unstable();
        out.push((mass, set));
    }
    out
}

/// Tunables for net construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetConfig {
    /// Two chosen sets may share at most `floor(lambda * overlap)` points.
    pub overlap: f64,
    /// Per-set nets must hit disks holding more than this fraction of the set.
    pub local_fraction: f64,
    /// Hard cap on the size of a per-set net.
    pub local_cap: usize,
    /// Initial sample size as a multiple of `n`.
    pub sample_factor: f64,
    /// Largest sample size as a multiple of `n`.
    pub size_factor: f64,
    /// Sample doublings before giving up.
    pub max_doublings: u32,
    /// Initial sample size of the repaired method as a multiple of `n`.
    #[serde(default = "default_repair_factor")]
    pub repair_factor: f64,
}

fn default_repair_factor() -> f64 {
    1.0
}

impl Default for NetConfig {
    fn default() -> Self {
        Self {
            overlap: 0.01,
            local_fraction: 1.0 / 200.0,
            local_cap: 400,
            sample_factor: 2.0,
            size_factor: 50.0,
            max_doublings: 5,
            repair_factor: default_repair_factor(),
        }
    }
}

impl NetConfig {
    /// Reduced constants for small desk-scale experiments.
    pub fn scaled() -> Self {
        Self {
            overlap: 0.25,
            local_fraction: 1.0 / 8.0,
            ..Self::default()
        }
    }
}

/// How a net was built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetMethod {
    Greedy,
    UniformSample,
    /// Uniform sample extended by [`repair_net`] until it verifies.
    RepairedSample,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetStats {
    /// Points in the training multiset.
    pub m: usize,
    pub net_size: usize,
    /// Disk sets enumerated (greedy only).
    pub enumerated: usize,
    /// Disk sets chosen (greedy only).
    pub chosen: usize,
    /// Samples drawn (sampling only).
    pub attempts: u32,
    /// Points added by repair.
    #[serde(default)]
    pub repaired: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsNetResult {
    pub net: Vec<Point2>,
    pub method: NetMethod,
    pub lambda: u64,
    pub stats: NetStats,
}

/// Greedy construction together with its intermediate families.
#[derive(Clone, Debug)]
pub struct GreedyNet {
    pub result: EpsNetResult,
    /// Distinct locations; sets below index into this list.
    pub locations: Vec<Point2>,
    /// All enumerated sets, in order.
    pub candidates: Vec<Vec<u32>>,
    /// The greedily chosen family.
    pub chosen: Vec<Vec<u32>>,
}

/// Greedy construction: scan the disk sets of size `lambda` in enumeration
/// order, keep each one that shares at most `floor(lambda * overlap)` points
/// with every set kept so far, build a small net inside each kept set and
/// take the union.
pub fn build_net_greedy(points: &[Point2], lambda: u64, cfg: &NetConfig) -> Result<GreedyNet> {
    let candidates = enumerate_lambda_sets(points, lambda)?;
    let ms = Multiset::new(points);
    let threshold = (lambda as f64 * cfg.overlap).floor() as usize;
    let mut chosen: Vec<Vec<u32>> = Vec::new();
    let mut member_of: Vec<Vec<u32>> = vec![Vec::new(); ms.points.len()];
    let mut shared: Vec<usize> = Vec::new();
    for set in &candidates {
        shared.clear();
        shared.resize(chosen.len(), 0);
        let mut ok = true;
        'scan: for &p in set {
            for &c in &member_of[p as usize] {
                shared[c as usize] += ms.mult[p as usize] as usize;
                if shared[c as usize] > threshold {
                    ok = false;
                    break 'scan;
                }
            }
        }
        if ok {
            let id = chosen.len() as u32;
            for &p in set {
                member_of[p as usize].push(id);
            }
            chosen.push(set.clone());
        }
    }
    let mut in_net = vec![false; ms.points.len()];
    for set in &chosen {
        let local: Vec<Point2> = set.iter().map(|&k| ms.points[k as usize]).collect();
        let picks = local_net(&local, cfg.local_fraction);
        if picks.len() > cfg.local_cap {
            return Err(Error::NetVerification(format!(
                "per-set net of size {} exceeds the cap {}",
                picks.len(),
                cfg.local_cap
            )));
        }
        for k in picks {
            in_net[set[k] as usize] = true;
        }
    }
    let net: Vec<Point2> = ms
        .points
        .iter()
        .zip(&in_net)
        .filter(|(_, &b)| b)
        .map(|(p, _)| *p)
        .collect();
    Ok(GreedyNet {
        result: EpsNetResult {
            stats: NetStats {
                m: points.len(),
                net_size: net.len(),
                enumerated: candidates.len(),
                chosen: chosen.len(),
                ..NetStats::default()
            },
            net,
            method: NetMethod::Greedy,
            lambda,
        },
        locations: ms.points,
        candidates,
        chosen,
    })
}

/// Greedy hitting set for the disks that hold more than `fraction * len`
/// of the given distinct points: repeatedly take the heaviest disk not yet
/// hit and add its point lying in the most unhit disks. Returns indices.
pub fn local_net(points: &[Point2], fraction: f64) -> Vec<usize> {
    let ms = Multiset::new(points);
    let k = ms.points.len();
    let need = (fraction * k as f64).floor() as usize + 1;
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut disks: Vec<Vec<u32>> = Vec::new();
    let mut add = |set: Vec<u32>| {
        if set.len() >= need && seen.insert(set.clone()) {
            disks.push(set);
        }
    };
    for i in 0..k {
        add(vec![i as u32]);
    }
    for i in 0..k {
        for j in i + 1..k {
            for (_, set) in pencil_sets(&ms, i, j, None) {
                add(set);
            }
        }
    }
    let mut picked: Vec<u32> = Vec::new();
    let mut hit = vec![false; disks.len()];
    while let Some(d) = (0..disks.len())
        .filter(|&d| !hit[d])
        .max_by(|&x, &y| disks[x].len().cmp(&disks[y].len()).then(y.cmp(&x)))
    {
        let best = disks[d]
            .iter()
            .copied()
            .max_by_key(|&p| {
                let cover = (0..disks.len())
                    .filter(|&e| !hit[e] && disks[e].binary_search(&p).is_ok())
                    .count();
                (cover, std::cmp::Reverse(p))
            })
            .expect("disk sets are non-empty");
        picked.push(best);
        for (e, h) in hit.iter_mut().enumerate() {
            if disks[e].binary_search(&best).is_ok() {
                *h = true;
            }
        }
    }
    // Map distinct locations back to the first matching input index.
    let mut out: Vec<usize> = picked
        .into_iter()
        .map(|p| {
            let q = ms.points[p as usize].key();
            points.iter().position(|x| x.key() == q).expect("location comes from input")
        })
        .collect();
    out.sort_unstable();
    out
}

/// Random-sample construction: draw `ceil(sample_factor * n)` points, verify,
/// and double the sample on failure up to `max_doublings` times (capped at
/// `size_factor * n` points). A sample covering the whole multiset is valid
/// without verification.
pub fn build_net_sample(
    points: &[Point2],
    lambda: u64,
    n: usize,
    cfg: &NetConfig,
    seed: u64,
) -> Result<EpsNetResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.shuffle(&mut rng);
    let cap = ((cfg.size_factor * n as f64).ceil() as usize).min(points.len());
    let mut size = ((cfg.sample_factor * n as f64).ceil() as usize).min(cap);
    let mut last = None;
    for attempt in 1..=cfg.max_doublings + 1 {
        let sample: Vec<Point2> = order[..size].iter().map(|&i| points[i]).collect();
        let net = Multiset::new(&sample).points;
        let verdict = if size >= points.len() {
            None
        } else {
            verify_net(points, &net, lambda)?
        };
        if verdict.is_none() {
            return Ok(EpsNetResult {
                stats: NetStats {
                    m: points.len(),
                    net_size: net.len(),
                    attempts: attempt,
                    ..NetStats::default()
                },
                net,
                method: NetMethod::UniformSample,
                lambda,
            });
        }
        last = verdict;
        if size >= cap {
            break;
        }
        size = (size * 2).min(cap);
    }
    Err(Error::NetVerification(format!(
        "sampled net failed verification; last violation {last:?}"
    )))
}

/// Uniform sample of `ceil(repair_factor * n)` points, extended until it is
/// a net. Always succeeds; the result is certified by construction.
pub fn build_net_repaired(
    points: &[Point2],
    lambda: u64,
    n: usize,
    cfg: &NetConfig,
    seed: u64,
) -> Result<EpsNetResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.shuffle(&mut rng);
    let size = ((cfg.repair_factor * n as f64).ceil() as usize).min(points.len());
    let sample: Vec<Point2> = order[..size].iter().map(|&i| points[i]).collect();
    let (net, repaired) = repair_net(points, &sample, lambda)?;
    Ok(EpsNetResult {
        stats: NetStats {
            m: points.len(),
            net_size: net.len(),
            attempts: 1,
            repaired,
            ..NetStats::default()
        },
        net,
        method: NetMethod::RepairedSample,
        lambda,
    })
}
