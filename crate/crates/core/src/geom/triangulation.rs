//! Delaunay triangulations with a single ghost vertex closing the hull.
//!
//! Finite triangles are stored counter-clockwise. Every hull edge `a -> b`
//! (interior on its left) is matched by a ghost triangle `[b, a, GHOST]`.
//! Neighbor `n[k]` lies across the edge opposite `v[k]`. Triangle ids are
//! never reused, so an id stays valid (possibly dead) for the lifetime of the
//! structure.

use std::cmp::Ordering;
use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::point::Point2;
use super::predicates::{incircle, orient};
use crate::error::{Error, Result};

pub type VertexId = u32;
pub type TriId = u32;

/// The vertex at infinity.
pub const GHOST: VertexId = u32::MAX;
/// Missing triangle.
pub const NO_TRI: TriId = u32::MAX;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Tri {
    v: [VertexId; 3],
    n: [TriId; 3],
    alive: bool,
}

/// Where a query point lies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    /// Inside or on the boundary of a finite triangle.
    Inside(TriId),
    /// Outside the hull, in the half-plane beyond the hull edge of this ghost.
    Outside(TriId),
}

#[derive(Clone, Debug)]
pub struct Triangulation {
    points: Vec<Point2>,
    present: Vec<bool>,
    vertex_tri: Vec<TriId>,
    tris: Vec<Tri>,
    stamp: Vec<u32>,
    epoch: u32,
    hint: TriId,
    tests: u64,
}

fn degenerate(msg: impl Into<String>) -> Error {
    Error::Degenerate(msg.into())
}

impl Triangulation {
    fn with_points(points: Vec<Point2>) -> Self {
        let n = points.len();
        Self {
            points,
            present: vec![false; n],
            vertex_tri: vec![NO_TRI; n],
            tris: Vec::new(),
            stamp: Vec::new(),
            epoch: 0,
            hint: NO_TRI,
            tests: 0,
        }
    }

    /// Delaunay triangulation of `points`; vertex `i` is `points[i]`.
    ///
    /// Fewer than three points, or all points collinear, give a structure
    /// without triangles only when there are at most two points; three or
    /// more collinear points are rejected as degenerate.
    pub fn delaunay(points: &[Point2]) -> Result<Self> {
        let mut t = Self::with_points(points.to_vec());
        for p in points {
            if !p.is_finite() {
                return Err(Error::Validation("non-finite coordinate".into()));
            }
        }
        if points.len() < 3 {
            check_distinct(points)?;
            for v in 0..points.len() {
                t.present[v] = true;
            }
            return Ok(t);
        }
        let (i0, i1, i2) = t.initial_triangle()?;
        t.seed_triangle(i0, i1, i2);
        let mut order: Vec<VertexId> = (0..points.len() as VertexId)
            .filter(|&v| v != i0 && v != i1 && v != i2)
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ points.len() as u64);
        order.shuffle(&mut rng);
        for v in order {
            t.insert_vertex(v, NO_TRI)?;
        }
        Ok(t)
    }

    /// Delaunay triangulation of `bounding` followed by `points`. Vertices
    /// 0, 1, 2 are the bounding triangle and vertex `3 + i` is `points[i]`.
    /// Every point must lie strictly inside the bounding triangle.
    pub fn with_bounding(bounding: [Point2; 3], points: &[Point2]) -> Result<Self> {
        let mut all = Vec::with_capacity(points.len() + 3);
        all.extend_from_slice(&bounding);
        all.extend_from_slice(points);
        let mut t = Self::with_points(all);
        let (a, b, c) = match orient(bounding[0], bounding[1], bounding[2]) {
            Ordering::Greater => (0, 1, 2),
            Ordering::Less => (0, 2, 1),
            Ordering::Equal => return Err(degenerate("bounding triangle is flat")),
        };
        t.seed_triangle(a, b, c);
        let mut order: Vec<VertexId> = (3..t.points.len() as VertexId).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0xb0b ^ points.len() as u64);
        order.shuffle(&mut rng);
        for v in order {
            let p = t.points[v as usize];
            if !p.is_finite() {
                return Err(Error::Validation("non-finite coordinate".into()));
            }
            let outer = t.points[0..3].to_vec();
            if !super::predicates::in_open_triangle(
                outer[a as usize],
                outer[b as usize],
                outer[c as usize],
                p,
            ) {
                return Err(Error::Validation(format!(
                    "point ({}, {}) is not strictly inside the bounding triangle",
                    p.x, p.y
                )));
            }
            t.insert_vertex(v, NO_TRI)?;
        }
        Ok(t)
    }

    /// Builds a triangulation from finite triangles over `points` (only the
    /// vertices used by some triangle become present). Triangles may be given
    /// in either orientation. The triangles must form a planar triangulated
    /// disk: every edge shared by at most two triangles with consistent
    /// orientation and a single boundary cycle.
    pub fn from_triangles(points: Vec<Point2>, triangles: &[[VertexId; 3]]) -> Result<Self> {
        let mut t = Self::with_points(points);
        let nv = t.points.len();
        for tri in triangles {
            for &v in tri {
                if v as usize >= nv {
                    return Err(Error::Validation(format!("vertex {v} out of range")));
                }
            }
            let [a, b, c] = *tri;
            let o = orient(t.points[a as usize], t.points[b as usize], t.points[c as usize]);
            let v = match o {
                Ordering::Greater => [a, b, c],
                Ordering::Less => [a, c, b],
                Ordering::Equal => return Err(degenerate("flat triangle")),
            };
            t.tris.push(Tri {
                v,
                n: [NO_TRI; 3],
                alive: true,
            });
        }
        // Directed edges must be unique; the reverse edge, if present, is the neighbor.
        let mut directed: HashMap<(VertexId, VertexId), (TriId, usize)> = HashMap::new();
        for (ti, tri) in t.tris.iter().enumerate() {
            for k in 0..3 {
                let e = (tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]);
                if directed.insert(e, (ti as TriId, k)).is_some() {
                    return Err(Error::Validation(format!(
                        "edge ({}, {}) used twice with the same orientation",
                        e.0, e.1
                    )));
                }
            }
        }
        let mut boundary: Vec<(VertexId, VertexId, TriId, usize)> = Vec::new();
        for (&(a, b), &(ti, k)) in &directed {
            match directed.get(&(b, a)) {
                Some(&(tj, _)) => t.tris[ti as usize].n[k] = tj,
                None => boundary.push((a, b, ti, k)),
            }
        }
        if t.tris.is_empty() {
            return Ok(t);
        }
        boundary.sort_unstable();
        // Ghosts for boundary edges; each boundary vertex must start exactly one edge.
        let mut ghost_from: HashMap<VertexId, TriId> = HashMap::new();
        let mut ghost_to: HashMap<VertexId, TriId> = HashMap::new();
        for &(a, b, ti, k) in &boundary {
            let g = t.tris.len() as TriId;
            t.tris.push(Tri {
                v: [b, a, GHOST],
                n: [NO_TRI, NO_TRI, ti],
                alive: true,
            });
            t.tris[ti as usize].n[k] = g;
            if ghost_from.insert(a, g).is_some() || ghost_to.insert(b, g).is_some() {
                return Err(Error::Validation(format!(
                    "boundary is not a simple cycle at vertex {a} or {b}"
                )));
            }
        }
        for &(a, b, _, _) in &boundary {
            let g = ghost_from[&a];
            let prev = ghost_to
                .get(&a)
                .copied()
                .ok_or_else(|| Error::Validation("open boundary".into()))?;
            let next = ghost_from
                .get(&b)
                .copied()
                .ok_or_else(|| Error::Validation("open boundary".into()))?;
            t.tris[g as usize].n[0] = prev;
            t.tris[g as usize].n[1] = next;
        }
        // A single boundary cycle.
        let start = boundary[0].0;
        let mut cur = start;
        let mut steps = 0;
        loop {
            let g = ghost_from[&cur];
            cur = t.tris[g as usize].v[0];
            steps += 1;
            if cur == start || steps > boundary.len() {
                break;
            }
        }
        if steps != boundary.len() {
            return Err(Error::Validation("boundary has several cycles".into()));
        }
        for (ti, tri) in t.tris.iter().enumerate() {
            for &v in &tri.v {
                if v != GHOST {
                    t.present[v as usize] = true;
                    t.vertex_tri[v as usize] = ti as TriId;
                }
            }
        }
        // Euler: a triangulated disk with V vertices and h boundary edges has 2V - h - 2 triangles.
        let nverts = t.present.iter().filter(|&&p| p).count();
        if triangles.len() + boundary.len() + 2 != 2 * nverts {
            return Err(Error::Validation(format!(
                "triangle count {} inconsistent with {} vertices and {} hull edges",
                triangles.len(),
                nverts,
                boundary.len()
            )));
        }
        t.hint = 0;
        Ok(t)
    }

    fn initial_triangle(&mut self) -> Result<(VertexId, VertexId, VertexId)> {
        let p = &self.points;
        let i0 = 0usize;
        let i1 = (1..p.len())
            .find(|&i| p[i] != p[i0])
            .ok_or_else(|| degenerate("all points coincide"))?;
        let i2 = (1..p.len())
            .find(|&i| orient(p[i0], p[i1], p[i]) != Ordering::Equal)
            .ok_or_else(|| degenerate("all points are collinear"))?;
        let (i0, i1, i2) = (i0 as VertexId, i1 as VertexId, i2 as VertexId);
        if orient(p[i0 as usize], p[i1 as usize], p[i2 as usize]) == Ordering::Greater {
            Ok((i0, i1, i2))
        } else {
            Ok((i0, i2, i1))
        }
    }

    fn seed_triangle(&mut self, a: VertexId, b: VertexId, c: VertexId) {
        // Finite triangle 0, ghosts 1..=3 for edges a->b, b->c, c->a.
        self.tris.push(Tri {
            v: [a, b, c],
            n: [2, 3, 1],
            alive: true,
        });
        self.tris.push(Tri {
            v: [b, a, GHOST],
            n: [3, 2, 0],
            alive: true,
        });
        self.tris.push(Tri {
            v: [c, b, GHOST],
            n: [1, 3, 0],
            alive: true,
        });
        self.tris.push(Tri {
            v: [a, c, GHOST],
            n: [2, 1, 0],
            alive: true,
        });
        for v in [a, b, c] {
            self.present[v as usize] = true;
            self.vertex_tri[v as usize] = 0;
        }
        self.hint = 0;
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn point(&self, v: VertexId) -> Point2 {
        self.points[v as usize]
    }

    /// Number of vertex slots, present or not.
    pub fn vertex_slots(&self) -> usize {
        self.points.len()
    }

    pub fn is_present(&self, v: VertexId) -> bool {
        self.present.get(v as usize).copied().unwrap_or(false)
    }

    pub fn present_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.points.len() as VertexId).filter(|&v| self.present[v as usize])
    }

    /// Number of triangle slots (including dead and ghost triangles).
    pub fn tri_slots(&self) -> usize {
        self.tris.len()
    }

    pub fn vertices(&self, t: TriId) -> [VertexId; 3] {
        self.tris[t as usize].v
    }

    pub fn neighbors(&self, t: TriId) -> [TriId; 3] {
        self.tris[t as usize].n
    }

    pub fn is_alive(&self, t: TriId) -> bool {
        self.tris.get(t as usize).is_some_and(|x| x.alive)
    }

    pub fn is_ghost(&self, t: TriId) -> bool {
        self.tris[t as usize].v[2] == GHOST
    }

    /// Alive finite triangles.
    pub fn finite_triangles(&self) -> impl Iterator<Item = TriId> + '_ {
        self.tris
            .iter()
            .enumerate()
            .filter(|(_, t)| t.alive && t.v[2] != GHOST)
            .map(|(i, _)| i as TriId)
    }

    pub fn num_finite_triangles(&self) -> usize {
        self.finite_triangles().count()
    }

    pub fn triangle_points(&self, t: TriId) -> [Point2; 3] {
        let v = self.tris[t as usize].v;
        [self.point(v[0]), self.point(v[1]), self.point(v[2])]
    }

    /// Predicate evaluations performed so far by insertion, deletion and location.
    pub fn predicate_count(&self) -> u64 {
        self.tests
    }

    /// Some alive triangle incident to `v`.
    pub fn incident_triangle(&self, v: VertexId) -> Option<TriId> {
        if !self.is_present(v) || self.vertex_tri[v as usize] == NO_TRI {
            return None;
        }
        Some(self.vertex_tri[v as usize])
    }

    /// Triangles around `v` in counter-clockwise order (ghosts included).
    pub fn star(&self, v: VertexId) -> Vec<TriId> {
        let Some(start) = self.incident_triangle(v) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut t = start;
        loop {
            out.push(t);
            let tri = &self.tris[t as usize];
            let i = tri.v.iter().position(|&x| x == v).expect("vertex not in star");
            t = tri.n[(i + 1) % 3];
            if t == start || out.len() > self.tris.len() {
                break;
            }
        }
        out
    }

    /// Sorted list of undirected edges `(u, w)` with `u < w` between present
    /// vertices; identical triangulations have identical lists.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut e = Vec::new();
        for t in self.finite_triangles() {
            let v = self.tris[t as usize].v;
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                e.push((a.min(b), a.max(b)));
            }
        }
        e.sort_unstable();
        e.dedup();
        e
    }

    /// Sorted vertex triples of the finite triangles.
    pub fn triangle_set(&self) -> Vec<[VertexId; 3]> {
        let mut out: Vec<[VertexId; 3]> = self
            .finite_triangles()
            .map(|t| {
                let mut v = self.tris[t as usize].v;
                v.sort_unstable();
                v
            })
            .collect();
        out.sort_unstable();
        out
    }

    fn any_alive_finite(&self) -> TriId {
        if self.is_alive(self.hint) && !self.is_ghost(self.hint) {
            return self.hint;
        }
        self.finite_triangles().next().unwrap_or(NO_TRI)
    }

    /// Locates `p` by a visibility walk starting at `start` (or an internal
    /// hint when `start` is `NO_TRI` or not a live finite triangle).
    pub fn locate(&mut self, p: Point2, start: TriId) -> Location {
        let mut t = if start != NO_TRI && self.is_alive(start) {
            start
        } else {
            self.any_alive_finite()
        };
        if self.is_ghost(t) {
            t = self.tris[t as usize].n[2];
        }
        let limit = 4 * self.tris.len() + 16;
        let mut turn = 0usize;
        for _ in 0..limit {
            let tri = &self.tris[t as usize];
            let mut moved = false;
            for j in 0..3 {
                let k = (j + turn) % 3;
                let a = self.points[tri.v[(k + 1) % 3] as usize];
                let b = self.points[tri.v[(k + 2) % 3] as usize];
                self.tests += 1;
                if orient(a, b, p) == Ordering::Less {
                    let next = tri.n[k];
                    if self.tris[next as usize].v[2] == GHOST {
                        return Location::Outside(next);
                    }
                    t = next;
                    moved = true;
                    break;
                }
            }
            if !moved {
                return Location::Inside(t);
            }
            turn += 1;
        }
        self.locate_by_scan(p)
    }

    fn locate_by_scan(&mut self, p: Point2) -> Location {
        let all: Vec<TriId> = self.finite_triangles().collect();
        for &t in &all {
            let [a, b, c] = self.triangle_points(t);
            self.tests += 3;
            if super::predicates::in_closed_triangle(a, b, c, p) {
                return Location::Inside(t);
            }
        }
        for t in 0..self.tris.len() as TriId {
            if self.is_alive(t) && self.is_ghost(t) {
                let v = self.tris[t as usize].v;
                self.tests += 1;
                if orient(self.point(v[0]), self.point(v[1]), p) == Ordering::Greater {
                    return Location::Outside(t);
                }
            }
        }
        Location::Inside(all[0])
    }

    fn next_epoch(&mut self) -> u32 {
        if self.stamp.len() < self.tris.len() {
            self.stamp.resize(self.tris.len(), 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.epoch
    }

    /// Whether `p` conflicts with `t`: strictly inside the circumcircle of a
    /// finite triangle, or strictly beyond the hull edge of a ghost.
    fn conflicts(&mut self, t: TriId, p: Point2) -> Result<bool> {
        let v = self.tris[t as usize].v;
        self.tests += 1;
        if v[2] == GHOST {
            match orient(self.point(v[0]), self.point(v[1]), p) {
                Ordering::Greater => Ok(true),
                Ordering::Less => Ok(false),
                Ordering::Equal => Err(degenerate(format!(
                    "point ({}, {}) is collinear with hull edge ({}, {})",
                    p.x, p.y, v[0], v[1]
                ))),
            }
        } else {
            let [a, b, c] = self.triangle_points(t);
            match incircle(a, b, c, p) {
                Ordering::Greater => Ok(true),
                Ordering::Less => Ok(false),
                Ordering::Equal => Err(degenerate(format!(
                    "point ({}, {}) is cocircular with triangle {:?}",
                    p.x, p.y, v
                ))),
            }
        }
    }

    /// Appends `p` as a new vertex and inserts it, walking from `start`.
    pub fn insert(&mut self, p: Point2, start: TriId) -> Result<VertexId> {
        if !p.is_finite() {
            return Err(Error::Validation("non-finite coordinate".into()));
        }
        let v = self.points.len() as VertexId;
        self.points.push(p);
        self.present.push(false);
        self.vertex_tri.push(NO_TRI);
        if let Err(e) = self.insert_vertex(v, start) {
            self.points.pop();
            self.present.pop();
            self.vertex_tri.pop();
            return Err(e);
        }
        Ok(v)
    }

    /// Inserts the stored point of vertex slot `v`, which must not be present.
    pub fn insert_vertex(&mut self, v: VertexId, start: TriId) -> Result<()> {
        if self.is_present(v) {
            return Err(Error::Validation(format!("vertex {v} already present")));
        }
        if self.tris.is_empty() {
            return Err(degenerate("cannot insert into a triangulation without triangles"));
        }
        let p = self.points[v as usize];
        let t0 = match self.locate(p, start) {
            Location::Inside(t) => {
                for &w in &self.tris[t as usize].v {
                    if self.points[w as usize] == p {
                        return Err(degenerate(format!(
                            "point ({}, {}) duplicates vertex {w}",
                            p.x, p.y
                        )));
                    }
                }
                t
            }
            Location::Outside(g) => g,
        };
        if !self.conflicts(t0, p)? {
            return Err(degenerate("located triangle does not conflict"));
        }
        let epoch = self.next_epoch();
        // Conflict region by search over neighbors; stamp = epoch marks conflict,
        // stamp = epoch | visited-but-clear is tracked via a separate list.
        let mut cavity = vec![t0];
        let mut stack = vec![t0];
        let mut clear: Vec<TriId> = Vec::new();
        self.stamp[t0 as usize] = epoch;
        while let Some(t) = stack.pop() {
            for k in 0..3 {
                let nb = self.tris[t as usize].n[k];
                if self.stamp[nb as usize] == epoch || clear.contains(&nb) {
                    continue;
                }
                if self.conflicts(nb, p)? {
                    self.stamp[nb as usize] = epoch;
                    cavity.push(nb);
                    stack.push(nb);
                } else {
                    clear.push(nb);
                }
            }
        }
        // Boundary edges (a, b) in counter-clockwise order around the cavity.
        let mut boundary: Vec<(VertexId, VertexId, TriId)> = Vec::new();
        for &t in &cavity {
            let tri = &self.tris[t as usize];
            for k in 0..3 {
                let nb = tri.n[k];
                if self.stamp[nb as usize] != epoch {
                    boundary.push((tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], nb));
                }
            }
        }
        let first_new = self.tris.len() as TriId;
        for &(a, b, outer) in &boundary {
            let verts = if a == GHOST {
                [b, v, GHOST]
            } else if b == GHOST {
                [v, a, GHOST]
            } else {
                [a, b, v]
            };
            let id = self.tris.len() as TriId;
            self.tris.push(Tri {
                v: verts,
                n: [NO_TRI; 3],
                alive: true,
            });
            self.link(id, outer, a, b);
        }
        // Adjacent new triangles share the edge (x, v) for each boundary vertex x.
        let mut by_vertex: HashMap<VertexId, TriId> = HashMap::with_capacity(2 * boundary.len());
        for (i, &(a, b, _)) in boundary.iter().enumerate() {
            let id = first_new + i as TriId;
            for x in [a, b] {
                if let Some(other) = by_vertex.remove(&x) {
                    self.link(id, other, x, v);
                } else {
                    by_vertex.insert(x, id);
                }
            }
        }
        if !by_vertex.is_empty() {
            return Err(degenerate("cavity boundary is not a cycle"));
        }
        for &t in &cavity {
            self.tris[t as usize].alive = false;
        }
        self.present[v as usize] = true;
        for id in first_new..self.tris.len() as TriId {
            for &w in &self.tris[id as usize].v {
                if w != GHOST {
                    self.vertex_tri[w as usize] = id;
                }
            }
            if !self.is_ghost(id) {
                self.hint = id;
            }
        }
        Ok(())
    }

    fn edge_index(&self, t: TriId, a: VertexId, b: VertexId) -> usize {
        let v = self.tris[t as usize].v;
        (0..3)
            .find(|&k| {
                let (x, y) = (v[(k + 1) % 3], v[(k + 2) % 3]);
                (x == a && y == b) || (x == b && y == a)
            })
            .expect("edge not found in triangle")
    }

    /// Makes `t` and `u` neighbors across their common edge `{a, b}`.
    fn link(&mut self, t: TriId, u: TriId, a: VertexId, b: VertexId) {
        let kt = self.edge_index(t, a, b);
        let ku = self.edge_index(u, a, b);
        self.tris[t as usize].n[kt] = u;
        self.tris[u as usize].n[ku] = t;
    }

    /// Removes an interior vertex and re-triangulates its star by Delaunay ears.
    pub fn remove_vertex(&mut self, v: VertexId) -> Result<()> {
        if !self.is_present(v) {
            return Err(Error::Validation(format!("vertex {v} is not present")));
        }
        let star = self.star(v);
        let mut ring = Vec::with_capacity(star.len());
        let mut edge_nb: HashMap<(VertexId, VertexId), TriId> = HashMap::new();
        for &t in &star {
            let tri = &self.tris[t as usize];
            let i = tri.v.iter().position(|&x| x == v).unwrap();
            let (a, b) = (tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]);
            if a == GHOST || b == GHOST {
                return Err(Error::Validation(format!("vertex {v} lies on the hull")));
            }
            ring.push(a);
            edge_nb.insert((a, b), tri.n[i]);
        }
        let mut poly = ring;
        let mut created = Vec::new();
        while poly.len() > 3 {
            let m = poly.len();
            let mut ear = None;
            'scan: for i in 0..m {
                let (a, b, c) = (poly[(i + m - 1) % m], poly[i], poly[(i + 1) % m]);
                let (pa, pb, pc) = (self.point(a), self.point(b), self.point(c));
                self.tests += 1;
                if orient(pa, pb, pc) != Ordering::Greater {
                    continue;
                }
                for j in 0..m {
                    let d = poly[j];
                    if d == a || d == b || d == c {
                        continue;
                    }
                    self.tests += 1;
                    match incircle(pa, pb, pc, self.point(d)) {
                        Ordering::Greater => continue 'scan,
                        Ordering::Equal => {
                            return Err(degenerate(format!(
                                "cocircular vertices {a}, {b}, {c}, {d} around removed vertex {v}"
                            )))
                        }
                        Ordering::Less => {}
                    }
                }
                ear = Some(i);
                break;
            }
            let i = ear.ok_or_else(|| degenerate(format!("no ear around vertex {v}")))?;
            let (a, b, c) = (poly[(i + m - 1) % m], poly[i], poly[(i + 1) % m]);
            let id = self.new_tri_in_hole([a, b, c], &mut edge_nb);
            edge_nb.insert((a, c), id);
            created.push(id);
            poly.remove(i);
        }
        let id = self.new_tri_in_hole([poly[0], poly[1], poly[2]], &mut edge_nb);
        created.push(id);
        for &t in &star {
            self.tris[t as usize].alive = false;
        }
        self.present[v as usize] = false;
        self.vertex_tri[v as usize] = NO_TRI;
        for &id in &created {
            for &w in &self.tris[id as usize].v {
                self.vertex_tri[w as usize] = id;
            }
        }
        self.hint = *created.last().unwrap();
        Ok(())
    }

    fn new_tri_in_hole(
        &mut self,
        v: [VertexId; 3],
        edge_nb: &mut HashMap<(VertexId, VertexId), TriId>,
    ) -> TriId {
        let id = self.tris.len() as TriId;
        self.tris.push(Tri {
            v,
            n: [NO_TRI; 3],
            alive: true,
        });
        for k in 0..3 {
            let (a, b) = (v[k], v[(k + 1) % 3]);
            if let Some(outer) = edge_nb.remove(&(a, b)) {
                self.link(id, outer, a, b);
            }
        }
        id
    }

    /// Copy keeping only present vertices, renumbered by `map` (old id to
    /// new id), with points given for the new ids.
    pub fn relabel(&self, new_points: Vec<Point2>, map: &[VertexId]) -> Result<Self> {
        let tris: Vec<[VertexId; 3]> = self
            .finite_triangles()
            .map(|t| self.tris[t as usize].v.map(|w| map[w as usize]))
            .collect();
        Self::from_triangles(new_points, &tris)
    }

    /// Checks structural invariants: mutual neighbor links, counter-clockwise
    /// finite triangles and ghost orientation.
    pub fn check_structure(&self) -> Result<()> {
        for (ti, tri) in self.tris.iter().enumerate() {
            if !tri.alive {
                continue;
            }
            for k in 0..3 {
                let nb = tri.n[k];
                if !self.is_alive(nb) {
                    return Err(Error::Validation(format!("triangle {ti} has a dead neighbor")));
                }
                let (a, b) = (tri.v[(k + 1) % 3], tri.v[(k + 2) % 3]);
                let back = &self.tris[nb as usize];
                let kb = (0..3).find(|&j| {
                    back.v[(j + 1) % 3] == b && back.v[(j + 2) % 3] == a
                });
                match kb {
                    Some(j) if back.n[j] == ti as TriId => {}
                    _ => {
                        return Err(Error::Validation(format!(
                            "neighbor link {ti} -> {nb} is not mutual"
                        )))
                    }
                }
            }
            if tri.v[2] != GHOST {
                let [a, b, c] = tri.v.map(|w| self.points[w as usize]);
                if orient(a, b, c) != Ordering::Greater {
                    return Err(Error::Validation(format!("triangle {ti} is not counter-clockwise")));
                }
            }
        }
        Ok(())
    }

    /// Checks the empty-circle property on every interior edge.
    pub fn check_locally_delaunay(&self) -> Result<()> {
        for t in self.finite_triangles() {
            let tri = &self.tris[t as usize];
            let [a, b, c] = tri.v.map(|w| self.points[w as usize]);
            for k in 0..3 {
                let nb = &self.tris[tri.n[k] as usize];
                if nb.v[2] == GHOST {
                    continue;
                }
                let far = nb
                    .v
                    .iter()
                    .find(|&&w| !tri.v.contains(&w))
                    .copied()
                    .unwrap();
                if incircle(a, b, c, self.points[far as usize]) != Ordering::Less {
                    return Err(Error::Validation(format!(
                        "edge opposite vertex {} of triangle {t} is not locally Delaunay",
                        tri.v[k]
                    )));
                }
            }
        }
        Ok(())
    }
}

fn check_distinct(points: &[Point2]) -> Result<()> {
    for i in 0..points.len() {
        for j in 0..i {
            if points[i] == points[j] {
                return Err(degenerate("duplicate points"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_free(n: usize, seed: u64) -> Vec<Point2> {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Point2::new(rng.random::<f64>(), rng.random::<f64>()))
            .collect()
    }

    #[test]
    fn square_plus_center() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.1),
            Point2::new(1.1, 1.0),
            Point2::new(-0.1, 0.9),
            Point2::new(0.45, 0.55),
        ];
        let t = Triangulation::delaunay(&pts).unwrap();
        t.check_structure().unwrap();
        t.check_locally_delaunay().unwrap();
        assert_eq!(t.num_finite_triangles(), 4);
    }

    #[test]
    fn insert_then_remove_restores() {
        let pts = grid_free(60, 3);
        let mut t = Triangulation::delaunay(&pts).unwrap();
        let before = t.edges();
        let v = t.insert(Point2::new(0.5, 0.5), NO_TRI).unwrap();
        t.check_structure().unwrap();
        t.check_locally_delaunay().unwrap();
        t.remove_vertex(v).unwrap();
        t.check_structure().unwrap();
        assert_eq!(t.edges(), before);
    }

    #[test]
    fn duplicate_is_degenerate() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 0.0),
        ];
        assert!(matches!(
            Triangulation::delaunay(&pts),
            Err(Error::Degenerate(_))
        ));
    }
}
