//! Point location in a triangulation by x-slabs and vertical cell stacks.
//!
//! The distinct vertex x-coordinates cut the plane into slabs; inside a slab
//! the triangles crossing it are totally ordered from bottom to top, and each
//! such (slab, triangle) pair is a cell. A locator is a weighted search tree
//! over slabs followed by a weighted search tree over the cells of the slab.
//! The fallback uses uniform weights; biased locators use learned cell masses
//! and give up after a step budget.
//!
//! Steps count primitive tests: one per x-comparison and one per orientation
//! test. Points on shared edges or vertices resolve to the containing
//! triangle with the smallest id.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geom::predicates::{in_closed_triangle, orient};
use crate::geom::triangulation::{TriId, Triangulation, VertexId, GHOST};
use crate::geom::Point2;
use crate::wbst::{SearchShape, NIL};

/// One triangle within one slab, with its lower edge (left endpoint first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub tri: TriId,
    pub lower: [VertexId; 2],
}

/// Slab decomposition of a triangulation; shared by all its locators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlabMap {
    xs: Vec<f64>,
    slabs: Vec<Vec<Cell>>,
    /// Global id of the first cell of each slab.
    offsets: Vec<u32>,
    /// Hull vertices counter-clockwise.
    hull: Vec<VertexId>,
    points: Vec<Point2>,
}

impl SlabMap {
    pub fn build(t: &Triangulation) -> Result<Self> {
        if t.num_finite_triangles() == 0 {
            return invalid("cannot locate in an empty triangulation");
        }
        let mut xs: Vec<f64> = t.present_vertices().map(|v| t.point(v).x).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let nslabs = xs.len() - 1;
        let slab_of = |x: f64| xs.partition_point(|&k| k < x);
        // Bottom cell of each slab: the finite triangle above a lower hull edge.
        let mut bottom = vec![GHOST; nslabs];
        let mut hull_next: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        for tr in t.finite_triangles() {
            let v = t.vertices(tr);
            let n = t.neighbors(tr);
            for k in 0..3 {
                if !t.is_ghost(n[k]) {
                    continue;
                }
                let (u, w) = (v[(k + 1) % 3], v[(k + 2) % 3]);
                hull_next.insert(u, w);
                let (pu, pw) = (t.point(u), t.point(w));
                if pu.x < pw.x {
                    for b in bottom.iter_mut().take(slab_of(pw.x)).skip(slab_of(pu.x)) {
                        *b = tr;
                    }
                }
            }
        }
        let mut slabs = Vec::with_capacity(nslabs);
        let mut offsets = Vec::with_capacity(nslabs + 1);
        let mut total = 0u32;
        for (s, &start) in bottom.iter().enumerate() {
            let (x0, x1) = (xs[s], xs[s + 1]);
            let mut stack = Vec::new();
            let mut cur = start;
            while cur != GHOST && !t.is_ghost(cur) {
                let v = t.vertices(cur);
                let mut lower = None;
                let mut up = None;
                for k in 0..3 {
                    let (u, w) = (v[(k + 1) % 3], v[(k + 2) % 3]);
                    let (pu, pw) = (t.point(u), t.point(w));
                    if pu.x <= x0 && pw.x >= x1 {
                        lower = Some([u, w]);
                    } else if pw.x <= x0 && pu.x >= x1 {
                        up = Some(t.neighbors(cur)[k]);
                    }
                }
                let (Some(lower), Some(up)) = (lower, up) else {
                    return invalid(format!("triangle {cur} does not span slab {s}"));
                };
                stack.push(Cell { tri: cur, lower });
                if stack.len() > t.tri_slots() {
                    return invalid("slab walk does not terminate");
                }
                cur = up;
            }
            if stack.is_empty() {
                return invalid(format!("slab {s} has no cells"));
            }
            offsets.push(total);
            total += stack.len() as u32;
            slabs.push(stack);
        }
        offsets.push(total);
        let start = *hull_next.keys().next().expect("hull is non-empty");
        let mut hull = vec![start];
        let mut cur = hull_next[&start];
        while cur != start {
            hull.push(cur);
            cur = hull_next[&cur];
            if hull.len() > hull_next.len() {
                return invalid("hull is not a single cycle");
            }
        }
        Ok(Self {
            xs,
            slabs,
            offsets,
            hull,
            points: t.points().to_vec(),
        })
    }

    pub fn num_slabs(&self) -> usize {
        self.slabs.len()
    }

    pub fn num_cells(&self) -> usize {
        *self.offsets.last().unwrap() as usize
    }

    pub fn slab_cells(&self, s: usize) -> &[Cell] {
        &self.slabs[s]
    }

    /// Slab and position of a global cell id.
    pub fn cell_position(&self, cell: u32) -> (usize, usize) {
        let s = self.offsets.partition_point(|&o| o <= cell) - 1;
        (s, (cell - self.offsets[s]) as usize)
    }

    pub fn cell_triangle(&self, cell: u32) -> TriId {
        let (s, k) = self.cell_position(cell);
        self.slabs[s][k].tri
    }

    /// Global ids of all cells of every triangle.
    pub fn triangle_cells(&self) -> BTreeMap<TriId, Vec<u32>> {
        let mut out: BTreeMap<TriId, Vec<u32>> = BTreeMap::new();
        for (s, cells) in self.slabs.iter().enumerate() {
            for (k, c) in cells.iter().enumerate() {
                out.entry(c.tri).or_default().push(self.offsets[s] + k as u32);
            }
        }
        out
    }

    /// Area of a cell: its slab width times its height at mid-slab.
    pub fn cell_area(&self, cell: u32) -> f64 {
        let (s, k) = self.cell_position(cell);
        let (x0, x1) = (self.xs[s], self.xs[s + 1]);
        let xm = 0.5 * (x0 + x1);
        let y_at = |e: [VertexId; 2]| {
            let (a, b) = (self.points[e[0] as usize], self.points[e[1] as usize]);
            a.y + (b.y - a.y) * (xm - a.x) / (b.x - a.x)
        };
        let cells = &self.slabs[s];
        let lo = y_at(cells[k].lower);
        let hi = match cells.get(k + 1) {
            Some(c) => y_at(c.lower),
            None => {
                // Top cell: the upper edge is the hull edge spanning the slab.
                let h = self.hull.len();
                (0..h)
                    .map(|i| [self.hull[(i + 1) % h], self.hull[i]])
                    .find(|e| {
                        self.points[e[0] as usize].x <= x0 && self.points[e[1] as usize].x >= x1
                    })
                    .map(y_at)
                    .unwrap_or(lo)
            }
        };
        (x1 - x0) * (hi - lo).max(0.0)
    }

    /// Whether `q` lies in the closed hull of the triangulation.
    pub fn contains(&self, q: Point2) -> bool {
        let h = self.hull.len();
        (0..h).all(|i| {
            let a = self.points[self.hull[i] as usize];
            let b = self.points[self.hull[(i + 1) % h] as usize];
            orient(a, b, q) != Ordering::Less
        })
    }

    fn slab_probe(&self, s: u32, q: Point2, tie: &mut bool) -> (Ordering, u32) {
        let s = s as usize;
        if q.x < self.xs[s] {
            return (Ordering::Less, 1);
        }
        if q.x == self.xs[s] {
            *tie = true;
        }
        if s + 1 < self.slabs.len() {
            if q.x >= self.xs[s + 1] {
                return (Ordering::Greater, 2);
            }
        } else if q.x == self.xs[s + 1] {
            *tie = true;
        }
        (Ordering::Equal, 2)
    }

    fn cell_probe(&self, s: usize, k: u32, q: Point2, tie: &mut bool) -> (Ordering, u32) {
        let cells = &self.slabs[s];
        let k = k as usize;
        let side = |c: &Cell| {
            orient(
                self.points[c.lower[0] as usize],
                self.points[c.lower[1] as usize],
                q,
            )
        };
        match side(&cells[k]) {
            Ordering::Less => return (Ordering::Less, 1),
            Ordering::Equal => *tie = true,
            Ordering::Greater => {}
        }
        if k + 1 < cells.len() {
            match side(&cells[k + 1]) {
                Ordering::Less => {}
                Ordering::Equal => {
                    *tie = true;
                    return (Ordering::Greater, 2);
                }
                Ordering::Greater => return (Ordering::Greater, 2),
            }
            return (Ordering::Equal, 2);
        }
        (Ordering::Equal, 1)
    }
}

/// Descends `shape` while the budget allows; `probe` returns the direction
/// and the number of primitive tests it spent.
fn descend<F: FnMut(u32) -> (Ordering, u32)>(
    shape: &SearchShape,
    budget: Option<u32>,
    steps: &mut u32,
    mut probe: F,
) -> Option<u32> {
    let nodes = shape.nodes();
    let mut cur = shape.root();
    while cur != NIL {
        if budget.is_some_and(|b| *steps >= b) {
            return None;
        }
        let node = &nodes[cur as usize];
        let (ord, cost) = probe(node.bucket);
        *steps += cost;
        match ord {
            Ordering::Less => cur = node.left,
            Ordering::Greater => cur = node.right,
            Ordering::Equal => return Some(node.bucket),
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocatorMode {
    BalancedFallback,
    Biased,
}

/// Two-level search structure over the cells of a [`SlabMap`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleLocator {
    pub mode: LocatorMode,
    slab_tree: SearchShape,
    /// Cell trees of the slabs reachable through `slab_tree`.
    cell_trees: BTreeMap<u32, SearchShape>,
    /// Primitive tests allowed before giving up (biased only).
    pub step_budget: Option<u32>,
}

/// Outcome of a search in one locator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellHit {
    pub cell: Option<u32>,
    pub steps: u32,
    /// The query may lie on the boundary of the cell's triangle.
    pub boundary: bool,
}

impl TriangleLocator {
    /// Uniform-weight locator over every cell.
    pub fn fallback(map: &SlabMap) -> Self {
        let cell_trees = (0..map.num_slabs())
            .map(|s| (s as u32, SearchShape::balanced(map.slabs[s].len())))
            .collect();
        Self {
            mode: LocatorMode::BalancedFallback,
            slab_tree: SearchShape::balanced(map.num_slabs()),
            cell_trees,
            step_budget: None,
        }
    }

    /// Locator weighted by cell masses (global cell id, mass); cells with zero
    /// mass are left out.
    pub fn biased(map: &SlabMap, cell_mass: &[(u32, f64)], step_budget: u32) -> Result<Self> {
        let mut per_slab: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
        let mut slab_w = vec![0.0; map.num_slabs()];
        for &(cell, w) in cell_mass {
            if cell as usize >= map.num_cells() {
                return invalid(format!("cell {cell} does not exist"));
            }
            if !w.is_finite() || w < 0.0 {
                return invalid(format!("mass {w} is not finite and non-negative"));
            }
            if w == 0.0 {
                continue;
            }
            let (s, k) = map.cell_position(cell);
            slab_w[s] += w;
            per_slab
                .entry(s as u32)
                .or_insert_with(|| vec![0.0; map.slabs[s].len()])[k] += w;
        }
        let cell_trees = per_slab
            .into_iter()
            .map(|(s, w)| Ok((s, SearchShape::weighted(&w, None)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            mode: LocatorMode::Biased,
            slab_tree: SearchShape::weighted(&slab_w, None)?,
            cell_trees,
            step_budget: Some(step_budget),
        })
    }

    /// Locator weighted by triangle masses; each triangle's mass is split
    /// over its cells in proportion to their areas.
    pub fn from_triangle_masses(
        map: &SlabMap,
        masses: &BTreeMap<TriId, f64>,
        step_budget: u32,
    ) -> Result<Self> {
        let total: f64 = masses.values().sum();
        if total > 1.0 + 1e-9 {
            return invalid(format!("triangle masses sum to {total} > 1"));
        }
        let cells = map.triangle_cells();
        let mut cell_mass = Vec::new();
        for (t, &m) in masses {
            let Some(cs) = cells.get(t) else {
                return invalid(format!("triangle {t} has no cells"));
            };
            let areas: Vec<f64> = cs.iter().map(|&c| map.cell_area(c)).collect();
            let sum: f64 = areas.iter().sum();
            for (&c, a) in cs.iter().zip(areas) {
                cell_mass.push((c, m * a / sum));
            }
        }
        Self::biased(map, &cell_mass, step_budget)
    }

    /// Number of cells stored.
    pub fn stored_cells(&self) -> usize {
        self.cell_trees.values().map(SearchShape::len).sum()
    }

    /// Searches for the cell containing `q` (assumed inside the hull).
    pub fn search(&self, map: &SlabMap, q: Point2) -> CellHit {
        let mut steps = 0;
        let mut boundary = false;
        let budget = self.step_budget;
        let miss = |steps| CellHit {
            cell: None,
            steps,
            boundary: false,
        };
        let Some(s) = descend(&self.slab_tree, budget, &mut steps, |s| {
            map.slab_probe(s, q, &mut boundary)
        }) else {
            return miss(steps);
        };
        let Some(tree) = self.cell_trees.get(&s) else {
            return miss(steps);
        };
        let s = s as usize;
        match descend(tree, budget, &mut steps, |k| {
            map.cell_probe(s, k, q, &mut boundary)
        }) {
            Some(k) => CellHit {
                cell: Some(map.offsets[s] + k),
                steps,
                boundary,
            },
            None => miss(steps),
        }
    }
}

/// Result of [`locate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Located {
    pub tri: TriId,
    /// Cell found by the search (before boundary resolution).
    pub cell: u32,
    pub steps: u32,
    pub used_fallback: bool,
}

/// Locates `q` with `loc`, falling back to `fallback` when the biased search
/// leaves its tree or exhausts its budget.
pub fn locate(
    map: &SlabMap,
    tri: &Triangulation,
    loc: &TriangleLocator,
    fallback: &TriangleLocator,
    q: Point2,
) -> Result<Located> {
    if !q.is_finite() || !map.contains(q) {
        return invalid(format!("query {q:?} lies outside the triangulation"));
    }
    let mut hit = loc.search(map, q);
    let mut used_fallback = false;
    if hit.cell.is_none() {
        let fb = fallback.search(map, q);
        used_fallback = true;
        hit = CellHit {
            steps: hit.steps + fb.steps,
            ..fb
        };
    }
    let cell = hit.cell.expect("fallback always finds a cell inside the hull");
    let mut t = map.cell_triangle(cell);
    if hit.boundary {
        t = smallest_containing(tri, t, q);
    }
    Ok(Located {
        tri: t,
        cell,
        steps: hit.steps,
        used_fallback,
    })
}

/// Smallest-id triangle containing `q`, given a triangle `t` whose closure
/// contains it.
fn smallest_containing(tri: &Triangulation, t: TriId, q: Point2) -> TriId {
    let mut best = t;
    for v in tri.vertices(t) {
        for s in tri.star(v) {
            if s < best && !tri.is_ghost(s) {
                let [a, b, c] = tri.triangle_points(s);
                if in_closed_triangle(a, b, c, q) {
                    best = s;
                }
            }
        }
    }
    best
}
