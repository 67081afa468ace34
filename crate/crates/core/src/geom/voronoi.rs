//! Voronoi diagrams as duals of Delaunay triangulations.
//!
//! Voronoi vertices are named by the id of their dual Delaunay triangle; all
//! ghost triangles collapse onto a single vertex at infinity.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::derived::DerivedPoint;
use super::point::Point2;
use super::predicates::dist_cmp;
use super::triangulation::{TriId, Triangulation, VertexId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VorVertex {
    Finite(TriId),
    Infinity,
}

#[derive(Clone, Debug)]
pub struct VoronoiDiagram {
    tri: Triangulation,
    regions: Vec<Vec<VorVertex>>,
}

/// Voronoi diagram dual to `t`. The region of every present vertex lists its
/// Voronoi vertices counter-clockwise; unbounded regions contain `Infinity`
/// exactly once.
pub fn dualize(t: &Triangulation) -> VoronoiDiagram {
    let mut regions = vec![Vec::new(); t.vertex_slots()];
    for v in t.present_vertices() {
        let mut cyc: Vec<VorVertex> = t
            .star(v)
            .into_iter()
            .map(|s| {
                if t.is_ghost(s) {
                    VorVertex::Infinity
                } else {
                    VorVertex::Finite(s)
                }
            })
            .collect();
        cyc.dedup();
        if cyc.len() > 1 && cyc.first() == cyc.last() {
            cyc.pop();
        }
        if let Some(k) = cyc.iter().position(|&x| x == VorVertex::Infinity) {
            cyc.rotate_left(k);
        }
        regions[v as usize] = cyc;
    }
    VoronoiDiagram {
        tri: t.clone(),
        regions,
    }
}

/// Voronoi diagram of a small point set.
pub fn voronoi_of_small_set(sites: &[Point2]) -> Result<VoronoiDiagram> {
    Ok(dualize(&Triangulation::delaunay(sites)?))
}

/// Rebuilds the triangulation from the regions alone: each finite Voronoi
/// vertex is shared by exactly three regions, which form its triangle.
pub fn dual_back(vor: &VoronoiDiagram) -> Result<Triangulation> {
    let mut owners: HashMap<TriId, Vec<VertexId>> = HashMap::new();
    for (v, region) in vor.regions.iter().enumerate() {
        for x in region {
            if let VorVertex::Finite(t) = x {
                owners.entry(*t).or_default().push(v as VertexId);
            }
        }
    }
    let mut ids: Vec<TriId> = owners.keys().copied().collect();
    ids.sort_unstable();
    let mut tris = Vec::with_capacity(ids.len());
    for t in ids {
        let o = &owners[&t];
        if o.len() != 3 {
            return Err(Error::Validation(format!(
                "Voronoi vertex {t} is shared by {} regions",
                o.len()
            )));
        }
        tris.push([o[0], o[1], o[2]]);
    }
    Triangulation::from_triangles(vor.tri.points().to_vec(), &tris)
}

impl VoronoiDiagram {
    pub fn triangulation(&self) -> &Triangulation {
        &self.tri
    }

    pub fn sites(&self) -> &[Point2] {
        self.tri.points()
    }

    /// Region of site `v` (empty for absent sites).
    pub fn region(&self, v: VertexId) -> &[VorVertex] {
        &self.regions[v as usize]
    }

    pub fn is_bounded(&self, v: VertexId) -> bool {
        !self.regions[v as usize].contains(&VorVertex::Infinity)
    }

    /// Circumcenter of the dual triangle.
    pub fn vertex_point(&self, t: TriId) -> DerivedPoint {
        let [a, b, c] = self.tri.triangle_points(t);
        DerivedPoint::circumcenter(a, b, c)
    }

    /// Site nearest to `p` (smallest id among exact ties), by a greedy walk
    /// on the Delaunay graph.
    pub fn owner(&self, p: Point2) -> Option<VertexId> {
        nearest_vertex(&self.tri, p)
    }
}

/// Present vertex of `t` nearest to `p`, smallest id among exact ties.
pub fn nearest_vertex(t: &Triangulation, p: Point2) -> Option<VertexId> {
    let mut cur = t.present_vertices().next()?;
    if t.tri_slots() == 0 {
        for w in t.present_vertices() {
            if dist_cmp(p, t.point(w), t.point(cur)) == Ordering::Less {
                cur = w;
            }
        }
        return Some(cur);
    }
    loop {
        let mut best = cur;
        for s in t.star(cur) {
            for w in t.vertices(s) {
                if w == super::triangulation::GHOST || w == best {
                    continue;
                }
                match dist_cmp(p, t.point(w), t.point(best)) {
                    Ordering::Less => best = w,
                    Ordering::Equal if w < best => best = w,
                    _ => {}
                }
            }
        }
        if best == cur {
            return Some(cur);
        }
        cur = best;
    }
}
