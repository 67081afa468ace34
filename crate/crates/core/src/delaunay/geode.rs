//! Decomposition of the Voronoi diagram of `V` into small convex pieces,
//! each carrying the input points that can see it.
//!
//! For a piece `s` inside the region of site `v`, every input point lying
//! strictly inside a disk centred in `s` and passing through `v` is in
//! conflict with one of the triangles at the corners of `s`. So the
//! triangles of `DT(Z_s)` whose circumcenter lies in `s` are Delaunay in the
//! full set.

use std::cmp::Ordering;

use super::{ConflictRecord, DelaunayModel};
use crate::geom::derived::{dot, lex_cmp, orient, DerivedPoint};
use crate::geom::triangulation::{TriId, VertexId};
use crate::geom::voronoi::VorVertex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PieceKind {
    /// Triangle of three Voronoi vertices of a bounded region.
    Fan { apex: TriId, a: TriId, b: TriId },
    /// Triangle of the site and two consecutive Voronoi vertices of an
    /// unbounded region.
    SiteFan { a: TriId, b: TriId },
    /// Half-strip swept outward from the segment site..`t` across the hull
    /// edge to `w`.
    StripAfter { t: TriId, w: VertexId },
    /// Same, on the other hull edge of the site.
    StripBefore { t: TriId, w: VertexId },
    /// Points whose projections on both hull edges at the site fall behind it.
    Cone { wp: VertexId, wn: VertexId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodePiece {
    pub site: VertexId,
    pub kind: PieceKind,
    /// Input indices in conflict with a corner triangle, sorted.
    pub z: Vec<u32>,
}

#[derive(Clone, Debug, Default)]
pub struct Geode {
    pub pieces: Vec<GeodePiece>,
}

impl Geode {
    pub fn sum_sizes(&self) -> u64 {
        self.pieces.iter().map(|p| p.z.len() as u64).sum()
    }

    /// Sum of squared local set sizes (the site included).
    pub fn sum_squares(&self) -> u64 {
        self.pieces
            .iter()
            .map(|p| (p.z.len() as u64 + 1).pow(2))
            .sum()
    }
}

fn merged(lists: &[&[u32]]) -> Vec<u32> {
    let mut z: Vec<u32> = lists.iter().flat_map(|l| l.iter().copied()).collect();
    z.sort_unstable();
    z.dedup();
    z
}

/// Counter-clockwise hull order of the bounding vertices.
fn hull_cycle(model: &DelaunayModel) -> [VertexId; 3] {
    let b = model.bounding();
    if crate::geom::predicates::orient(b[0], b[1], b[2]) == Ordering::Greater {
        [0, 1, 2]
    } else {
        [0, 2, 1]
    }
}

/// Splits every Voronoi region of `T(V)` into pieces.
pub fn build_geode(model: &DelaunayModel, rec: &ConflictRecord) -> Geode {
    let tv = model.tv();
    let vor = model.voronoi();
    let z = |t: TriId| rec.z[t as usize].as_slice();
    let cycle = hull_cycle(model);
    let mut pieces = Vec::new();
    for v in tv.present_vertices() {
        let region = vor.region(v);
        let tris: Vec<TriId> = region
            .iter()
            .filter_map(|x| match x {
                VorVertex::Finite(t) => Some(*t),
                VorVertex::Infinity => None,
            })
            .collect();
        if vor.is_bounded(v) {
            let k = tris.len();
            let r = (0..k)
                .min_by(|&i, &j| {
                    let (a, b) = (tris[i], tris[j]);
                    z(a).len()
                        .cmp(&z(b).len())
                        .then_with(|| lex_cmp(model.center(a), model.center(b)))
                })
                .expect("bounded region has vertices");
            let apex = tris[r];
            for j in 1..k - 1 {
                let (a, b) = (tris[(r + j) % k], tris[(r + j + 1) % k]);
                pieces.push(GeodePiece {
                    site: v,
                    kind: PieceKind::Fan { apex, a, b },
                    z: merged(&[z(apex), z(a), z(b)]),
                });
            }
        } else {
            let pos = cycle.iter().position(|&w| w == v).expect("unbounded site is a hull vertex");
            let wp = cycle[(pos + 2) % 3];
            let wn = cycle[(pos + 1) % 3];
            for pair in tris.windows(2) {
                pieces.push(GeodePiece {
                    site: v,
                    kind: PieceKind::SiteFan { a: pair[0], b: pair[1] },
                    z: merged(&[z(pair[0]), z(pair[1])]),
                });
            }
            let (first, last) = (tris[0], tris[tris.len() - 1]);
            pieces.push(GeodePiece {
                site: v,
                kind: PieceKind::StripAfter { t: last, w: wp },
                z: z(last).to_vec(),
            });
            pieces.push(GeodePiece {
                site: v,
                kind: PieceKind::Cone { wp, wn },
                z: Vec::new(),
            });
            pieces.push(GeodePiece {
                site: v,
                kind: PieceKind::StripBefore { t: first, w: wn },
                z: z(first).to_vec(),
            });
        }
    }
    Geode { pieces }
}

impl GeodePiece {
    /// Whether `p` lies in the closed piece.
    pub fn contains(&self, model: &DelaunayModel, p: &DerivedPoint) -> bool {
        let tv = model.tv();
        let site = DerivedPoint::input(tv.point(self.site));
        let c = |t: TriId| model.center(t);
        let in_tri = |a: &DerivedPoint, b: &DerivedPoint, d: &DerivedPoint| {
            orient(a, b, p) != Ordering::Less
                && orient(b, d, p) != Ordering::Less
                && orient(d, a, p) != Ordering::Less
        };
        match self.kind {
            PieceKind::Fan { apex, a, b } => in_tri(c(apex), c(a), c(b)),
            PieceKind::SiteFan { a, b } => in_tri(&site, c(a), c(b)),
            PieceKind::StripAfter { t, w } => {
                let w = DerivedPoint::input(tv.point(w));
                dot(&site, p, &site, &w) != Ordering::Less
                    && dot(c(t), p, &site, &w) != Ordering::Greater
                    && orient(&site, c(t), p) != Ordering::Less
            }
            PieceKind::StripBefore { t, w } => {
                let w = DerivedPoint::input(tv.point(w));
                dot(&site, p, &site, &w) != Ordering::Less
                    && dot(c(t), p, &site, &w) != Ordering::Greater
                    && orient(&site, c(t), p) != Ordering::Greater
            }
            PieceKind::Cone { wp, wn } => {
                let wp = DerivedPoint::input(tv.point(wp));
                let wn = DerivedPoint::input(tv.point(wn));
                dot(&site, p, &site, &wp) != Ordering::Greater
                    && dot(&site, p, &site, &wn) != Ordering::Greater
            }
        }
    }
}
