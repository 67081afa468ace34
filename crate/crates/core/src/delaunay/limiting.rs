//! Limiting phase: assembles `T(V u I)` from local pieces, then removes `V`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::geode::{build_geode, Geode, GeodePiece};
use super::{conflicts, ConflictRecord, DelaunayModel};
use crate::error::{invalid, Error, Result};
use crate::geom::derived::DerivedPoint;
use crate::geom::predicates::{diametral, dist_cmp, incircle, orient};
use crate::geom::voronoi::nearest_vertex;
use crate::geom::triangulation::{Triangulation, VertexId, GHOST};
use crate::geom::Point2;

/// Counters of one limiting-phase run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub locate_steps: u64,
    pub fallback_uses: u32,
    /// Sum over inputs of the number of conflicting triangles.
    pub sum_conflicts: u64,
    /// In-circle tests of the conflict walks.
    pub walk_tests: u64,
    /// Largest number of inputs in conflict with one triangle.
    pub max_conflict: u32,
    pub pieces: u64,
    pub sum_piece: u64,
    pub sum_piece_sq: u64,
    /// Predicates spent on the local triangulations and the piece filter.
    pub local_predicates: u64,
    /// Predicates spent deciding which net edges survive.
    pub edge_predicates: u64,
    pub deletions: u32,
    pub split_predicates: u64,
    /// Wall time of location, conflicts, local step, fusion and split.
    pub phase_ns: [u64; 5],
}

impl RunReport {
    pub fn wall_ns(&self) -> u64 {
        self.phase_ns.iter().sum()
    }

    /// Steps of the location phase.
    pub fn steps_phase1(&self) -> u64 {
        self.locate_steps
    }

    /// Everything after location.
    pub fn steps_phase2(&self) -> u64 {
        self.walk_tests + self.local_predicates + self.edge_predicates + self.split_predicates
    }
}

/// `T(V u I)` with its global numbering: net vertices keep their ids in
/// `T(V)`, input `i` is `ids[i]`.
#[derive(Clone, Debug)]
pub struct Assembly {
    pub fused: Triangulation,
    pub ids: Vec<VertexId>,
    /// Number of vertex slots of `T(V)`.
    pub nv: usize,
}

#[derive(Clone, Debug)]
pub struct LimitingOutcome {
    /// Vertices 0..3 are the bounding triangle, `3 + i` is input `i`.
    pub triangulation: Triangulation,
    pub report: RunReport,
}

const SPLIT_SALT: u64 = 0x5b17;

fn ns(t: Instant) -> u64 {
    t.elapsed().as_nanos() as u64
}

fn check_distinct(input: &[Point2]) -> Result<()> {
    let mut seen = HashSet::with_capacity(input.len());
    for p in input {
        if !seen.insert(p.key()) {
            return Err(Error::Degenerate(format!(
                "input point ({}, {}) appears twice",
                p.x, p.y
            )));
        }
    }
    Ok(())
}

/// Global vertex id of every input: its coincident net vertex, or a slot
/// after the net.
pub fn global_ids(model: &DelaunayModel, rec: &ConflictRecord) -> Vec<VertexId> {
    let nv = model.tv().vertex_slots() as VertexId;
    rec.coincident
        .iter()
        .enumerate()
        .map(|(i, c)| c.unwrap_or(nv + i as VertexId))
        .collect()
}

fn sorted(mut t: [VertexId; 3]) -> [VertexId; 3] {
    t.sort_unstable();
    t
}

/// Voronoi diagram of the local set of one piece (its site first), kept as
/// the dual Delaunay triangulation.
#[derive(Clone, Debug)]
pub struct LocalDiagram {
    pub sites: Vec<Point2>,
    /// Global vertex id of each local site.
    pub gid: Vec<VertexId>,
    /// `None` when the sites are fewer than three or collinear.
    pub dual: Option<Triangulation>,
}

impl LocalDiagram {
    /// Global id of the local site nearest to `p`.
    pub fn owner(&self, p: Point2) -> VertexId {
        let local = match &self.dual {
            Some(t) => nearest_vertex(t, p).expect("local diagram has sites"),
            None => {
                let mut best = 0;
                for k in 1..self.sites.len() {
                    if dist_cmp(p, self.sites[k], self.sites[best]) == Ordering::Less {
                        best = k;
                    }
                }
                best as VertexId
            }
        };
        self.gid[local as usize]
    }
}

/// Local diagram of `piece`: its site together with the inputs of `Z_s`.
pub fn restricted_voronoi(
    model: &DelaunayModel,
    piece: &GeodePiece,
    input: &[Point2],
    ids: &[VertexId],
) -> Result<LocalDiagram> {
    let mut sites = Vec::with_capacity(piece.z.len() + 1);
    let mut gid = Vec::with_capacity(piece.z.len() + 1);
    sites.push(model.tv().point(piece.site));
    gid.push(piece.site);
    for &i in &piece.z {
        sites.push(input[i as usize]);
        gid.push(ids[i as usize]);
    }
    let flat = sites.len() < 3
        || sites[2..]
            .iter()
            .all(|&p| orient(sites[0], sites[1], p) == Ordering::Equal);
    let dual = if flat {
        None
    } else {
        Some(Triangulation::delaunay(&sites)?)
    };
    Ok(LocalDiagram { sites, gid, dual })
}

/// Triangles with at most one net vertex: for each piece, the triangles of
/// the local Delaunay triangulation whose circumcenter lies in the piece.
/// Returns global vertex triples and the predicate count.
pub fn restricted_triangles(
    model: &DelaunayModel,
    geode: &Geode,
    input: &[Point2],
    ids: &[VertexId],
) -> Result<(BTreeSet<[VertexId; 3]>, u64)> {
    let mut out = BTreeSet::new();
    let mut tests = 0;
    for piece in &geode.pieces {
        if piece.z.len() < 2 {
            continue;
        }
        let diagram = restricted_voronoi(model, piece, input, ids)?;
        tests += diagram.sites.len() as u64 - 2;
        let Some(local) = &diagram.dual else {
            continue;
        };
        tests += local.predicate_count();
        for t in local.finite_triangles() {
            let [a, b, c] = local.triangle_points(t);
            tests += 1;
            if piece.contains(model, &DerivedPoint::circumcenter(a, b, c)) {
                out.insert(sorted(local.vertices(t).map(|v| diagram.gid[v as usize])));
            }
        }
    }
    Ok((out, tests))
}

/// Triangles with at least two net vertices: each edge of `T(V)` is kept
/// when some empty circle passes through it, and then contributes the
/// triangle on each side whose apex comes first in the pencil of circles.
pub fn edge_triangles(
    model: &DelaunayModel,
    rec: &ConflictRecord,
    input: &[Point2],
    ids: &[VertexId],
) -> Result<(BTreeSet<[VertexId; 3]>, u64)> {
    let tv = model.tv();
    let mut out = BTreeSet::new();
    let mut tests = 0;
    let mut cand: Vec<(VertexId, Point2)> = Vec::new();
    for t in tv.finite_triangles() {
        let tri = tv.vertices(t);
        let nbs = tv.neighbors(t);
        for k in 0..3 {
            let nb = nbs[k];
            if !tv.is_ghost(nb) && nb < t {
                continue;
            }
            let (u, w) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
            let (pu, pw) = (tv.point(u), tv.point(w));
            cand.clear();
            cand.push((tri[k], tv.point(tri[k])));
            for &i in &rec.z[t as usize] {
                cand.push((ids[i as usize], input[i as usize]));
            }
            if !tv.is_ghost(nb) {
                let x = tv.vertices(nb).into_iter().find(|&x| x != u && x != w).unwrap();
                cand.push((x, tv.point(x)));
                for &i in &rec.z[nb as usize] {
                    cand.push((ids[i as usize], input[i as usize]));
                }
            }
            let mut left: Option<(VertexId, Point2)> = None;
            let mut right: Option<(VertexId, Point2)> = None;
            let mut blocked = false;
            for &(id, p) in &cand {
                tests += 1;
                match orient(pu, pw, p) {
                    Ordering::Greater => match left {
                        None => left = Some((id, p)),
                        Some((lid, lp)) if lid != id => {
                            tests += 1;
                            match incircle(pu, pw, lp, p) {
                                Ordering::Greater => left = Some((id, p)),
                                Ordering::Less => {}
                                Ordering::Equal => return Err(cocircular(pu, pw, lp, p)),
                            }
                        }
                        _ => {}
                    },
                    Ordering::Less => match right {
                        None => right = Some((id, p)),
                        Some((rid, rp)) if rid != id => {
                            tests += 1;
                            match incircle(pw, pu, rp, p) {
                                Ordering::Greater => right = Some((id, p)),
                                Ordering::Less => {}
                                Ordering::Equal => return Err(cocircular(pu, pw, rp, p)),
                            }
                        }
                        _ => {}
                    },
                    // A collinear point blocks the edge only when it lies
                    // strictly between the endpoints.
                    Ordering::Equal => {
                        blocked |= diametral(pu, pw, p) == Ordering::Less;
                    }
                }
            }
            if blocked {
                continue;
            }
            let (lid, lp) = left.expect("finite side has an apex");
            if let Some((rid, rp)) = right {
                tests += 1;
                match incircle(pu, pw, lp, rp) {
                    Ordering::Less => {}
                    Ordering::Greater => continue,
                    Ordering::Equal => return Err(cocircular(pu, pw, lp, rp)),
                }
                out.insert(sorted([u, w, rid]));
            }
            out.insert(sorted([u, w, lid]));
        }
    }
    Ok((out, tests))
}

fn cocircular(a: Point2, b: Point2, c: Point2, d: Point2) -> Error {
    Error::Degenerate(format!("points {a:?}, {b:?}, {c:?}, {d:?} are cocircular"))
}

/// Builds `T(V u I)` from the triangles of the local diagrams and the
/// surviving net edges, checking the triangle count first.
pub fn fuse_and_dualize(
    model: &DelaunayModel,
    input: &[Point2],
    ids: &[VertexId],
    tris: &BTreeSet<[VertexId; 3]>,
    verify: bool,
) -> Result<Assembly> {
    let tv = model.tv();
    let nv = tv.vertex_slots();
    let distinct = tv.present_vertices().count()
        + ids.iter().filter(|&&g| g as usize >= nv).count();
    if tris.len() + 5 != 2 * distinct {
        return Err(Error::Fusion(format!(
            "{} triangles for {} vertices, expected {}",
            tris.len(),
            distinct,
            2 * distinct - 5
        )));
    }
    let mut points = tv.points().to_vec();
    points.extend_from_slice(input);
    let list: Vec<[VertexId; 3]> = tris.iter().copied().collect();
    let fused = Triangulation::from_triangles(points, &list)
        .map_err(|e| Error::Fusion(format!("pieces do not form a triangulation: {e}")))?;
    if verify {
        fused
            .check_locally_delaunay()
            .map_err(|e| Error::Fusion(format!("fused triangulation is not Delaunay: {e}")))?;
    }
    Ok(Assembly { fused, ids: ids.to_vec(), nv })
}

/// Removes the net vertices that are not inputs, in a seeded random order,
/// and renumbers to the standard layout. Returns the triangulation, the
/// number of deletions and their predicate count.
pub fn split(
    model: &DelaunayModel,
    input: &[Point2],
    mut asm: Assembly,
    seed: u64,
) -> Result<(Triangulation, u32, u64)> {
    let keep: HashSet<VertexId> = asm.ids.iter().copied().collect();
    let mut order: Vec<VertexId> = (3..asm.nv as VertexId)
        .filter(|&v| asm.fused.is_present(v) && !keep.contains(&v))
        .collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let before = asm.fused.predicate_count();
    for &v in &order {
        asm.fused.remove_vertex(v)?;
    }
    let tests = asm.fused.predicate_count() - before;
    let mut map = vec![GHOST; asm.fused.vertex_slots()];
    for (b, m) in map.iter_mut().take(3).enumerate() {
        *m = b as VertexId;
    }
    for (i, &g) in asm.ids.iter().enumerate() {
        map[g as usize] = 3 + i as VertexId;
    }
    let mut points = model.bounding().to_vec();
    points.extend_from_slice(input);
    let out = asm.fused.relabel(points, &map)?;
    Ok((out, order.len() as u32, tests))
}

fn conflict_stats(rec: &ConflictRecord, report: &mut RunReport) {
    report.locate_steps = rec.locate_steps.iter().map(|&s| u64::from(s)).sum();
    report.fallback_uses = rec.fallback_uses;
    report.sum_conflicts = rec.sum_conflicts();
    report.walk_tests = rec.walk_tests;
    report.max_conflict = rec.z.iter().map(|z| z.len() as u32).max().unwrap_or(0);
}

/// Limiting-phase triangulation of `input` with the bounding triangle.
/// With `verify`, the fused triangulation is checked to be Delaunay and the
/// result is compared with the standard construction.
pub fn triangulate_limiting(
    model: &DelaunayModel,
    input: &[Point2],
    verify: bool,
) -> Result<LimitingOutcome> {
    check_distinct(input)?;
    let mut report = RunReport::default();
    let clock = Instant::now();
    let rec = conflicts(model, input)?;
    conflict_stats(&rec, &mut report);
    report.phase_ns[1] = ns(clock);
    let ids = global_ids(model, &rec);

    let clock = Instant::now();
    let geode = build_geode(model, &rec);
    report.pieces = geode.pieces.len() as u64;
    report.sum_piece = geode.sum_sizes();
    report.sum_piece_sq = geode.sum_squares();
    let (mut tris, local) = restricted_triangles(model, &geode, input, &ids)?;
    report.local_predicates = local;
    report.phase_ns[2] = ns(clock);

    let clock = Instant::now();
    let (edge_tris, edge) = edge_triangles(model, &rec, input, &ids)?;
    report.edge_predicates = edge;
    tris.extend(edge_tris);
    let asm = fuse_and_dualize(model, input, &ids, &tris, verify)?;
    report.phase_ns[3] = ns(clock);

    let clock = Instant::now();
    let (triangulation, deletions, split_tests) =
        split(model, input, asm, model.params().seed ^ SPLIT_SALT)?;
    report.deletions = deletions;
    report.split_predicates = split_tests;
    report.phase_ns[4] = ns(clock);
    // Location time is folded into the conflict phase; split it out by share.
    let total_walk = report.locate_steps + report.walk_tests;
    if total_walk > 0 {
        let share = report.phase_ns[1] as u128 * report.locate_steps as u128 / total_walk as u128;
        report.phase_ns[0] = share as u64;
        report.phase_ns[1] -= share as u64;
    }
    if verify {
        verify_against_standard(model, input, &triangulation)?;
    }
    Ok(LimitingOutcome {
        triangulation,
        report,
    })
}

fn verify_against_standard(model: &DelaunayModel, input: &[Point2], t: &Triangulation) -> Result<()> {
    let want = Triangulation::with_bounding(model.bounding(), input)?;
    if want.triangle_set() != t.triangle_set() {
        return Err(Error::Fusion(
            "limiting output differs from the standard triangulation".into(),
        ));
    }
    Ok(())
}

/// Alternative limiting path: inserts each input into a copy of `T(V)`
/// starting from its located triangle, then removes the net.
pub fn triangulate_insertion(
    model: &DelaunayModel,
    input: &[Point2],
    verify: bool,
) -> Result<LimitingOutcome> {
    check_distinct(input)?;
    if input.len() != model.n() {
        return invalid(format!("expected {} points, got {}", model.n(), input.len()));
    }
    let mut report = RunReport::default();
    let tv = model.tv();
    let clock = Instant::now();
    let mut starts = Vec::with_capacity(input.len());
    for (i, &q) in input.iter().enumerate() {
        let r = model.locate(i, q)?;
        report.locate_steps += u64::from(r.steps);
        report.fallback_uses += u32::from(r.used_fallback);
        starts.push(r.tri);
    }
    report.phase_ns[0] = ns(clock);

    let clock = Instant::now();
    let mut t = tv.clone();
    let before = t.predicate_count();
    let mut ids = Vec::with_capacity(input.len());
    for (i, &q) in input.iter().enumerate() {
        let on_vertex = tv.vertices(starts[i]).into_iter().find(|&v| tv.point(v) == q);
        match on_vertex {
            Some(v) => ids.push(v),
            None => ids.push(t.insert(q, starts[i])?),
        }
    }
    report.local_predicates = t.predicate_count() - before;
    report.phase_ns[2] = ns(clock);

    let clock = Instant::now();
    // Inserted vertices follow the net slots in insertion order, so the
    // split sees the same layout as after fusion (with inputs packed).
    let nv = tv.vertex_slots();
    let mut points = t.points().to_vec();
    points.truncate(nv);
    let mut slot = vec![GHOST; t.vertex_slots()];
    let mut gids = Vec::with_capacity(input.len());
    for (i, &g) in ids.iter().enumerate() {
        let target = if (g as usize) < nv { g } else { (nv + i) as VertexId };
        slot[g as usize] = target;
        gids.push(target);
    }
    for v in 0..nv {
        if slot[v] == GHOST {
            slot[v] = v as VertexId;
        }
    }
    points.extend_from_slice(input);
    let fused = t.relabel(points, &slot)?;
    let asm = Assembly { fused, ids: gids, nv };
    let (triangulation, deletions, split_tests) =
        split(model, input, asm, model.params().seed ^ SPLIT_SALT)?;
    report.deletions = deletions;
    report.split_predicates = split_tests;
    report.phase_ns[4] = ns(clock);
    if verify {
        verify_against_standard(model, input, &triangulation)?;
    }
    Ok(LimitingOutcome {
        triangulation,
        report,
    })
}
