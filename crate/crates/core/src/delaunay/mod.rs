//! Self-improving Delaunay triangulation.
//!
//! Training collects `lambda` instances, builds a net `V` of their union and
//! the Delaunay triangulation `T(V)` (with the bounding triangle), then learns
//! for every source where its point tends to fall in `T(V)`. In the limiting
//! phase each input point is located with its own biased locator, its
//! conflict triangles are collected by a walk, and `T(V u I)` is assembled
//! from small local triangulations before the net vertices are removed.

mod geode;
mod limiting;

use std::cmp::Ordering;
use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::epsnet::{build_net_greedy, build_net_repaired, build_net_sample, EpsNetResult, NetConfig, NetMethod};
use crate::error::{invalid, Error, Result};
use crate::geom::derived::DerivedPoint;
use crate::geom::predicates::{in_closed_triangle, incircle};
use crate::geom::triangulation::{TriId, Triangulation, VertexId};
use crate::geom::voronoi::{dualize, VoronoiDiagram};
use crate::geom::Point2;
use crate::locate::{locate, Located, SlabMap, TriangleLocator};
use crate::sorter::{ceil_log2, SorterParams};
use crate::sources::{sample_points, WorkloadSpec};

pub use geode::{build_geode, Geode, GeodePiece, PieceKind};
pub use limiting::{
    edge_triangles, fuse_and_dualize, global_ids, restricted_triangles, restricted_voronoi, split,
    triangulate_insertion, triangulate_limiting, Assembly, LimitingOutcome, LocalDiagram,
    RunReport,
};

/// Training parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelaunayParams {
    pub eps: f64,
    pub c: f64,
    pub net_method: NetMethod,
    pub net: NetConfig,
    /// Seed for the sampled net and the removal order of the split.
    pub seed: u64,
}

impl Default for DelaunayParams {
    fn default() -> Self {
        Self {
            eps: 0.5,
            c: 10.0,
            net_method: NetMethod::RepairedSample,
            net: NetConfig::default(),
            seed: 0,
        }
    }
}

impl DelaunayParams {
    fn rates(&self) -> SorterParams {
        SorterParams {
            eps: self.eps,
            c: self.c,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.rates().validate()
    }

    /// Instances merged into the net sample.
    pub fn lambda(n: usize) -> usize {
        SorterParams::lambda(n)
    }

    /// Instances used to learn the per-source locators.
    pub fn learning_rounds(&self, n: usize) -> usize {
        self.rates().learning_rounds(n)
    }

    /// Primitive tests a biased locator may spend before falling back.
    pub fn step_budget(n: usize) -> u32 {
        ceil_log2(n).max(1)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelData {
    n: usize,
    params: DelaunayParams,
    bounding: [Point2; 3],
    net: EpsNetResult,
    counts: Vec<Vec<(u32, u64)>>,
}

/// Trained structures for one input distribution.
#[derive(Clone, Debug)]
pub struct DelaunayModel {
    n: usize,
    params: DelaunayParams,
    bounding: [Point2; 3],
    net: EpsNetResult,
    tv: Triangulation,
    vor: VoronoiDiagram,
    centers: Vec<Option<DerivedPoint>>,
    map: SlabMap,
    fallback: TriangleLocator,
    locators: Vec<TriangleLocator>,
    /// Per source: (cell, times its point fell in the cell).
    counts: Vec<Vec<(u32, u64)>>,
}

impl Serialize for DelaunayModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModelData {
            n: self.n,
            params: self.params,
            bounding: self.bounding,
            net: self.net.clone(),
            counts: self.counts.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DelaunayModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let data = ModelData::deserialize(d)?;
        let base = NetStructures::build(data.bounding, data.net).map_err(serde::de::Error::custom)?;
        DelaunayModel::assemble(data.n, data.params, base, data.counts)
            .map_err(serde::de::Error::custom)
    }
}

/// Everything derived from the net alone.
#[derive(Clone, Debug)]
struct NetStructures {
    bounding: [Point2; 3],
    net: EpsNetResult,
    tv: Triangulation,
    map: SlabMap,
    fallback: TriangleLocator,
}

impl NetStructures {
    fn build(bounding: [Point2; 3], net: EpsNetResult) -> Result<Self> {
        let tv = Triangulation::with_bounding(bounding, &net.net)?;
        let map = SlabMap::build(&tv)?;
        let fallback = TriangleLocator::fallback(&map);
        Ok(Self {
            bounding,
            net,
            tv,
            map,
            fallback,
        })
    }
}

impl DelaunayModel {
    fn assemble(
        n: usize,
        params: DelaunayParams,
        base: NetStructures,
        counts: Vec<Vec<(u32, u64)>>,
    ) -> Result<Self> {
        if counts.len() != n {
            return invalid("count table does not match n");
        }
        let budget = DelaunayParams::step_budget(n);
        let mut locators = Vec::with_capacity(n);
        for c in &counts {
            let total: u64 = c.iter().map(|x| x.1).sum();
            let mass: Vec<(u32, f64)> = c
                .iter()
                .map(|&(cell, k)| (cell, k as f64 / total.max(1) as f64))
                .collect();
            locators.push(TriangleLocator::biased(&base.map, &mass, budget)?);
        }
        let tv = base.tv;
        let centers = (0..tv.tri_slots() as TriId)
            .map(|t| {
                (tv.is_alive(t) && !tv.is_ghost(t)).then(|| {
                    let [a, b, c] = tv.triangle_points(t);
                    DerivedPoint::circumcenter(a, b, c)
                })
            })
            .collect();
        Ok(Self {
            n,
            params,
            bounding: base.bounding,
            net: base.net,
            vor: dualize(&tv),
            tv,
            centers,
            map: base.map,
            fallback: base.fallback,
            locators,
            counts,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> &DelaunayParams {
        &self.params
    }

    pub fn bounding(&self) -> [Point2; 3] {
        self.bounding
    }

    pub fn net(&self) -> &EpsNetResult {
        &self.net
    }

    /// `T(V)`: vertices 0..3 are the bounding triangle, `3 + k` is net point `k`.
    pub fn tv(&self) -> &Triangulation {
        &self.tv
    }

    pub fn voronoi(&self) -> &VoronoiDiagram {
        &self.vor
    }

    /// Circumcenter of a finite triangle of `T(V)`.
    pub fn center(&self, t: TriId) -> &DerivedPoint {
        self.centers[t as usize]
            .as_ref()
            .expect("circumcenter of a finite triangle")
    }

    pub fn slab_map(&self) -> &SlabMap {
        &self.map
    }

    pub fn fallback(&self) -> &TriangleLocator {
        &self.fallback
    }

    pub fn locator(&self, i: usize) -> &TriangleLocator {
        &self.locators[i]
    }

    pub fn counts(&self, i: usize) -> &[(u32, u64)] {
        &self.counts[i]
    }

    /// Learned triangle counts of source `i` (sums over cells).
    pub fn triangle_counts(&self, i: usize) -> Vec<(TriId, u64)> {
        let mut m = std::collections::BTreeMap::new();
        for &(cell, k) in &self.counts[i] {
            *m.entry(self.map.cell_triangle(cell)).or_insert(0) += k;
        }
        m.into_iter().collect()
    }

    /// Locates input point `i` with its own locator.
    pub fn locate(&self, i: usize, q: Point2) -> Result<Located> {
        locate(&self.map, &self.tv, &self.locators[i], &self.fallback, q)
    }
}

/// Streams training instances into a model.
#[derive(Debug)]
pub struct DelaunayTrainer {
    n: usize,
    params: DelaunayParams,
    bounding: [Point2; 3],
    lambda: usize,
    rounds: usize,
    pending: Vec<Point2>,
    base: Option<NetStructures>,
    counts: Vec<std::collections::HashMap<u32, u64>>,
    seen: usize,
}

/// What one training instance cost.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingRound {
    /// Predicate evaluations of the standard construction.
    pub predicates: u64,
    /// Location steps in `T(V)` (zero during net rounds).
    pub locate_steps: u64,
    pub net_round: bool,
}

impl DelaunayTrainer {
    pub fn new(n: usize, bounding: [Point2; 3], params: DelaunayParams) -> Result<Self> {
        params.validate()?;
        if n == 0 {
            return invalid("n must be positive");
        }
        Ok(Self {
            n,
            params,
            bounding,
            lambda: DelaunayParams::lambda(n),
            rounds: params.learning_rounds(n),
            pending: Vec::new(),
            base: None,
            counts: vec![Default::default(); n],
            seen: 0,
        })
    }

    pub fn total_rounds(&self) -> usize {
        self.lambda + self.rounds
    }

    pub fn is_done(&self) -> bool {
        self.seen >= self.total_rounds()
    }

    /// Consumes one instance and returns its triangulation, computed by the
    /// standard randomized incremental construction.
    pub fn observe(&mut self, input: &[Point2]) -> Result<(Triangulation, TrainingRound)> {
        if input.len() != self.n {
            return invalid("instance length does not match n");
        }
        if self.is_done() {
            return invalid("training already complete");
        }
        let out = Triangulation::with_bounding(self.bounding, input)?;
        let mut round = TrainingRound {
            predicates: out.predicate_count(),
            locate_steps: 0,
            net_round: self.seen < self.lambda,
        };
        if round.net_round {
            self.pending.extend_from_slice(input);
            if self.seen + 1 == self.lambda {
                let lambda = self.lambda as u64;
                let net = match self.params.net_method {
                    NetMethod::Greedy => {
                        build_net_greedy(&self.pending, lambda, &self.params.net)?.result
                    }
                    NetMethod::RepairedSample => build_net_repaired(
                        &self.pending,
                        lambda,
                        self.n,
                        &self.params.net,
                        self.params.seed,
                    )?,
                    NetMethod::UniformSample => build_net_sample(
                        &self.pending,
                        lambda,
                        self.n,
                        &self.params.net,
                        self.params.seed,
                    )?,
                };
                self.base = Some(NetStructures::build(self.bounding, net)?);
                self.pending = Vec::new();
            }
        } else {
            let base = self.base.as_ref().expect("net built after the net rounds");
            for (i, &q) in input.iter().enumerate() {
                let r = locate(&base.map, &base.tv, &base.fallback, &base.fallback, q)?;
                round.locate_steps += u64::from(r.steps);
                *self.counts[i].entry(r.cell).or_insert(0) += 1;
            }
        }
        self.seen += 1;
        Ok((out, round))
    }

    pub fn finish(self) -> Result<DelaunayModel> {
        if !self.is_done() {
            return invalid(format!(
                "training needs {} instances, saw {}",
                self.total_rounds(),
                self.seen
            ));
        }
        let counts = self
            .counts
            .into_iter()
            .map(|m| {
                let mut v: Vec<(u32, u64)> = m.into_iter().collect();
                v.sort_unstable();
                v
            })
            .collect();
        let base = self.base.expect("net built");
        DelaunayModel::assemble(self.n, self.params, base, counts)
    }
}

/// Trains on rounds `0, 1, ...` of `spec`.
pub fn train_delaunay(spec: &WorkloadSpec, params: DelaunayParams) -> Result<DelaunayModel> {
    if spec.dim != 2 {
        return invalid("Delaunay training needs a 2-D workload");
    }
    let mut t = DelaunayTrainer::new(spec.n, spec.bounding_triangle(), params)?;
    let mut round = 0;
    while !t.is_done() {
        t.observe(&sample_points(spec, round)?)?;
        round += 1;
    }
    t.finish()
}

/// Triangles of `tv` whose circumdisk holds `q` strictly, found by a
/// breadth-first walk from `start`, which must contain `q`. Returns the set
/// (sorted) and the number of in-circle tests. A query equal to a vertex of
/// `start` has no conflicts.
pub fn conflict_walk(tv: &Triangulation, start: TriId, q: Point2) -> Result<(Vec<TriId>, u32)> {
    if !tv.is_alive(start) || tv.is_ghost(start) {
        return invalid(format!("{start} is not a finite triangle"));
    }
    let [a, b, c] = tv.triangle_points(start);
    if !in_closed_triangle(a, b, c, q) {
        return invalid(format!("triangle {start} does not contain {q:?}"));
    }
    if [a, b, c].contains(&q) {
        return Ok((Vec::new(), 0));
    }
    let mut seen = std::collections::HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    let mut out = Vec::new();
    let mut tests = 0;
    while let Some(t) = queue.pop_front() {
        let [a, b, c] = tv.triangle_points(t);
        tests += 1;
        match incircle(a, b, c, q) {
            Ordering::Greater => {}
            Ordering::Less => continue,
            Ordering::Equal => {
                return Err(Error::Degenerate(format!(
                    "point ({}, {}) is cocircular with triangle {t}",
                    q.x, q.y
                )))
            }
        }
        out.push(t);
        for nb in tv.neighbors(t) {
            if !tv.is_ghost(nb) && seen.insert(nb) {
                queue.push_back(nb);
            }
        }
    }
    out.sort_unstable();
    Ok((out, tests))
}

/// Conflict structure of one input against `T(V)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConflictRecord {
    /// Triangle of `T(V)` holding each input point.
    pub start: Vec<TriId>,
    /// Conflict triangles of each input point.
    pub s: Vec<Vec<TriId>>,
    /// Input points (indices) in conflict with each triangle slot.
    pub z: Vec<Vec<u32>>,
    /// Net vertex equal to each input point, if any.
    pub coincident: Vec<Option<VertexId>>,
    pub locate_steps: Vec<u32>,
    pub fallback_uses: u32,
    pub walk_tests: u64,
}

impl ConflictRecord {
    /// `X_t` for every triangle slot.
    pub fn x(&self) -> Vec<u32> {
        self.z.iter().map(|z| z.len() as u32).collect()
    }

    pub fn sum_conflicts(&self) -> u64 {
        self.s.iter().map(|s| s.len() as u64).sum()
    }
}

/// Locates every input point and collects its conflict triangles.
pub fn conflicts(model: &DelaunayModel, input: &[Point2]) -> Result<ConflictRecord> {
    if input.len() != model.n {
        return invalid(format!("expected {} points, got {}", model.n, input.len()));
    }
    let tv = &model.tv;
    let mut rec = ConflictRecord {
        z: vec![Vec::new(); tv.tri_slots()],
        ..Default::default()
    };
    for (i, &q) in input.iter().enumerate() {
        let r = model.locate(i, q)?;
        rec.locate_steps.push(r.steps);
        rec.fallback_uses += u32::from(r.used_fallback);
        let (s, tests) = conflict_walk(tv, r.tri, q)?;
        rec.walk_tests += u64::from(tests);
        rec.coincident
            .push(tv.vertices(r.tri).into_iter().find(|&v| tv.point(v) == q));
        for &t in &s {
            rec.z[t as usize].push(i as u32);
        }
        rec.start.push(r.tri);
        rec.s.push(s);
    }
    Ok(rec)
}
