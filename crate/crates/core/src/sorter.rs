//! Self-improving sorter for product distributions of reals.
//!
//! Training first merges `lambda = ceil(log2 n)` instances into a V-list of
//! `n` bucket boundaries, then counts for `M = ceil(c * n^eps)` more instances
//! which bucket every position falls into. Each position gets its own
//! weight-balanced tree over the buckets it hit; in the limiting phase a value
//! is routed through its tree (or a balanced fallback tree) and buckets are
//! finished by binary insertion sort.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sources::{sample_values, WorkloadSpec};
use crate::wbst::{bucket_probe, SearchShape};

/// Value with the tie-break used throughout: by value, then position, then
/// the training round that produced it.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SortKey {
    pub value: f64,
    pub index: u32,
    pub round: u32,
}

/// Round tag of keys built from limiting-phase inputs.
pub const LIMIT_ROUND: u32 = u32::MAX;

impl SortKey {
    fn limiting(value: f64, index: usize) -> Self {
        Self {
            value,
            index: index as u32,
            round: LIMIT_ROUND,
        }
    }

    const NEG_INF: SortKey = SortKey {
        value: f64::NEG_INFINITY,
        index: 0,
        round: 0,
    };
}

impl PartialEq for SortKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for SortKey {}

impl PartialOrd for SortKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SortKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then(self.index.cmp(&other.index))
            .then(self.round.cmp(&other.round))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SorterParams {
    pub eps: f64,
    pub c: f64,
}

impl Default for SorterParams {
    fn default() -> Self {
        Self { eps: 0.5, c: 10.0 }
    }
}

impl SorterParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return invalid(format!("eps must be in (0, 1], got {}", self.eps));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return invalid(format!("c must be positive, got {}", self.c));
        }
        Ok(())
    }

    /// Rounds used to build the V-list.
    pub fn lambda(n: usize) -> usize {
        ceil_log2(n).max(1) as usize
    }

    /// Rounds used to learn the per-position distributions.
    pub fn learning_rounds(&self, n: usize) -> usize {
        (self.c * (n as f64).powf(self.eps)).ceil() as usize
    }

    pub fn depth_budget(&self, n: usize) -> u32 {
        (self.eps * (n as f64).log2()).ceil().max(0.0) as u32
    }
}

pub(crate) fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Cost counters of one limiting-phase sort.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SortReport {
    /// Key comparisons: two per tree node visited plus the insertion sorts.
    pub comparisons: u64,
    /// Tree nodes visited while routing values to buckets.
    pub steps_phase1: u64,
    /// Comparisons spent inside buckets.
    pub steps_phase2: u64,
    pub max_bucket: usize,
    /// Sum over buckets of the squared bucket size.
    pub sum_sq_bucket: u64,
    /// Positions routed through the fallback tree.
    pub fallback_uses: u64,
}

/// Output of one limiting-phase sort.
#[derive(Clone, Debug, PartialEq)]
pub struct SortOutcome {
    /// `(value, original position)` pairs in sorted order.
    pub sorted: Vec<(f64, usize)>,
    /// Bucket of every position.
    pub buckets: Vec<u32>,
    pub report: SortReport,
}

/// Trained sorter.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "SorterModelData", into = "SorterModelData")]
pub struct SorterModel {
    n: usize,
    params: SorterParams,
    /// `-inf` followed by the V-list.
    keys: Vec<SortKey>,
    /// Per position, sorted `(bucket, count)` pairs observed in training.
    counts: Vec<Vec<(u32, u64)>>,
    trees: Vec<SearchShape>,
    fallback: SearchShape,
}

#[derive(Serialize, Deserialize)]
struct SorterModelData {
    n: usize,
    params: SorterParams,
    vlist: Vec<SortKey>,
    counts: Vec<Vec<(u32, u64)>>,
}

impl From<SorterModel> for SorterModelData {
    fn from(m: SorterModel) -> Self {
        Self {
            n: m.n,
            params: m.params,
            vlist: m.keys[1..].to_vec(),
            counts: m.counts,
        }
    }
}

impl TryFrom<SorterModelData> for SorterModel {
    type Error = Error;
    fn try_from(d: SorterModelData) -> Result<Self> {
        let mut keys = Vec::with_capacity(d.vlist.len() + 1);
        keys.push(SortKey::NEG_INF);
        keys.extend(d.vlist);
        SorterModel::assemble(d.n, d.params, keys, d.counts)
    }
}

impl SorterModel {
    fn assemble(
        n: usize,
        params: SorterParams,
        keys: Vec<SortKey>,
        counts: Vec<Vec<(u32, u64)>>,
    ) -> Result<Self> {
        params.validate()?;
        if keys.len() != n + 1 || counts.len() != n {
            return invalid("model dimensions do not match n");
        }
        if keys.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("V-list is not strictly increasing");
        }
        let budget = params.depth_budget(n);
        let mut trees = Vec::with_capacity(n);
        for c in &counts {
            let mut w = vec![0.0; keys.len()];
            for &(b, k) in c {
                let slot = w
                    .get_mut(b as usize)
                    .ok_or_else(|| Error::Validation(format!("bucket {b} out of range")))?;
                *slot = k as f64;
            }
            trees.push(SearchShape::weighted(&w, Some(budget))?);
        }
        Ok(Self {
            n,
            params,
            fallback: SearchShape::balanced(keys.len()),
            keys,
            counts,
            trees,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> SorterParams {
        self.params
    }

    /// The V-list (without sentinels).
    pub fn vlist(&self) -> &[SortKey] {
        &self.keys[1..]
    }

    /// Number of buckets, `n + 1`.
    pub fn num_buckets(&self) -> usize {
        self.keys.len()
    }

    pub fn tree(&self, i: usize) -> &SearchShape {
        &self.trees[i]
    }

    /// Training counts of position `i` as `(bucket, count)` pairs.
    pub fn counts(&self, i: usize) -> &[(u32, u64)] {
        &self.counts[i]
    }

    /// Bucket of `value` at position `index` by direct binary search.
    pub fn bucket_of(&self, value: f64, index: usize) -> u32 {
        let key = SortKey::limiting(value, index);
        (self.keys.partition_point(|k| *k <= key) - 1) as u32
    }

    fn route(&self, i: usize, x: f64) -> (u32, u64, bool) {
        let key = SortKey::limiting(x, i);
        let keys = &self.keys;
        let r = self.trees[i].search(|k| bucket_probe(keys, k as usize, &key));
        match r.bucket {
            Some(b) => (b, u64::from(r.steps), false),
            None => {
                let f = self.fallback.search(|k| bucket_probe(keys, k as usize, &key));
                let b = f.bucket.expect("fallback tree covers every bucket");
                (b, u64::from(r.steps + f.steps), true)
            }
        }
    }

    /// Sorts one instance with the trained structures.
    pub fn sort_limiting(&self, input: &[f64]) -> Result<SortOutcome> {
        if input.len() != self.n {
            return invalid(format!(
                "input has length {}, model expects {}",
                input.len(),
                self.n
            ));
        }
        if input.iter().any(|x| !x.is_finite()) {
            return invalid("non-finite input value");
        }
        let mut report = SortReport::default();
        let mut buckets = Vec::with_capacity(self.n);
        for (i, &x) in input.iter().enumerate() {
            let (b, steps, fell) = self.route(i, x);
            report.steps_phase1 += steps;
            report.fallback_uses += u64::from(fell);
            buckets.push(b);
        }
        // Distribute positions into buckets, then finish each bucket.
        let nb = self.keys.len();
        let mut start = vec![0usize; nb + 1];
        for &b in &buckets {
            start[b as usize + 1] += 1;
        }
        for k in 0..nb {
            start[k + 1] += start[k];
        }
        let mut fill = start.clone();
        let mut order = vec![0usize; self.n];
        for (i, &b) in buckets.iter().enumerate() {
            order[fill[b as usize]] = i;
            fill[b as usize] += 1;
        }
        for k in 0..nb {
            let slice = &mut order[start[k]..start[k + 1]];
            let s = slice.len();
            report.max_bucket = report.max_bucket.max(s);
            report.sum_sq_bucket += (s * s) as u64;
            report.steps_phase2 += binary_insertion_sort(slice, input);
        }
        report.comparisons = 2 * report.steps_phase1 + report.steps_phase2;
        Ok(SortOutcome {
            sorted: order.iter().map(|&i| (input[i], i)).collect(),
            buckets,
            report,
        })
    }
}

fn key_cmp(input: &[f64], a: usize, b: usize) -> Ordering {
    input[a].total_cmp(&input[b]).then(a.cmp(&b))
}

/// Sorts positions by `(value, position)`; returns comparisons made.
fn binary_insertion_sort(slice: &mut [usize], input: &[f64]) -> u64 {
    let mut comparisons = 0;
    for j in 1..slice.len() {
        let item = slice[j];
        let (mut lo, mut hi) = (0, j);
        while lo < hi {
            let mid = (lo + hi) / 2;
            comparisons += 1;
            if key_cmp(input, slice[mid], item) == Ordering::Greater {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        slice.copy_within(lo..j, lo + 1);
        slice[lo] = item;
    }
    comparisons
}

/// Top-down mergesort by `(value, position)`; returns the sorted positions
/// and the number of comparisons.
pub fn mergesort_with_count(input: &[f64]) -> (Vec<usize>, u64) {
    let mut idx: Vec<usize> = (0..input.len()).collect();
    let mut buf = idx.clone();
    let mut count = 0;
    merge_rec(&mut idx, &mut buf, input, &mut count);
    (idx, count)
}

fn merge_rec(a: &mut [usize], buf: &mut [usize], input: &[f64], count: &mut u64) {
    let n = a.len();
    if n <= 1 {
        return;
    }
    let mid = n / 2;
    {
        let (l, r) = a.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_rec(l, bl, input, count);
        merge_rec(r, br, input, count);
    }
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        *count += 1;
        if key_cmp(input, a[i], a[j]) != Ordering::Greater {
            buf[k] = a[i];
            i += 1;
        } else {
            buf[k] = a[j];
            j += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&a[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&a[j..n]);
    a.copy_from_slice(&buf[..n]);
}

/// Builds the V-list from `lambda` instances: the merged values at ranks
/// `lambda, 2 lambda, ..., n lambda` (1-based).
pub fn build_vlist(training: &[Vec<f64>]) -> Result<Vec<SortKey>> {
    let Some(first) = training.first() else {
        return invalid("no training instances");
    };
    let n = first.len();
    let lambda = training.len();
    let mut all = Vec::with_capacity(n * lambda);
    for (r, inst) in training.iter().enumerate() {
        if inst.len() != n {
            return invalid("training instances differ in length");
        }
        for (i, &x) in inst.iter().enumerate() {
            if !x.is_finite() {
                return invalid("non-finite training value");
            }
            all.push(SortKey {
                value: x,
                index: i as u32,
                round: r as u32,
            });
        }
    }
    all.sort_unstable();
    Ok((1..=n).map(|k| all[k * lambda - 1]).collect())
}

/// Per-round bookkeeping of a training instance.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TrainingRound {
    /// Comparisons spent producing the sorted output and, once the V-list
    /// exists, locating buckets by binary search.
    pub comparisons: u64,
    /// Whether this round fed the V-list (true) or the bucket counts (false).
    pub vlist_round: bool,
}

/// Incremental trainer: feed instances one at a time.
#[derive(Clone, Debug)]
pub struct SorterTrainer {
    n: usize,
    params: SorterParams,
    lambda: usize,
    rounds: usize,
    pending: Vec<Vec<f64>>,
    keys: Vec<SortKey>,
    counts: Vec<HashMap<u32, u64>>,
    seen: usize,
}

impl SorterTrainer {
    pub fn new(n: usize, params: SorterParams) -> Result<Self> {
        params.validate()?;
        if n == 0 {
            return invalid("n must be positive");
        }
        Ok(Self {
            n,
            params,
            lambda: SorterParams::lambda(n),
            rounds: params.learning_rounds(n),
            pending: Vec::new(),
            keys: Vec::new(),
            counts: vec![HashMap::new(); n],
            seen: 0,
        })
    }

    /// Total number of training instances.
    pub fn total_rounds(&self) -> usize {
        self.lambda + self.rounds
    }

    pub fn is_done(&self) -> bool {
        self.seen >= self.total_rounds()
    }

    /// Consumes one instance and returns its sorted output.
    pub fn observe(&mut self, input: &[f64]) -> Result<(Vec<(f64, usize)>, TrainingRound)> {
        if input.len() != self.n {
            return invalid("instance length does not match n");
        }
        if self.is_done() {
            return invalid("training already complete");
        }
        let (order, mut comparisons) = mergesort_with_count(input);
        let vlist_round = self.seen < self.lambda;
        if vlist_round {
            self.pending.push(input.to_vec());
            if self.pending.len() == self.lambda {
                let mut keys = vec![SortKey::NEG_INF];
                keys.extend(build_vlist(&self.pending)?);
                self.keys = keys;
                self.pending.clear();
            }
        } else {
            for (i, &x) in input.iter().enumerate() {
                let key = SortKey::limiting(x, i);
                let (b, c) = predecessor(&self.keys, &key);
                comparisons += c;
                *self.counts[i].entry(b).or_insert(0) += 1;
            }
        }
        self.seen += 1;
        Ok((
            order.into_iter().map(|i| (input[i], i)).collect(),
            TrainingRound {
                comparisons,
                vlist_round,
            },
        ))
    }

    pub fn finish(self) -> Result<SorterModel> {
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
        SorterModel::assemble(self.n, self.params, self.keys, counts)
    }
}

/// Largest `k` with `keys[k] <= x` (keys[0] is `-inf`), with the comparisons made.
fn predecessor(keys: &[SortKey], x: &SortKey) -> (u32, u64) {
    let (mut lo, mut hi) = (0usize, keys.len());
    let mut c = 0;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        c += 1;
        if keys[mid] <= *x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo as u32, c)
}

/// Trains on rounds `0, 1, ...` of `spec`.
pub fn train_sorter(spec: &WorkloadSpec, params: SorterParams) -> Result<SorterModel> {
    let mut t = SorterTrainer::new(spec.n, params)?;
    let mut round = 0;
    while !t.is_done() {
        t.observe(&sample_values(spec, round)?)?;
        round += 1;
    }
    t.finish()
}

/// Mean and mean square of every bucket size over `trials` instances
/// starting at round `first_round`.
pub fn bucket_moments(
    model: &SorterModel,
    spec: &WorkloadSpec,
    first_round: u64,
    trials: usize,
) -> Result<Vec<(f64, f64)>> {
    let mut sum = vec![0u64; model.num_buckets()];
    let mut sum_sq = vec![0u64; model.num_buckets()];
    let mut sizes = vec![0u64; model.num_buckets()];
    for t in 0..trials {
        let x = sample_values(spec, first_round + t as u64)?;
        sizes.iter_mut().for_each(|s| *s = 0);
        for (i, &v) in x.iter().enumerate() {
            sizes[model.bucket_of(v, i) as usize] += 1;
        }
        for (k, &s) in sizes.iter().enumerate() {
            sum[k] += s;
            sum_sq[k] += s * s;
        }
    }
    let t = trials.max(1) as f64;
    Ok(sum
        .iter()
        .zip(&sum_sq)
        .map(|(&s, &q)| (s as f64 / t, q as f64 / t))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log2_ceiling() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(1024), 10);
    }

    #[test]
    fn binary_insertion_sorts() {
        let input = [3.0, 1.0, 2.0, 1.0];
        let mut s = vec![0, 1, 2, 3];
        binary_insertion_sort(&mut s, &input);
        assert_eq!(s, vec![1, 3, 2, 0]);
    }
}
