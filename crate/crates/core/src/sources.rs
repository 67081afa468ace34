//! Input distributions and deterministic instance generation.
//!
//! A workload is a product distribution: position `i` of every instance is
//! drawn independently from `sources[i]`. The draw for (seed, round, position)
//! is reproducible on its own, without replaying earlier rounds.

use std::cmp::Ordering;
use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geom::predicates::{in_open_triangle, orient};
use crate::geom::triangulation::Triangulation;
use crate::geom::Point2;

/// A real number (one dimension) or a point (two dimensions).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Scalar(f64),
    Point(Point2),
}

impl Value {
    fn dim(&self) -> u8 {
        match self {
            Value::Scalar(_) => 1,
            Value::Point(_) => 2,
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            Value::Scalar(x) => x.is_finite(),
            Value::Point(p) => p.is_finite(),
        }
    }

    pub fn scalar(&self) -> Option<f64> {
        match self {
            Value::Scalar(x) => Some(*x),
            Value::Point(_) => None,
        }
    }

    pub fn point(&self) -> Option<Point2> {
        match self {
            Value::Point(p) => Some(*p),
            Value::Scalar(_) => None,
        }
    }
}

/// Distribution of a single input position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SourceModel {
    PointMass {
        value: Value,
    },
    FiniteSupport {
        support: Vec<Value>,
        masses: Vec<f64>,
    },
    /// Uniform on `[lo, hi)`; in two dimensions, uniform on the box spanned by
    /// the two corners.
    UniformInterval {
        lo: Value,
        hi: Value,
    },
    /// Normal with the given mean; isotropic in two dimensions.
    Gaussian {
        mean: Value,
        std_dev: f64,
    },
    /// `a` and `b` with probability one half each.
    TwoPoint {
        a: Value,
        b: Value,
    },
    Mixture {
        components: Vec<SourceModel>,
        weights: Vec<f64>,
    },
}

fn check_masses(masses: &[f64]) -> Result<()> {
    if masses.is_empty() {
        return invalid("empty mass vector");
    }
    let mut total = 0.0;
    for &m in masses {
        if !m.is_finite() || m < 0.0 {
            return invalid(format!("mass {m} is not finite and non-negative"));
        }
        total += m;
    }
    if (total - 1.0).abs() > 1e-6 {
        return invalid(format!("masses sum to {total}, not 1"));
    }
    Ok(())
}

fn pick(rng: &mut ChaCha8Rng, masses: &[f64]) -> usize {
    let u: f64 = rng.random::<f64>() * masses.iter().sum::<f64>();
    let mut acc = 0.0;
    for (i, &m) in masses.iter().enumerate() {
        acc += m;
        if u < acc {
            return i;
        }
    }
    masses.iter().rposition(|&m| m > 0.0).unwrap_or(0)
}

impl SourceModel {
    /// Checks parameters against the dimension.
    pub fn validate(&self, dim: u8) -> Result<()> {
        let check = |v: &Value| -> Result<()> {
            if v.dim() != dim {
                return invalid(format!("value {v:?} does not have dimension {dim}"));
            }
            if !v.is_finite() {
                return invalid("non-finite parameter");
            }
            Ok(())
        };
        match self {
            SourceModel::PointMass { value } => check(value),
            SourceModel::FiniteSupport { support, masses } => {
                if support.len() != masses.len() {
                    return invalid("support and masses differ in length");
                }
                support.iter().try_for_each(check)?;
                check_masses(masses)
            }
            SourceModel::UniformInterval { lo, hi } => {
                check(lo)?;
                check(hi)?;
                let ok = match (lo, hi) {
                    (Value::Scalar(a), Value::Scalar(b)) => a < b,
                    (Value::Point(a), Value::Point(b)) => a.x < b.x && a.y < b.y,
                    _ => false,
                };
                if !ok {
                    return invalid("uniform-interval needs lo < hi in every coordinate");
                }
                Ok(())
            }
            SourceModel::Gaussian { mean, std_dev } => {
                check(mean)?;
                if !(std_dev.is_finite() && *std_dev > 0.0) {
                    return invalid("gaussian std_dev must be positive");
                }
                Ok(())
            }
            SourceModel::TwoPoint { a, b } => {
                check(a)?;
                check(b)
            }
            SourceModel::Mixture {
                components,
                weights,
            } => {
                if components.len() != weights.len() {
                    return invalid("mixture components and weights differ in length");
                }
                check_masses(weights)?;
                components.iter().try_for_each(|c| c.validate(dim))
            }
        }
    }

    /// Draws one value.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Value {
        match self {
            SourceModel::PointMass { value } => *value,
            SourceModel::FiniteSupport { support, masses } => support[pick(rng, masses)],
            SourceModel::UniformInterval { lo, hi } => match (lo, hi) {
                (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(rng.random_range(*a..*b)),
                (Value::Point(a), Value::Point(b)) => Value::Point(Point2::new(
                    rng.random_range(a.x..b.x),
                    rng.random_range(a.y..b.y),
                )),
                _ => unreachable!("validated"),
            },
            SourceModel::Gaussian { mean, std_dev } => {
                let normal = Normal::new(0.0, *std_dev).expect("validated std_dev");
                match mean {
                    Value::Scalar(m) => Value::Scalar(m + normal.sample(rng)),
                    Value::Point(m) => {
                        Value::Point(Point2::new(m.x + normal.sample(rng), m.y + normal.sample(rng)))
                    }
                }
            }
            SourceModel::TwoPoint { a, b } => {
                if rng.random::<bool>() {
                    *a
                } else {
                    *b
                }
            }
            SourceModel::Mixture {
                components,
                weights,
            } => components[pick(rng, weights)].sample(rng),
        }
    }

    /// Whether the distribution has finite support.
    pub fn is_discrete(&self) -> bool {
        match self {
            SourceModel::PointMass { .. }
            | SourceModel::FiniteSupport { .. }
            | SourceModel::TwoPoint { .. } => true,
            SourceModel::UniformInterval { .. } | SourceModel::Gaussian { .. } => false,
            SourceModel::Mixture { components, .. } => components.iter().all(|c| c.is_discrete()),
        }
    }

    /// Support points with their masses, for discrete sources.
    pub fn atoms(&self) -> Option<Vec<(Value, f64)>> {
        match self {
            SourceModel::PointMass { value } => Some(vec![(*value, 1.0)]),
            SourceModel::FiniteSupport { support, masses } => {
                Some(support.iter().copied().zip(masses.iter().copied()).collect())
            }
            SourceModel::TwoPoint { a, b } => Some(vec![(*a, 0.5), (*b, 0.5)]),
            SourceModel::Mixture {
                components,
                weights,
            } => {
                let mut out = Vec::new();
                for (c, &w) in components.iter().zip(weights) {
                    for (v, m) in c.atoms()? {
                        out.push((v, m * w));
                    }
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Whether some support point lies outside the open triangle.
    fn escapes(&self, b: &[Point2; 3]) -> bool {
        match self.atoms() {
            Some(atoms) => atoms.iter().any(|(v, m)| {
                *m > 0.0 && !v.point().is_some_and(|p| inside_bounding(b, p))
            }),
            None => false,
        }
    }
}

/// The default bounding triangle; it contains the unit square with a wide margin.
pub const DEFAULT_BOUNDING: [Point2; 3] = [
    Point2::new(-64.0, -64.0),
    Point2::new(96.0, -62.0),
    Point2::new(0.25, 100.0),
];

fn inside_bounding(b: &[Point2; 3], p: Point2) -> bool {
    if orient(b[0], b[1], b[2]) == Ordering::Greater {
        in_open_triangle(b[0], b[1], b[2], p)
    } else {
        in_open_triangle(b[0], b[2], b[1], p)
    }
}

/// A product distribution over inputs of length `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    pub n: usize,
    pub dim: u8,
    pub seed: u64,
    pub sources: Vec<SourceModel>,
    /// Bounding triangle for two-dimensional workloads.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounding: Option<[Point2; 3]>,
}

/// One instance drawn from a workload.
#[derive(Clone, Debug, PartialEq)]
pub enum Input {
    Values(Vec<f64>),
    Points(Vec<Point2>),
}

impl Input {
    pub fn len(&self) -> usize {
        match self {
            Input::Values(v) => v.len(),
            Input::Points(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

const MAX_REDRAWS: u32 = 1000;
const MAX_INSTANCE_REDRAWS: u32 = 16;

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for the draw at (seed, round, position, attempt).
pub fn draw_rng(seed: u64, round: u64, position: u64, attempt: u64) -> ChaCha8Rng {
    let s = mix(mix(mix(mix(seed) ^ round) ^ position) ^ attempt);
    ChaCha8Rng::seed_from_u64(s)
}

impl WorkloadSpec {
    pub fn bounding_triangle(&self) -> [Point2; 3] {
        self.bounding.unwrap_or(DEFAULT_BOUNDING)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return invalid("n must be positive");
        }
        if self.dim != 1 && self.dim != 2 {
            return invalid(format!("dim must be 1 or 2, got {}", self.dim));
        }
        if self.sources.len() != self.n {
            return invalid(format!(
                "{} sources given for n = {}",
                self.sources.len(),
                self.n
            ));
        }
        for s in &self.sources {
            s.validate(self.dim)?;
        }
        if self.dim == 2 {
            let b = self.bounding_triangle();
            if orient(b[0], b[1], b[2]) == Ordering::Equal {
                return invalid("bounding triangle is flat");
            }
            let mut seen: HashSet<(u64, u64)> = HashSet::new();
            for (i, s) in self.sources.iter().enumerate() {
                if s.escapes(&b) {
                    return invalid(format!(
                        "source {i} has support outside the bounding triangle"
                    ));
                }
                if let Some(atoms) = s.atoms() {
                    let own: HashSet<(u64, u64)> = atoms
                        .iter()
                        .filter(|(_, m)| *m > 0.0)
                        .map(|(v, _)| v.point().unwrap().key())
                        .collect();
                    for k in own {
                        if !seen.insert(k) {
                            return invalid(format!(
                                "support of source {i} overlaps another source"
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: WorkloadSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("workload serializes")
    }
}

/// Draws the instance for `round`.
pub fn sample_input(spec: &WorkloadSpec, round: u64) -> Result<Input> {
    match spec.dim {
        1 => sample_values(spec, round).map(Input::Values),
        2 => sample_points(spec, round).map(Input::Points),
        d => invalid(format!("unsupported dimension {d}")),
    }
}

/// Draws a one-dimensional instance.
pub fn sample_values(spec: &WorkloadSpec, round: u64) -> Result<Vec<f64>> {
    if spec.dim != 1 {
        return invalid("workload is not one-dimensional");
    }
    Ok(spec
        .sources
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut rng = draw_rng(spec.seed, round, i as u64, 0);
            s.sample(&mut rng).scalar().expect("validated dimension")
        })
        .collect())
}

/// Draws a two-dimensional instance: every point strictly inside the
/// bounding triangle, no duplicates, and no exact degeneracy in the
/// Delaunay triangulation of the points together with the bounding
/// triangle. Continuous positions are redrawn until these hold.
pub fn sample_points(spec: &WorkloadSpec, round: u64) -> Result<Vec<Point2>> {
    if spec.dim != 2 {
        return invalid("workload is not two-dimensional");
    }
    let b = spec.bounding_triangle();
    let mut last_err = None;
    for instance_attempt in 0..MAX_INSTANCE_REDRAWS {
        let mut pts = Vec::with_capacity(spec.n);
        let mut seen: HashSet<(u64, u64)> = HashSet::with_capacity(spec.n);
        for (i, s) in spec.sources.iter().enumerate() {
            let salt = u64::from(instance_attempt) << 32;
            let mut attempt = 0u64;
            let p = loop {
                let a = if s.is_discrete() { 0 } else { salt | attempt };
                let mut rng = draw_rng(spec.seed, round, i as u64, a);
                let p = s.sample(&mut rng).point().expect("validated dimension");
                if inside_bounding(&b, p) && !seen.contains(&p.key()) {
                    break p;
                }
                attempt += 1;
                if s.is_discrete() || attempt >= u64::from(MAX_REDRAWS) {
                    return Err(Error::Degenerate(format!(
                        "position {i} cannot be drawn inside the bounding triangle without duplicates"
                    )));
                }
            };
            seen.insert(p.key());
            pts.push(p);
        }
        match Triangulation::with_bounding(b, &pts) {
            Ok(_) => return Ok(pts),
            Err(Error::Degenerate(msg)) => {
                if spec.sources.iter().all(|s| s.is_discrete()) {
                    return Err(Error::Degenerate(msg));
                }
                last_err = Some(msg);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Degenerate(last_err.unwrap_or_default()))
}

/// Indices of `values` in sorted order, ties broken by index.
pub fn canonical_permutation(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx
}

/// Standard workload families.
pub mod families {
    use super::*;

    pub const ONE_D: [&str; 5] = [
        "point-mass",
        "two-point",
        "finite-support",
        "uniform",
        "gaussian-mixture",
    ];
    pub const TWO_D: [&str; 4] = ["uniform-square", "point-mass-2d", "concentrated", "clustered"];

    fn family_rng(name: &str, n: usize, seed: u64) -> ChaCha8Rng {
        let mut h = mix(seed ^ 0xfa31_1e5);
        for b in name.bytes() {
            h = mix(h ^ u64::from(b));
        }
        ChaCha8Rng::seed_from_u64(mix(h ^ n as u64))
    }

    fn unit_point(rng: &mut ChaCha8Rng) -> Point2 {
        Point2::new(rng.random::<f64>(), rng.random::<f64>())
    }

    /// Builds the named family with `n` positions; `seed` fixes both the
    /// family parameters and the instance stream.
    pub fn build(name: &str, n: usize, seed: u64) -> Result<WorkloadSpec> {
        let mut rng = family_rng(name, n, seed);
        let (dim, sources): (u8, Vec<SourceModel>) = match name {
            "point-mass" => (
                1,
                (0..n)
                    .map(|_| SourceModel::PointMass {
                        value: Value::Scalar(rng.random()),
                    })
                    .collect(),
            ),
            "two-point" => (
                1,
                (0..n)
                    .map(|_| SourceModel::TwoPoint {
                        a: Value::Scalar(rng.random()),
                        b: Value::Scalar(rng.random()),
                    })
                    .collect(),
            ),
            "finite-support" => (
                1,
                (0..n)
                    .map(|_| {
                        let raw: Vec<f64> = (0..4).map(|_| rng.random::<f64>() + 0.05).collect();
                        let total: f64 = raw.iter().sum();
                        SourceModel::FiniteSupport {
                            support: (0..4).map(|_| Value::Scalar(rng.random())).collect(),
                            masses: raw.iter().map(|m| m / total).collect(),
                        }
                    })
                    .collect(),
            ),
            "uniform" => (
                1,
                (0..n)
                    .map(|_| SourceModel::UniformInterval {
                        lo: Value::Scalar(0.0),
                        hi: Value::Scalar(1.0),
                    })
                    .collect(),
            ),
            "gaussian-mixture" => (
                1,
                (0..n)
                    .map(|_| SourceModel::Mixture {
                        components: vec![
                            SourceModel::Gaussian {
                                mean: Value::Scalar(rng.random()),
                                std_dev: 0.5 / n as f64,
                            },
                            SourceModel::Gaussian {
                                mean: Value::Scalar(rng.random()),
                                std_dev: 0.5 / n as f64,
                            },
                        ],
                        weights: vec![0.5, 0.5],
                    })
                    .collect(),
            ),
            "uniform-square" => (
                2,
                (0..n)
                    .map(|_| SourceModel::UniformInterval {
                        lo: Value::Point(Point2::new(0.0, 0.0)),
                        hi: Value::Point(Point2::new(1.0, 1.0)),
                    })
                    .collect(),
            ),
            "point-mass-2d" => (
                2,
                (0..n)
                    .map(|_| SourceModel::PointMass {
                        value: Value::Point(unit_point(&mut rng)),
                    })
                    .collect(),
            ),
            "concentrated" => (
                2,
                (0..n)
                    .map(|_| SourceModel::FiniteSupport {
                        support: vec![
                            Value::Point(unit_point(&mut rng)),
                            Value::Point(unit_point(&mut rng)),
                        ],
                        masses: vec![0.9, 0.1],
                    })
                    .collect(),
            ),
            "clustered" => (
                2,
                (0..n)
                    .map(|_| SourceModel::Gaussian {
                        mean: Value::Point(unit_point(&mut rng)),
                        std_dev: 0.02,
                    })
                    .collect(),
            ),
            other => return invalid(format!("unknown workload family '{other}'")),
        };
        let spec = WorkloadSpec {
            n,
            dim,
            seed,
            sources,
            bounding: None,
        };
        spec.validate()?;
        Ok(spec)
    }
}
