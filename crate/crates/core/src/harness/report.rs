use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::Problem;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Train,
    Limit,
}

/// One line of `report.csv`. For sorting, `max_bucket` is the largest bucket
/// and `sum_conflicts` the sum of squared bucket sizes; for triangulation
/// they are the largest conflict list and the total number of conflicts.
/// `wall_ns` is the only non-deterministic column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRow {
    pub round: u64,
    pub phase: Phase,
    pub comparisons: u64,
    pub steps_phase1: u64,
    pub steps_phase2: u64,
    pub max_bucket: u64,
    pub sum_conflicts: u64,
    pub wall_ns: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseStats {
    pub rounds: usize,
    pub mean_comparisons: f64,
    pub p95_comparisons: u64,
    pub mean_steps_phase1: f64,
    pub mean_steps_phase2: f64,
    pub mean_wall_ns: f64,
    pub p95_wall_ns: u64,
}

fn p95(mut v: Vec<u64>) -> u64 {
    if v.is_empty() {
        return 0;
    }
    v.sort_unstable();
    let rank = (0.95 * v.len() as f64).ceil() as usize;
    v[rank.max(1) - 1]
}

impl PhaseStats {
    pub fn of(rows: &[RoundRow], phase: Phase) -> Self {
        let rows: Vec<&RoundRow> = rows.iter().filter(|r| r.phase == phase).collect();
        if rows.is_empty() {
            return Self::default();
        }
        let k = rows.len() as f64;
        let mean = |f: fn(&RoundRow) -> u64| rows.iter().map(|r| f(r) as f64).sum::<f64>() / k;
        Self {
            rounds: rows.len(),
            mean_comparisons: mean(|r| r.comparisons),
            p95_comparisons: p95(rows.iter().map(|r| r.comparisons).collect()),
            mean_steps_phase1: mean(|r| r.steps_phase1),
            mean_steps_phase2: mean(|r| r.steps_phase2),
            mean_wall_ns: mean(|r| r.wall_ns),
            p95_wall_ns: p95(rows.iter().map(|r| r.wall_ns).collect()),
        }
    }
}

/// Measured entropies in bits. `output_bits` is the plug-in entropy of the
/// observed outputs (permutations or triangulations), capped by the log of
/// the number of rounds; `per_source_bits` sums, over sources, the entropy
/// of the bucket or triangle each source landed in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub output_bits: f64,
    pub distinct_outputs: usize,
    pub per_source_bits: f64,
    pub samples: usize,
}

/// Self-improving cost against a baseline on the same limiting inputs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BaselineStats {
    pub mean_self: f64,
    pub mean_baseline: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub problem: Problem,
    pub workload: String,
    pub n: usize,
    pub seed: u64,
    pub eps: f64,
    pub c: f64,
    pub lambda: usize,
    pub learning_rounds: usize,
    pub limiting_rounds: usize,
    pub verify: bool,
    pub insertion_path: bool,
    /// Net size for triangulation runs.
    pub net_size: Option<usize>,
    /// Rounds checked against the oracle, and how many disagreed.
    pub verified_rounds: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub meta: RunMeta,
    pub train: PhaseStats,
    pub limit: PhaseStats,
    pub entropy: EntropyReport,
    pub baseline: Option<BaselineStats>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub rows: Vec<RoundRow>,
    pub summary: Summary,
}

pub const REPORT_CSV: &str = "report.csv";
pub const SUMMARY_JSON: &str = "summary.json";

impl RunReport {
    pub fn new(rows: Vec<RoundRow>, meta: RunMeta, entropy: EntropyReport, baseline: Option<BaselineStats>) -> Self {
        let summary = Summary {
            meta,
            train: PhaseStats::of(&rows, Phase::Train),
            limit: PhaseStats::of(&rows, Phase::Limit),
            entropy,
            baseline,
        };
        Self { rows, summary }
    }

    pub fn limit_rows(&self) -> impl Iterator<Item = &RoundRow> {
        self.rows.iter().filter(|r| r.phase == Phase::Limit)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        write_rows(&dir.join(REPORT_CSV), &self.rows)?;
        std::fs::write(
            dir.join(SUMMARY_JSON),
            serde_json::to_string_pretty(&self.summary)?,
        )?;
        Ok(())
    }

    /// Reads a report back and checks that the stored aggregates match the
    /// rows.
    pub fn load(dir: &Path) -> Result<Self> {
        let rows = read_rows(&dir.join(REPORT_CSV))?;
        let summary: Summary = serde_json::from_str(&std::fs::read_to_string(dir.join(SUMMARY_JSON))?)?;
        for (phase, stored) in [(Phase::Train, &summary.train), (Phase::Limit, &summary.limit)] {
            if PhaseStats::of(&rows, phase) != *stored {
                return Err(Error::Format(format!(
                    "{phase:?} aggregates in {SUMMARY_JSON} do not match {REPORT_CSV}"
                )));
            }
        }
        Ok(Self { rows, summary })
    }
}

pub fn write_rows(path: &Path, rows: &[RoundRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows(path: &Path) -> Result<Vec<RoundRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for row in r.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}
