//! Experiment orchestration: training and limiting loops, baselines,
//! persistence and report files.

pub mod config;
pub mod model_io;
pub mod plots;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::delaunay::{
    triangulate_insertion, triangulate_limiting, DelaunayModel, DelaunayParams, DelaunayTrainer,
};
use crate::entropy::FrequencyTable;
use crate::error::{invalid, Error, Result};
use crate::geom::triangulation::Triangulation;
use crate::sorter::{mergesort_with_count, SorterModel, SorterParams, SorterTrainer};
use crate::sources::{canonical_permutation, sample_points, sample_values, WorkloadSpec};

pub use config::{ExperimentConfig, Problem};
pub use model_io::TrainedModel;
pub use report::{BaselineStats, EntropyReport, Phase, RoundRow, RunMeta, RunReport};

pub const MODEL_FILE: &str = "model.json";

fn at_round<T>(round: u64, seed: u64, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Round {
        round,
        seed,
        source: Box::new(e),
    })
}

fn elapsed(t: Instant) -> u64 {
    t.elapsed().as_nanos() as u64
}

fn sorter_params(cfg: &ExperimentConfig) -> SorterParams {
    SorterParams {
        eps: cfg.eps,
        c: cfg.c,
    }
}

fn delaunay_params(cfg: &ExperimentConfig) -> DelaunayParams {
    DelaunayParams {
        eps: cfg.eps,
        c: cfg.c,
        net_method: cfg.net_method,
        net: cfg.net,
        seed: cfg.seed,
    }
}

/// Runs the training rounds `0..lambda + M` and returns the model with one
/// row per round. Every training output comes from the standard algorithm.
pub fn train(cfg: &ExperimentConfig, spec: &WorkloadSpec) -> Result<(TrainedModel, Vec<RoundRow>)> {
    let mut rows = Vec::new();
    let row = |round: u64, phase1: u64, phase2: u64, wall_ns: u64| RoundRow {
        round,
        phase: Phase::Train,
        comparisons: phase1 + phase2,
        steps_phase1: phase1,
        steps_phase2: phase2,
        max_bucket: 0,
        sum_conflicts: 0,
        wall_ns,
    };
    match cfg.problem {
        Problem::Sort => {
            let mut t = SorterTrainer::new(spec.n, sorter_params(cfg))?;
            let mut round = 0;
            while !t.is_done() {
                let x = at_round(round, spec.seed, sample_values(spec, round))?;
                let clock = Instant::now();
                let (_, info) = at_round(round, spec.seed, t.observe(&x))?;
                rows.push(row(round, 0, info.comparisons, elapsed(clock)));
                round += 1;
            }
            Ok((TrainedModel::Sort(t.finish()?), rows))
        }
        Problem::Delaunay => {
            let mut t = DelaunayTrainer::new(spec.n, spec.bounding_triangle(), delaunay_params(cfg))?;
            let mut round = 0;
            while !t.is_done() {
                let x = at_round(round, spec.seed, sample_points(spec, round))?;
                let clock = Instant::now();
                let (_, info) = at_round(round, spec.seed, t.observe(&x))?;
                rows.push(row(round, info.locate_steps, info.predicates, elapsed(clock)));
                round += 1;
            }
            Ok((TrainedModel::Delaunay(t.finish()?), rows))
        }
    }
}

/// Number of training rounds the model consumed; limiting inputs start there.
pub fn training_rounds(model: &TrainedModel) -> u64 {
    let n = model.n();
    let m = match model {
        TrainedModel::Sort(m) => m.params().learning_rounds(n),
        TrainedModel::Delaunay(m) => m.params().learning_rounds(n),
    };
    (SorterParams::lambda(n) + m) as u64
}

/// Output and cost of one limiting round, for determinism checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub round: u64,
    /// Sorted positions, or the flattened sorted triangle list.
    pub output: Vec<u32>,
    pub comparisons: u64,
    pub steps_phase1: u64,
}

/// Result of the limiting loop.
#[derive(Clone, Debug, Default)]
pub struct LimitOutcome {
    pub rows: Vec<RoundRow>,
    pub trace: Vec<TraceEntry>,
    pub entropy: EntropyReport,
    pub verified_rounds: usize,
    pub failures: Vec<String>,
    /// Baseline cost per round (mergesort comparisons or standard
    /// construction predicates).
    pub baseline: Vec<u64>,
}

fn sort_round(m: &SorterModel, x: &[f64], round: u64) -> Result<(RoundRow, Vec<u32>, Vec<u32>)> {
    let clock = Instant::now();
    let out = m.sort_limiting(x)?;
    let wall_ns = elapsed(clock);
    let r = out.report;
    Ok((
        RoundRow {
            round,
            phase: Phase::Limit,
            comparisons: r.comparisons,
            steps_phase1: r.steps_phase1,
            steps_phase2: r.steps_phase2,
            max_bucket: r.max_bucket as u64,
            sum_conflicts: r.sum_sq_bucket,
            wall_ns,
        },
        out.sorted.iter().map(|&(_, i)| i as u32).collect(),
        out.buckets,
    ))
}

fn delaunay_round(
    m: &DelaunayModel,
    x: &[crate::geom::Point2],
    round: u64,
    insertion: bool,
) -> Result<(RoundRow, Triangulation)> {
    let clock = Instant::now();
    let out = if insertion {
        triangulate_insertion(m, x, false)?
    } else {
        triangulate_limiting(m, x, false)?
    };
    let wall_ns = elapsed(clock);
    let r = out.report;
    Ok((
        RoundRow {
            round,
            phase: Phase::Limit,
            comparisons: r.steps_phase1() + r.steps_phase2(),
            steps_phase1: r.steps_phase1(),
            steps_phase2: r.steps_phase2(),
            max_bucket: u64::from(r.max_conflict),
            sum_conflicts: r.sum_conflicts,
            wall_ns,
        },
        out.triangulation,
    ))
}

/// Runs `rounds` limiting rounds starting at input round `first`.
pub fn limit(
    cfg: &ExperimentConfig,
    spec: &WorkloadSpec,
    model: &TrainedModel,
    first: u64,
    rounds: usize,
) -> Result<LimitOutcome> {
    let mut out = LimitOutcome::default();
    let mut outputs = FrequencyTable::new();
    let mut per_source: Vec<FrequencyTable<u32>> = (0..spec.n).map(|_| FrequencyTable::new()).collect();
    for k in 0..rounds as u64 {
        let round = first + k;
        match model {
            TrainedModel::Sort(m) => {
                let x = at_round(round, spec.seed, sample_values(spec, round))?;
                let (row, order, buckets) = at_round(round, spec.seed, sort_round(m, &x, round))?;
                out.baseline.push(mergesort_with_count(&x).1);
                if cfg.verify {
                    out.verified_rounds += 1;
                    let want: Vec<u32> = canonical_permutation(&x).into_iter().map(|i| i as u32).collect();
                    if want != order {
                        out.failures.push(format!("round {round}: sorted order differs from the oracle"));
                    }
                }
                outputs.record(order.clone());
                for (i, &b) in buckets.iter().enumerate() {
                    per_source[i].record(b);
                }
                out.trace.push(TraceEntry {
                    round,
                    output: order,
                    comparisons: row.comparisons,
                    steps_phase1: row.steps_phase1,
                });
                out.rows.push(row);
            }
            TrainedModel::Delaunay(m) => {
                let x = at_round(round, spec.seed, sample_points(spec, round))?;
                let (row, tri) =
                    at_round(round, spec.seed, delaunay_round(m, &x, round, cfg.insertion_path))?;
                let standard = at_round(
                    round,
                    spec.seed,
                    Triangulation::with_bounding(spec.bounding_triangle(), &x),
                )?;
                out.baseline.push(standard.predicate_count());
                let set = tri.triangle_set();
                if cfg.verify {
                    out.verified_rounds += 1;
                    if standard.triangle_set() != set {
                        out.failures.push(format!("round {round}: triangulation differs from the oracle"));
                    }
                }
                for (i, &q) in x.iter().enumerate() {
                    per_source[i].record(at_round(round, spec.seed, m.locate(i, q))?.tri);
                }
                let flat: Vec<u32> = set.iter().flatten().copied().collect();
                outputs.record(flat.clone());
                out.trace.push(TraceEntry {
                    round,
                    output: flat,
                    comparisons: row.comparisons,
                    steps_phase1: row.steps_phase1,
                });
                out.rows.push(row);
            }
        }
    }
    if rounds > 0 {
        let est = outputs.estimate()?;
        let mut per = 0.0;
        for t in &per_source {
            per += t.estimate()?.value_bits;
        }
        out.entropy = EntropyReport {
            output_bits: est.value_bits,
            distinct_outputs: est.distinct_outcomes,
            per_source_bits: per,
            samples: est.sample_count,
        };
    }
    Ok(out)
}

fn workload_label(cfg: &ExperimentConfig) -> String {
    match (&cfg.family, &cfg.workload) {
        (_, Some(_)) => "custom".into(),
        (Some(f), None) => f.clone(),
        (None, None) => String::new(),
    }
}

fn meta(cfg: &ExperimentConfig, model: &TrainedModel, lim: &LimitOutcome) -> RunMeta {
    let n = model.n();
    RunMeta {
        problem: cfg.problem,
        workload: workload_label(cfg),
        n,
        seed: cfg.seed,
        eps: cfg.eps,
        c: cfg.c,
        lambda: SorterParams::lambda(n),
        learning_rounds: sorter_params(cfg).learning_rounds(n),
        limiting_rounds: lim.rows.len(),
        verify: cfg.verify,
        insertion_path: cfg.insertion_path,
        net_size: match model {
            TrainedModel::Delaunay(m) => Some(m.net().net.len()),
            TrainedModel::Sort(_) => None,
        },
        verified_rounds: lim.verified_rounds,
        failures: lim.failures.clone(),
    }
}

fn baseline_stats(lim: &LimitOutcome) -> Option<BaselineStats> {
    if lim.rows.is_empty() {
        return None;
    }
    let k = lim.rows.len() as f64;
    let mean_self = lim.rows.iter().map(|r| r.comparisons as f64).sum::<f64>() / k;
    let mean_baseline = lim.baseline.iter().map(|&b| b as f64).sum::<f64>() / k;
    Some(BaselineStats {
        mean_self,
        mean_baseline,
        ratio: if mean_baseline > 0.0 { mean_self / mean_baseline } else { f64::NAN },
    })
}

/// Everything a run produced.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub model: TrainedModel,
    pub report: RunReport,
    pub limit: LimitOutcome,
}

/// Training followed by `cfg.rounds` limiting rounds. Nothing is written.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Experiment> {
    cfg.validate()?;
    let spec = cfg.workload()?;
    let (model, mut rows) = train(cfg, &spec)?;
    let first = training_rounds(&model);
    let lim = limit(cfg, &spec, &model, first, cfg.rounds)?;
    rows.extend_from_slice(&lim.rows);
    let report = RunReport::new(rows, meta(cfg, &model, &lim), lim.entropy, baseline_stats(&lim));
    Ok(Experiment {
        model,
        report,
        limit: lim,
    })
}

/// Limiting rounds with a model that is already trained (for example one
/// loaded from disk).
pub fn run_with_model(cfg: &ExperimentConfig, model: TrainedModel) -> Result<Experiment> {
    let spec = cfg.workload()?;
    if model.n() != spec.n {
        return invalid(format!("model has n = {}, workload has n = {}", model.n(), spec.n));
    }
    let matches = matches!(
        (&model, cfg.problem),
        (TrainedModel::Sort(_), Problem::Sort) | (TrainedModel::Delaunay(_), Problem::Delaunay)
    );
    if !matches {
        return invalid("model was trained for the other problem");
    }
    let first = training_rounds(&model);
    let lim = limit(cfg, &spec, &model, first, cfg.rounds)?;
    let report = RunReport::new(
        lim.rows.clone(),
        meta(cfg, &model, &lim),
        lim.entropy,
        baseline_stats(&lim),
    );
    Ok(Experiment {
        model,
        report,
        limit: lim,
    })
}

/// Writes `model.json`, the report files and the plot data into `dir`.
pub fn write_outputs(dir: &Path, exp: &Experiment) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let model_path = dir.join(MODEL_FILE);
    model_io::save(&model_path, &exp.model)?;
    exp.report.write(dir)?;
    plots::write(&dir.join("plots"), &exp.report.rows, &exp.limit.baseline)?;
    Ok(model_path)
}

/// Side-by-side cost of the self-improving algorithm and its baseline on
/// each limiting input: `(round, self, baseline)`.
pub fn compare_baselines(exp: &Experiment) -> Vec<(u64, u64, u64)> {
    exp.limit
        .rows
        .iter()
        .zip(&exp.limit.baseline)
        .map(|(r, &b)| (r.round, r.comparisons, b))
        .collect()
}
