use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sia_core::harness::{self, model_io, Experiment, ExperimentConfig, Problem};

#[derive(Parser)]
#[command(name = "sia", version, about = "Self-improving sorting and Delaunay triangulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model and write model.json plus the training rows.
    Train(Opts),
    /// Train, then run the limiting phase.
    Run(Opts),
    /// Like run, and also write bench.csv against the baseline.
    Bench(Opts),
    /// Check limiting outputs against the oracle. Reuses <out>/model.json
    /// when it exists.
    Verify(Opts),
}

#[derive(Args)]
struct Opts {
    config: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    /// Limiting-phase rounds.
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    problem: Option<Problem>,
    #[arg(long)]
    verify: bool,
    /// Triangulate by inserting into T(V) instead of fusing local diagrams.
    #[arg(long)]
    insertion_path: bool,
    /// Output directory (overrides out_dir in the config).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Opts {
    fn load(&self) -> sia_core::Result<ExperimentConfig> {
        let text = std::fs::read_to_string(&self.config)?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text)?;
        if let Some(v) = self.n {
            cfg.n = v;
            if let Some(w) = cfg.workload.as_ref() {
                if w.n != v {
                    cfg.workload = None;
                    if cfg.family.is_none() {
                        return Err(sia_core::Error::Validation(
                            "--n cannot resize an explicit workload; use a family".into(),
                        ));
                    }
                }
            }
        }
        if let Some(v) = self.eps {
            cfg.eps = v;
        }
        if let Some(v) = self.c {
            cfg.c = v;
        }
        if let Some(v) = self.rounds {
            cfg.rounds = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.problem {
            cfg.problem = v;
        }
        cfg.verify |= self.verify;
        cfg.insertion_path |= self.insertion_path;
        if let Some(v) = &self.out {
            cfg.out_dir = v.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn print_summary(exp: &Experiment) -> sia_core::Result<()> {
    println!("{}", serde_json::to_string_pretty(&exp.report.summary)?);
    Ok(())
}

fn write_bench(dir: &Path, exp: &Experiment) -> sia_core::Result<()> {
    let mut out = String::from("round,self_improving,baseline\n");
    for (round, own, base) in harness::compare_baselines(exp) {
        out.push_str(&format!("{round},{own},{base}\n"));
    }
    std::fs::write(dir.join("bench.csv"), out)?;
    Ok(())
}

fn execute(cmd: Command) -> sia_core::Result<ExitCode> {
    match cmd {
        Command::Train(o) => {
            let mut cfg = o.load()?;
            cfg.rounds = 0;
            let exp = harness::run_experiment(&cfg)?;
            let path = harness::write_outputs(&cfg.out_dir, &exp)?;
            eprintln!("model written to {}", path.display());
            print_summary(&exp)?;
        }
        Command::Run(o) => {
            let cfg = o.load()?;
            let exp = harness::run_experiment(&cfg)?;
            harness::write_outputs(&cfg.out_dir, &exp)?;
            print_summary(&exp)?;
            return Ok(failures(&exp));
        }
        Command::Bench(o) => {
            let cfg = o.load()?;
            let exp = harness::run_experiment(&cfg)?;
            harness::write_outputs(&cfg.out_dir, &exp)?;
            write_bench(&cfg.out_dir, &exp)?;
            if let Some(b) = exp.report.summary.baseline {
                println!(
                    "mean cost {:.1} vs baseline {:.1} (ratio {:.3})",
                    b.mean_self, b.mean_baseline, b.ratio
                );
            }
            return Ok(failures(&exp));
        }
        Command::Verify(o) => {
            let mut cfg = o.load()?;
            cfg.verify = true;
            let model_path = cfg.out_dir.join(harness::MODEL_FILE);
            let exp = if model_path.exists() {
                eprintln!("using {}", model_path.display());
                harness::run_with_model(&cfg, model_io::load(&model_path)?)?
            } else {
                harness::run_experiment(&cfg)?
            };
            let meta = &exp.report.summary.meta;
            println!("verified {} rounds, {} mismatches", meta.verified_rounds, meta.failures.len());
            return Ok(failures(&exp));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn failures(exp: &Experiment) -> ExitCode {
    let f = &exp.report.summary.meta.failures;
    for msg in f {
        eprintln!("mismatch: {msg}");
    }
    if f.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
