use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::epsnet::{NetConfig, NetMethod};
use crate::error::{invalid, Result};
use crate::sources::{families, WorkloadSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Sort,
    Delaunay,
}

impl std::str::FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sort" => Ok(Problem::Sort),
            "delaunay" => Ok(Problem::Delaunay),
            other => Err(format!("unknown problem '{other}' (sort or delaunay)")),
        }
    }
}

fn default_n() -> usize {
    64
}
fn default_eps() -> f64 {
    0.5
}
fn default_c() -> f64 {
    10.0
}
fn default_rounds() -> usize {
    100
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_net_method() -> NetMethod {
    NetMethod::RepairedSample
}

/// One experiment. Either `workload` (a full spec) or `family` names the
/// input distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: Problem,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workload: Option<WorkloadSpec>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    /// Limiting-phase rounds.
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    #[serde(default)]
    pub verify: bool,
    #[serde(default)]
    pub insertion_path: bool,
    #[serde(default = "default_net_method")]
    pub net_method: NetMethod,
    #[serde(default)]
    pub net: NetConfig,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn new(problem: Problem, family: &str, n: usize) -> Self {
        Self {
            problem,
            family: Some(family.to_string()),
            workload: None,
            n,
            seed: 0,
            eps: default_eps(),
            c: default_c(),
            rounds: default_rounds(),
            verify: false,
            insertion_path: false,
            net_method: default_net_method(),
            net: NetConfig::default(),
            out_dir: default_out(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return invalid("n must be positive");
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) || !(self.c > 0.0) {
            return invalid("eps must lie in (0, 1] and c must be positive");
        }
        if self.family.is_none() && self.workload.is_none() {
            return invalid("config needs a family or a workload");
        }
        Ok(())
    }

    /// The input distribution. A family is instantiated at `n` and `seed`; an
    /// explicit workload must agree with `n`.
    pub fn workload(&self) -> Result<WorkloadSpec> {
        let spec = match (&self.workload, &self.family) {
            (Some(w), _) => w.clone(),
            (None, Some(f)) => families::build(f, self.n, self.seed)?,
            (None, None) => return invalid("config needs a family or a workload"),
        };
        spec.validate()?;
        if spec.n != self.n {
            return invalid(format!("workload has n = {}, config has n = {}", spec.n, self.n));
        }
        let want = match self.problem {
            Problem::Sort => 1,
            Problem::Delaunay => 2,
        };
        if spec.dim != want {
            return invalid(format!(
                "{:?} needs a {want}-D workload, got {}-D",
                self.problem, spec.dim
            ));
        }
        Ok(spec)
    }
}
