use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, Theorem};
use crate::error::{invalid, Error, Result};
use crate::hadamard::{strip_first_row, HadamardMatrix};
use crate::io::format_sig;
use crate::learners::{average_loss, train, Init, LearnerConfig, LearnerKind, LossKind};
use crate::problems::{
    complement_problem, doubled_targets, duplicated_problem, gaussian_problem, permuted_problem, random_sign_problem,
    sign_flip_problem, Family, Problem,
};
use crate::rng::derive_seed;
use crate::stats::Summary;

pub const CSV_HEADER: &str = "k,empirical_mean,stderr,bound,theorem";

/// Which problem to draw and its size parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub family: Family,
    pub d: usize,
    /// duplication factor
    pub q: usize,
    /// 0-based target feature for single-feature families
    pub column: usize,
}

impl ProblemSpec {
    pub fn new(family: Family, d: usize) -> Self {
        Self { family, d, q: 1, column: 1 }
    }

    /// Fresh problem for one seed.
    pub fn generate(&self, seed: u64) -> Result<Problem<f64>> {
        let hadamard = || HadamardMatrix::of_dim(self.d);
        match self.family {
            Family::SignFlip => Ok(sign_flip_problem(&hadamard()?, seed)),
            Family::Complement01 => Ok(complement_problem(&strip_first_row(&hadamard()?), seed)),
            Family::Permuted => permuted_problem(&hadamard()?, self.column, seed),
            Family::GaussianSparse => {
                let mut w = vec![0.0; self.d];
                if self.column >= self.d {
                    return invalid(format!("column {} out of range for d = {}", self.column, self.d));
                }
                w[self.column] = 1.0;
                gaussian_problem(self.d, self.d, &w, seed)
            }
            Family::Duplicated => duplicated_problem(&hadamard()?, self.q, Some(seed)),
            Family::DoubledHadamard => Ok(doubled_targets(&hadamard()?, false)),
            Family::ShiftedDoubled => Ok(doubled_targets(&hadamard()?, true)),
            Family::RandomSign => random_sign_problem(self.d, self.d, self.column, seed),
        }
    }

    /// Number of examples of a generated problem.
    pub fn n(&self) -> usize {
        match self.family {
            Family::Complement01 => self.d.saturating_sub(1),
            Family::Duplicated => 2 * self.q * self.d,
            _ => self.d,
        }
    }

    /// The lower-bound curve the family is held against, if any.
    pub fn theorem(&self) -> Option<Theorem> {
        match self.family {
            Family::SignFlip => Some(Theorem::SignFlip),
            Family::Complement01 => Some(Theorem::Complement01),
            Family::Permuted => Some(Theorem::Permute),
            Family::GaussianSparse => Some(Theorem::Gaussian),
            Family::Duplicated => Some(Theorem::SawTooth(self.q)),
            Family::DoubledHadamard => Some(Theorem::SvdTailInit),
            Family::ShiftedDoubled => Some(Theorem::ShiftedDoubled),
            Family::RandomSign => None,
        }
    }

    pub fn bound(&self, k: usize) -> Result<Option<f64>> {
        let d = self.d;
        Ok(match self.theorem() {
            Some(Theorem::SignFlip) => Some(bounds::curve_sign_flip(d, k)?),
            Some(Theorem::Complement01) => Some(bounds::curve_complement(d, k)?),
            Some(Theorem::Permute) => Some(if k >= d { 0.0 } else { bounds::curve_permute(d, k)? }),
            Some(Theorem::Gaussian) => Some(bounds::curve_gaussian(d, k)?),
            Some(Theorem::SawTooth(q)) => Some(bounds::curve_sawtooth(d, q, k)?),
            Some(Theorem::SvdTailInit) => Some((1.0 - (k + 1) as f64 / d as f64).max(0.0)),
            Some(Theorem::ShiftedDoubled) => Some(bounds::curve_shifted_doubled(d, k).max(0.0)),
            _ => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub problem: ProblemSpec,
    pub learner: LearnerKind,
    pub config: LearnerConfig<f64>,
    pub k_values: Vec<usize>,
    pub seeds: usize,
    pub loss: LossKind,
    pub master_seed: u64,
    /// Size of the worker pool; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(problem: ProblemSpec, learner: LearnerKind, config: LearnerConfig<f64>) -> Self {
        let n = problem.n();
        Self {
            problem,
            learner,
            config,
            k_values: (0..=n).collect(),
            seeds: 100,
            loss: LossKind::Square,
            master_seed: 0,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds == 0 {
            return invalid("seeds must be at least 1");
        }
        let n = self.problem.n();
        if let Some(k) = self.k_values.iter().find(|&&k| k > n) {
            return invalid(format!("k = {k} exceeds the {n} examples of the problem"));
        }
        self.config.validate()
    }
}

/// Defaults per learner: `η = 1/d` for the linear neuron, a positive
/// constant init for the multiplicative learners.
pub fn default_config(learner: LearnerKind, d: usize) -> LearnerConfig<f64> {
    let df = d as f64;
    match learner {
        LearnerKind::Linear | LearnerKind::LeastSquares => LearnerConfig::new(1.0 / df, Init::Zero),
        LearnerKind::Spindly => LearnerConfig::new(0.2, Init::Constant(1.0 / df)),
        LearnerKind::Egu => LearnerConfig::new(0.8, Init::Constant(1.0 / (df * df))),
        LearnerKind::TwoLayer => LearnerConfig::new(0.01, Init::gaussian(d)).hidden(d).epochs(100),
        LearnerKind::Mlp => LearnerConfig::new(0.01, Init::gaussian(d)).hidden(d).epochs(100),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub k: usize,
    pub mean: f64,
    pub stderr: f64,
    pub bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub theorem: Option<Theorem>,
    pub seeds: usize,
    pub rows: Vec<ResultRow>,
}

impl ExperimentResult {
    pub fn row(&self, k: usize) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.k == k)
    }

    pub fn to_csv(&self) -> String {
        let tag = self.theorem.map(|t| t.tag()).unwrap_or_else(|| "none".into());
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let bound = r.bound.map(|b| format_sig(b, 10)).unwrap_or_else(|| "nan".into());
            out.push_str(&format!("{},{},{},{bound},{tag}\n", r.k, format_sig(r.mean, 10), format_sig(r.stderr, 10)));
        }
        out
    }
}

/// Per-seed seeds for the problem draw and the learner init.
pub fn seed_pair(master: u64, s: usize) -> (u64, u64) {
    let base = derive_seed(master, "seed", s as u64);
    (derive_seed(base, "problem", 0), derive_seed(base, "init", 0))
}

/// Average loss of every seed at every `k`. Multi-target problems train one
/// learner per target and average over targets.
fn seed_losses(spec: &ExperimentSpec, s: usize) -> Result<Vec<f64>> {
    let (pseed, iseed) = seed_pair(spec.master_seed, s);
    let p = spec.problem.generate(pseed)?;
    let targets = p.y.cols();
    spec.k_values
        .iter()
        .map(|&k| {
            let mut total = 0.0;
            for j in 0..targets {
                let pj = p.clone().with_target(j)?;
                let m = train(spec.learner, &pj, k, &spec.config, iseed)
                    .map_err(|e| Error::Experiment { seed: s as u64, k, source: Box::new(e) })?;
                total += average_loss(&m, &pj, spec.loss)?;
            }
            Ok(total / targets as f64)
        })
        .collect()
}

/// Seeds run in parallel; per-seed results are gathered in seed order and
/// reduced sequentially, so the output does not depend on the pool size.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let work = || (0..spec.seeds).into_par_iter().map(|s| seed_losses(spec, s)).collect::<Result<Vec<_>>>();
    let per_seed = match spec.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Invalid(format!("worker pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let rows = spec
        .k_values
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let column: Vec<f64> = per_seed.iter().map(|v| v[i]).collect();
            let Summary { mean, stderr, .. } = Summary::of(&column);
            Ok(ResultRow { k, mean, stderr, bound: spec.problem.bound(k)? })
        })
        .collect::<Result<_>>()?;
    Ok(ExperimentResult { theorem: spec.problem.theorem(), seeds: spec.seeds, rows })
}
