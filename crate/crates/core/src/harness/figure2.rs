//! Linear neuron against spindly network on single-feature ±1 problems.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harness::experiment::{run_experiment, ExperimentResult, ExperimentSpec, ProblemSpec};
use crate::harness::svg::{grid, Plot, Series};
use crate::learners::{Init, LearnerConfig, LearnerKind};
use crate::problems::Family;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Figure2Settings {
    pub d: usize,
    pub seeds: usize,
    pub master_seed: u64,
    pub workers: Option<usize>,
    pub spindly_eta: f64,
    pub linear_eta: f64,
    /// Spindly must reach loss below `target_loss` within `c_max · log₂ d`
    /// examples.
    pub target_loss: f64,
    pub c_max: f64,
    /// Linear loss floor at `k = d/2` on the Hadamard rows.
    pub linear_floor: f64,
    /// Linear loss floor at the first `k` where spindly is below
    /// `target_loss`, on either instance matrix.
    pub separation_floor: f64,
}

impl Figure2Settings {
    pub fn new(d: usize, seeds: usize, master_seed: u64) -> Self {
        Self {
            d,
            seeds,
            master_seed,
            workers: None,
            spindly_eta: 0.2,
            linear_eta: 1.0 / d as f64,
            target_loss: 0.1,
            c_max: 8.0,
            linear_floor: 0.4,
            separation_floor: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub name: String,
    pub family: Family,
    pub learner: LearnerKind,
    pub result: ExperimentResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub family: Family,
    /// First `k` with spindly mean loss below the target.
    pub spindly_k: Option<usize>,
    /// `spindly_k / log₂ d`
    pub c: Option<f64>,
    pub linear_at_half: f64,
    /// Linear mean loss at `spindly_k`.
    pub linear_at_spindly_k: Option<f64>,
    /// `linear mean ≥ 1 - (k+1)/d - 3·stderr` at every `k`
    pub linear_above_floor_curve: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Figure2Report {
    pub settings: Figure2Settings,
    pub panels: Vec<Panel>,
    pub datasets: Vec<DatasetSummary>,
}

impl Figure2Report {
    pub fn log_d(&self) -> f64 {
        (self.settings.d as f64).log2()
    }

    pub fn spindly_passes(&self, ds: &DatasetSummary) -> bool {
        ds.spindly_k.is_some_and(|k| k as f64 <= self.settings.c_max * self.log_d())
    }

    pub fn separated(&self, ds: &DatasetSummary) -> bool {
        ds.linear_at_spindly_k.is_some_and(|l| l >= self.settings.separation_floor)
    }

    /// Hadamard rows: linear above `1 - (k+1)/d` everywhere and above the
    /// floor at `d/2`. Both instance matrices: spindly fast and separated.
    pub fn passed(&self) -> bool {
        self.datasets.iter().all(|ds| {
            let hadamard = ds.family != Family::Permuted
                || (ds.linear_above_floor_curve && ds.linear_at_half >= self.settings.linear_floor);
            hadamard && self.spindly_passes(ds) && self.separated(ds)
        })
    }

    pub fn to_svg(&self) -> String {
        let d = self.settings.d as f64;
        let plots: Vec<Plot> = self
            .panels
            .iter()
            .map(|p| {
                let emp = p.result.rows.iter().map(|r| (r.k as f64, r.mean)).collect();
                let floor = p.result.rows.iter().map(|r| (r.k as f64, (1.0 - (r.k as f64 + 1.0) / d).max(0.0))).collect();
                Plot::new(p.name.clone(), "examples seen k", "average square loss")
                    .with(Series::new("empirical mean", emp, "#1f77b4"))
                    .with(Series::new("1 - (k+1)/d", floor, "#d62728").dashed())
            })
            .collect();
        grid(&plots, 2, 420.0, 300.0)
    }
}

pub fn figure2(settings: &Figure2Settings) -> Result<Figure2Report> {
    let d = settings.d;
    let mut panels = Vec::new();
    let mut datasets = Vec::new();
    for (family, label) in [(Family::Permuted, "Hadamard"), (Family::RandomSign, "random ±1")] {
        let problem = ProblemSpec { family, d, q: 1, column: 1 };
        let linear_cfg = LearnerConfig::new(settings.linear_eta, Init::Zero);
        let spindly_cfg = LearnerConfig::new(settings.spindly_eta, Init::Constant(1.0 / d as f64)).clip(Some((-1.0, 1.0)));
        let mut results = Vec::new();
        for (learner, cfg, name) in [(LearnerKind::Linear, linear_cfg, "linear neuron"), (LearnerKind::Spindly, spindly_cfg, "spindly")] {
            let mut spec = ExperimentSpec::new(problem.clone(), learner, cfg);
            spec.seeds = settings.seeds;
            spec.master_seed = settings.master_seed;
            spec.workers = settings.workers;
            let result = run_experiment(&spec)?;
            results.push(result.clone());
            panels.push(Panel { name: format!("{name}, {label}"), family, learner, result });
        }
        let (lin, spi) = (&results[0], &results[1]);
        let spindly_k = spi.rows.iter().find(|r| r.mean < settings.target_loss).map(|r| r.k);
        let linear_at_half = lin.row(d / 2).map(|r| r.mean).unwrap_or(f64::NAN);
        let linear_above_floor_curve = lin.rows.iter().all(|r| {
            let floor = (1.0 - (r.k as f64 + 1.0) / d as f64).max(0.0);
            r.mean >= floor - 3.0 * r.stderr - 1e-9
        });
        let linear_at_spindly_k = spindly_k.and_then(|k| lin.row(k)).map(|r| r.mean);
        datasets.push(DatasetSummary {
            family,
            spindly_k,
            linear_at_spindly_k,
            c: spindly_k.map(|k| k as f64 / (d as f64).log2()),
            linear_at_half,
            linear_above_floor_curve,
        });
    }
    Ok(Figure2Report { settings: settings.clone(), panels, datasets })
}
