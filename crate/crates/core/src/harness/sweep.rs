//! Regret over a grid of `(p_c, p_f)` with fixed goal and horizon.

use serde::{Deserialize, Serialize};

use super::{run_experiment_with, ExperimentConfig, RegretMode};
use crate::analytics::{boundary, optimal_threshold, RegionLabel};
use crate::env::DEFAULT_STEP_CAP;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::learners::{AlgorithmSpec, InitMode, DEFAULT_GAMMA};
use crate::model::ModelParams;

/// `n` evenly spaced interior points of `(0, 1)`: `i / (n + 1)`.
pub fn open_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / (n + 1) as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub goal: usize,
    /// Initial-state distribution; uniform when absent.
    #[serde(default)]
    pub q: Option<Vec<f64>>,
    pub p_c: Vec<f64>,
    pub p_f: Vec<f64>,
    pub horizon: usize,
    pub iterations: usize,
    pub algorithm: AlgorithmSpec,
    pub master_seed: u64,
    #[serde(default)]
    pub regret_mode: RegretMode,
    #[serde(default = "super::default_gamma")]
    pub gamma: f64,
    #[serde(default = "super::default_init")]
    pub init: InitMode,
}

impl SweepConfig {
    /// GETBE-SM on a `n x n` open grid, horizon 1000, 50 iterations.
    pub fn grid(goal: usize, n: usize) -> Self {
        Self {
            goal,
            q: None,
            p_c: open_grid(n),
            p_f: open_grid(n),
            horizon: 1000,
            iterations: 50,
            algorithm: AlgorithmSpec::GetbeSm,
            master_seed: 0,
            regret_mode: RegretMode::Pseudo,
            gamma: DEFAULT_GAMMA,
            init: InitMode::RandomizedUnit,
        }
    }

    fn cell_params(&self, p_c: f64, p_f: f64) -> Result<ModelParams> {
        match &self.q {
            Some(q) => ModelParams::new(self.goal, p_c, p_f, q.clone()),
            None => ModelParams::uniform(self.goal, p_c, p_f),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p_c.is_empty() || self.p_f.is_empty() {
            return Err(Error::InvalidConfig("sweep grid is empty".into()));
        }
        for &p_c in &self.p_c {
            for &p_f in &self.p_f {
                self.cell_params(p_c, p_f)?;
            }
        }
        self.experiment(self.cell_params(self.p_c[0], self.p_f[0])?).validate()
    }

    fn experiment(&self, params: ModelParams) -> ExperimentConfig {
        ExperimentConfig {
            params,
            horizon: self.horizon,
            iterations: self.iterations,
            algorithms: vec![self.algorithm],
            master_seed: self.master_seed,
            regret_mode: self.regret_mode,
            gamma: self.gamma,
            init: self.init,
            step_cap: DEFAULT_STEP_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub p_c: f64,
    pub p_f: f64,
    pub region: RegionLabel,
    /// Mean cumulative regret at the horizon.
    pub regret_mean: f64,
    pub regret_std: f64,
    /// Boundary `p_f` value at this cell's `p_c`.
    pub boundary: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub config: SweepConfig,
    /// Row-major: `p_c` outer, `p_f` inner.
    pub cells: Vec<SweepCell>,
}

pub fn sweep(config: &SweepConfig) -> Result<SweepResult> {
    sweep_with(config, Execution::from_env())
}

pub fn sweep_with(config: &SweepConfig, exec: Execution) -> Result<SweepResult> {
    config.validate()?;
    let mut cells = Vec::with_capacity(config.p_c.len() * config.p_f.len());
    for &p_c in &config.p_c {
        for &p_f in &config.p_f {
            let params = config.cell_params(p_c, p_f)?;
            let (_, region) = optimal_threshold(&params);
            let result = run_experiment_with(&config.experiment(params), exec)?;
            let curve = &result.curves[0];
            cells.push(SweepCell {
                p_c,
                p_f,
                region,
                regret_mean: curve.final_mean(),
                regret_std: curve.final_std(),
                boundary: boundary(p_c, config.goal),
            });
        }
    }
    Ok(SweepResult {
        config: config.clone(),
        cells,
    })
}
