//! Regret accounting and Monte Carlo experiments.
//!
//! Each iteration of an experiment owns a private random stream derived from
//! the master seed and the iteration index, and every algorithm sees the
//! same stream for a given iteration. Per-iteration regret curves are
//! reduced in iteration order, so results do not depend on the worker count.

mod output;
mod sweep;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use output::{write_regret_csv, write_sidecar, write_sweep_csv, Sidecar, REGRET_CSV_HEADER, SWEEP_CSV_HEADER};
pub use sweep::{open_grid, sweep, sweep_with, SweepCell, SweepConfig, SweepResult};

use crate::analytics::{optimal_policy, optimal_value, policy_value};
use crate::env::{Environment, DEFAULT_STEP_CAP};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::learners::{AlgorithmSpec, Executed, InitMode, RoundOutcome, DEFAULT_GAMMA};
use crate::model::{ModelParams, Policy};
use crate::seed::RngSeed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegretMode {
    /// Charge `V* - V(executed behavior)` per round.
    #[default]
    Pseudo,
    /// Charge `V* - reward` per round.
    Empirical,
}

/// Regret charged for one round.
pub fn round_regret_increment(executed_value: f64, v_star: f64) -> f64 {
    v_star - executed_value
}

/// Memoized `q`-weighted values of executed behaviors.
#[derive(Debug, Clone)]
pub struct ValueTable {
    params: ModelParams,
    cache: HashMap<Policy, f64>,
}

impl ValueTable {
    pub fn new(params: &ModelParams) -> Self {
        Self {
            params: params.clone(),
            cache: HashMap::new(),
        }
    }

    /// Forced exploration succeeds with probability `p_f` from any state.
    pub fn value(&mut self, executed: &Executed) -> f64 {
        match executed {
            Executed::ForcedExploration => self.params.p_f(),
            Executed::Policy(pi) => {
                if let Some(v) = self.cache.get(pi) {
                    return *v;
                }
                let v = policy_value(pi, &self.params).value;
                self.cache.insert(pi.clone(), v);
                v
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    pub horizon: usize,
    pub iterations: usize,
    pub algorithms: Vec<AlgorithmSpec>,
    pub master_seed: u64,
    #[serde(default)]
    pub regret_mode: RegretMode,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_init")]
    pub init: InitMode,
    #[serde(default = "default_step_cap")]
    pub step_cap: u64,
}

fn default_gamma() -> f64 {
    DEFAULT_GAMMA
}

fn default_init() -> InitMode {
    InitMode::RandomizedUnit
}

fn default_step_cap() -> u64 {
    DEFAULT_STEP_CAP
}

impl ExperimentConfig {
    /// Uniform-start benchmark with the reference protocol: horizon 5000,
    /// 200 iterations, `gamma = 15`, randomized unit initialization.
    pub fn benchmark(goal: usize, p_c: f64, p_f: f64, algorithms: Vec<AlgorithmSpec>) -> Result<Self> {
        Ok(Self {
            params: ModelParams::uniform(goal, p_c, p_f)?,
            horizon: 5000,
            iterations: 200,
            algorithms,
            master_seed: 0,
            regret_mode: RegretMode::Pseudo,
            gamma: DEFAULT_GAMMA,
            init: InitMode::RandomizedUnit,
            step_cap: DEFAULT_STEP_CAP,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be at least 1".into()));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidConfig("no algorithms selected".into()));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if self.step_cap == 0 {
            return Err(Error::InvalidConfig("step cap must be positive".into()));
        }
        Ok(())
    }

    fn environment(&self) -> Environment {
        Environment::new(self.params.clone()).with_step_cap(self.step_cap)
    }
}

/// Per-round cumulative regret across iterations for one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretCurve {
    pub algorithm: AlgorithmSpec,
    /// `mean[t - 1]` is the mean cumulative regret after round `t`.
    pub mean: Vec<f64>,
    /// Sample standard deviation across iterations (0 for one iteration).
    pub std: Vec<f64>,
}

impl RegretCurve {
    /// Mean cumulative regret after 1-based round `t`.
    pub fn at(&self, t: usize) -> f64 {
        self.mean[t - 1]
    }

    pub fn final_mean(&self) -> f64 {
        *self.mean.last().expect("horizon >= 1")
    }

    pub fn final_std(&self) -> f64 {
        *self.std.last().expect("horizon >= 1")
    }
}

/// Counts collected over one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RunStats {
    pub final_regret: f64,
    pub forced_explorations: u64,
    /// `F` selections in rounds whose estimated threshold was 0.
    pub f_in_tau0_rounds: u64,
    pub tau1_rounds: u64,
    /// Rounds whose executed behavior was not the optimal policy.
    pub suboptimal_rounds: u64,
    pub f_selections: u64,
    pub rewards: u64,
}

/// One algorithm over one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub cumulative_regret: Vec<f64>,
    pub stats: RunStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub curves: Vec<RegretCurve>,
    /// `stats[a][i]` for algorithm `a`, iteration `i`.
    pub stats: Vec<Vec<RunStats>>,
}

impl ExperimentResult {
    pub fn curve(&self, algorithm: AlgorithmSpec) -> Option<&RegretCurve> {
        self.curves.iter().find(|c| c.algorithm == algorithm)
    }

    pub fn stats_for(&self, algorithm: AlgorithmSpec) -> Option<&[RunStats]> {
        let i = self.config.algorithms.iter().position(|&a| a == algorithm)?;
        Some(&self.stats[i])
    }
}

/// Simulate one algorithm for `config.horizon` rounds on iteration
/// `iteration`'s random stream.
pub fn run_iteration(config: &ExperimentConfig, algorithm: AlgorithmSpec, iteration: u64) -> Result<IterationRecord> {
    let env = config.environment();
    let mut rng = RngSeed(config.master_seed).iteration_rng(iteration);
    let mut learner = algorithm.build(&env, config.gamma, config.init, &mut rng)?;
    let goal = config.params.goal();
    let v_star = optimal_value(&config.params);
    let optimal = Executed::Policy(optimal_policy(&config.params));
    let mut values = ValueTable::new(&config.params);

    let mut stats = RunStats::default();
    let mut regret = 0.0;
    let mut curve = Vec::with_capacity(config.horizon);
    for _ in 0..config.horizon {
        let RoundOutcome {
            trace,
            executed,
            estimated_threshold,
        } = learner.play_round(&env, &mut rng)?;
        let executed = match executed {
            Executed::Policy(pi) => Executed::Policy(pi.canonical(goal)),
            other => other,
        };
        let earned = match config.regret_mode {
            RegretMode::Pseudo => values.value(&executed),
            RegretMode::Empirical => f64::from(trace.reward),
        };
        regret += round_regret_increment(earned, v_star);
        curve.push(regret);

        stats.f_selections += trace.t_f;
        stats.rewards += u64::from(trace.reward);
        stats.forced_explorations += u64::from(executed == Executed::ForcedExploration);
        stats.suboptimal_rounds += u64::from(executed != optimal);
        match estimated_threshold {
            Some(0) => stats.f_in_tau0_rounds += trace.t_f,
            Some(_) => stats.tau1_rounds += 1,
            None => {}
        }
    }
    stats.final_regret = regret;
    Ok(IterationRecord {
        cumulative_regret: curve,
        stats,
    })
}

/// [`run_experiment_with`] using [`Execution::from_env`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    run_experiment_with(config, Execution::from_env())
}

pub fn run_experiment_with(config: &ExperimentConfig, exec: Execution) -> Result<ExperimentResult> {
    config.validate()?;
    let mut curves = Vec::with_capacity(config.algorithms.len());
    let mut stats = Vec::with_capacity(config.algorithms.len());
    for &algorithm in &config.algorithms {
        let records = exec
            .map(config.iterations, |i| run_iteration(config, algorithm, i as u64))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        curves.push(aggregate(algorithm, &records, config.horizon));
        stats.push(records.iter().map(|r| r.stats).collect());
    }
    Ok(ExperimentResult {
        config: config.clone(),
        curves,
        stats,
    })
}

fn aggregate(algorithm: AlgorithmSpec, records: &[IterationRecord], horizon: usize) -> RegretCurve {
    let n = records.len() as f64;
    let mut mean = vec![0.0; horizon];
    let mut std = vec![0.0; horizon];
    for t in 0..horizon {
        let m = records.iter().map(|r| r.cumulative_regret[t]).sum::<f64>() / n;
        mean[t] = m;
        if records.len() > 1 {
            let ss = records
                .iter()
                .map(|r| (r.cumulative_regret[t] - m).powi(2))
                .sum::<f64>();
            std[t] = (ss / (n - 1.0)).sqrt();
        }
    }
    RegretCurve { algorithm, mean, std }
}
