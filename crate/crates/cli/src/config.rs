//! Layered run settings: built-in defaults, then a config file, then flags.
//!
//! The config file is either TOML with `[model]`, `[run]`, `[sweep]` and
//! `[verify]` sections, or a JSON sidecar written by a previous run.

use std::path::Path;

use grbp::env::DEFAULT_STEP_CAP;
use grbp::harness::{ExperimentConfig, RegretMode, Sidecar, SweepConfig};
use grbp::learners::{AlgorithmSpec, InitMode, DEFAULT_GAMMA};
use grbp::{Error, ModelParams, Result};
use serde::Deserialize;

pub const DEFAULT_GOAL: usize = 4;
pub const DEFAULT_P_C: f64 = 0.45;
pub const DEFAULT_P_F: f64 = 0.3;
pub const DEFAULT_HORIZON: usize = 5000;
pub const DEFAULT_ITERATIONS: usize = 200;
pub const DEFAULT_SWEEP_GRID: usize = 9;
pub const DEFAULT_SWEEP_HORIZON: usize = 1000;
pub const DEFAULT_SWEEP_ITERATIONS: usize = 50;

/// Every overridable setting. `None` means "not set at this layer".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub goal: Option<usize>,
    pub p_c: Option<f64>,
    pub p_f: Option<f64>,
    pub q: Option<Vec<f64>>,
    pub horizon: Option<usize>,
    pub iterations: Option<usize>,
    pub seed: Option<u64>,
    pub gamma: Option<f64>,
    pub algorithms: Option<Vec<AlgorithmSpec>>,
    pub regret_mode: Option<RegretMode>,
    pub init: Option<InitMode>,
    pub step_cap: Option<u64>,
    /// Sweep: points per axis of the open grid.
    pub grid: Option<usize>,
    pub sweep_p_c: Option<Vec<f64>>,
    pub sweep_p_f: Option<Vec<f64>>,
    pub g_min: Option<usize>,
    pub g_max: Option<usize>,
    pub verify_grid: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TomlFile {
    #[serde(default)]
    model: ModelSection,
    #[serde(default)]
    run: RunSection,
    #[serde(default)]
    sweep: SweepSection,
    #[serde(default)]
    verify: VerifySection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    #[serde(rename = "G")]
    goal: Option<usize>,
    p_c: Option<f64>,
    p_f: Option<f64>,
    q: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    #[serde(rename = "T")]
    horizon: Option<usize>,
    iterations: Option<usize>,
    seed: Option<u64>,
    gamma: Option<f64>,
    algorithms: Option<Vec<AlgorithmSpec>>,
    regret_mode: Option<RegretMode>,
    init: Option<InitMode>,
    step_cap: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    grid: Option<usize>,
    p_c: Option<Vec<f64>>,
    p_f: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifySection {
    g_min: Option<usize>,
    g_max: Option<usize>,
    grid: Option<usize>,
}

impl From<TomlFile> for Settings {
    fn from(f: TomlFile) -> Self {
        Settings {
            goal: f.model.goal,
            p_c: f.model.p_c,
            p_f: f.model.p_f,
            q: f.model.q,
            horizon: f.run.horizon,
            iterations: f.run.iterations,
            seed: f.run.seed,
            gamma: f.run.gamma,
            algorithms: f.run.algorithms,
            regret_mode: f.run.regret_mode,
            init: f.run.init,
            step_cap: f.run.step_cap,
            grid: f.sweep.grid,
            sweep_p_c: f.sweep.p_c,
            sweep_p_f: f.sweep.p_f,
            g_min: f.verify.g_min,
            g_max: f.verify.g_max,
            verify_grid: f.verify.grid,
        }
    }
}

impl From<&ExperimentConfig> for Settings {
    fn from(c: &ExperimentConfig) -> Self {
        Settings {
            goal: Some(c.params.goal()),
            p_c: Some(c.params.p_c()),
            p_f: Some(c.params.p_f()),
            q: Some(c.params.q().to_vec()),
            horizon: Some(c.horizon),
            iterations: Some(c.iterations),
            seed: Some(c.master_seed),
            gamma: Some(c.gamma),
            algorithms: Some(c.algorithms.clone()),
            regret_mode: Some(c.regret_mode),
            init: Some(c.init),
            step_cap: Some(c.step_cap),
            ..Settings::default()
        }
    }
}

impl From<&SweepConfig> for Settings {
    fn from(c: &SweepConfig) -> Self {
        Settings {
            goal: Some(c.goal),
            q: c.q.clone(),
            horizon: Some(c.horizon),
            iterations: Some(c.iterations),
            seed: Some(c.master_seed),
            gamma: Some(c.gamma),
            algorithms: Some(vec![c.algorithm]),
            regret_mode: Some(c.regret_mode),
            init: Some(c.init),
            sweep_p_c: Some(c.p_c.clone()),
            sweep_p_f: Some(c.p_f.clone()),
            ..Settings::default()
        }
    }
}

/// Read a config file. `command` names the subcommand, used to interpret a
/// JSON sidecar.
pub fn load(path: &Path, command: &str) -> Result<Settings> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    let bad = |e: &dyn std::fmt::Display| Error::InvalidConfig(format!("{}: {e}", path.display()));
    if path.extension().is_some_and(|x| x == "json") {
        let sidecar: Sidecar<serde_json::Value> = serde_json::from_str(&text).map_err(|e| bad(&e))?;
        if sidecar.command != command {
            return Err(bad(&format!(
                "sidecar was written by `{}`, not `{command}`",
                sidecar.command
            )));
        }
        return match command {
            "simulate" => {
                let c: ExperimentConfig = serde_json::from_value(sidecar.config).map_err(|e| bad(&e))?;
                Ok(Settings::from(&c))
            }
            "sweep" => {
                let c: SweepConfig = serde_json::from_value(sidecar.config).map_err(|e| bad(&e))?;
                Ok(Settings::from(&c))
            }
            _ => Err(bad(&format!("`{command}` does not read sidecars"))),
        };
    }
    let file: TomlFile = toml::from_str(&text).map_err(|e| bad(&e))?;
    Ok(file.into())
}

fn pick<T: Clone>(over: &Option<T>, base: &Option<T>) -> Option<T> {
    over.clone().or_else(|| base.clone())
}

impl Settings {
    /// Values set in `over` win.
    pub fn overlay(&self, over: &Settings) -> Settings {
        Settings {
            goal: pick(&over.goal, &self.goal),
            p_c: pick(&over.p_c, &self.p_c),
            p_f: pick(&over.p_f, &self.p_f),
            // q is tied to G: a new G on the command line drops the file's q.
            q: match (&over.q, over.goal) {
                (Some(q), _) => Some(q.clone()),
                (None, Some(g)) if self.goal != Some(g) => None,
                (None, _) => self.q.clone(),
            },
            horizon: pick(&over.horizon, &self.horizon),
            iterations: pick(&over.iterations, &self.iterations),
            seed: pick(&over.seed, &self.seed),
            gamma: pick(&over.gamma, &self.gamma),
            algorithms: pick(&over.algorithms, &self.algorithms),
            regret_mode: pick(&over.regret_mode, &self.regret_mode),
            init: pick(&over.init, &self.init),
            step_cap: pick(&over.step_cap, &self.step_cap),
            grid: pick(&over.grid, &self.grid),
            sweep_p_c: pick(&over.sweep_p_c, &self.sweep_p_c),
            sweep_p_f: pick(&over.sweep_p_f, &self.sweep_p_f),
            g_min: pick(&over.g_min, &self.g_min),
            g_max: pick(&over.g_max, &self.g_max),
            verify_grid: pick(&over.verify_grid, &self.verify_grid),
        }
    }

    pub fn params(&self) -> Result<ModelParams> {
        let goal = self.goal.unwrap_or(DEFAULT_GOAL);
        let p_c = self.p_c.unwrap_or(DEFAULT_P_C);
        let p_f = self.p_f.unwrap_or(DEFAULT_P_F);
        match &self.q {
            Some(q) => ModelParams::new(goal, p_c, p_f, q.clone()),
            None => ModelParams::uniform(goal, p_c, p_f),
        }
    }

    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let config = ExperimentConfig {
            params: self.params()?,
            horizon: self.horizon.unwrap_or(DEFAULT_HORIZON),
            iterations: self.iterations.unwrap_or(DEFAULT_ITERATIONS),
            algorithms: self
                .algorithms
                .clone()
                .unwrap_or_else(|| AlgorithmSpec::BENCHMARK.to_vec()),
            master_seed: self.seed.unwrap_or(0),
            regret_mode: self.regret_mode.unwrap_or_default(),
            gamma: self.gamma.unwrap_or(DEFAULT_GAMMA),
            init: self.init.unwrap_or(InitMode::RandomizedUnit),
            step_cap: self.step_cap.unwrap_or(DEFAULT_STEP_CAP),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn sweep(&self) -> Result<SweepConfig> {
        let goal = self.goal.unwrap_or(DEFAULT_GOAL);
        let mut config = SweepConfig::grid(goal, self.grid.unwrap_or(DEFAULT_SWEEP_GRID));
        if let Some(p) = &self.sweep_p_c {
            config.p_c = p.clone();
        }
        if let Some(p) = &self.sweep_p_f {
            config.p_f = p.clone();
        }
        config.q = self.q.clone();
        config.horizon = self.horizon.unwrap_or(DEFAULT_SWEEP_HORIZON);
        config.iterations = self.iterations.unwrap_or(DEFAULT_SWEEP_ITERATIONS);
        config.master_seed = self.seed.unwrap_or(0);
        config.regret_mode = self.regret_mode.unwrap_or_default();
        config.gamma = self.gamma.unwrap_or(DEFAULT_GAMMA);
        config.init = self.init.unwrap_or(InitMode::RandomizedUnit);
        match self.algorithms.as_deref() {
            None => {}
            Some([a]) => config.algorithm = *a,
            Some(list) => {
                return Err(Error::InvalidConfig(format!(
                    "sweep runs exactly one algorithm, got {}",
                    list.len()
                )))
            }
        }
        if self.step_cap.is_some() {
            return Err(Error::InvalidConfig("sweep does not take a step cap".into()));
        }
        config.validate()?;
        Ok(config)
    }
}
