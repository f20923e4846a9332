//! Greedy Exploitation with Threshold Based Exploration (GETBE).
//!
//! At the start of each round the learner estimates `p_f` and `p_c` from its
//! counters, picks the threshold (0 or 1) the sign rule gives for the
//! estimates, and plays it. When threshold 0 is picked while `N_F < D(rho)`,
//! `F` is forced in the first time slot instead.

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::analytics::threshold_rule;
use crate::env::{Environment, RoundTrace};
use crate::error::{Error, Result};
use crate::model::Action;

/// Default control-function coefficient.
pub const DEFAULT_GAMMA: f64 = 15.0;

/// GETBE's sufficient statistics `N_F`, `N_F^G`, `N_C`, `N_C^u`.
///
/// Real-valued so that randomized pseudo-count initialization fits.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Counters {
    pub n_f: f64,
    pub n_fg: f64,
    pub n_c: f64,
    pub n_cu: f64,
}

impl Counters {
    /// Add the per-round tallies of a trace.
    pub fn merge(&mut self, trace: &RoundTrace) {
        self.n_f += trace.t_f as f64;
        self.n_fg += trace.t_fg as f64;
        self.n_c += trace.t_c as f64;
        self.n_cu += trace.t_cu as f64;
    }

    pub fn is_consistent(&self) -> bool {
        self.n_fg >= 0.0 && self.n_cu >= 0.0 && self.n_fg <= self.n_f && self.n_cu <= self.n_c
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimates {
    pub p_f: f64,
    pub p_c: f64,
    /// `(1 - p_c) / p_c`; infinite when `p_c = 0`.
    pub r: f64,
}

/// Sample-mean estimates of `p_f`, `p_c` and the failure ratio.
pub fn estimates(counters: &Counters) -> Result<Estimates> {
    if counters.n_f <= 0.0 {
        return Err(Error::EmptyCounter("N_F"));
    }
    if counters.n_c <= 0.0 {
        return Err(Error::EmptyCounter("N_C"));
    }
    let p_f = counters.n_fg / counters.n_f;
    let p_c = counters.n_cu / counters.n_c;
    let r = if p_c > 0.0 { (1.0 - p_c) / p_c } else { f64::INFINITY };
    Ok(Estimates { p_f, p_c, r })
}

/// Estimated threshold for estimated probabilities.
///
/// `p_c = 0` (infinite failure ratio) gives the limit boundary 0, hence 1.
pub fn getbe_threshold(p_f: f64, p_c: f64, goal: usize) -> usize {
    threshold_rule(p_f, p_c, goal)
}

/// Control function `D(rho) = gamma ln(rho)`.
pub fn control(rho: u64, gamma: f64) -> f64 {
    gamma * (rho as f64).ln()
}

/// Action for state `s` given the round's threshold and exploration flag.
pub fn getbe_decide(s: usize, tau: usize, explore_active: bool) -> Action {
    if explore_active || s <= tau {
        Action::F
    } else {
        Action::C
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// Sample means plus control-function exploration.
    SampleMean,
    /// Beta(1, 1)-prior posterior draws; no control function.
    PosteriorSample,
    /// Sample means plus a UCB inflation term; no control function.
    UcbInflated,
}

impl Estimator {
    pub fn uses_control(self) -> bool {
        matches!(self, Estimator::SampleMean)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitMode {
    /// One real `C` transition and one real `F` transition.
    SeedRounds,
    /// `N_F = N_C = 1` with `N_F^G`, `N_C^u` drawn uniformly from `[0, 1]`.
    RandomizedUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GetbeConfig {
    pub gamma: f64,
    pub estimator: Estimator,
    pub init: InitMode,
}

impl GetbeConfig {
    pub fn new(estimator: Estimator) -> Self {
        Self {
            gamma: DEFAULT_GAMMA,
            estimator,
            init: InitMode::RandomizedUnit,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma > 0.0 && self.gamma.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "gamma must be positive, got {}",
                self.gamma
            )))
        }
    }
}

/// Probabilities fed to the threshold rule by each estimator.
pub fn estimator_variants<R: Rng + ?Sized>(
    estimator: Estimator,
    counters: &Counters,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let est = estimates(counters)?;
    Ok(match estimator {
        Estimator::SampleMean => (est.p_f, est.p_c),
        Estimator::PosteriorSample => {
            let draw = |rng: &mut R, hits: f64, n: f64| -> Result<f64> {
                Beta::new(hits + 1.0, n - hits + 1.0)
                    .map(|b| b.sample(rng))
                    .map_err(|e| Error::InvalidConfig(format!("beta posterior: {e}")))
            };
            let p_f = draw(rng, counters.n_fg, counters.n_f)?;
            let p_c = draw(rng, counters.n_cu, counters.n_c)?;
            (p_f, p_c)
        }
        Estimator::UcbInflated => {
            let log_total = (counters.n_f + counters.n_c).ln();
            let inflate = |mean: f64, n: f64| (mean + (2.0 * log_total / n).sqrt()).clamp(0.0, 1.0);
            (inflate(est.p_f, counters.n_f), inflate(est.p_c, counters.n_c))
        }
    })
}

/// One GETBE round.
#[derive(Debug, Clone, PartialEq)]
pub struct GetbeRound {
    pub trace: RoundTrace,
    /// Estimated threshold for the round.
    pub tau: usize,
    /// The round was a forced exploration (`F` at the first slot).
    pub explored: bool,
}

/// A GETBE learner: configuration, counters and the index of the next round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Getbe {
    config: GetbeConfig,
    counters: Counters,
    /// Index `rho` of the next round, starting at 1.
    round: u64,
}

impl Getbe {
    /// Form initial estimates according to `config.init`.
    ///
    /// Transitions simulated by [`InitMode::SeedRounds`] are not rounds.
    pub fn initialize<R: Rng + ?Sized>(config: GetbeConfig, env: &Environment, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let counters = match config.init {
            InitMode::SeedRounds => {
                let s = env.sample_initial_state(rng);
                let up = env.step(s, Action::C, rng)? == s + 1;
                let s = env.sample_initial_state(rng);
                let hit = env.step(s, Action::F, rng)? == env.params().goal();
                Counters {
                    n_f: 1.0,
                    n_fg: f64::from(u8::from(hit)),
                    n_c: 1.0,
                    n_cu: f64::from(u8::from(up)),
                }
            }
            InitMode::RandomizedUnit => Counters {
                n_f: 1.0,
                n_fg: rng.random::<f64>(),
                n_c: 1.0,
                n_cu: rng.random::<f64>(),
            },
        };
        Ok(Self {
            config,
            counters,
            round: 1,
        })
    }

    /// Resume from explicit state.
    pub fn from_parts(config: GetbeConfig, counters: Counters, round: u64) -> Result<Self> {
        config.validate()?;
        if !counters.is_consistent() || round == 0 {
            return Err(Error::Snapshot("inconsistent counters or round index".into()));
        }
        estimates(&counters)?;
        Ok(Self {
            config,
            counters,
            round,
        })
    }

    pub fn config(&self) -> &GetbeConfig {
        &self.config
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    /// Threshold and exploration flag for the coming round. Consumes
    /// randomness only for the posterior-sampling estimator.
    pub fn plan<R: Rng + ?Sized>(&self, goal: usize, rng: &mut R) -> Result<(usize, bool)> {
        let (p_f, p_c) = estimator_variants(self.config.estimator, &self.counters, rng)?;
        let tau = getbe_threshold(p_f, p_c, goal);
        let explore = self.config.estimator.uses_control()
            && tau == 0
            && self.counters.n_f < control(self.round, self.config.gamma);
        Ok((tau, explore))
    }

    /// Play one round and update the counters.
    pub fn run_round<R: Rng + ?Sized>(&mut self, env: &Environment, rng: &mut R) -> Result<GetbeRound> {
        let (tau, explored) = self.plan(env.params().goal(), rng)?;
        let trace = env.run_round(|s, _| getbe_decide(s, tau, explored), rng)?;
        self.counters.merge(&trace);
        self.round += 1;
        Ok(GetbeRound { trace, tau, explored })
    }

    /// Structured text snapshot (JSON) of config, counters and round index.
    pub fn to_snapshot(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_snapshot(text: &str) -> Result<Self> {
        let raw: Getbe = serde_json::from_str(text).map_err(|e| Error::Snapshot(e.to_string()))?;
        Self::from_parts(raw.config, raw.counters, raw.round)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::seed::RngSeed;

    fn counters(n_f: f64, n_fg: f64, n_c: f64, n_cu: f64) -> Counters {
        Counters { n_f, n_fg, n_c, n_cu }
    }

    #[test]
    fn estimate_examples() {
        let e = estimates(&counters(2.0, 1.0, 2.0, 1.0)).unwrap();
        assert_eq!((e.p_f, e.p_c, e.r), (0.5, 0.5, 1.0));
        assert_eq!(estimates(&counters(5.0, 0.0, 1.0, 1.0)).unwrap().p_f, 0.0);
        assert_eq!(estimates(&counters(1.0, 1.0, 3.0, 3.0)).unwrap().r, 0.0);
        assert!(estimates(&counters(1.0, 0.0, 3.0, 0.0)).unwrap().r.is_infinite());
    }

    #[test]
    fn estimates_need_both_counters() {
        assert_eq!(
            estimates(&counters(0.0, 0.0, 1.0, 0.0)),
            Err(Error::EmptyCounter("N_F"))
        );
        assert_eq!(
            estimates(&counters(1.0, 0.0, 0.0, 0.0)),
            Err(Error::EmptyCounter("N_C"))
        );
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(getbe_threshold(0.25, 0.5, 4), 1);
        assert_eq!(getbe_threshold(0.3, 0.45, 4), 1);
        assert_eq!(getbe_threshold(0.3, 0.65, 4), 0);
        // infinite failure ratio
        assert_eq!(getbe_threshold(0.0, 0.0, 4), 1);
        // r = 0: boundary is 1
        assert_eq!(getbe_threshold(0.99, 1.0, 4), 0);
        assert_eq!(getbe_threshold(1.0, 1.0, 4), 1);
    }

    #[test]
    fn control_examples() {
        assert_eq!(control(1, 15.0), 0.0);
        // 15 ln 5000 = 127.757897871243...
        assert!((control(5000, 15.0) - 127.757_897_871_243_6).abs() < 1e-9);
    }

    #[test]
    fn decide_examples() {
        assert_eq!(getbe_decide(1, 1, false), Action::F);
        assert_eq!(getbe_decide(2, 1, false), Action::C);
        for s in 1..8 {
            assert_eq!(getbe_decide(s, 0, false), Action::C);
        }
        assert_eq!(getbe_decide(3, 0, true), Action::F);
    }

    #[test]
    fn ucb_inflation_example() {
        let mut rng = RngSeed(0).rng();
        let (p_f, _) = estimator_variants(Estimator::UcbInflated, &counters(4.0, 2.0, 4.0, 2.0), &mut rng).unwrap();
        // 0.5 + sqrt(2 ln 8 / 4) = 1.5196..., clamped
        assert_eq!(p_f, 1.0);
        let c = counters(1000.0, 300.0, 1000.0, 450.0);
        let (p_f, p_c) = estimator_variants(Estimator::UcbInflated, &c, &mut rng).unwrap();
        let bonus = (2.0 * 2000f64.ln() / 1000.0).sqrt();
        assert!((p_f - (0.3 + bonus)).abs() < 1e-12);
        assert!((p_c - (0.45 + bonus)).abs() < 1e-12);
    }

    #[test]
    fn posterior_concentrates() {
        let mut rng = RngSeed(1).rng();
        let c = counters(1e6, 3e5, 1e6, 4.5e5);
        let draws: Vec<f64> = (0..2000)
            .map(|_| estimator_variants(Estimator::PosteriorSample, &c, &mut rng).unwrap().0)
            .collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
        assert!((mean - 0.3).abs() < 1e-3);
        assert!(var.sqrt() < 1e-2);
    }

    #[test]
    fn sample_mean_variant_is_estimates() {
        let mut rng = RngSeed(2).rng();
        let c = counters(7.0, 3.0, 11.0, 5.0);
        let e = estimates(&c).unwrap();
        assert_eq!(
            estimator_variants(Estimator::SampleMean, &c, &mut rng).unwrap(),
            (e.p_f, e.p_c)
        );
    }

    #[test]
    fn initialization_modes() {
        let env = Environment::new(ModelParams::uniform(4, 0.45, 0.3).unwrap());
        let mut rng = RngSeed(3).rng();
        for _ in 0..50 {
            let mut cfg = GetbeConfig::new(Estimator::SampleMean);
            cfg.init = InitMode::SeedRounds;
            let g = Getbe::initialize(cfg, &env, &mut rng).unwrap();
            let c = g.counters();
            assert_eq!((c.n_f, c.n_c), (1.0, 1.0));
            assert!(c.n_fg == 0.0 || c.n_fg == 1.0);
            assert!(c.n_cu == 0.0 || c.n_cu == 1.0);
            assert!(estimates(c).is_ok());

            cfg.init = InitMode::RandomizedUnit;
            let g = Getbe::initialize(cfg, &env, &mut rng).unwrap();
            let e = estimates(g.counters()).unwrap();
            assert!((0.0..=1.0).contains(&e.p_f));
            assert_eq!(e.p_f, g.counters().n_fg);
        }
    }

    #[test]
    fn rejects_non_positive_gamma() {
        let env = Environment::new(ModelParams::uniform(4, 0.45, 0.3).unwrap());
        let mut cfg = GetbeConfig::new(Estimator::SampleMean);
        cfg.gamma = 0.0;
        assert!(Getbe::initialize(cfg, &env, &mut RngSeed(0).rng()).is_err());
    }

    #[test]
    fn counters_advance_by_trace_tallies() {
        let env = Environment::new(ModelParams::uniform(5, 0.6, 0.3).unwrap());
        let mut rng = RngSeed(4).rng();
        for est in [
            Estimator::SampleMean,
            Estimator::PosteriorSample,
            Estimator::UcbInflated,
        ] {
            let mut g = Getbe::initialize(GetbeConfig::new(est), &env, &mut rng).unwrap();
            for _ in 0..300 {
                let before = *g.counters();
                let out = g.run_round(&env, &mut rng).unwrap();
                let after = *g.counters();
                assert!((after.n_f - before.n_f - out.trace.t_f as f64).abs() < 1e-9);
                assert!((after.n_fg - before.n_fg - out.trace.t_fg as f64).abs() < 1e-9);
                assert!((after.n_c - before.n_c - out.trace.t_c as f64).abs() < 1e-9);
                assert!((after.n_cu - before.n_cu - out.trace.t_cu as f64).abs() < 1e-9);
                assert!(after.is_consistent());
                assert!(out.trace.t_f <= 1);
                if out.explored {
                    assert_eq!((out.trace.t_f, out.trace.t_c), (1, 0));
                    assert_eq!(out.tau, 0);
                }
                if !est.uses_control() {
                    assert!(!out.explored);
                }
            }
        }
    }

    #[test]
    fn snapshot_round_trip() {
        let env = Environment::new(ModelParams::uniform(4, 0.45, 0.3).unwrap());
        let mut rng = RngSeed(5).rng();
        let mut g = Getbe::initialize(GetbeConfig::new(Estimator::SampleMean), &env, &mut rng).unwrap();
        for _ in 0..20 {
            g.run_round(&env, &mut rng).unwrap();
        }
        let text = g.to_snapshot();
        assert!(text.contains("\"round\": 21"));
        assert_eq!(Getbe::from_snapshot(&text).unwrap(), g);
        assert!(Getbe::from_snapshot(&text.replace("\"round\": 21", "\"round\": 0")).is_err());
        assert!(Getbe::from_snapshot("{").is_err());
    }
}
