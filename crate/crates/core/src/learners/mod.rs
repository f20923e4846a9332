//! Learners sharing one per-round interface: observe the initial state,
//! act until absorption, update internal statistics.

mod getbe;
mod policy_bandit;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use getbe::{
    control, estimates, estimator_variants, getbe_decide, getbe_threshold, Counters, Estimates, Estimator, Getbe,
    GetbeConfig, GetbeRound, InitMode, DEFAULT_GAMMA,
};
pub use policy_bandit::{ArmSelector, PolicyBanditState};

use crate::analytics::optimal_policy;
use crate::env::{Environment, RoundTrace};
use crate::error::{Error, Result};
use crate::model::Policy;

/// What the learner actually executed in a round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Executed {
    /// A stationary policy followed for the whole round.
    Policy(Policy),
    /// `F` at the first time slot, regardless of the start state.
    ForcedExploration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    pub trace: RoundTrace,
    pub executed: Executed,
    /// Threshold the learner believed optimal, for GETBE variants.
    pub estimated_threshold: Option<usize>,
}

/// Named algorithms available to experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgorithmSpec {
    #[serde(rename = "GETBE-SM")]
    GetbeSm,
    #[serde(rename = "GETBE-PS")]
    GetbePs,
    #[serde(rename = "GETBE-UCB")]
    GetbeUcb,
    #[serde(rename = "UCB-PolSelection")]
    UcbPolSelection,
    #[serde(rename = "PS-PolSelection")]
    PsPolSelection,
    /// UCB1 over all `2^(G-1)` stationary policies.
    #[serde(rename = "UCB1-AllPolicies")]
    Ucb1AllPolicies,
    /// Plays the optimal policy from the first round.
    #[serde(rename = "Oracle")]
    Oracle,
}

impl AlgorithmSpec {
    pub const ALL: [AlgorithmSpec; 7] = [
        AlgorithmSpec::GetbeSm,
        AlgorithmSpec::GetbePs,
        AlgorithmSpec::GetbeUcb,
        AlgorithmSpec::UcbPolSelection,
        AlgorithmSpec::PsPolSelection,
        AlgorithmSpec::Ucb1AllPolicies,
        AlgorithmSpec::Oracle,
    ];

    /// GETBE variants plus the two threshold-policy baselines.
    pub const BENCHMARK: [AlgorithmSpec; 5] = [
        AlgorithmSpec::GetbeSm,
        AlgorithmSpec::GetbePs,
        AlgorithmSpec::GetbeUcb,
        AlgorithmSpec::UcbPolSelection,
        AlgorithmSpec::PsPolSelection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmSpec::GetbeSm => "GETBE-SM",
            AlgorithmSpec::GetbePs => "GETBE-PS",
            AlgorithmSpec::GetbeUcb => "GETBE-UCB",
            AlgorithmSpec::UcbPolSelection => "UCB-PolSelection",
            AlgorithmSpec::PsPolSelection => "PS-PolSelection",
            AlgorithmSpec::Ucb1AllPolicies => "UCB1-AllPolicies",
            AlgorithmSpec::Oracle => "Oracle",
        }
    }

    pub fn estimator(self) -> Option<Estimator> {
        match self {
            AlgorithmSpec::GetbeSm => Some(Estimator::SampleMean),
            AlgorithmSpec::GetbePs => Some(Estimator::PosteriorSample),
            AlgorithmSpec::GetbeUcb => Some(Estimator::UcbInflated),
            _ => None,
        }
    }

    /// Fresh learner for one Monte Carlo iteration.
    pub fn build<R: Rng + ?Sized>(self, env: &Environment, gamma: f64, init: InitMode, rng: &mut R) -> Result<Learner> {
        if let Some(estimator) = self.estimator() {
            let config = GetbeConfig { gamma, estimator, init };
            return Ok(Learner::Getbe(Getbe::initialize(config, env, rng)?));
        }
        Ok(match self {
            AlgorithmSpec::UcbPolSelection => Learner::PolicyBandit(PolicyBanditState::thresholds(ArmSelector::Ucb1)),
            AlgorithmSpec::PsPolSelection => {
                Learner::PolicyBandit(PolicyBanditState::thresholds(ArmSelector::Posterior))
            }
            AlgorithmSpec::Ucb1AllPolicies => {
                Learner::PolicyBandit(PolicyBanditState::all_policies(ArmSelector::Ucb1, env.params().goal())?)
            }
            AlgorithmSpec::Oracle => Learner::Oracle(optimal_policy(env.params())),
            _ => unreachable!("GETBE variants handled above"),
        })
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmSpec {
    type Err = Error;

    /// Case-insensitive; `_` and `-` are interchangeable.
    fn from_str(s: &str) -> Result<Self> {
        let norm = |x: &str| x.trim().to_ascii_lowercase().replace('_', "-");
        let key = norm(s);
        AlgorithmSpec::ALL
            .into_iter()
            .find(|a| norm(a.name()) == key)
            .or(match key.as_str() {
                "ucb1" | "ucb1-all" => Some(AlgorithmSpec::Ucb1AllPolicies),
                _ => None,
            })
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Learner {
    Getbe(Getbe),
    PolicyBandit(PolicyBanditState),
    Oracle(Policy),
}

impl Learner {
    pub fn play_round<R: Rng + ?Sized>(&mut self, env: &Environment, rng: &mut R) -> Result<RoundOutcome> {
        match self {
            Learner::Getbe(g) => {
                let out = g.run_round(env, rng)?;
                let executed = if out.explored {
                    Executed::ForcedExploration
                } else {
                    Executed::Policy(Policy::Threshold(out.tau))
                };
                Ok(RoundOutcome {
                    trace: out.trace,
                    executed,
                    estimated_threshold: Some(out.tau),
                })
            }
            Learner::PolicyBandit(b) => {
                let (trace, arm) = b.run_round(env, rng)?;
                Ok(RoundOutcome {
                    trace,
                    executed: Executed::Policy(b.arms()[arm].clone()),
                    estimated_threshold: None,
                })
            }
            Learner::Oracle(pi) => {
                let trace = env.run_round(|s, _| pi.action(s), rng)?;
                Ok(RoundOutcome {
                    trace,
                    executed: Executed::Policy(pi.clone()),
                    estimated_threshold: None,
                })
            }
        }
    }
}
