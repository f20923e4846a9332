//! Policy-as-arm baselines: each arm is a whole stationary policy, chosen at
//! the start of a round and followed until absorption. The only feedback is
//! the round's Bernoulli reward.

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::analytics::enumerate_policies;
use crate::env::{Environment, RoundTrace};
use crate::error::{Error, Result};
use crate::model::Policy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArmSelector {
    /// UCB1: `mean + sqrt(2 ln n / n_arm)`, every arm pulled once first.
    Ucb1,
    /// Thompson sampling with Beta(1, 1) priors.
    Posterior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyBanditState {
    selector: ArmSelector,
    arms: Vec<Policy>,
    pulls: Vec<u64>,
    reward_sums: Vec<f64>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl PolicyBanditState {
    pub fn new(selector: ArmSelector, arms: Vec<Policy>) -> Result<Self> {
        if arms.is_empty() {
            return Err(Error::InvalidConfig("policy bandit needs at least one arm".into()));
        }
        let k = arms.len();
        Ok(Self {
            selector,
            arms,
            pulls: vec![0; k],
            reward_sums: vec![0.0; k],
            alpha: vec![1.0; k],
            beta: vec![1.0; k],
        })
    }

    /// The two threshold policies `{0, 1}`.
    pub fn thresholds(selector: ArmSelector) -> Self {
        Self::new(selector, vec![Policy::Threshold(0), Policy::Threshold(1)]).expect("two arms")
    }

    /// Every stationary deterministic policy for `goal`.
    pub fn all_policies(selector: ArmSelector, goal: usize) -> Result<Self> {
        Self::new(selector, enumerate_policies(goal)?)
    }

    pub fn arms(&self) -> &[Policy] {
        &self.arms
    }

    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }

    pub fn selector(&self) -> ArmSelector {
        self.selector
    }

    pub fn posterior(&self, arm: usize) -> (f64, f64) {
        (self.alpha[arm], self.beta[arm])
    }

    /// Arm for the next round. Ties go to the lowest index.
    pub fn select<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match self.selector {
            ArmSelector::Ucb1 => {
                if let Some(i) = self.pulls.iter().position(|&n| n == 0) {
                    return i;
                }
                let log_total = (self.pulls.iter().sum::<u64>() as f64).ln();
                argmax((0..self.arms.len()).map(|i| {
                    let n = self.pulls[i] as f64;
                    self.reward_sums[i] / n + (2.0 * log_total / n).sqrt()
                }))
            }
            ArmSelector::Posterior => argmax((0..self.arms.len()).map(|i| {
                Beta::new(self.alpha[i], self.beta[i])
                    .expect("alpha, beta >= 1")
                    .sample(rng)
            })),
        }
    }

    pub fn update(&mut self, arm: usize, reward: u8) {
        let x = f64::from(reward);
        self.pulls[arm] += 1;
        self.reward_sums[arm] += x;
        self.alpha[arm] += x;
        self.beta[arm] += 1.0 - x;
    }

    /// Select an arm, follow its policy for one round, record the reward.
    pub fn run_round<R: Rng + ?Sized>(&mut self, env: &Environment, rng: &mut R) -> Result<(RoundTrace, usize)> {
        let arm = self.select(rng);
        let pi = &self.arms[arm];
        let trace = env.run_round(|s, _| pi.action(s), rng)?;
        self.update(arm, trace.reward);
        Ok((trace, arm))
    }
}

fn argmax(it: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in it.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}
