//! Problem instance, actions and stationary policies.
//!
//! States are plain integers: `0` is the dead-end, `goal` is the goal and
//! `1..goal` are the non-terminal states.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `sum(q) == 1`.
pub const Q_SUM_TOL: f64 = 1e-12;

/// The dead-end state.
pub const DEAD_END: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    /// Continuation: move to `s + 1` with probability `p_c`, else `s - 1`.
    C,
    /// Terminal: move to the goal with probability `p_f`, else to the dead-end.
    F,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::C => f.write_str("C"),
            Action::F => f.write_str("F"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawParams {
    goal: usize,
    p_c: f64,
    p_f: f64,
    q: Vec<f64>,
}

/// A validated GRBP instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    goal: usize,
    p_c: f64,
    p_f: f64,
    q: Vec<f64>,
    // cumulative distribution of q, used for sampling
    cdf: Vec<f64>,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.goal, raw.p_c, raw.p_f, raw.q)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams {
            goal: p.goal,
            p_c: p.p_c,
            p_f: p.p_f,
            q: p.q,
        }
    }
}

fn open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "{name} must lie in the open interval (0, 1), got {v}"
        )))
    }
}

impl ModelParams {
    /// `q[i]` is the probability of starting in state `i + 1`.
    pub fn new(goal: usize, p_c: f64, p_f: f64, q: Vec<f64>) -> Result<Self> {
        if goal < 2 {
            return Err(Error::InvalidParams(format!("goal must be at least 2, got {goal}")));
        }
        open_unit("p_c", p_c)?;
        open_unit("p_f", p_f)?;
        if q.len() != goal - 1 {
            return Err(Error::InvalidParams(format!(
                "q must have goal - 1 = {} entries, got {}",
                goal - 1,
                q.len()
            )));
        }
        if let Some(bad) = q.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidParams(format!(
                "q entries must be finite and non-negative, got {bad}"
            )));
        }
        let total: f64 = q.iter().sum();
        if (total - 1.0).abs() > Q_SUM_TOL {
            return Err(Error::InvalidParams(format!(
                "q must sum to 1 (within {Q_SUM_TOL:e}), sums to {total}"
            )));
        }
        // with a single non-terminal state q(1) = 1 necessarily
        if goal > 2 && 1.0 - q[0] <= 0.0 {
            return Err(Error::InvalidParams(
                "1 - q(1) must be positive (q may not be concentrated on state 1)".into(),
            ));
        }
        let mut acc = 0.0;
        let cdf = q
            .iter()
            .map(|x| {
                acc += x;
                acc
            })
            .collect();
        Ok(Self { goal, p_c, p_f, q, cdf })
    }

    /// Uniform initial-state distribution over `1..goal`.
    pub fn uniform(goal: usize, p_c: f64, p_f: f64) -> Result<Self> {
        if goal < 2 {
            return Err(Error::InvalidParams(format!("goal must be at least 2, got {goal}")));
        }
        let n = goal - 1;
        Self::new(goal, p_c, p_f, vec![1.0 / n as f64; n])
    }

    pub fn goal(&self) -> usize {
        self.goal
    }

    pub fn p_c(&self) -> f64 {
        self.p_c
    }

    /// Probability of moving down under `C`.
    pub fn p_d(&self) -> f64 {
        1.0 - self.p_c
    }

    pub fn p_f(&self) -> f64 {
        self.p_f
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// Probability of starting in state `s`; zero for terminal states.
    pub fn q_of(&self, s: usize) -> f64 {
        if s == DEAD_END || s >= self.goal {
            0.0
        } else {
            self.q[s - 1]
        }
    }

    /// Failure ratio `p_d / p_c`.
    pub fn failure_ratio(&self) -> f64 {
        self.p_d() / self.p_c
    }

    pub fn is_terminal(&self, s: usize) -> bool {
        s == DEAD_END || s >= self.goal
    }

    /// Non-terminal states `1..goal`.
    pub fn states(&self) -> std::ops::Range<usize> {
        1..self.goal
    }

    /// Same instance with different transition probabilities.
    pub fn with_probabilities(&self, p_c: f64, p_f: f64) -> Result<Self> {
        Self::new(self.goal, p_c, p_f, self.q.clone())
    }

    /// Map a uniform draw `u` in `[0, 1)` to an initial state.
    pub(crate) fn state_for_quantile(&self, u: f64) -> usize {
        // states with q = 0 have a flat cdf step and are never returned
        let idx = self.cdf.partition_point(|&c| c <= u);
        let idx = idx.min(self.goal - 2);
        if self.q[idx] > 0.0 {
            idx + 1
        } else {
            // u landed past the last mass because of rounding in the cdf
            self.q.iter().rposition(|&x| x > 0.0).unwrap() + 1
        }
    }
}

/// A stationary deterministic Markov policy.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Policy {
    /// `F` in states `s <= tau`, `C` above.
    Threshold(usize),
    /// `actions[s - 1]` is the action in state `s`.
    General(Vec<Action>),
}

impl Policy {
    /// Never takes `F`.
    pub const ALWAYS_CONTINUE: Policy = Policy::Threshold(0);
    /// Takes `F` only in state 1.
    pub const STOP_AT_ONE: Policy = Policy::Threshold(1);

    /// Action in non-terminal state `s`.
    pub fn action(&self, s: usize) -> Action {
        match self {
            Policy::Threshold(tau) => {
                if s <= *tau {
                    Action::F
                } else {
                    Action::C
                }
            }
            Policy::General(actions) => actions[s - 1],
        }
    }

    pub fn validate(&self, goal: usize) -> Result<()> {
        match self {
            Policy::Threshold(tau) if *tau < goal => Ok(()),
            Policy::Threshold(tau) => Err(Error::InvalidPolicy(format!("threshold {tau} outside 0..{goal}"))),
            Policy::General(a) if a.len() == goal - 1 => Ok(()),
            Policy::General(a) => Err(Error::InvalidPolicy(format!(
                "general policy has {} actions, expected {}",
                a.len(),
                goal - 1
            ))),
        }
    }

    /// Action for every state `1..goal`.
    pub fn actions(&self, goal: usize) -> Vec<Action> {
        (1..goal).map(|s| self.action(s)).collect()
    }

    /// The threshold this policy is equivalent to, if it has threshold form.
    pub fn as_threshold(&self, goal: usize) -> Option<usize> {
        match self {
            Policy::Threshold(tau) => Some(*tau),
            Policy::General(a) => {
                let tau = a.iter().take_while(|&&x| x == Action::F).count();
                a[tau..].iter().all(|&x| x == Action::C).then_some(tau)
            }
        }
        .filter(|&tau| tau < goal)
    }

    /// Threshold form when possible, otherwise the general map.
    pub fn canonical(&self, goal: usize) -> Policy {
        match self.as_threshold(goal) {
            Some(tau) => Policy::Threshold(tau),
            None => Policy::General(self.actions(goal)),
        }
    }

    pub fn f_count(&self, goal: usize) -> usize {
        (1..goal).filter(|&s| self.action(s) == Action::F).count()
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Threshold(tau) => write!(f, "threshold({tau})"),
            Policy::General(a) => {
                for x in a {
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_probabilities() {
        assert!(ModelParams::uniform(4, 0.0, 0.3).is_err());
        assert!(ModelParams::uniform(4, 1.0, 0.3).is_err());
        assert!(ModelParams::uniform(4, 0.5, 0.0).is_err());
        assert!(ModelParams::uniform(4, 0.5, 1.0).is_err());
        assert!(ModelParams::uniform(1, 0.5, 0.3).is_err());
    }

    #[test]
    fn rejects_bad_initial_distribution() {
        assert!(ModelParams::new(4, 0.5, 0.3, vec![1.0, 0.0, 0.0]).is_err());
        assert!(ModelParams::new(4, 0.5, 0.3, vec![0.5, 0.5]).is_err());
        assert!(ModelParams::new(4, 0.5, 0.3, vec![0.5, 0.6, -0.1]).is_err());
        assert!(ModelParams::new(4, 0.5, 0.3, vec![0.5, 0.5, 1e-9]).is_err());
        assert!(ModelParams::new(4, 0.5, 0.3, vec![0.0, 1.0, 0.0]).is_ok());
        assert!(ModelParams::uniform(2, 0.5, 0.3).is_ok());
    }

    #[test]
    fn failure_ratio_examples() {
        let p = ModelParams::uniform(4, 0.5, 0.3).unwrap();
        assert_eq!(p.failure_ratio(), 1.0);
        let p = ModelParams::uniform(4, 0.45, 0.3).unwrap();
        assert!((p.failure_ratio() - 11.0 / 9.0).abs() < 1e-12);
        let p = ModelParams::uniform(4, 0.65, 0.3).unwrap();
        assert!((p.failure_ratio() - 0.538462).abs() < 1e-6);
    }

    #[test]
    fn threshold_actions() {
        let p = Policy::Threshold(2);
        assert_eq!(p.actions(5), vec![Action::F, Action::F, Action::C, Action::C]);
        assert_eq!(Policy::Threshold(0).f_count(4), 0);
        assert_eq!(Policy::Threshold(3).f_count(4), 3);
    }

    #[test]
    fn canonical_form() {
        let g = Policy::General(vec![Action::F, Action::C, Action::C]);
        assert_eq!(g.canonical(4), Policy::Threshold(1));
        let g = Policy::General(vec![Action::C, Action::F, Action::C]);
        assert_eq!(g.as_threshold(4), None);
        assert_eq!(Policy::General(vec![Action::F; 3]).canonical(4), Policy::Threshold(3));
    }

    #[test]
    fn serde_revalidates() {
        let p = ModelParams::uniform(4, 0.45, 0.3).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert!(!s.contains("cdf"));
        let back: ModelParams = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let bad = s.replace("0.45", "1.5");
        assert!(serde_json::from_str::<ModelParams>(&bad).is_err());
    }

    #[test]
    fn quantile_skips_zero_mass_states() {
        let p = ModelParams::new(4, 0.5, 0.3, vec![0.5, 0.5, 0.0]).unwrap();
        assert_eq!(p.state_for_quantile(0.0), 1);
        assert_eq!(p.state_for_quantile(0.49), 1);
        assert_eq!(p.state_for_quantile(0.5), 2);
        assert_eq!(p.state_for_quantile(0.999_999_999), 2);
        let p = ModelParams::new(4, 0.5, 0.3, vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(p.state_for_quantile(0.0), 2);
    }
}
