//! The stochastic GRBP environment.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Action, ModelParams, DEAD_END};

/// Default hard cap on steps per round.
pub const DEFAULT_STEP_CAP: u64 = 10_000_000;

/// Everything that happened in one round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTrace {
    /// Visited states, starting with the initial state and ending at `0` or `G`.
    pub states: Vec<usize>,
    /// Times `F` was taken (0 or 1).
    pub t_f: u64,
    /// Times `F` led to the goal.
    pub t_fg: u64,
    /// Times `C` was taken.
    pub t_c: u64,
    /// Times `C` moved the state up.
    pub t_cu: u64,
    /// 1 iff the round ended at the goal.
    pub reward: u8,
}

impl RoundTrace {
    pub fn initial_state(&self) -> usize {
        self.states[0]
    }

    pub fn final_state(&self) -> usize {
        *self.states.last().expect("trace is never empty")
    }

    pub fn steps(&self) -> u64 {
        self.t_f + self.t_c
    }
}

/// Immutable environment: model parameters plus a step cap.
#[derive(Debug, Clone)]
pub struct Environment {
    params: ModelParams,
    step_cap: u64,
}

impl Environment {
    pub fn new(params: ModelParams) -> Self {
        Self {
            params,
            step_cap: DEFAULT_STEP_CAP,
        }
    }

    pub fn with_step_cap(mut self, cap: u64) -> Self {
        self.step_cap = cap;
        self
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn step_cap(&self) -> u64 {
        self.step_cap
    }

    /// Draw an initial state from `q`.
    pub fn sample_initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.params.state_for_quantile(rng.random::<f64>())
    }

    /// One transition from non-terminal state `s`.
    pub fn step<R: Rng + ?Sized>(&self, s: usize, a: Action, rng: &mut R) -> Result<usize> {
        let goal = self.params.goal();
        if self.params.is_terminal(s) {
            return Err(Error::TerminalState { state: s, goal });
        }
        let u: f64 = rng.random();
        Ok(match a {
            Action::C if u < self.params.p_c() => s + 1,
            Action::C => s - 1,
            Action::F if u < self.params.p_f() => goal,
            Action::F => DEAD_END,
        })
    }

    /// Sample an initial state and run one round.
    ///
    /// `decide` receives the current state and the 1-based time slot.
    pub fn run_round<R, D>(&self, decide: D, rng: &mut R) -> Result<RoundTrace>
    where
        R: Rng + ?Sized,
        D: FnMut(usize, u64) -> Action,
    {
        let start = self.sample_initial_state(rng);
        self.run_round_from(start, decide, rng)
    }

    /// Run one round from a given non-terminal start state.
    pub fn run_round_from<R, D>(&self, start: usize, mut decide: D, rng: &mut R) -> Result<RoundTrace>
    where
        R: Rng + ?Sized,
        D: FnMut(usize, u64) -> Action,
    {
        let goal = self.params.goal();
        if self.params.is_terminal(start) {
            return Err(Error::TerminalState { state: start, goal });
        }
        let mut trace = RoundTrace {
            states: vec![start],
            t_f: 0,
            t_fg: 0,
            t_c: 0,
            t_cu: 0,
            reward: 0,
        };
        let mut s = start;
        let mut t = 1u64;
        while !self.params.is_terminal(s) {
            if t > self.step_cap {
                return Err(Error::StepCapExceeded { cap: self.step_cap });
            }
            let a = decide(s, t);
            let next = self.step(s, a, rng)?;
            match a {
                Action::F => {
                    trace.t_f += 1;
                    trace.t_fg += u64::from(next == goal);
                }
                Action::C => {
                    trace.t_c += 1;
                    trace.t_cu += u64::from(next == s + 1);
                }
            }
            trace.states.push(next);
            s = next;
            t += 1;
        }
        trace.reward = u8::from(s == goal);
        Ok(trace)
    }
}
