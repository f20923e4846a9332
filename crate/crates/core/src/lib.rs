//! Gambler's ruin bandit problem (GRBP).
//!
//! A round starts in a random state of the chain `1..G-1`. The learner picks
//! the continuation action `C` (random walk step up with probability `p_c`)
//! or the terminal action `F` (jump to the goal `G` with probability `p_f`,
//! otherwise to the dead-end `0`) until the chain is absorbed.
//!
//! * [`model`] and [`env`]: instance parameters and the stochastic environment.
//! * [`analytics`]: closed-form values, the threshold-optimal policy, gaps and an
//!   exhaustive policy-enumeration oracle.
//! * [`learners`]: GETBE and its variants, plus policy-as-arm baselines.
//! * [`harness`]: regret accounting, Monte Carlo experiments and sweeps.

pub mod analytics;
pub mod env;
pub mod error;
pub mod exec;
pub mod harness;
pub mod learners;
pub mod model;
pub mod seed;
pub mod verify;

pub use error::{Error, Result};
pub use model::{Action, ModelParams, Policy};
