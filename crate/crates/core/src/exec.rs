//! Sequential or rayon-parallel evaluation of independent work items.
//!
//! Results are always returned in index order, so any reduction performed on
//! them afterwards is identical for every worker count.

use serde::{Deserialize, Serialize};

/// Environment variable read by [`Execution::from_env`] for the worker count.
pub const WORKERS_ENV: &str = "GRBP_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Execution {
    Sequential,
    /// Rayon's global pool when `workers` is `None`, otherwise a dedicated
    /// pool of that many threads. Falls back to sequential when the
    /// `parallel` feature is disabled.
    #[default]
    Parallel,
    Workers(usize),
}

impl Execution {
    /// `GRBP_WORKERS=1` selects sequential execution, `N > 1` a pool of `N`
    /// threads; unset or unparsable means the default pool.
    pub fn from_env() -> Self {
        match std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            Some(0) | None => Execution::Parallel,
            Some(1) => Execution::Sequential,
            Some(n) => Execution::Workers(n),
        }
    }

    /// Evaluate `f(0..n)` and collect the results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            #[cfg(feature = "parallel")]
            Execution::Workers(k) => {
                use rayon::prelude::*;
                match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
                    Ok(pool) => pool.install(|| (0..n).into_par_iter().map(f).collect()),
                    Err(_) => (0..n).map(f).collect(),
                }
            }
            #[cfg(not(feature = "parallel"))]
            Execution::Parallel | Execution::Workers(_) => (0..n).map(f).collect(),
        }
    }
}
