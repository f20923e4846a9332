//! Calibration run for the regret-shape constants used by the acceptance
//! suite. Reference protocol: G = 4, uniform q, T = 5000, 200 iterations,
//! gamma = 15, master seed 0.
//!
//! cargo run --release -p grbp --example calibrate [seed-rounds|randomized-unit] [seed]

use grbp::harness::{run_experiment, ExperimentConfig};
use grbp::learners::AlgorithmSpec;

fn main() -> grbp::Result<()> {
    for (label, p_c, p_f) in [("no-exploration", 0.45, 0.3), ("exploration", 0.65, 0.3)] {
        let mut algs = AlgorithmSpec::BENCHMARK.to_vec();
        algs.push(AlgorithmSpec::Ucb1AllPolicies);
        let mut config = ExperimentConfig::benchmark(4, p_c, p_f, algs)?;
        let mut args = std::env::args().skip(1);
        if let Some(mode) = args.next() {
            config.init = serde_json::from_value(serde_json::Value::String(mode))
                .map_err(|e| grbp::Error::InvalidConfig(e.to_string()))?;
        }
        if let Some(seed) = args.next().and_then(|s| s.parse().ok()) {
            config.master_seed = seed;
        }
        let result = run_experiment(&config)?;
        let ln_t = (config.horizon as f64).ln();
        println!("== {label} (p_c = {p_c}, p_f = {p_f})");
        for (curve, stats) in result.curves.iter().zip(&result.stats) {
            let n = stats.len() as f64;
            let mean = |f: &dyn Fn(&grbp::harness::RunStats) -> f64| stats.iter().map(f).sum::<f64>() / n;
            println!(
                "{:18} R(2500) = {:9.4}  R(5000) = {:9.4}  sd = {:8.4}  R/lnT = {:7.4}  explore = {:7.2}  subopt = {:8.2}  max F|tau0 = {}",
                curve.algorithm.name(),
                curve.at(2500),
                curve.final_mean(),
                curve.final_std(),
                curve.final_mean() / ln_t,
                mean(&|s| s.forced_explorations as f64),
                mean(&|s| s.suboptimal_rounds as f64),
                stats.iter().map(|s| s.f_in_tau0_rounds).max().unwrap_or(0),
            );
        }
    }
    Ok(())
}
