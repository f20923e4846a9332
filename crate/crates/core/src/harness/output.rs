//! CSV writers and the JSON provenance sidecar.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{ExperimentResult, SweepResult};
use crate::error::{Error, Result};

pub const REGRET_CSV_HEADER: &str = "round,algorithm,regret_mean,regret_std";
pub const SWEEP_CSV_HEADER: &str = "p_c,p_f,region,regret_mean,regret_std,boundary";

/// One row per (algorithm, round), algorithms in config order, rounds from 1.
pub fn write_regret_csv<W: Write>(w: W, result: &ExperimentResult) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(REGRET_CSV_HEADER.split(','))?;
    for curve in &result.curves {
        for (t, (m, s)) in curve.mean.iter().zip(&curve.std).enumerate() {
            out.write_record([
                (t + 1).to_string(),
                curve.algorithm.name().to_string(),
                m.to_string(),
                s.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(w: W, result: &SweepResult) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SWEEP_CSV_HEADER.split(','))?;
    for c in &result.cells {
        out.write_record([
            c.p_c.to_string(),
            c.p_f.to_string(),
            c.region.to_string(),
            c.regret_mean.to_string(),
            c.regret_std.to_string(),
            c.boundary.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Resolved configuration of a run, written next to its CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar<C> {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub config: C,
}

impl<C> Sidecar<C> {
    pub fn new(command: &str, seed: u64, config: C) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config,
        }
    }
}

pub fn write_sidecar<W: Write, C: Serialize>(mut w: W, sidecar: &Sidecar<C>) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, sidecar).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Execution;
    use crate::harness::{run_experiment_with, ExperimentConfig};
    use crate::learners::AlgorithmSpec;

    #[test]
    fn regret_csv_layout() {
        let mut c =
            ExperimentConfig::benchmark(4, 0.45, 0.3, vec![AlgorithmSpec::GetbeSm, AlgorithmSpec::Oracle]).unwrap();
        c.horizon = 3;
        c.iterations = 2;
        let r = run_experiment_with(&c, Execution::Sequential).unwrap();
        let mut buf = Vec::new();
        write_regret_csv(&mut buf, &r).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], REGRET_CSV_HEADER);
        assert_eq!(lines.len(), 1 + 6);
        assert!(lines[1].starts_with("1,GETBE-SM,"));
        assert_eq!(lines[6], "3,Oracle,0,0");
    }

    #[test]
    fn sidecar_round_trip() {
        let c = ExperimentConfig::benchmark(4, 0.45, 0.3, vec![AlgorithmSpec::GetbeSm]).unwrap();
        let s = Sidecar::new("simulate", 0, c);
        let mut buf = Vec::new();
        write_sidecar(&mut buf, &s).unwrap();
        let back: Sidecar<ExperimentConfig> = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, s);
    }
}
