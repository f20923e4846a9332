use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use grbp::analytics::solve;
use grbp::harness::{run_experiment, sweep, write_regret_csv, write_sidecar, write_sweep_csv, RegretMode, Sidecar};
use grbp::learners::{AlgorithmSpec, InitMode};
use grbp::verify::{verify_threshold_rule, VerifyOptions};
use grbp::{Error, Result};

mod config;
mod report;

use config::Settings;

#[derive(Parser)]
#[command(
    name = "grbp",
    version,
    about = "Gambler's ruin bandit: exact solution, GETBE and regret experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal threshold, value functions, gaps and hitting probabilities.
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Print the report as one JSON object.
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo regret curves; writes regret.csv and regret.json.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Per-round step cap; exceeding it aborts with exit code 3.
        #[arg(long)]
        step_cap: Option<u64>,
    },
    /// Final regret over a (p_c, p_f) grid; writes sweep.csv and sweep.json.
    Sweep {
        #[arg(long = "G")]
        goal: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        q: Option<Vec<f64>>,
        /// Points per axis of the open grid i / (n + 1).
        #[arg(long)]
        grid: Option<usize>,
        /// Explicit p_c axis, comma separated.
        #[arg(long = "p-c", value_delimiter = ',')]
        p_c: Option<Vec<f64>>,
        /// Explicit p_f axis, comma separated.
        #[arg(long = "p-f", value_delimiter = ',')]
        p_f: Option<Vec<f64>>,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check the threshold rule against exhaustive policy enumeration.
    Verify {
        #[arg(long)]
        g_min: Option<usize>,
        #[arg(long)]
        g_max: Option<usize>,
        #[arg(long)]
        grid: Option<usize>,
        /// Negative control: invert the sign rule; the check must fail.
        #[arg(long)]
        flip_sign: bool,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long = "G")]
    goal: Option<usize>,
    #[arg(long = "p-c")]
    p_c: Option<f64>,
    #[arg(long = "p-f")]
    p_f: Option<f64>,
    /// Initial-state distribution over 1..G-1, comma separated.
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<f64>>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long = "T")]
    horizon: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Comma-separated algorithm names, e.g. GETBE-SM,UCB-PolSelection.
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<AlgorithmSpec>>,
    /// pseudo or empirical.
    #[arg(long, value_parser = parse_kebab::<RegretMode>)]
    regret_mode: Option<RegretMode>,
    /// randomized-unit or seed-rounds.
    #[arg(long, value_parser = parse_kebab::<InitMode>)]
    init: Option<InitMode>,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML config file, or a JSON sidecar from an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "grbp-out")]
    out: PathBuf,
}

fn parse_kebab<T: serde::de::DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

impl ModelArgs {
    fn settings(&self) -> Settings {
        Settings {
            goal: self.goal,
            p_c: self.p_c,
            p_f: self.p_f,
            q: self.q.clone(),
            ..Settings::default()
        }
    }
}

impl RunArgs {
    fn apply(&self, s: Settings) -> Settings {
        Settings {
            horizon: self.horizon,
            iterations: self.iterations,
            seed: self.seed,
            gamma: self.gamma,
            algorithms: self.algorithms.clone(),
            regret_mode: self.regret_mode,
            init: self.init,
            ..s
        }
    }
}

enum Failure {
    Verification,
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

fn layered(config: &Option<PathBuf>, command: &str, flags: Settings) -> Result<Settings> {
    let base = match config {
        Some(path) => config::load(path, command)?,
        None => Settings::default(),
    };
    Ok(base.overlay(&flags))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    match cli.command {
        Command::Solve { model, common, json } => {
            let s = layered(&common.config, "solve", model.settings())?;
            let rep = solve(&s.params()?);
            if json {
                println!("{}", serde_json::to_string(&rep).map_err(|e| Error::Io(e.to_string()))?);
            } else {
                print!("{}", report::solve_text(&rep));
            }
        }
        Command::Simulate {
            model,
            run,
            common,
            step_cap,
        } => {
            let flags = Settings {
                step_cap,
                ..run.apply(model.settings())
            };
            let config = layered(&common.config, "simulate", flags)?.experiment()?;
            let result = run_experiment(&config)?;
            write_regret_csv(create(&common.out, "regret.csv")?, &result)?;
            write_sidecar(
                create(&common.out, "regret.json")?,
                &Sidecar::new("simulate", config.master_seed, &config),
            )?;
            for c in &result.curves {
                println!(
                    "{:18} R({}) = {:.4} (sd {:.4})",
                    c.algorithm.name(),
                    config.horizon,
                    c.final_mean(),
                    c.final_std()
                );
            }
        }
        Command::Sweep {
            goal,
            q,
            grid,
            p_c,
            p_f,
            run,
            common,
        } => {
            let flags = run.apply(Settings {
                goal,
                q,
                grid,
                sweep_p_c: p_c,
                sweep_p_f: p_f,
                ..Settings::default()
            });
            let mut base = match &common.config {
                Some(path) => config::load(path, "sweep")?,
                None => Settings::default(),
            };
            if grid.is_some() {
                base.sweep_p_c = None;
                base.sweep_p_f = None;
            }
            let config = base.overlay(&flags).sweep()?;
            let result = sweep(&config)?;
            write_sweep_csv(create(&common.out, "sweep.csv")?, &result)?;
            write_sidecar(
                create(&common.out, "sweep.json")?,
                &Sidecar::new("sweep", config.master_seed, &config),
            )?;
            println!(
                "{} cells, {} x {} rounds each, written to {}",
                result.cells.len(),
                config.iterations,
                config.horizon,
                common.out.display()
            );
        }
        Command::Verify {
            g_min,
            g_max,
            grid,
            flip_sign,
            json,
            config,
        } => {
            let flags = Settings {
                g_min,
                g_max,
                verify_grid: grid,
                ..Settings::default()
            };
            let s = layered(&config, "verify", flags)?;
            let (lo, hi) = (s.g_min.unwrap_or(3), s.g_max.unwrap_or(8));
            let density = s.verify_grid.unwrap_or(9);
            if lo < 2 || lo > hi {
                return Err(Error::InvalidConfig(format!("need 2 <= g_min <= g_max, got {lo}..{hi}")).into());
            }
            if density == 0 {
                return Err(Error::InvalidConfig("grid must be at least 1".into()).into());
            }
            let goals: Vec<usize> = (lo..=hi).collect();
            let rep = verify_threshold_rule(&goals, density, VerifyOptions { flip_sign })?;
            if json {
                println!("{}", serde_json::to_string(&rep).map_err(|e| Error::Io(e.to_string()))?);
            } else {
                print!("{}", report::verify_text(&rep, &goals, density));
            }
            if !rep.passed() {
                return Err(Failure::Verification);
            }
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::StepCapExceeded { .. } | Error::Io(_) | Error::Snapshot(_) | Error::EmptyCounter(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
