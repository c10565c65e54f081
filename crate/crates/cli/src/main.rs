use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use nehari_cli::commands::{self, is_input_error};
use nehari_cli::{parse_config, RunConfig};
use nehari_core::scenarios::GridSpec;
use nehari_core::{Algorithm, RunStatus};

/// Ground states of coupled semilinear elliptic systems by descent on the
/// Nehari manifold.
#[derive(Parser, Debug)]
#[command(name = "nehari", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one scenario and write history, field dump and metadata.
    Solve(Common),
    /// Run several algorithms from the same starting point.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Comma-separated algorithms (default: all three, or the config's list).
        #[arg(long, value_delimiter = ',')]
        algorithms: Vec<Algorithm>,
    },
    /// Solve a family of scenarios and tabulate the classification of each.
    Sweep(Common),
    /// Run the built-in oracle checks.
    Verify {
        #[arg(long)]
        compat_unscaled_ih: bool,
        /// Also write the report to DIR/verify.csv.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Registered scenario name, used when no config is given.
    #[arg(long)]
    scenario: Option<String>,
    /// Scenario parameter override, e.g. `--param g23=6`. Repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long)]
    algorithm: Option<Algorithm>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of grid subdivisions per axis.
    #[arg(long)]
    mesh: Option<usize>,
    /// Drop the h² weight from the interaction sum.
    #[arg(long)]
    compat_unscaled_ih: bool,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("`{v}`: {e}"))?;
    Ok((k.trim().to_owned(), v))
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                parse_config(&text).with_context(|| format!("in {}", path.display()))?
            }
            None => RunConfig::default(),
        };
        if let Some(name) = &self.scenario {
            config.scenario.name = Some(name.clone());
            config.scenario.inline = None;
        }
        let params: BTreeMap<String, f64> = self.params.iter().cloned().collect();
        config.scenario.params.extend(params);
        if let Some(out) = &self.out {
            config.output.dir = out.clone();
        }
        if let Some(a) = self.algorithm {
            config.solver.algorithm = a;
        }
        if let Some(alpha) = self.alpha {
            config.solver.alpha = alpha;
        }
        if let Some(n) = self.max_iter {
            config.solver.max_iter = n;
        }
        if let Some(seed) = self.seed {
            config.solver.rng_seed = Some(seed);
        }
        if let Some(m) = self.mesh {
            let base = match config.grid {
                Some(g) => g,
                None => config.scenario_spec().map(|s| s.grid).unwrap_or_default(),
            };
            config.grid = Some(GridSpec {
                subdivisions: m,
                ..base
            });
        }
        if self.compat_unscaled_ih {
            config.compat.unscaled_interaction = true;
        }
        config.validate()?;
        Ok(config)
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("NEHARI_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| anyhow!("NEHARI_THREADS must be a positive integer, got `{v}`"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<ExitCode> {
    configure_threads()?;
    match cli.command {
        Command::Solve(common) => {
            let config = common.load()?;
            let out = commands::solve(&config)?;
            let m = &out.meta;
            println!(
                "{}: {} after {} iterations, residual {:.3e}, energy {:.12}, {:.3} s",
                out.scenario.name, m.status, m.iterations, m.final_residual, m.final_energy, m.wall_time_s
            );
            if let Some(detail) = &m.status_detail {
                println!("  {detail}");
            }
            println!("  artifacts in {}", config.output.dir.display());
            Ok(match out.result.status {
                RunStatus::LineSearchFailed { .. } => ExitCode::from(3),
                _ => ExitCode::SUCCESS,
            })
        }
        Command::Compare { common, algorithms } => {
            let mut config = common.load()?;
            if !algorithms.is_empty() {
                config.compare.algorithms = algorithms;
            }
            let (rows, _) = commands::compare(&config)?;
            println!("{:<8} {:<18} {:>10} {:>12} {:>12}", "algo", "status", "iterations", "residual", "time [s]");
            for r in &rows {
                println!(
                    "{:<8} {:<18} {:>10} {:>12.3e} {:>12.3}",
                    r.algorithm.name(),
                    r.status,
                    r.iterations,
                    r.final_residual,
                    r.wall_time_s
                );
            }
            println!("tables in {}", config.output.dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep(common) => {
            let config = common.load()?;
            let lines = commands::sweep(&config)?;
            for l in &lines {
                let params: Vec<String> = l.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!(
                    "[{}] {} seed={} -> {} ({}, {} iterations){}",
                    l.point,
                    params.join(" "),
                    l.seed.map(|s| s.to_string()).unwrap_or_else(|| "-".into()),
                    l.classification.as_deref().unwrap_or("unclassified"),
                    l.status,
                    l.iterations,
                    l.error.as_ref().map(|e| format!(": {e}")).unwrap_or_default()
                );
            }
            println!("table in {}", config.output.dir.join("sweep.csv").display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { compat_unscaled_ih, out } => {
            let reports = commands::verify(compat_unscaled_ih)?;
            let table = commands::verify_table(&reports);
            print!("{table}");
            if let Some(dir) = out {
                fs::create_dir_all(&dir)?;
                fs::write(dir.join("verify.csv"), &table)?;
            }
            Ok(if reports.iter().all(|r| r.passed()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_input_error(&err) {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
