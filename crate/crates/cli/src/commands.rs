//! The four subcommands as library functions, so tests can drive them
//! without spawning a process.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use nehari_core::optimizer::run;
use nehari_core::scenarios::{classify_solution, sweep as run_sweep, Classification, InitialGuess, ScenarioSpec};
use nehari_core::verify::{run_all, CheckStatus, PropertyReport, VerifyConfig};
use nehari_core::{Algorithm, InteractionQuadrature, RunStatus, SolveResult, SolverOptions};
use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, OutputConfig, RunConfig};
use crate::io::{write_field, write_history, HISTORY_FILE, RUN_META_FILE};

/// Everything recorded about one solve, written as `run_meta.toml`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub tool: String,
    pub version: String,
    pub status: String,
    pub status_detail: Option<String>,
    pub converged: bool,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub final_energy: f64,
    pub final_residual: f64,
    pub classification: Option<Classification>,
    pub solver: SolverOptions,
    pub scenario: ScenarioSpec,
    pub config: RunConfig,
}

fn status_detail(status: &RunStatus) -> Option<String> {
    match status {
        RunStatus::Diverged { reason } => Some(reason.clone()),
        RunStatus::LineSearchFailed { message } => Some(message.clone()),
        _ => None,
    }
}

/// A solve together with the scenario it ran on.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub scenario: ScenarioSpec,
    pub result: SolveResult,
    pub meta: RunMeta,
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn persist(out: &OutputConfig, dir: &Path, result: &SolveResult, meta: &RunMeta) -> Result<()> {
    prepare_dir(dir)?;
    if out.history {
        write_history(&dir.join(HISTORY_FILE), &result.history)?;
    }
    if out.fields {
        write_field(dir, &result.final_field)?;
    }
    if out.metadata {
        let path = dir.join(RUN_META_FILE);
        fs::write(&path, toml::to_string(meta)?).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn solve_spec(config: &RunConfig, spec: &ScenarioSpec, opts: &SolverOptions) -> Result<SolveOutcome> {
    let problem = spec.build().context("building the scenario")?;
    let u0 = spec.initial_field(&problem, opts.rng_seed).context("initial guess")?;
    let result = run(&problem, &u0, opts)?;
    Ok(outcome(config, spec, opts, result, config.sweep.threshold))
}

fn outcome(
    config: &RunConfig,
    spec: &ScenarioSpec,
    opts: &SolverOptions,
    result: SolveResult,
    threshold: f64,
) -> SolveOutcome {
    let meta = RunMeta {
        tool: env!("CARGO_PKG_NAME").to_owned(),
        version: env!("CARGO_PKG_VERSION").to_owned(),
        status: result.status.name().to_owned(),
        status_detail: status_detail(&result.status),
        converged: result.converged,
        iterations: result.iterations,
        wall_time_s: result.wall_time.as_secs_f64(),
        final_energy: result.final_energy(),
        final_residual: result.final_residual(),
        classification: classify_solution(&result.final_field, threshold).ok(),
        solver: opts.clone(),
        scenario: spec.clone(),
        config: config.clone(),
    };
    SolveOutcome {
        scenario: spec.clone(),
        result,
        meta,
    }
}

/// Runs one solve and writes the enabled artifacts into `config.output.dir`.
pub fn solve(config: &RunConfig) -> Result<SolveOutcome> {
    config.validate()?;
    let spec = config.scenario_spec()?;
    let out = solve_spec(config, &spec, &config.solver)?;
    persist(&config.output, &config.output.dir, &out.result, &out.meta)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub algorithm: Algorithm,
    pub status: String,
    pub converged: bool,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub final_residual: f64,
    pub final_energy: f64,
    pub error: Option<String>,
}

/// Runs each configured algorithm from the same starting point. Results for
/// each go to `<out>/<algorithm>/`; `compare.csv` holds one row per algorithm
/// and `residuals.csv` the residual histories side by side.
pub fn compare(config: &RunConfig) -> Result<(Vec<CompareRow>, Vec<Option<SolveOutcome>>)> {
    config.validate()?;
    let spec = config.scenario_spec()?;
    let problem = spec.build().context("building the scenario")?;
    let u0 = spec.initial_field(&problem, config.solver.rng_seed).context("initial guess")?;
    let out_dir = &config.output.dir;
    prepare_dir(out_dir)?;

    let mut rows = Vec::new();
    let mut outcomes = Vec::new();
    for &algorithm in &config.compare.algorithms {
        let opts = config.solver.clone().with_algorithm(algorithm);
        match run(&problem, &u0, &opts) {
            Ok(result) => {
                let o = outcome(config, &spec, &opts, result, config.sweep.threshold);
                persist(&config.output, &out_dir.join(algorithm.name()), &o.result, &o.meta)?;
                rows.push(CompareRow {
                    algorithm,
                    status: o.meta.status.clone(),
                    converged: o.meta.converged,
                    iterations: o.meta.iterations,
                    wall_time_s: o.meta.wall_time_s,
                    final_residual: o.meta.final_residual,
                    final_energy: o.meta.final_energy,
                    error: o.meta.status_detail.clone(),
                });
                outcomes.push(Some(o));
            }
            Err(e) => {
                rows.push(CompareRow {
                    algorithm,
                    status: "error".to_owned(),
                    converged: false,
                    iterations: 0,
                    wall_time_s: 0.0,
                    final_residual: f64::NAN,
                    final_energy: f64::NAN,
                    error: Some(e.to_string()),
                });
                outcomes.push(None);
            }
        }
    }

    let mut table = String::from(
        "algorithm,status,converged,iterations,wall_time_s,final_residual,final_energy,error\n",
    );
    for r in &rows {
        let _ = writeln!(
            table,
            "{},{},{},{},{:.6e},{:.16e},{:.16e},{}",
            r.algorithm,
            r.status,
            r.converged,
            r.iterations,
            r.wall_time_s,
            r.final_residual,
            r.final_energy,
            csv_text(r.error.as_deref().unwrap_or(""))
        );
    }
    fs::write(out_dir.join("compare.csv"), table)?;

    let longest = outcomes.iter().flatten().map(|o| o.result.history.len()).max().unwrap_or(0);
    let mut residuals = String::from("n");
    for &a in &config.compare.algorithms {
        let _ = write!(residuals, ",{a}");
    }
    residuals.push('\n');
    for n in 0..longest {
        let _ = write!(residuals, "{n}");
        for o in &outcomes {
            match o.as_ref().and_then(|o| o.result.history.get(n)) {
                Some(r) => {
                    let _ = write!(residuals, ",{:.16e}", r.residual);
                }
                None => residuals.push(','),
            }
        }
        residuals.push('\n');
    }
    fs::write(out_dir.join("residuals.csv"), residuals)?;
    Ok((rows, outcomes))
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn params_label(params: &BTreeMap<String, f64>) -> String {
    params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// One row of `sweep.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepLine {
    pub point: usize,
    pub params: BTreeMap<String, f64>,
    pub seed: Option<u64>,
    pub scenario: String,
    pub status: String,
    pub converged: bool,
    pub iterations: usize,
    pub energy: f64,
    pub residual: f64,
    pub classification: Option<String>,
    pub relative_sup: Vec<f64>,
    pub error: Option<String>,
}

pub const SWEEP_HEADER: &str =
    "point,params,seed,scenario,status,converged,iterations,energy,residual,classification,relative_sup,error";

/// Solves every sweep point (times every seed) in parallel and writes
/// `sweep.csv` in input order. Failing points become rows with an error.
pub fn sweep(config: &RunConfig) -> Result<Vec<SweepLine>> {
    config.validate()?;
    let points = config.sweep_points();
    let seeds: Vec<Option<u64>> = if config.sweep.seeds.is_empty() {
        vec![None]
    } else {
        config.sweep.seeds.iter().copied().map(Some).collect()
    };
    let cases: Vec<(usize, Option<u64>)> = (0..points.len())
        .flat_map(|p| seeds.iter().map(move |&s| (p, s)))
        .collect();
    let build = |&(p, seed): &(usize, Option<u64>)| -> nehari_core::Result<ScenarioSpec> {
        let mut spec = config
            .scenario_spec_with(&points[p])
            .map_err(|e| nehari_core::Error::InvalidParameter(e.to_string()))?;
        if let Some(seed) = seed {
            spec.initial = InitialGuess::Randomized { seed: Some(seed) };
        }
        Ok(spec)
    };
    let rows = run_sweep(&cases, build, &config.solver, config.sweep.threshold);

    let lines: Vec<SweepLine> = rows
        .into_iter()
        .map(|row| {
            let (p, seed) = row.point;
            let base = SweepLine {
                point: p,
                params: points[p].clone(),
                seed,
                scenario: row.scenario,
                status: "failed".to_owned(),
                converged: false,
                iterations: 0,
                energy: f64::NAN,
                residual: f64::NAN,
                classification: None,
                relative_sup: Vec::new(),
                error: None,
            };
            match row.outcome {
                Ok(s) => SweepLine {
                    status: s.status,
                    converged: s.converged,
                    iterations: s.iterations,
                    energy: s.energy,
                    residual: s.residual,
                    classification: s.classification.as_ref().map(|c| c.overall.name().to_owned()),
                    relative_sup: s.classification.map(|c| c.relative_sup).unwrap_or_default(),
                    ..base
                },
                Err(e) => SweepLine {
                    error: Some(e),
                    ..base
                },
            }
        })
        .collect();

    prepare_dir(&config.output.dir)?;
    let mut table = String::from(SWEEP_HEADER);
    table.push('\n');
    for l in &lines {
        let _ = writeln!(
            table,
            "{},{},{},{},{},{},{},{:.16e},{:.16e},{},{},{}",
            l.point,
            csv_text(&params_label(&l.params)),
            l.seed.map(|s| s.to_string()).unwrap_or_default(),
            csv_text(&l.scenario),
            l.status,
            l.converged,
            l.iterations,
            l.energy,
            l.residual,
            l.classification.as_deref().unwrap_or(""),
            l.relative_sup.iter().map(|r| format!("{r:.6e}")).collect::<Vec<_>>().join(";"),
            csv_text(l.error.as_deref().unwrap_or("")),
        );
    }
    fs::write(config.output.dir.join("sweep.csv"), table)?;
    Ok(lines)
}

/// Runs the oracle suite; with `unscaled` the quadrature check reports the
/// expected mismatch and is skipped.
pub fn verify(unscaled: bool) -> Result<Vec<PropertyReport>> {
    Ok(run_all(&VerifyConfig {
        quadrature: if unscaled {
            InteractionQuadrature::Unscaled
        } else {
            InteractionQuadrature::Scaled
        },
        ..Default::default()
    })?)
}

pub fn verify_table(reports: &[PropertyReport]) -> String {
    let mut out = String::from("property,status,measured,tolerance,note\n");
    for r in reports {
        let status = match r.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skip => "skip",
        };
        let _ = writeln!(
            out,
            "{},{},{:.6e},{:.6e},{}",
            r.name,
            status,
            r.measured,
            r.tolerance,
            csv_text(r.note.as_deref().unwrap_or(""))
        );
    }
    out
}

/// True for errors caused by the input rather than by the machinery.
pub fn is_input_error(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        e.downcast_ref::<ConfigError>().is_some()
            || matches!(
                e.downcast_ref::<nehari_core::Error>(),
                Some(
                    nehari_core::Error::InvalidProblem(_)
                        | nehari_core::Error::InvalidParameter(_)
                        | nehari_core::Error::InvalidGrid(_)
                        | nehari_core::Error::OffManifold(_)
                        | nehari_core::Error::ComponentMismatch { .. }
                        | nehari_core::Error::ShapeMismatch { .. }
                )
            )
    })
}
