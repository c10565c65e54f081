use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::field::Field;
use crate::optimizer::{run, SolveResult, SolverOptions};

use super::classify::{classify_solution, Classification};
use super::spec::ScenarioSpec;

/// A finished solve together with the classification of its end point.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub initial: Field,
    pub result: SolveResult,
    /// `None` when the final field could not be classified (all zero).
    pub classification: Option<Classification>,
}

/// Builds the problem and its starting point, runs the solver and classifies
/// the result.
pub fn solve_scenario(
    spec: &ScenarioSpec,
    opts: &SolverOptions,
    threshold: f64,
) -> Result<ScenarioOutcome> {
    let problem = spec.build()?;
    let initial = spec.initial_field(&problem, opts.rng_seed)?;
    let result = run(&problem, &initial, opts)?;
    let classification = classify_solution(&result.final_field, threshold).ok();
    Ok(ScenarioOutcome {
        initial,
        result,
        classification,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow<P> {
    pub point: P,
    pub scenario: String,
    pub outcome: std::result::Result<SweepSummary, String>,
}

/// The parts of a solve that go into a sweep table.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub classification: Option<Classification>,
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub status: String,
}

/// Solves one scenario per point, in parallel. Rows come back in input order;
/// a point whose scenario fails to build or solve gets an error row instead
/// of aborting the sweep.
pub fn sweep<P, F>(
    points: &[P],
    build: F,
    opts: &SolverOptions,
    threshold: f64,
) -> Vec<SweepRow<P>>
where
    P: Clone + Send + Sync,
    F: Fn(&P) -> Result<ScenarioSpec> + Sync,
{
    points
        .par_iter()
        .map(|point| {
            let spec = build(point);
            let scenario = spec.as_ref().map(|s| s.name.clone()).unwrap_or_default();
            let outcome = spec
                .and_then(|s| solve_scenario(&s, opts, threshold))
                .map(|o| SweepSummary {
                    classification: o.classification,
                    energy: o.result.final_energy(),
                    residual: o.result.final_residual(),
                    iterations: o.result.iterations,
                    converged: o.result.converged,
                    status: o.result.status.name().to_owned(),
                })
                .map_err(|e| e.to_string());
            SweepRow {
                point: point.clone(),
                scenario,
                outcome,
            }
        })
        .collect()
}
