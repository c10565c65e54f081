use std::time::Instant;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::model::Problem;

use super::momentum::MomentumState;
use super::nonmonotone::NonmonotoneState;
use super::options::{Algorithm, SolverOptions};
use super::record::{IterationRecord, RunStatus, SolveResult, StepKind};
use super::steps::{nmrag_inner, rag_inner, rsd_inner, StepOutcome};

/// Largest relative constraint defect accepted for a starting point.
const START_DEFECT_TOL: f64 = 1e-8;

/// Iterates from `u0` until the residual drops to `opts.tol`, the iteration
/// budget runs out, the run blows up, or the line search stalls.
///
/// `u0` must already lie on the manifold; use [`Problem::pullback`] first.
/// Only setup errors are returned as `Err`; everything that happens inside
/// the loop ends up in [`SolveResult::status`] with the history so far.
pub fn run(p: &Problem, u0: &Field, opts: &SolverOptions) -> Result<SolveResult> {
    opts.validate()?;
    p.validate().map_err(Error::InvalidProblem)?;
    p.check_field(u0)?;
    if !u0.is_finite() {
        return Err(Error::NonFinite("initial field"));
    }
    let defect = p.manifold_defect(u0)?;
    if !(defect <= START_DEFECT_TOL) {
        return Err(Error::OffManifold(defect));
    }

    let e0 = p.energy_unchecked(u0);
    let r0 = p.residual_unchecked(u0);
    let mut history = vec![IterationRecord {
        n: 0,
        energy: e0,
        residual: r0,
        step_kind: StepKind::Initial,
        alpha_used: 0.0,
        backtracks: 0,
        reference: (opts.algorithm == Algorithm::NmRag).then_some(e0),
        momentum: None,
        armijo_alpha: None,
        grad_norm: None,
    }];

    let start = Instant::now();
    let mut u = u0.clone();
    let mut u_prev = u0.clone();
    let mut energy = e0;
    let mut mom = MomentumState::initial();
    let mut nm = NonmonotoneState::new(e0);
    let mut status = if r0 <= opts.tol {
        RunStatus::Converged
    } else {
        RunStatus::MaxIterations
    };

    if status != RunStatus::Converged {
        for n in 1..=opts.max_iter {
            let step: Result<StepOutcome> = match opts.algorithm {
                Algorithm::Rsd => rsd_inner(p, &u, opts.alpha),
                Algorithm::Rag => rag_inner(p, &u, &u_prev, mom, opts.alpha, opts.momentum)
                    .map(|(out, m)| {
                        mom = m;
                        out
                    }),
                Algorithm::NmRag => nmrag_inner(p, &u, energy, &u_prev, mom, nm, opts).map(
                    |(out, m, c, _)| {
                        mom = m;
                        nm = c;
                        out
                    },
                ),
            };
            let step = match step {
                Ok(step) => step,
                Err(e @ Error::LineSearchFailed { .. }) => {
                    status = RunStatus::LineSearchFailed {
                        message: e.to_string(),
                    };
                    break;
                }
                Err(e) => {
                    status = RunStatus::Diverged {
                        reason: format!("numerical breakdown at step {n}: {e}"),
                    };
                    break;
                }
            };

            let residual = p.residual_unchecked(&step.next);
            history.push(IterationRecord {
                n,
                energy: step.energy,
                residual,
                step_kind: step.kind,
                alpha_used: step.alpha_used,
                backtracks: step.backtracks,
                reference: step.reference,
                momentum: step.momentum,
                armijo_alpha: step.armijo_alpha,
                grad_norm: step.grad_norm,
            });

            let went_up = step.energy > energy;
            energy = step.energy;
            if opts.restart && went_up && opts.algorithm != Algorithm::Rsd {
                mom = MomentumState::initial();
                u_prev = step.next.clone();
                u = step.next;
            } else {
                u_prev = std::mem::replace(&mut u, step.next);
            }

            if !energy.is_finite() || !residual.is_finite() || !u.is_finite() {
                status = RunStatus::Diverged {
                    reason: format!("non-finite iterate at step {n}"),
                };
                break;
            }
            if energy > opts.divergence_energy_factor * e0.abs() {
                status = RunStatus::Diverged {
                    reason: format!("energy {energy:e} exceeds the bound at step {n}"),
                };
                break;
            }
            if residual > opts.divergence_residual {
                status = RunStatus::Diverged {
                    reason: format!("residual {residual:e} exceeds the bound at step {n}"),
                };
                break;
            }
            if residual <= opts.tol {
                status = RunStatus::Converged;
                break;
            }
        }
    }
    let wall_time = start.elapsed();

    Ok(SolveResult {
        final_field: u,
        iterations: history.len() - 1,
        converged: status == RunStatus::Converged,
        history,
        status,
        wall_time,
    })
}
