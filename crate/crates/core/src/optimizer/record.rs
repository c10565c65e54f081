use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::field::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// The starting point, before any step.
    Initial,
    Rsd,
    /// Fixed step from the extrapolated point (RAG, or nmRAG when it wins).
    RagExtrapolated,
    /// nmRAG took the Armijo candidate.
    ArmijoFallback,
}

impl StepKind {
    pub fn name(self) -> &'static str {
        match self {
            StepKind::Initial => "initial",
            StepKind::Rsd => "rsd",
            StepKind::RagExtrapolated => "rag_extrapolated",
            StepKind::ArmijoFallback => "armijo_fallback",
        }
    }
}

/// One row of the iteration history. Row `n` describes `u_n` and the step
/// that produced it from `u_{n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub n: usize,
    pub energy: f64,
    pub residual: f64,
    pub step_kind: StepKind,
    /// Step length of the accepted candidate; 0 for the initial row.
    pub alpha_used: f64,
    pub backtracks: usize,
    /// Nonmonotone reference `C_{n-1}` the step was tested against
    /// (`C_0` on the initial row). nmRAG only.
    pub reference: Option<f64>,
    /// Extrapolation weight `t_{n-1}`. Accelerated schemes only.
    pub momentum: Option<f64>,
    /// Armijo step `α_{n-1}` found by backtracking, whether or not it was taken.
    pub armijo_alpha: Option<f64>,
    /// H-norm of the Riemannian gradient that drove the step: at `u_{n-1}`
    /// for RSD and nmRAG, at the extrapolated point for RAG.
    pub grad_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    MaxIterations,
    Diverged { reason: String },
    LineSearchFailed { message: String },
}

impl RunStatus {
    pub fn name(&self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::MaxIterations => "max_iterations",
            RunStatus::Diverged { .. } => "diverged",
            RunStatus::LineSearchFailed { .. } => "line_search_failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub final_field: Field,
    pub history: Vec<IterationRecord>,
    pub status: RunStatus,
    pub converged: bool,
    /// Number of steps taken (history length minus the initial row).
    pub iterations: usize,
    /// Time spent in the iteration loop only.
    pub wall_time: Duration,
}

impl SolveResult {
    pub fn final_record(&self) -> &IterationRecord {
        self.history.last().expect("history always holds the initial row")
    }

    pub fn final_energy(&self) -> f64 {
        self.final_record().energy
    }

    pub fn final_residual(&self) -> f64 {
        self.final_record().residual
    }
}
