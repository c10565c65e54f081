//! Iteration schemes on the discrete Nehari manifold and the shared run loop.

mod momentum;
mod nonmonotone;
mod options;
mod record;
mod run;
mod steps;

pub use momentum::MomentumState;
pub use nonmonotone::NonmonotoneState;
pub use options::{Algorithm, MomentumRule, SolverOptions};
pub use record::{IterationRecord, RunStatus, SolveResult, StepKind};
pub use run::run;
pub use steps::{
    armijo_search, extrapolate, nmrag_step, rag_step, rsd_step, ArmijoOutcome, NmRagStep,
};
