use thiserror::Error;

use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("component count mismatch: expected {expected}, found {found}")]
    ComponentMismatch { expected: usize, found: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("problem violates the structural assumptions: {0}")]
    InvalidProblem(Violation),

    #[error("field vanishes (sup norm {0:e}); it has no Nehari pullback")]
    ZeroField(f64),

    #[error("interaction term I_h = {0:e} is not positive; the pullback is undefined")]
    DegenerateInteraction(f64),

    #[error("quadratic term K_h = {0:e} is not positive; the pullback is undefined")]
    DegenerateQuadratic(f64),

    #[error("constraint gradient vanishes (||phi||_h = {0:e})")]
    DegenerateConstraintGradient(f64),

    #[error("initial field is off the Nehari manifold (|G_h|/K_h = {0:e})")]
    OffManifold(f64),

    #[error(
        "nonmonotone line search failed after {backtracks} backtracks \
         (||grad_N E||_h = {grad_norm:e}, C_n = {reference:e}, E = {energy:e})"
    )]
    LineSearchFailed {
        backtracks: usize,
        grad_norm: f64,
        reference: f64,
        energy: f64,
    },
}
