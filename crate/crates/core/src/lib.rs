//! Ground states of m-coupled semilinear elliptic systems
//!
//! ```text
//! -eps_i Δu_i + a_i u_i = Σ_j g_ij u_j² u_i   in Ω = (-L, L)²,   u_i = 0 on ∂Ω
//! ```
//!
//! are unstable (Morse index one) critical points of the energy
//! `E(u) = K(u)/2 - I(u)/4`, but they are minimizers of `E` restricted to the
//! Nehari manifold `N = { u ≠ 0 : K(u) = I(u) }`. This crate discretizes the
//! problem with a sine pseudospectral method and minimizes `E` on the discrete
//! manifold with three Riemannian schemes:
//!
//! * steepest descent with a fixed step ([`Algorithm::Rsd`]),
//! * accelerated gradient with a pulled-back Nesterov extrapolation
//!   ([`Algorithm::Rag`]),
//! * the accelerated scheme safeguarded by a nonmonotone Armijo search
//!   ([`Algorithm::NmRag`]).
//!
//! Module map:
//!
//! * [`grid`] and [`spectral`]: sine transforms, spectral Laplacian, Poisson
//!   solves and the discrete H inner product.
//! * [`model`]: the functionals `K_h`, `I_h`, `E_h`, `G_h`, the ray pullback,
//!   the retraction, H-gradients, the Riemannian gradient and the residual.
//! * [`optimizer`]: iteration schemes, momentum and nonmonotone bookkeeping,
//!   and the run loop.
//! * [`scenarios`]: problem builders, initial guesses, classification of
//!   semi-trivial solutions and parameter sweeps.
//! * [`verify`]: the self-check suite behind `nehari verify`.

pub mod error;
pub mod field;
pub mod grid;
pub mod model;
pub mod optimizer;
pub mod scenarios;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use field::Field;
pub use grid::Grid;
pub use model::{CouplingMatrix, CouplingRegime, InteractionQuadrature, Problem, Violation};
pub use optimizer::{
    run, Algorithm, IterationRecord, MomentumRule, MomentumState, NonmonotoneState, RunStatus,
    SolveResult, SolverOptions, StepKind,
};
pub use spectral::{ScalarField, SpectralCoeffs};
