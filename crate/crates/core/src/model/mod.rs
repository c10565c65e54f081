//! The discrete variational problem.
//!
//! With `h = 2L/M`, the discrete functionals are
//!
//! ```text
//! K_h(u) = h² Σ_i Σ_kl ( eps_i (-Δ_h u_i)_kl (u_i)_kl + (a_i)_kl (u_i)_kl² )
//! I_h(u) = h² Σ_ij Σ_kl g_ij (u_i)_kl² (u_j)_kl²
//! E_h    = K_h / 2 - I_h / 4,      G_h = K_h - I_h,
//! ```
//!
//! and the discrete Nehari manifold is `{ u ≠ 0 : G_h(u) = 0 }`.

mod coupling;
mod functionals;
mod gradient;
mod problem;

pub use coupling::{CouplingMatrix, CouplingRegime};
pub use gradient::{HGradients, RiemannianGradient};
pub use problem::{InteractionQuadrature, Problem, Violation};

/// Relative tolerance `|G_h| <= tol * K_h` for discrete manifold membership.
pub const MANIFOLD_TOL: f64 = 1e-10;
