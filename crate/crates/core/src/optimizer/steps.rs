use crate::error::{Error, Result};
use crate::field::Field;
use crate::model::{Problem, RiemannianGradient};

use super::momentum::MomentumState;
use super::nonmonotone::NonmonotoneState;
use super::options::{MomentumRule, SolverOptions};
use super::record::StepKind;

/// Everything the run loop needs to log about one step.
#[derive(Debug, Clone)]
pub(crate) struct StepOutcome {
    pub next: Field,
    pub energy: f64,
    pub kind: StepKind,
    pub alpha_used: f64,
    pub backtracks: usize,
    pub reference: Option<f64>,
    pub momentum: Option<f64>,
    pub armijo_alpha: Option<f64>,
    pub grad_norm: Option<f64>,
}

/// Result of a backtracking search along `-∇_N E(u)`.
#[derive(Debug, Clone)]
pub struct ArmijoOutcome {
    pub point: Field,
    pub energy: f64,
    pub alpha: f64,
    pub backtracks: usize,
    pub grad_norm: f64,
}

/// Result of one nmRAG step.
#[derive(Debug, Clone)]
pub struct NmRagStep {
    pub next: Field,
    pub energy: f64,
    pub kind: StepKind,
    pub momentum: MomentumState,
    pub nonmonotone: NonmonotoneState,
    pub armijo: ArmijoOutcome,
}

/// Fixed-step descent `R_u(-α ∇_N E(u))`.
pub fn rsd_step(p: &Problem, u: &Field, alpha: f64) -> Result<Field> {
    p.check_field(u)?;
    Ok(rsd_inner(p, u, alpha)?.next)
}

/// Nonlinear extrapolation `w = ρ(ŵ) ŵ` with `ŵ = u_n + t (u_n - u_prev)`.
///
/// Returns `u_n` untouched when `t = 0` or the two points coincide, so that
/// degenerate momentum leaves the trajectory bit-for-bit unchanged.
pub fn extrapolate(p: &Problem, u_n: &Field, u_prev: &Field, t: f64) -> Result<Field> {
    p.check_field(u_n)?;
    p.check_field(u_prev)?;
    if !t.is_finite() {
        return Err(Error::NonFinite("momentum weight"));
    }
    extrapolate_inner(p, u_n, u_prev, t)
}

/// Advances the momentum schedule and takes one accelerated step.
pub fn rag_step(
    p: &Problem,
    u_n: &Field,
    u_prev: &Field,
    mom: MomentumState,
    alpha: f64,
) -> Result<(Field, MomentumState)> {
    p.check_field(u_n)?;
    p.check_field(u_prev)?;
    let (out, mom) = rag_inner(p, u_n, u_prev, mom, alpha, MomentumRule::Nesterov)?;
    Ok((out.next, mom))
}

/// Backtracking on `α_0 β^j` until
/// `E(R_u(-α ∇_N E(u))) ≤ reference - σ α ‖∇_N E(u)‖_h²`.
pub fn armijo_search(
    p: &Problem,
    u: &Field,
    reference: f64,
    opts: &SolverOptions,
) -> Result<ArmijoOutcome> {
    p.check_field(u)?;
    opts.validate()?;
    let grad = p.riemannian_gradient_unchecked(u)?;
    armijo_inner(p, u, &grad, reference, opts)
}

/// One nmRAG step. `nm` holds `(C_{n-1}, Q_{n-1})` on entry; it is advanced
/// with `E(u_n)` before the Armijo test.
pub fn nmrag_step(
    p: &Problem,
    u_n: &Field,
    u_prev: &Field,
    mom: MomentumState,
    nm: NonmonotoneState,
    opts: &SolverOptions,
) -> Result<NmRagStep> {
    p.check_field(u_n)?;
    p.check_field(u_prev)?;
    opts.validate()?;
    let e_n = p.energy_unchecked(u_n);
    let (out, mom, nm, armijo) = nmrag_inner(p, u_n, e_n, u_prev, mom, nm, opts)?;
    Ok(NmRagStep {
        next: out.next,
        energy: out.energy,
        kind: out.kind,
        momentum: mom,
        nonmonotone: nm,
        armijo,
    })
}

fn descend(p: &Problem, u: &Field, grad: &RiemannianGradient, alpha: f64) -> Result<Field> {
    p.pullback_unchecked(&u.lincomb_synced(1.0, -alpha, &grad.grad))
}

pub(crate) fn rsd_inner(p: &Problem, u: &Field, alpha: f64) -> Result<StepOutcome> {
    let grad = p.riemannian_gradient_unchecked(u)?;
    let next = descend(p, u, &grad, alpha)?;
    Ok(StepOutcome {
        energy: p.energy_unchecked(&next),
        next,
        kind: StepKind::Rsd,
        alpha_used: alpha,
        backtracks: 0,
        reference: None,
        momentum: None,
        armijo_alpha: None,
        grad_norm: Some(grad.norm),
    })
}

pub(crate) fn extrapolate_inner(p: &Problem, u_n: &Field, u_prev: &Field, t: f64) -> Result<Field> {
    if t == 0.0 || u_n == u_prev {
        return Ok(u_n.clone());
    }
    p.pullback_unchecked(&u_n.lincomb_synced(1.0 + t, -t, u_prev))
}

fn momentum_weight(mom: &MomentumState, rule: MomentumRule) -> f64 {
    match rule {
        MomentumRule::Nesterov => mom.t,
        MomentumRule::Zero => 0.0,
    }
}

pub(crate) fn rag_inner(
    p: &Problem,
    u_n: &Field,
    u_prev: &Field,
    mom: MomentumState,
    alpha: f64,
    rule: MomentumRule,
) -> Result<(StepOutcome, MomentumState)> {
    let mom = mom.next();
    let t = momentum_weight(&mom, rule);
    let w = extrapolate_inner(p, u_n, u_prev, t)?;
    let grad = p.riemannian_gradient_unchecked(&w)?;
    let next = descend(p, &w, &grad, alpha)?;
    let out = StepOutcome {
        energy: p.energy_unchecked(&next),
        next,
        kind: StepKind::RagExtrapolated,
        alpha_used: alpha,
        backtracks: 0,
        reference: None,
        momentum: Some(t),
        armijo_alpha: None,
        grad_norm: Some(grad.norm),
    };
    Ok((out, mom))
}

/// A trial point that cannot be pulled back (vanishing or non-finite) simply
/// fails the test and the step is shortened.
pub(crate) fn armijo_inner(
    p: &Problem,
    u: &Field,
    grad: &RiemannianGradient,
    reference: f64,
    opts: &SolverOptions,
) -> Result<ArmijoOutcome> {
    let gsq = grad.norm * grad.norm;
    let mut alpha = opts.alpha0;
    for j in 0..=opts.max_backtracks {
        if let Ok(v) = descend(p, u, grad, alpha) {
            let e = p.energy_unchecked(&v);
            if e <= reference - opts.sigma * alpha * gsq {
                return Ok(ArmijoOutcome {
                    point: v,
                    energy: e,
                    alpha,
                    backtracks: j,
                    grad_norm: grad.norm,
                });
            }
        }
        alpha *= opts.beta;
    }
    Err(Error::LineSearchFailed {
        backtracks: opts.max_backtracks,
        grad_norm: grad.norm,
        reference,
        energy: p.energy_unchecked(u),
    })
}

#[allow(clippy::type_complexity)]
pub(crate) fn nmrag_inner(
    p: &Problem,
    u_n: &Field,
    e_n: f64,
    u_prev: &Field,
    mom: MomentumState,
    nm: NonmonotoneState,
    opts: &SolverOptions,
) -> Result<(StepOutcome, MomentumState, NonmonotoneState, ArmijoOutcome)> {
    let mom = mom.next();
    let t = momentum_weight(&mom, opts.momentum);
    let w = extrapolate_inner(p, u_n, u_prev, t)?;
    let grad_w = p.riemannian_gradient_unchecked(&w)?;
    // A breakdown of the accelerated candidate only disqualifies it.
    let z = descend(p, &w, &grad_w, opts.alpha)
        .ok()
        .map(|z| (p.energy_unchecked(&z), z))
        .filter(|(e, _)| e.is_finite());

    let nm = nm.update(e_n, opts.varrho);
    let grad_u = if w == *u_n {
        grad_w
    } else {
        p.riemannian_gradient_unchecked(u_n)?
    };
    let armijo = armijo_inner(p, u_n, &grad_u, nm.c, opts)?;

    let (next, energy, kind, alpha_used) = match z {
        Some((e_z, z)) if e_z <= armijo.energy => (z, e_z, StepKind::RagExtrapolated, opts.alpha),
        _ => (
            armijo.point.clone(),
            armijo.energy,
            StepKind::ArmijoFallback,
            armijo.alpha,
        ),
    };
    let out = StepOutcome {
        next,
        energy,
        kind,
        alpha_used,
        backtracks: armijo.backtracks,
        reference: Some(nm.c),
        momentum: Some(t),
        armijo_alpha: Some(armijo.alpha),
        grad_norm: Some(armijo.grad_norm),
    };
    Ok((out, mom, nm, armijo))
}
