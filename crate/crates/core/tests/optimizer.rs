use nehari_core::optimizer::{armijo_search, extrapolate, nmrag_step, rag_step, rsd_step};
use nehari_core::scenarios::{example1, example3};
use nehari_core::spectral::h_norm;
use nehari_core::{
    run, Algorithm, Error, Field, MomentumRule, MomentumState, NonmonotoneState, Problem, RunStatus,
    SolverOptions, StepKind,
};

fn small(spec: nehari_core::scenarios::ScenarioSpec) -> (Problem, Field) {
    let spec = spec.with_subdivisions(16);
    let p = spec.build().unwrap();
    let u0 = spec.initial_field(&p, None).unwrap();
    (p, u0)
}

#[test]
fn extrapolation_degenerates_to_the_current_point() {
    let (p, u0) = small(example1(8.0));
    let u1 = rsd_step(&p, &u0, 0.1).unwrap();
    assert_eq!(extrapolate(&p, &u1, &u0, 0.0).unwrap(), u1);
    assert_eq!(extrapolate(&p, &u1, &u1, 0.7).unwrap(), u1);
    let w = extrapolate(&p, &u1, &u0, 0.5).unwrap();
    assert!(p.manifold_defect(&w).unwrap() < 1e-12);
    assert!(extrapolate(&p, &u1, &u0, f64::NAN).is_err());
}

#[test]
fn rag_without_momentum_is_rsd() {
    let (p, u0) = small(example1(8.0));
    let base = SolverOptions::default().with_max_iter(40);
    let rsd = run(&p, &u0, &base.clone().with_algorithm(Algorithm::Rsd)).unwrap();
    let rag = run(
        &p,
        &u0,
        &SolverOptions {
            momentum: MomentumRule::Zero,
            ..base.with_algorithm(Algorithm::Rag)
        },
    )
    .unwrap();
    assert_eq!(rsd.final_field, rag.final_field);
    for (a, b) in rsd.history.iter().zip(&rag.history) {
        assert_eq!(a.energy.to_bits(), b.energy.to_bits());
    }
}

#[test]
fn rag_step_advances_the_schedule() {
    let (p, u0) = small(example1(8.0));
    let (u1, m1) = rag_step(&p, &u0, &u0, MomentumState::initial(), 0.1).unwrap();
    assert_eq!(m1.t, -1.0);
    assert_eq!(u1, rsd_step(&p, &u0, 0.1).unwrap());
    let (_, m2) = rag_step(&p, &u1, &u0, m1, 0.1).unwrap();
    assert_eq!(m2.t, 0.0);
}

#[test]
fn small_steps_decrease_the_energy() {
    let (p, mut u) = small(example1(8.0));
    let mut e = p.energy(&u).unwrap();
    for _ in 0..50 {
        u = rsd_step(&p, &u, 0.05).unwrap();
        let next = p.energy(&u).unwrap();
        assert!(next <= e + 1e-12 * e.abs());
        e = next;
    }
}

#[test]
fn retraction_is_first_order() {
    let (p, u) = small(example3());
    let xi = p.descent_direction(&u).unwrap();
    let dist = |s: f64| {
        let r = p.retract(&u, &xi.scaled(s)).unwrap();
        let lin = u.lincomb(1.0, s, &xi).unwrap();
        h_norm(&r.lincomb(1.0, -1.0, &lin).unwrap(), p.eps()).unwrap()
    };
    let (a, b) = (dist(1e-2), dist(1e-3));
    let slope = (a / b).log10();
    assert!(slope >= 1.9, "observed order {slope}");
}

#[test]
fn generous_reference_accepts_the_first_trial() {
    let (p, u) = small(example1(8.0));
    let opts = SolverOptions::default();
    let out = armijo_search(&p, &u, 1e6, &opts).unwrap();
    assert_eq!(out.backtracks, 0);
    assert_eq!(out.alpha, opts.alpha0);
    let tight = armijo_search(&p, &u, p.energy(&u).unwrap(), &opts).unwrap();
    assert!(tight.energy <= p.energy(&u).unwrap() - opts.sigma * tight.alpha * tight.grad_norm.powi(2));
}

#[test]
fn nmrag_step_never_exceeds_the_armijo_candidate() {
    let (p, u0) = small(example3());
    let opts = SolverOptions::default().with_alpha(1.1);
    let (mut u, mut prev) = (u0.clone(), u0.clone());
    let mut mom = MomentumState::initial();
    let mut nm = NonmonotoneState::new(p.energy(&u0).unwrap());
    for _ in 0..30 {
        let step = nmrag_step(&p, &u, &prev, mom, nm, &opts).unwrap();
        assert!(step.energy <= step.armijo.energy);
        if step.kind == StepKind::ArmijoFallback {
            assert_eq!(step.next, step.armijo.point);
        }
        prev = std::mem::replace(&mut u, step.next);
        mom = step.momentum;
        nm = step.nonmonotone;
    }
}

#[test]
fn every_scheme_reaches_the_same_ground_state() {
    let (p, u0) = small(example1(8.0));
    let energies: Vec<f64> = Algorithm::ALL
        .iter()
        .map(|&a| {
            let r = run(&p, &u0, &SolverOptions::default().with_algorithm(a).with_max_iter(20_000)).unwrap();
            assert!(r.converged, "{a}: {:?}", r.status);
            assert_eq!(r.history.len(), r.iterations + 1);
            r.final_energy()
        })
        .collect();
    for e in &energies {
        assert!((e - energies[0]).abs() < 1e-8 * energies[0]);
    }
}

#[test]
fn restart_keeps_convergence() {
    let (p, u0) = small(example3());
    let opts = SolverOptions {
        restart: true,
        ..SolverOptions::default().with_algorithm(Algorithm::Rag).with_max_iter(20_000)
    };
    assert!(run(&p, &u0, &opts).unwrap().converged);
}

#[test]
fn off_manifold_starts_and_bad_options_are_rejected() {
    let (p, u0) = small(example1(8.0));
    let err = run(&p, &u0.scaled(1.1), &SolverOptions::default()).unwrap_err();
    assert!(matches!(err, Error::OffManifold(_)), "{err}");
    let bad = SolverOptions {
        beta: 1.5,
        ..Default::default()
    };
    assert!(matches!(run(&p, &u0, &bad), Err(Error::InvalidParameter(_))));
}

#[test]
fn iteration_cap_is_reported() {
    let (p, u0) = small(example1(6.0));
    let r = run(&p, &u0, &SolverOptions::default().with_algorithm(Algorithm::Rsd).with_max_iter(5)).unwrap();
    assert_eq!(r.status, RunStatus::MaxIterations);
    assert!(!r.converged);
    assert_eq!(r.iterations, 5);
}

#[test]
fn aggressive_steps_trip_the_divergence_guard() {
    let (p, u0) = small(example3());
    let opts = SolverOptions {
        divergence_residual: 10.0,
        ..SolverOptions::default().with_algorithm(Algorithm::Rag).with_alpha(1.9).with_max_iter(2_000)
    };
    let r = run(&p, &u0, &opts).unwrap();
    assert!(matches!(r.status, RunStatus::Diverged { .. }), "{:?}", r.status);
}
