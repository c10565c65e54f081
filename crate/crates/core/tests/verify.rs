use nehari_core::verify::{run_all, CheckStatus, VerifyConfig};
use nehari_core::{Grid, InteractionQuadrature};

fn quick() -> VerifyConfig {
    VerifyConfig {
        gradient_samples: 4,
        manifold_samples: 8,
        ..Default::default()
    }
}

#[test]
fn a_correct_build_passes_every_check() {
    let reports = run_all(&quick()).unwrap();
    for r in &reports {
        assert_eq!(r.status, CheckStatus::Pass, "{r:?}");
    }
}

#[test]
fn a_corrupted_eigenvalue_table_is_caught() {
    let grid = Grid::new(1.0, 64).unwrap().with_modified_eigenvalues(|lam| lam[[0, 0]] *= 1.01);
    let reports = run_all(&VerifyConfig {
        grid: Some(grid),
        ..quick()
    })
    .unwrap();
    let poisson = reports.iter().find(|r| r.name == "poisson_manufactured").unwrap();
    assert_eq!(poisson.status, CheckStatus::Fail, "{poisson:?}");
}

#[test]
fn unscaled_quadrature_is_flagged_not_failed() {
    let reports = run_all(&VerifyConfig {
        quadrature: InteractionQuadrature::Unscaled,
        ..quick()
    })
    .unwrap();
    let q = reports.iter().find(|r| r.name == "quadrature_consistency").unwrap();
    assert_eq!(q.status, CheckStatus::Skip);
    assert!(q.note.as_deref().unwrap_or("").contains("1/h^2"));
    assert!(reports.iter().all(|r| r.passed()));
}
