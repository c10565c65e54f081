//! Scalar fields on the interior grid, their sine coefficients, and the
//! spectral operators built on them.

use ndarray::{Array2, ArrayView2, Zip};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;

/// Real values at the `(M-1)²` interior nodes; entry `(k, l)` approximates
/// `u(x_k, y_l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Array2<f64>,
}

/// Sine-series coefficients; entry `(p-1, q-1)` is `û_pq`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoeffs {
    grid: Grid,
    coeffs: Array2<f64>,
}

fn check_shape(grid: &Grid, found: (usize, usize)) -> Result<()> {
    if found != grid.shape() {
        return Err(Error::ShapeMismatch {
            expected: grid.shape(),
            found,
        });
    }
    Ok(())
}

impl ScalarField {
    pub fn new(grid: Grid, values: Array2<f64>) -> Result<Self> {
        check_shape(&grid, values.dim())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("scalar field"));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_array_unchecked(grid: Grid, values: Array2<f64>) -> Self {
        debug_assert_eq!(values.dim(), grid.shape());
        Self { grid, values }
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            values: Array2::zeros(grid.shape()),
            grid: grid.clone(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: &self.values * s,
        }
    }
}

impl SpectralCoeffs {
    pub fn new(grid: Grid, coeffs: Array2<f64>) -> Result<Self> {
        check_shape(&grid, coeffs.dim())?;
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("spectral coefficients"));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> ArrayView2<'_, f64> {
        self.coeffs.view()
    }
}

/// Forward sine transform, `O(M² log M)`.
pub fn dst2(f: &ScalarField) -> SpectralCoeffs {
    SpectralCoeffs {
        coeffs: f.grid.forward(f.values.view()),
        grid: f.grid.clone(),
    }
}

/// Sine synthesis at the interior nodes; inverse of [`dst2`].
pub fn idst2(c: &SpectralCoeffs) -> ScalarField {
    ScalarField {
        values: c.grid.inverse(c.coeffs.view()),
        grid: c.grid.clone(),
    }
}

/// `-Δ_h f`: diagonal multiplier `(pπ/2L)² + (qπ/2L)²` in coefficient space.
pub fn neg_laplacian(f: &ScalarField) -> ScalarField {
    let grid = &f.grid;
    let coeffs = grid.forward(f.values.view()) * &grid.eigenvalues();
    ScalarField {
        values: grid.inverse(coeffs.view()),
        grid: grid.clone(),
    }
}

/// Solves `-eps Δ_h ψ = rhs` with zero Dirichlet data.
pub fn poisson_solve(rhs: &ScalarField, eps: f64) -> Result<ScalarField> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "diffusion coefficient must be positive, got {eps}"
        )));
    }
    let grid = &rhs.grid;
    let mut coeffs = grid.forward(rhs.values.view());
    Zip::from(&mut coeffs)
        .and(&grid.eigenvalues())
        .for_each(|c, &lam| *c /= eps * lam);
    Ok(ScalarField {
        values: grid.inverse(coeffs.view()),
        grid: grid.clone(),
    })
}

/// Discrete H inner product `h² Σ_i Σ_kl eps_i (-Δ_h u_i)_kl (v_i)_kl`,
/// evaluated in coefficient space as `L² Σ_i eps_i Σ_pq λ_pq û_pq v̂_pq`.
pub fn h_inner(u: &Field, v: &Field, eps: &[f64]) -> Result<f64> {
    u.check_compatible(v)?;
    if eps.len() != u.components() {
        return Err(Error::ComponentMismatch {
            expected: u.components(),
            found: eps.len(),
        });
    }
    Ok(h_inner_unchecked(u, v, eps))
}

pub(crate) fn h_inner_unchecked(u: &Field, v: &Field, eps: &[f64]) -> f64 {
    let grid = u.grid();
    let lam = grid.eigenvalues();
    let l = grid.half_width();
    let mut total = 0.0;
    for (i, &e) in eps.iter().enumerate() {
        let mut s = 0.0;
        Zip::from(u.coeffs(i))
            .and(v.coeffs(i))
            .and(&lam)
            .for_each(|&a, &b, &w| s += w * a * b);
        total += e * s;
    }
    l * l * total
}

/// `‖u‖_h`.
pub fn h_norm(u: &Field, eps: &[f64]) -> Result<f64> {
    Ok(h_inner(u, u, eps)?.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn mode(grid: &Grid, p: usize, q: usize) -> ScalarField {
        let l = grid.half_width();
        grid.sample(|x, y| {
            (p as f64 * PI * (x + l) / (2.0 * l)).sin() * (q as f64 * PI * (y + l) / (2.0 * l)).sin()
        })
    }

    #[test]
    fn zero_field_has_zero_coefficients() {
        let g = Grid::new(1.0, 8).unwrap();
        let c = dst2(&ScalarField::zeros(&g));
        assert!(c.coeffs().iter().all(|&v| v == 0.0));
        assert!(idst2(&c).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unit_coefficient_synthesizes_one_mode() {
        let g = Grid::new(1.0, 8).unwrap();
        let mut c = Array2::zeros(g.shape());
        c[[0, 0]] = 1.0;
        let f = idst2(&SpectralCoeffs::new(g.clone(), c).unwrap());
        for k in 1..8 {
            for l in 1..8 {
                let want = (k as f64 * PI / 8.0).sin() * (l as f64 * PI / 8.0).sin();
                assert!((f.values()[[k - 1, l - 1]] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn laplacian_eigenfields() {
        let g = Grid::new(1.0, 16).unwrap();
        let f = mode(&g, 1, 1);
        let lf = neg_laplacian(&f);
        let want = f.scaled(PI * PI / 2.0);
        let err = (&lf.values() - &want.values()).iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        assert!(err < 1e-12, "{err}");

        let f = mode(&g, 2, 3);
        let lf = neg_laplacian(&f);
        let want = f.scaled(13.0 * PI * PI / 4.0);
        let err = (&lf.values() - &want.values()).iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        assert!(err < 1e-11, "{err}");
    }

    #[test]
    fn poisson_inverts_eigenmode() {
        let g = Grid::new(1.0, 16).unwrap();
        let f = mode(&g, 1, 1);
        let psi = poisson_solve(&f.scaled(PI * PI / 2.0), 1.0).unwrap();
        let err = (&psi.values() - &f.values()).iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        assert!(err < 1e-13);
        let zero = poisson_solve(&ScalarField::zeros(&g), 2.0).unwrap();
        assert_eq!(zero.sup_norm(), 0.0);
    }

    #[test]
    fn poisson_rejects_nonpositive_eps() {
        let g = Grid::new(1.0, 8).unwrap();
        let f = ScalarField::zeros(&g);
        assert!(poisson_solve(&f, 0.0).is_err());
        assert!(poisson_solve(&f, -1.0).is_err());
    }

    #[test]
    fn constructor_rejects_bad_input() {
        let g = Grid::new(1.0, 8).unwrap();
        assert!(matches!(
            ScalarField::new(g.clone(), Array2::zeros((6, 7))),
            Err(Error::ShapeMismatch { .. })
        ));
        let mut v = Array2::zeros((7, 7));
        v[[1, 1]] = f64::NAN;
        assert!(matches!(ScalarField::new(g, v), Err(Error::NonFinite(_))));
    }
}
