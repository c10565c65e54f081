use ndarray::{Array2, Zip};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::model::Problem;

/// H-gradients `ψ = ∇E(u)` and `φ = ∇G(u)`.
#[derive(Debug, Clone)]
pub struct HGradients {
    pub psi: Field,
    pub phi: Field,
}

/// Riemannian gradient `∇_N E(u) = ψ - ((ψ, φ)_h / ‖φ‖_h²) φ` together with
/// its H-norm.
#[derive(Debug, Clone)]
pub struct RiemannianGradient {
    pub grad: Field,
    pub norm: f64,
}

/// Relative size below which `‖φ‖_h` is treated as vanishing, measured
/// against `‖u‖_h`. On the manifold `(φ, u)_h = -2 K_h`, so this only fires
/// for zero or badly off-manifold inputs.
const DEGENERATE_PHI: f64 = 1e-12;

impl Problem {
    /// Sine coefficients of `ψ` and `φ`.
    ///
    /// `-eps_i Δψ_i = -eps_i Δu_i + a_i u_i - b_i u_i` and
    /// `-eps_i Δφ_i = -2 eps_i Δu_i + 2 a_i u_i - 4 b_i u_i`, so with
    /// `A = DST(a_i u_i)`, `B = DST(b_i u_i)`:
    /// `ψ̂ = û + (A - B) / (eps_i λ)`, `φ̂ = 2û + (2A - 4B) / (eps_i λ)`.
    fn gradient_coeffs(&self, u: &Field) -> (Vec<Array2<f64>>, Vec<Array2<f64>>) {
        let grid = self.grid();
        let lam = grid.eigenvalues();
        let b = self.coupling_fields(u);
        let mut psi = Vec::with_capacity(self.components());
        let mut phi = Vec::with_capacity(self.components());
        for (i, &eps) in self.eps().iter().enumerate() {
            let au = Zip::from(self.potential_values(i))
                .and(u.values(i))
                .map_collect(|&a, &x| a * x);
            let bu = Zip::from(&b[i]).and(u.values(i)).map_collect(|&b, &x| b * x);
            let a_hat = grid.forward(au.view());
            let b_hat = grid.forward(bu.view());
            let mut psi_i = Array2::zeros(grid.shape());
            let mut phi_i = Array2::zeros(grid.shape());
            Zip::from(&mut psi_i)
                .and(&mut phi_i)
                .and(u.coeffs(i))
                .and(&a_hat)
                .and(&b_hat)
                .and(&lam)
                .for_each(|ps, ph, &c, &a, &b, &l| {
                    let d = eps * l;
                    *ps = c + (a - b) / d;
                    *ph = 2.0 * c + (2.0 * a - 4.0 * b) / d;
                });
            psi.push(psi_i);
            phi.push(phi_i);
        }
        (psi, phi)
    }

    fn h_inner_coeffs(&self, x: &[Array2<f64>], y: &[Array2<f64>]) -> f64 {
        let lam = self.grid().eigenvalues();
        let mut total = 0.0;
        for (i, &eps) in self.eps().iter().enumerate() {
            let mut s = 0.0;
            Zip::from(&x[i])
                .and(&y[i])
                .and(&lam)
                .for_each(|&a, &b, &l| s += l * a * b);
            total += eps * s;
        }
        self.grid().half_width().powi(2) * total
    }

    /// `ψ = ∇E(u)` and `φ = ∇G(u)` in the discrete H metric, via `2m`
    /// spectral Poisson solves.
    pub fn h_gradients(&self, u: &Field) -> Result<HGradients> {
        self.check_field(u)?;
        let (psi, phi) = self.gradient_coeffs(u);
        let grid = self.grid().clone();
        Ok(HGradients {
            psi: Field::from_coeffs_unchecked(grid.clone(), psi),
            phi: Field::from_coeffs_unchecked(grid, phi),
        })
    }

    /// H-orthogonal projection of `∇E(u)` onto the tangent space
    /// `{ ξ : (φ, ξ)_h = 0 }`.
    pub fn riemannian_gradient(&self, u: &Field) -> Result<RiemannianGradient> {
        self.check_field(u)?;
        self.riemannian_gradient_unchecked(u)
    }

    pub(crate) fn riemannian_gradient_unchecked(&self, u: &Field) -> Result<RiemannianGradient> {
        let (psi, phi) = self.gradient_coeffs(u);
        let phi_sq = self.h_inner_coeffs(&phi, &phi);
        let u_norm = crate::spectral::h_inner_unchecked(u, u, self.eps()).max(0.0).sqrt();
        let phi_norm = phi_sq.max(0.0).sqrt();
        if !phi_norm.is_finite() {
            return Err(Error::NonFinite("constraint gradient"));
        }
        if phi_norm <= DEGENERATE_PHI * u_norm || phi_norm == 0.0 {
            return Err(Error::DegenerateConstraintGradient(phi_norm));
        }
        let c = self.h_inner_coeffs(&psi, &phi) / phi_sq;
        let grad: Vec<Array2<f64>> = psi
            .iter()
            .zip(&phi)
            .map(|(ps, ph)| Zip::from(ps).and(ph).map_collect(|&a, &b| a - c * b))
            .collect();
        let norm = self.h_inner_coeffs(&grad, &grad).max(0.0).sqrt();
        Ok(RiemannianGradient {
            grad: Field::from_coeffs_unchecked(self.grid().clone(), grad),
            norm,
        })
    }

    /// Steepest-descent direction on the manifold, `η = -∇_N E(u)`.
    pub fn descent_direction(&self, u: &Field) -> Result<Field> {
        Ok(self.riemannian_gradient(u)?.grad.scaled(-1.0))
    }

    /// `max_i ‖ -eps_i Δ_h u_i + a_i u_i - b_i(u) u_i ‖_∞`.
    pub fn residual(&self, u: &Field) -> Result<f64> {
        self.check_field(u)?;
        Ok(self.residual_unchecked(u))
    }

    pub(crate) fn residual_unchecked(&self, u: &Field) -> f64 {
        let grid = self.grid();
        let lam = grid.eigenvalues();
        let b = self.coupling_fields(u);
        let mut worst = 0.0_f64;
        for (i, &eps) in self.eps().iter().enumerate() {
            let lap_hat = Zip::from(u.coeffs(i)).and(&lam).map_collect(|&c, &l| eps * l * c);
            let lap = grid.inverse(lap_hat.view());
            Zip::from(&lap)
                .and(u.values(i))
                .and(self.potential_values(i))
                .and(&b[i])
                .for_each(|&d, &x, &a, &b| {
                    let r = (d + a * x - b * x).abs();
                    // NaN propagates as non-convergence
                    worst = if r.is_nan() { f64::NAN } else { worst.max(r) };
                });
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::grid::Grid;
    use crate::model::CouplingMatrix;
    use crate::spectral::h_inner;

    fn mode11(grid: &Grid) -> Field {
        Field::from_components(vec![grid.sample(|x, y| {
            (PI * (x + 1.0) / 2.0).sin() * (PI * (y + 1.0) / 2.0).sin()
        })])
        .unwrap()
    }

    fn free_pair() -> Problem {
        let grid = Grid::new(1.0, 16).unwrap();
        let z = grid.sample(|_, _| 0.0);
        let g = CouplingMatrix::new(vec![vec![1.0, 2.0], vec![2.0, 3.0]]).unwrap();
        Problem::new(grid, vec![1.0, 0.5], vec![z.clone(), z], g).unwrap()
    }

    #[test]
    fn zero_potential_gives_phi_from_psi() {
        let p = free_pair();
        let grid = p.grid().clone();
        let u = Field::from_components(vec![
            grid.sample(|x, y| (1.0 - x * x) * (1.0 - y * y) * (1.0 + x)),
            grid.sample(|x, y| (1.0 - x * x) * (1.0 - y * y) * (2.0 - y)),
        ])
        .unwrap();
        let HGradients { psi, phi } = p.h_gradients(&u).unwrap();
        let want = psi.lincomb(4.0, -2.0, &u).unwrap();
        for i in 0..2 {
            let err = (&phi.values(i) - &want.values(i)).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            assert!(err < 1e-12 * want.sup_norm(), "{err}");
        }
    }

    #[test]
    fn zero_field_has_zero_gradients() {
        let p = free_pair();
        let z = Field::zeros(p.grid(), 2);
        let g = p.h_gradients(&z).unwrap();
        assert_eq!(g.psi.sup_norm(), 0.0);
        assert_eq!(g.phi.sup_norm(), 0.0);
        assert!(matches!(
            p.riemannian_gradient(&z),
            Err(Error::DegenerateConstraintGradient(_))
        ));
    }

    #[test]
    fn residual_of_mode_matches_pointwise_evaluation() {
        let grid = Grid::new(1.0, 16).unwrap();
        let p = Problem::new(
            grid.clone(),
            vec![1.0],
            vec![grid.sample(|_, _| 0.0)],
            CouplingMatrix::new(vec![vec![1.0]]).unwrap(),
        )
        .unwrap();
        let u = mode11(&grid);
        let want = u
            .values(0)
            .iter()
            .map(|&x| (PI * PI / 2.0 * x - x * x * x).abs())
            .fold(0.0, f64::max);
        assert!((p.residual(&u).unwrap() - want).abs() < 1e-12);
        assert_eq!(p.residual(&Field::zeros(&grid, 1)).unwrap(), 0.0);
    }

    #[test]
    fn descent_direction_is_tangent() {
        let p = free_pair();
        let grid = p.grid().clone();
        let u = Field::from_components(vec![
            grid.sample(|x, y| (1.0 - x * x) * (1.0 - y * y)),
            grid.sample(|x, y| (1.0 - x * x) * (1.0 - y * y) * (x + 2.0)),
        ])
        .unwrap();
        let u = p.pullback(&u).unwrap();
        let eta = p.descent_direction(&u).unwrap();
        let HGradients { psi, phi } = p.h_gradients(&u).unwrap();
        let tangency = h_inner(&eta, &phi, p.eps()).unwrap();
        let scale = h_inner(&eta, &eta, p.eps()).unwrap().sqrt() * h_inner(&phi, &phi, p.eps()).unwrap().sqrt();
        assert!(tangency.abs() <= 1e-10 * scale);
        assert!(h_inner(&eta, &psi, p.eps()).unwrap() <= 0.0);
    }
}
