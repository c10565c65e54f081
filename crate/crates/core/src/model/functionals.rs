use ndarray::{Array2, Zip};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::model::Problem;

/// `‖v‖_∞` at or below `ZERO_FIELD_TOL * L` counts as the zero field.
const ZERO_FIELD_TOL: f64 = 1e-14;
/// Smallest `I_h` for which the pullback is attempted.
const MIN_INTERACTION: f64 = 1e-300;

impl Problem {
    /// `b_i(u) = Σ_j g_ij u_j²`, pointwise.
    pub(crate) fn coupling_fields(&self, u: &Field) -> Vec<Array2<f64>> {
        let m = self.components();
        let squares: Vec<Array2<f64>> = (0..m).map(|j| u.values(j).mapv(|x| x * x)).collect();
        (0..m)
            .map(|i| {
                let mut b = Array2::zeros(self.grid().shape());
                for (j, s) in squares.iter().enumerate() {
                    let g = self.coupling().get(i, j);
                    if g != 0.0 {
                        b.scaled_add(g, s);
                    }
                }
                b
            })
            .collect()
    }

    pub(crate) fn quadratic_unchecked(&self, u: &Field) -> f64 {
        let grid = self.grid();
        let lam = grid.eigenvalues();
        let l2 = grid.half_width().powi(2);
        let h2 = grid.mesh_size().powi(2);
        let mut total = 0.0;
        for (i, &eps) in self.eps().iter().enumerate() {
            let mut grad = 0.0;
            Zip::from(u.coeffs(i))
                .and(&lam)
                .for_each(|&c, &w| grad += w * c * c);
            let mut pot = 0.0;
            Zip::from(u.values(i))
                .and(self.potential_values(i))
                .for_each(|&x, &a| pot += a * x * x);
            total += eps * l2 * grad + h2 * pot;
        }
        total
    }

    pub(crate) fn interaction_unchecked(&self, u: &Field) -> f64 {
        let b = self.coupling_fields(u);
        let mut total = 0.0;
        for (i, bi) in b.iter().enumerate() {
            Zip::from(bi)
                .and(u.values(i))
                .for_each(|&b, &x| total += b * x * x);
        }
        self.interaction_weight() * total
    }

    /// `K_h(u)`.
    pub fn quadratic(&self, u: &Field) -> Result<f64> {
        self.check_field(u)?;
        Ok(self.quadratic_unchecked(u))
    }

    /// `I_h(u)`.
    pub fn interaction(&self, u: &Field) -> Result<f64> {
        self.check_field(u)?;
        Ok(self.interaction_unchecked(u))
    }

    /// `E_h(u) = K_h/2 - I_h/4`.
    pub fn energy(&self, u: &Field) -> Result<f64> {
        self.check_field(u)?;
        Ok(self.energy_unchecked(u))
    }

    pub(crate) fn energy_unchecked(&self, u: &Field) -> f64 {
        0.5 * self.quadratic_unchecked(u) - 0.25 * self.interaction_unchecked(u)
    }

    /// `G_h(u) = ⟨E'(u), u⟩ = K_h - I_h`; zero on the Nehari manifold.
    pub fn constraint(&self, u: &Field) -> Result<f64> {
        self.check_field(u)?;
        Ok(self.quadratic_unchecked(u) - self.interaction_unchecked(u))
    }

    /// `⟨E''(u) u, u⟩ = K_h - 3 I_h`, which equals `-2 I_h < 0` on the manifold.
    pub fn ray_curvature(&self, u: &Field) -> Result<f64> {
        self.check_field(u)?;
        Ok(self.quadratic_unchecked(u) - 3.0 * self.interaction_unchecked(u))
    }

    /// Scaling `ρ(v) = (K_h(v) / I_h(v))^{1/2}` that maps the ray through `v`
    /// onto the manifold.
    pub fn rho(&self, v: &Field) -> Result<f64> {
        self.check_field(v)?;
        self.rho_unchecked(v)
    }

    pub(crate) fn rho_unchecked(&self, v: &Field) -> Result<f64> {
        let sup = v.sup_norm();
        if !sup.is_finite() {
            return Err(Error::NonFinite("pullback input"));
        }
        if sup <= ZERO_FIELD_TOL * self.grid().half_width() {
            return Err(Error::ZeroField(sup));
        }
        let k = self.quadratic_unchecked(v);
        let i = self.interaction_unchecked(v);
        if !(i > MIN_INTERACTION) {
            return Err(Error::DegenerateInteraction(i));
        }
        if !(k > 0.0) {
            return Err(Error::DegenerateQuadratic(k));
        }
        Ok((k / i).sqrt())
    }

    /// `ρ(v) v`, the manifold point on the ray through `v`.
    pub fn pullback(&self, v: &Field) -> Result<Field> {
        self.check_field(v)?;
        self.pullback_unchecked(v)
    }

    pub(crate) fn pullback_unchecked(&self, v: &Field) -> Result<Field> {
        let rho = self.rho_unchecked(v)?;
        Ok(v.scaled(rho))
    }

    /// Nehari retraction `R_u(ξ) = ρ(u + ξ) (u + ξ)`.
    pub fn retract(&self, u: &Field, xi: &Field) -> Result<Field> {
        self.check_field(u)?;
        self.check_field(xi)?;
        self.pullback_unchecked(&u.lincomb_synced(1.0, 1.0, xi))
    }

    /// `|G_h(u)| / K_h(u)`, the relative distance from the manifold.
    pub fn manifold_defect(&self, u: &Field) -> Result<f64> {
        self.check_field(u)?;
        let k = self.quadratic_unchecked(u);
        let i = self.interaction_unchecked(u);
        Ok((k - i).abs() / k.abs())
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::grid::Grid;
    use crate::model::CouplingMatrix;

    fn scalar_problem(m_sub: usize) -> Problem {
        let grid = Grid::new(1.0, m_sub).unwrap();
        let a = grid.sample(|_, _| 0.0);
        Problem::new(grid, vec![1.0], vec![a], CouplingMatrix::new(vec![vec![1.0]]).unwrap()).unwrap()
    }

    fn mode11(grid: &Grid) -> Field {
        Field::from_components(vec![grid.sample(|x, y| {
            (PI * (x + 1.0) / 2.0).sin() * (PI * (y + 1.0) / 2.0).sin()
        })])
        .unwrap()
    }

    #[test]
    fn zero_field() {
        let p = scalar_problem(8);
        let z = Field::zeros(p.grid(), 1);
        assert_eq!(p.quadratic(&z).unwrap(), 0.0);
        assert_eq!(p.interaction(&z).unwrap(), 0.0);
        assert_eq!(p.energy(&z).unwrap(), 0.0);
        assert_eq!(p.constraint(&z).unwrap(), 0.0);
        assert!(matches!(p.rho(&z), Err(Error::ZeroField(_))));
    }

    #[test]
    fn quadratic_of_lowest_mode() {
        // direct sum oracle: h² (π²/2) Σ mode²
        let p = scalar_problem(16);
        let u = mode11(p.grid());
        let h = p.grid().mesh_size();
        let sum_sq: f64 = u.values(0).iter().map(|v| v * v).sum();
        let want = h * h * PI * PI / 2.0 * sum_sq;
        let got = p.quadratic(&u).unwrap();
        assert!((got - want).abs() < 1e-12 * want, "{got} vs {want}");
    }

    #[test]
    fn interaction_of_constant_field() {
        let p = scalar_problem(8);
        let u = Field::from_components(vec![p.grid().sample(|_, _| 1.0)]).unwrap();
        let h = p.grid().mesh_size();
        assert!((p.interaction(&u).unwrap() - h * h * 49.0).abs() < 1e-14);
    }

    #[test]
    fn unscaled_interaction_drops_the_weight() {
        let p = scalar_problem(8).with_quadrature(crate::model::InteractionQuadrature::Unscaled);
        let u = Field::from_components(vec![p.grid().sample(|_, _| 1.0)]).unwrap();
        assert_eq!(p.interaction(&u).unwrap(), 49.0);
    }

    #[test]
    fn rho_of_mode_matches_direct_sums() {
        let p = scalar_problem(16);
        let u = mode11(p.grid());
        let h = p.grid().mesh_size();
        let s2: f64 = u.values(0).iter().map(|v| v * v).sum();
        let s4: f64 = u.values(0).iter().map(|v| v.powi(4)).sum();
        let k = h * h * PI * PI / 2.0 * s2;
        let i = h * h * s4;
        let want = (k / i).sqrt();
        assert!((p.rho(&u).unwrap() - want).abs() < 1e-12 * want);
    }

    #[test]
    fn pullback_lands_on_manifold_and_is_idempotent() {
        let p = scalar_problem(16);
        let u = mode11(p.grid()).scaled(0.3);
        let w = p.pullback(&u).unwrap();
        assert!(p.manifold_defect(&w).unwrap() < 1e-12);
        let rho = p.rho(&w).unwrap();
        assert!((rho - 1.0).abs() < 1e-12);
        let ww = p.pullback(&w).unwrap();
        for (a, b) in ww.values(0).iter().zip(w.values(0).iter()) {
            assert!((a - b).abs() < 1e-12 * w.sup_norm());
        }
    }

    #[test]
    fn retract_zero_step_and_ray_invariance() {
        let p = scalar_problem(16);
        let u = p.pullback(&mode11(p.grid())).unwrap();
        let r0 = p.retract(&u, &Field::zeros(p.grid(), 1)).unwrap();
        let r_half = p.retract(&u, &u.scaled(-0.5)).unwrap();
        for r in [r0, r_half] {
            for (a, b) in r.values(0).iter().zip(u.values(0).iter()) {
                assert!((a - b).abs() < 1e-12 * u.sup_norm());
            }
        }
    }

    #[test]
    fn degenerate_interaction_is_reported() {
        // positively coupled with a sign change: I_h can vanish for u = (1, 1)
        let grid = Grid::new(1.0, 8).unwrap();
        let z = grid.sample(|_, _| 0.0);
        let g = CouplingMatrix::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let p = Problem::new(grid.clone(), vec![1.0, 1.0], vec![z.clone(), z], g).unwrap();
        let u = Field::from_components(vec![grid.sample(|_, _| 1.0), grid.sample(|_, _| 1.0)]).unwrap();
        assert!(matches!(p.rho(&u), Err(Error::DegenerateInteraction(_))));
    }
}
