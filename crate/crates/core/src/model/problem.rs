use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::model::coupling::{CouplingMatrix, CouplingRegime};
use crate::spectral::ScalarField;

/// Quadrature weight applied to the quartic interaction sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionQuadrature {
    /// `I_h = h² Σ ...`, consistent with `K_h` and with the H-gradients.
    #[default]
    Scaled,
    /// `I_h = Σ ...` without the `h²` weight. Kept only to reproduce that
    /// convention; the pullback then disagrees with the gradients by `h²`.
    Unscaled,
}

/// First failed clause of the structural assumptions on a problem.
#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum Violation {
    #[error("diffusion coefficient eps[{component}] = {value} is not positive")]
    NonPositiveDiffusion { component: usize, value: f64 },
    #[error("coupling matrix is neither fully cooperative nor positive definite")]
    InadmissibleCoupling,
    #[error(
        "potential a[{component}] reaches {min} at a grid node, not above -lambda_1 = {bound}"
    )]
    PotentialTooNegative {
        component: usize,
        min: f64,
        bound: f64,
    },
}

/// A discretized m-component system on one grid.
#[derive(Debug, Clone)]
pub struct Problem {
    grid: Grid,
    eps: Vec<f64>,
    potentials: Vec<Array2<f64>>,
    coupling: CouplingMatrix,
    quadrature: InteractionQuadrature,
}

impl Problem {
    /// Assembles a problem. Only structural consistency is checked here; call
    /// [`Problem::validate`] for the admissibility assumptions.
    pub fn new(
        grid: Grid,
        eps: Vec<f64>,
        potentials: Vec<ScalarField>,
        coupling: CouplingMatrix,
    ) -> Result<Self> {
        let m = coupling.size();
        for found in [eps.len(), potentials.len()] {
            if found != m {
                return Err(Error::ComponentMismatch { expected: m, found });
            }
        }
        if eps.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite("diffusion coefficients"));
        }
        if potentials.iter().any(|a| a.grid() != &grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid,
            eps,
            potentials: potentials.into_iter().map(ScalarField::into_values).collect(),
            coupling,
            quadrature: InteractionQuadrature::Scaled,
        })
    }

    pub fn with_quadrature(mut self, quadrature: InteractionQuadrature) -> Self {
        self.quadrature = quadrature;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Component count `m`.
    pub fn components(&self) -> usize {
        self.eps.len()
    }

    pub fn eps(&self) -> &[f64] {
        &self.eps
    }

    pub fn potential(&self, i: usize) -> ScalarField {
        ScalarField::new(self.grid.clone(), self.potentials[i].clone())
            .expect("potentials are validated at construction")
    }

    pub(crate) fn potential_values(&self, i: usize) -> &Array2<f64> {
        &self.potentials[i]
    }

    pub fn coupling(&self) -> &CouplingMatrix {
        &self.coupling
    }

    pub fn quadrature(&self) -> InteractionQuadrature {
        self.quadrature
    }

    /// Weight in front of the quartic sum: `h²`, or `1` for the unscaled variant.
    pub fn interaction_weight(&self) -> f64 {
        match self.quadrature {
            InteractionQuadrature::Scaled => self.grid.mesh_size().powi(2),
            InteractionQuadrature::Unscaled => 1.0,
        }
    }

    /// Checks, in order: `eps_i > 0`, the coupling regime, and
    /// `min a_i > -λ_1` over the grid with `λ_1 = 2 (π / 2L)²`.
    pub fn validate(&self) -> std::result::Result<CouplingRegime, Violation> {
        if let Some((component, &value)) = self.eps.iter().enumerate().find(|(_, &e)| e <= 0.0) {
            return Err(Violation::NonPositiveDiffusion { component, value });
        }
        let regime = self.coupling.regime();
        if regime == CouplingRegime::Inadmissible {
            return Err(Violation::InadmissibleCoupling);
        }
        let bound = -self.grid.first_eigenvalue();
        for (component, a) in self.potentials.iter().enumerate() {
            let min = a.iter().copied().fold(f64::INFINITY, f64::min);
            if min <= bound {
                return Err(Violation::PotentialTooNegative {
                    component,
                    min,
                    bound,
                });
            }
        }
        Ok(regime)
    }

    pub(crate) fn check_field(&self, u: &Field) -> Result<()> {
        if u.components() != self.components() {
            return Err(Error::ComponentMismatch {
                expected: self.components(),
                found: u.components(),
            });
        }
        if u.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_component(g: Vec<Vec<f64>>, eps: Vec<f64>, a: f64) -> Problem {
        let grid = Grid::new(1.0, 8).unwrap();
        let pots = vec![grid.sample(|_, _| a), grid.sample(|_, _| a)];
        Problem::new(grid, eps, pots, CouplingMatrix::new(g).unwrap()).unwrap()
    }

    #[test]
    fn validation_clauses() {
        let ok = two_component(vec![vec![2.0, -1.0], vec![-1.0, 2.0]], vec![1.0, 1.0], 0.0);
        assert_eq!(ok.validate(), Ok(CouplingRegime::PositivelyCoupled));

        let bad_g = two_component(vec![vec![1.0, -2.0], vec![-2.0, 1.0]], vec![1.0, 1.0], 0.0);
        assert_eq!(bad_g.validate(), Err(Violation::InadmissibleCoupling));

        let bad_eps = two_component(vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![1.0, 0.0], 0.0);
        assert!(matches!(
            bad_eps.validate(),
            Err(Violation::NonPositiveDiffusion { component: 1, .. })
        ));

        // λ₁ = π²/2 ≈ 4.93 on (-1, 1)²
        let deep = two_component(vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![1.0, 1.0], -5.0);
        assert!(matches!(deep.validate(), Err(Violation::PotentialTooNegative { .. })));
        let shallow = two_component(vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![1.0, 1.0], -4.9);
        assert!(shallow.validate().is_ok());
    }

    #[test]
    fn structural_mismatches() {
        let grid = Grid::new(1.0, 8).unwrap();
        let g = CouplingMatrix::new(vec![vec![1.0]]).unwrap();
        let pot = grid.sample(|_, _| 0.0);
        assert!(Problem::new(grid.clone(), vec![1.0, 1.0], vec![pot.clone()], g.clone()).is_err());
        let other = Grid::new(1.0, 10).unwrap();
        assert!(matches!(
            Problem::new(other, vec![1.0], vec![pot], g),
            Err(Error::GridMismatch)
        ));
    }
}
