use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::model::{CouplingMatrix, InteractionQuadrature, Problem};
use crate::spectral::ScalarField;

use super::initial::{gaussian_initial, randomized_initial};

/// External potential `a_i` of one component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `a = ω`.
    Constant { omega: f64 },
    /// `a = scale (x² + y² + 1)`.
    HarmonicPlusOne {
        #[serde(default = "unit")]
        scale: f64,
    },
    /// `a = x² + y²`.
    Harmonic,
    /// Harmonic trap plus a Gaussian bump,
    /// `a = x² + y² + w exp(-δ ((x - x_c)² + (y - y_c)²))`.
    GaussianStirrer { w: f64, delta: f64, xc: f64, yc: f64 },
    /// Interior nodal values in row-major order (`x` index first).
    CustomSamples { values: Vec<f64> },
}

fn unit() -> f64 {
    1.0
}

impl PotentialSpec {
    pub fn sample(&self, grid: &Grid) -> Result<ScalarField> {
        let field = match *self {
            PotentialSpec::Constant { omega } => grid.sample(|_, _| omega),
            PotentialSpec::HarmonicPlusOne { scale } => {
                grid.sample(|x, y| scale * (x * x + y * y + 1.0))
            }
            PotentialSpec::Harmonic => grid.sample(|x, y| x * x + y * y),
            PotentialSpec::GaussianStirrer { w, delta, xc, yc } => {
                if !(delta > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "stirrer width delta must be positive, got {delta}"
                    )));
                }
                grid.sample(|x, y| {
                    let d2 = (x - xc).powi(2) + (y - yc).powi(2);
                    x * x + y * y + w * (-delta * d2).exp()
                })
            }
            PotentialSpec::CustomSamples { ref values } => {
                let arr = Array2::from_shape_vec(grid.shape(), values.clone()).map_err(|_| {
                    Error::ShapeMismatch {
                        expected: grid.shape(),
                        found: (values.len(), 1),
                    }
                })?;
                return ScalarField::new(grid.clone(), arr);
            }
        };
        if field.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("potential samples"));
        }
        Ok(field)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub half_width: f64,
    pub subdivisions: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            half_width: 1.0,
            subdivisions: 64,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.half_width, self.subdivisions)
    }
}

/// Starting point before the pullback onto the manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialGuess {
    /// `exp(-16 (x² + y²))` in every component.
    #[default]
    Gaussian,
    /// The Gaussian times independent uniform `(0, 1)` samples at every node.
    /// Without a seed here, the solver's `rng_seed` is used, then 0.
    Randomized {
        #[serde(default)]
        seed: Option<u64>,
    },
}

/// Everything needed to assemble a [`Problem`] and its starting point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(default)]
    pub grid: GridSpec,
    pub eps: Vec<f64>,
    pub potentials: Vec<PotentialSpec>,
    pub coupling: CouplingMatrix,
    #[serde(default)]
    pub initial: InitialGuess,
    #[serde(default)]
    pub quadrature: InteractionQuadrature,
}

impl ScenarioSpec {
    pub fn components(&self) -> usize {
        self.coupling.size()
    }

    /// Samples the potentials and checks the admissibility assumptions.
    pub fn build(&self) -> Result<Problem> {
        let grid = self.grid.build()?;
        let m = self.components();
        if self.potentials.len() != m {
            return Err(Error::ComponentMismatch {
                expected: m,
                found: self.potentials.len(),
            });
        }
        let potentials = self
            .potentials
            .iter()
            .map(|a| a.sample(&grid))
            .collect::<Result<Vec<_>>>()?;
        let problem = Problem::new(grid, self.eps.clone(), potentials, self.coupling.clone())?
            .with_quadrature(self.quadrature);
        problem.validate().map_err(Error::InvalidProblem)?;
        Ok(problem)
    }

    /// Starting point on the manifold of `problem` (built from this spec).
    pub fn initial_field(&self, problem: &Problem, fallback_seed: Option<u64>) -> Result<Field> {
        match self.initial {
            InitialGuess::Gaussian => gaussian_initial(problem),
            InitialGuess::Randomized { seed } => {
                randomized_initial(problem, seed.or(fallback_seed).unwrap_or(0))
            }
        }
    }

    pub fn with_grid(mut self, grid: GridSpec) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_subdivisions(mut self, subdivisions: usize) -> Self {
        self.grid.subdivisions = subdivisions;
        self
    }

    pub fn with_initial(mut self, initial: InitialGuess) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_quadrature(mut self, quadrature: InteractionQuadrature) -> Self {
        self.quadrature = quadrature;
        self
    }
}
