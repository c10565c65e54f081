use ndarray::{Array2, ArrayView2, Zip};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::spectral::{ScalarField, SpectralCoeffs};

/// Relative size below which nodal values are treated as zero. Quartic
/// interaction terms of anything above it stay clear of the subnormal range.
pub const UNDERFLOW_FLOOR: f64 = 1e-75;

/// An m-component state `u = (u_1, ..., u_m)` on a shared grid.
///
/// Both the nodal values and the sine coefficients of every component are
/// stored. Linear operations update the two representations together, so the
/// iteration schemes only transform when a pointwise nonlinearity forces it.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<Array2<f64>>,
    coeffs: Vec<Array2<f64>>,
}

impl Field {
    pub fn zeros(grid: &Grid, components: usize) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![Array2::zeros(grid.shape()); components],
            coeffs: vec![Array2::zeros(grid.shape()); components],
        }
    }

    pub fn from_components(components: Vec<ScalarField>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::InvalidParameter("a field needs at least one component".into()));
        };
        let grid = first.grid().clone();
        if components.iter().any(|c| c.grid() != &grid) {
            return Err(Error::GridMismatch);
        }
        let values: Vec<_> = components.into_iter().map(ScalarField::into_values).collect();
        Ok(Self::from_values_unchecked(grid, values))
    }

    /// Builds a field from nodal arrays, checking shape and finiteness.
    pub fn from_values(grid: &Grid, values: Vec<Array2<f64>>) -> Result<Self> {
        let comps = values
            .into_iter()
            .map(|v| ScalarField::new(grid.clone(), v))
            .collect::<Result<Vec<_>>>()?;
        Self::from_components(comps)
    }

    pub(crate) fn from_values_unchecked(grid: Grid, values: Vec<Array2<f64>>) -> Self {
        let coeffs = values.iter().map(|v| grid.forward(v.view())).collect();
        Self {
            grid,
            values,
            coeffs,
        }
    }

    pub(crate) fn from_coeffs_unchecked(grid: Grid, coeffs: Vec<Array2<f64>>) -> Self {
        let values = coeffs.iter().map(|c| grid.inverse(c.view())).collect();
        Self {
            grid,
            values,
            coeffs,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Number of components `m`.
    pub fn components(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self, i: usize) -> ArrayView2<'_, f64> {
        self.values[i].view()
    }

    pub fn coeffs(&self, i: usize) -> ArrayView2<'_, f64> {
        self.coeffs[i].view()
    }

    pub fn component(&self, i: usize) -> ScalarField {
        ScalarField::from_array_unchecked(self.grid.clone(), self.values[i].clone())
    }

    pub fn component_coeffs(&self, i: usize) -> SpectralCoeffs {
        SpectralCoeffs::new(self.grid.clone(), self.coeffs[i].clone())
            .expect("stored coefficients match the grid")
    }

    pub fn sup_norm(&self) -> f64 {
        (0..self.components())
            .map(|i| self.component_sup_norm(i))
            .fold(0.0, f64::max)
    }

    pub fn component_sup_norm(&self, i: usize) -> f64 {
        self.values[i].iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.iter().all(|x| x.is_finite()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn lincomb(&self, a: f64, b: f64, other: &Field) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.lincomb_unchecked(a, b, other))
    }

    pub(crate) fn lincomb_unchecked(&self, a: f64, b: f64, other: &Field) -> Self {
        let combine = |xs: &[Array2<f64>], ys: &[Array2<f64>]| -> Vec<Array2<f64>> {
            xs.iter()
                .zip(ys)
                .map(|(x, y)| Zip::from(x).and(y).map_collect(|&x, &y| a * x + b * y))
                .collect()
        };
        Self {
            grid: self.grid.clone(),
            values: combine(&self.values, &other.values),
            coeffs: combine(&self.coeffs, &other.coeffs),
        }
    }

    /// `a * self + b * other` formed on the nodal values, with the
    /// coefficients transformed afresh. Under heavy cancellation the two
    /// representations of a plain [`Field::lincomb`] drift apart, and repeated
    /// pullbacks amplify that drift; this variant keeps them in step.
    ///
    /// Entries below [`UNDERFLOW_FLOOR`] times the sup norm are set to zero.
    /// A component that decays towards zero (a semi-trivial ground state)
    /// otherwise spends thousands of iterations in subnormal arithmetic,
    /// which is an order of magnitude slower on common hardware.
    pub(crate) fn lincomb_synced(&self, a: f64, b: f64, other: &Field) -> Self {
        let mut values: Vec<Array2<f64>> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| Zip::from(x).and(y).map_collect(|&x, &y| a * x + b * y))
            .collect();
        let sup = values.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
        let floor = UNDERFLOW_FLOOR * sup;
        for v in values.iter_mut().flatten() {
            if v.abs() < floor {
                *v = 0.0;
            }
        }
        Self::from_values_unchecked(self.grid.clone(), values)
    }

    pub fn check_compatible(&self, other: &Field) -> Result<()> {
        if self.components() != other.components() {
            return Err(Error::ComponentMismatch {
                expected: self.components(),
                found: other.components(),
            });
        }
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}
