use ndarray::{ArrayView2, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;

/// Relative sup-norm below which a component counts as identically zero.
pub const DEFAULT_TRIVIAL_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentClass {
    Trivial,
    Nontrivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionClass {
    SemiTrivial,
    FullyNontrivial,
}

impl SolutionClass {
    pub fn name(self) -> &'static str {
        match self {
            SolutionClass::SemiTrivial => "semi_trivial",
            SolutionClass::FullyNontrivial => "fully_nontrivial",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub components: Vec<ComponentClass>,
    pub overall: SolutionClass,
    /// `‖u_i‖_∞ / max_j ‖u_j‖_∞` per component.
    pub relative_sup: Vec<f64>,
}

/// Component `i` is trivial iff `‖u_i‖_∞ < threshold · max_j ‖u_j‖_∞`.
///
/// A field whose components are all zero (or non-finite) is reported as an
/// error since it cannot come out of a healthy solve.
pub fn classify_solution(u: &Field, threshold: f64) -> Result<Classification> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "classification threshold must lie in (0, 1), got {threshold}"
        )));
    }
    let sups: Vec<f64> = (0..u.components()).map(|i| u.component_sup_norm(i)).collect();
    let max = sups.iter().copied().fold(0.0, f64::max);
    if !max.is_finite() || sups.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("field to classify"));
    }
    if max == 0.0 {
        return Err(Error::ZeroField(0.0));
    }
    let relative_sup: Vec<f64> = sups.iter().map(|s| s / max).collect();
    let components: Vec<ComponentClass> = relative_sup
        .iter()
        .map(|&r| {
            if r < threshold {
                ComponentClass::Trivial
            } else {
                ComponentClass::Nontrivial
            }
        })
        .collect();
    let overall = if components.contains(&ComponentClass::Trivial) {
        SolutionClass::SemiTrivial
    } else {
        SolutionClass::FullyNontrivial
    };
    Ok(Classification {
        components,
        overall,
        relative_sup,
    })
}

/// Largest deviation from each reflection symmetry of the square, over all
/// components, relative to `‖u‖_∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryDefect {
    /// `u(x, y)` against `u(-x, y)`.
    pub x_reflection: f64,
    /// `u(x, y)` against `u(x, -y)`.
    pub y_reflection: f64,
    /// `u(x, y)` against `u(y, x)`.
    pub diagonal: f64,
    /// `u(x, y)` against `u(-y, -x)`.
    pub anti_diagonal: f64,
}

impl SymmetryDefect {
    pub fn max(&self) -> f64 {
        self.x_reflection
            .max(self.y_reflection)
            .max(self.diagonal)
            .max(self.anti_diagonal)
    }
}

fn sup_diff(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> f64 {
    Zip::from(a)
        .and(b)
        .fold(0.0, |acc: f64, &x, &y| acc.max((x - y).abs()))
}

pub fn symmetry_defect(u: &Field) -> SymmetryDefect {
    let scale = u.sup_norm();
    let mut d = SymmetryDefect {
        x_reflection: 0.0,
        y_reflection: 0.0,
        diagonal: 0.0,
        anti_diagonal: 0.0,
    };
    if !(scale > 0.0) {
        return d;
    }
    for i in 0..u.components() {
        let v = u.values(i);
        let mut flip_x = v;
        flip_x.invert_axis(ndarray::Axis(0));
        let mut flip_y = v;
        flip_y.invert_axis(ndarray::Axis(1));
        let mut anti = v.t();
        anti.invert_axis(ndarray::Axis(0));
        anti.invert_axis(ndarray::Axis(1));
        d.x_reflection = d.x_reflection.max(sup_diff(v, flip_x) / scale);
        d.y_reflection = d.y_reflection.max(sup_diff(v, flip_y) / scale);
        d.diagonal = d.diagonal.max(sup_diff(v, v.t()) / scale);
        d.anti_diagonal = d.anti_diagonal.max(sup_diff(v, anti) / scale);
    }
    d
}
