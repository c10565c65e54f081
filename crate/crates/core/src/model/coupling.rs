use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which admissible regime a coupling matrix falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingRegime {
    /// Every `g_ij > 0`.
    FullyCooperative,
    /// Symmetric positive definite, with some non-positive entry.
    PositivelyCoupled,
    /// Neither of the above.
    Inadmissible,
}

/// Symmetric `m × m` matrix of coupling constants `g_ij`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct CouplingMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl CouplingMatrix {
    /// Builds the matrix from its rows. Rows must form a finite square matrix
    /// with `g_ij == g_ji` exactly.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::InvalidParameter("coupling matrix is empty".into()));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != size) {
            return Err(Error::InvalidParameter(format!(
                "coupling matrix row {bad} has {} entries, expected {size}",
                rows[bad].len()
            )));
        }
        let entries: Vec<f64> = rows.into_iter().flatten().collect();
        if entries.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("coupling matrix"));
        }
        for i in 0..size {
            for j in (i + 1)..size {
                if entries[i * size + j] != entries[j * size + i] {
                    return Err(Error::InvalidParameter(format!(
                        "coupling matrix is not symmetric: g[{i}][{j}] = {} but g[{j}][{i}] = {}",
                        entries[i * size + j],
                        entries[j * size + i]
                    )));
                }
            }
        }
        Ok(Self { size, entries })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.size).map(<[f64]>::to_vec).collect()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |acc, g| acc.max(g.abs()))
    }

    pub fn is_fully_cooperative(&self) -> bool {
        self.entries.iter().all(|&g| g > 0.0)
    }

    /// Positive definiteness via an attempted Cholesky factorization.
    pub fn is_positive_definite(&self) -> bool {
        let n = self.size;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if d <= 0.0 {
                return false;
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        true
    }

    pub fn regime(&self) -> CouplingRegime {
        if self.is_fully_cooperative() {
            CouplingRegime::FullyCooperative
        } else if self.is_positive_definite() {
            CouplingRegime::PositivelyCoupled
        } else {
            CouplingRegime::Inadmissible
        }
    }
}

impl TryFrom<Vec<Vec<f64>>> for CouplingMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<CouplingMatrix> for Vec<Vec<f64>> {
    fn from(g: CouplingMatrix) -> Self {
        g.rows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes() {
        let ex1 = CouplingMatrix::new(vec![
            vec![2.0, 4.0, 4.0],
            vec![4.0, 4.0, 6.0],
            vec![4.0, 6.0, 6.0],
        ])
        .unwrap();
        assert_eq!(ex1.regime(), CouplingRegime::FullyCooperative);
        // eigenvalues {3, -1}
        let bad = CouplingMatrix::new(vec![vec![1.0, -2.0], vec![-2.0, 1.0]]).unwrap();
        assert_eq!(bad.regime(), CouplingRegime::Inadmissible);
        // eigenvalues {1, 3}
        let pd = CouplingMatrix::new(vec![vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        assert_eq!(pd.regime(), CouplingRegime::PositivelyCoupled);
    }

    #[test]
    fn cholesky_on_larger_matrices() {
        // tridiagonal [-1, 2, -1] is positive definite
        let n: usize = 5;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.abs_diff(j) {
                        0 => 2.0,
                        1 => -1.0,
                        _ => 0.0,
                    })
                    .collect()
            })
            .collect();
        assert!(CouplingMatrix::new(rows).unwrap().is_positive_definite());
        // singular: rank one
        let ones = CouplingMatrix::new(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        assert!(!ones.is_positive_definite());
    }

    #[test]
    fn rejects_asymmetric_or_ragged() {
        assert!(CouplingMatrix::new(vec![vec![1.0, 2.0], vec![2.5, 1.0]]).is_err());
        assert!(CouplingMatrix::new(vec![vec![1.0, 2.0], vec![2.0]]).is_err());
        assert!(CouplingMatrix::new(vec![]).is_err());
        assert!(CouplingMatrix::new(vec![vec![f64::INFINITY]]).is_err());
    }
}
