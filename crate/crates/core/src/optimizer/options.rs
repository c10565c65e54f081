use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Riemannian steepest descent with a fixed step.
    Rsd,
    /// Nesterov-accelerated gradient with fixed step.
    Rag,
    /// Accelerated gradient safeguarded by a nonmonotone Armijo search.
    NmRag,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Rsd, Algorithm::Rag, Algorithm::NmRag];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rsd => "rsd",
            Algorithm::Rag => "rag",
            Algorithm::NmRag => "nmrag",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "rsd" | "rsdn" => Ok(Algorithm::Rsd),
            "rag" | "ragn" => Ok(Algorithm::Rag),
            "nmrag" | "nmragn" => Ok(Algorithm::NmRag),
            _ => Err(Error::InvalidParameter(format!(
                "unknown algorithm `{s}` (expected rsd, rag or nmrag)"
            ))),
        }
    }
}

/// How the extrapolation weight `t_n` is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentumRule {
    #[default]
    Nesterov,
    /// `t_n = 0` throughout; the accelerated schemes then reduce to plain descent.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub algorithm: Algorithm,
    /// Fixed step for RSD/RAG and for the extrapolated candidate of nmRAG.
    pub alpha: f64,
    /// Initial trial step of the Armijo search.
    pub alpha0: f64,
    pub sigma: f64,
    /// Memory weight `ϱ` of the nonmonotone reference value.
    pub varrho: f64,
    /// Backtracking factor.
    pub beta: f64,
    /// Stop once the sup-norm residual is at or below this.
    pub tol: f64,
    pub max_iter: usize,
    pub max_backtracks: usize,
    pub rng_seed: Option<u64>,
    pub momentum: MomentumRule,
    /// Reset the momentum schedule whenever the energy goes up. Off by default.
    pub restart: bool,
    /// The run is declared diverged once `E(u_n)` exceeds this multiple of `|E(u_0)|`.
    pub divergence_energy_factor: f64,
    /// ... or once the residual exceeds this.
    pub divergence_residual: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::NmRag,
            alpha: 0.1,
            alpha0: 0.1,
            sigma: 1e-3,
            varrho: 0.85,
            beta: 0.25,
            tol: 1e-6,
            max_iter: 100_000,
            max_backtracks: 50,
            rng_seed: None,
            momentum: MomentumRule::Nesterov,
            restart: false,
            divergence_energy_factor: 1e3,
            divergence_residual: 1e6,
        }
    }
}

impl SolverOptions {
    pub fn with_algorithm(mut self, algorithm: Algorithm) -> Self {
        self.algorithm = algorithm;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
            }
        };
        let unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {v}")))
            }
        };
        positive("alpha", self.alpha)?;
        positive("alpha0", self.alpha0)?;
        positive("tol", self.tol)?;
        positive("divergence_energy_factor", self.divergence_energy_factor)?;
        positive("divergence_residual", self.divergence_residual)?;
        unit("sigma", self.sigma)?;
        unit("varrho", self.varrho)?;
        unit("beta", self.beta)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let o = SolverOptions::default();
        o.validate().unwrap();
        assert_eq!((o.alpha, o.sigma, o.varrho, o.beta, o.tol), (0.1, 1e-3, 0.85, 0.25, 1e-6));
    }

    #[test]
    fn rejects_out_of_range() {
        for o in [
            SolverOptions { beta: 1.0, ..Default::default() },
            SolverOptions { varrho: 0.0, ..Default::default() },
            SolverOptions { sigma: -0.1, ..Default::default() },
            SolverOptions { alpha: f64::NAN, ..Default::default() },
            SolverOptions { alpha0: 0.0, ..Default::default() },
        ] {
            assert!(matches!(o.validate(), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn algorithm_names() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("nmRAG-N".parse::<Algorithm>().unwrap(), Algorithm::NmRag);
        assert!("adam".parse::<Algorithm>().is_err());
    }
}
