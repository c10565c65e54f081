//! Run configuration: a TOML document naming a scenario, solver options,
//! output switches and optional sweep/compare settings.

use std::collections::BTreeMap;
use std::path::PathBuf;

use nehari_core::scenarios::{self, GridSpec, InitialGuess, ScenarioSpec};
use nehari_core::{Algorithm, InteractionQuadrature, SolverOptions};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Syntax(String),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_owned(),
        message: message.into(),
    }
}

/// Either a registered builder with parameter overrides or a full inline spec.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: Option<String>,
    pub params: BTreeMap<String, f64>,
    pub inline: Option<ScenarioSpec>,
    /// Overrides the builder's initial guess.
    pub initial: Option<InitialGuess>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub history: bool,
    pub fields: bool,
    pub metadata: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("nehari-out"),
            history: true,
            fields: true,
            metadata: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompatConfig {
    /// Drop the `h²` weight from the interaction sum.
    pub unscaled_interaction: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Single parameter swept over `values`.
    pub parameter: Option<String>,
    pub values: Vec<f64>,
    /// Alternatively, explicit parameter sets merged into the scenario's.
    pub points: Vec<BTreeMap<String, f64>>,
    /// Each point is solved once per seed from a randomized initial guess.
    /// Empty means one solve with the scenario's own initial guess.
    pub seeds: Vec<u64>,
    pub threshold: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            parameter: None,
            values: Vec::new(),
            points: Vec::new(),
            seeds: Vec::new(),
            threshold: scenarios::DEFAULT_TRIVIAL_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    pub algorithms: Vec<Algorithm>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            algorithms: Algorithm::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    /// Replaces the scenario's grid when present.
    pub grid: Option<GridSpec>,
    pub solver: SolverOptions,
    pub output: OutputConfig,
    pub compat: CompatConfig,
    pub sweep: SweepConfig,
    pub compare: CompareConfig,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    /// Configuration for a registered scenario with every other setting at
    /// its default.
    pub fn for_scenario(name: &str, params: &[(&str, f64)]) -> Self {
        Self {
            scenario: ScenarioConfig {
                name: Some(name.to_owned()),
                params: params.iter().map(|(k, v)| ((*k).to_owned(), *v)).collect(),
                ..Default::default()
            },
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.solver.validate().map_err(|e| invalid("solver", e.to_string()))?;
        if self.solver.max_iter == 0 {
            return Err(invalid("solver.max_iter", "must be at least 1"));
        }
        if self.solver.max_backtracks == 0 {
            return Err(invalid("solver.max_backtracks", "must be at least 1"));
        }
        let sweep = &self.sweep;
        if !(sweep.threshold > 0.0 && sweep.threshold < 1.0) {
            return Err(invalid(
                "sweep.threshold",
                format!("must lie in (0, 1), got {}", sweep.threshold),
            ));
        }
        if sweep.parameter.is_some() && !sweep.points.is_empty() {
            return Err(invalid("sweep", "give either `parameter` with `values` or `points`, not both"));
        }
        if sweep.parameter.is_none() && !sweep.values.is_empty() {
            return Err(invalid("sweep.values", "needs `sweep.parameter`"));
        }
        if self.compare.algorithms.is_empty() {
            return Err(invalid("compare.algorithms", "must name at least one algorithm"));
        }
        self.scenario_spec().map(|_| ())
    }

    /// The scenario with grid and quadrature settings applied.
    pub fn scenario_spec(&self) -> Result<ScenarioSpec, ConfigError> {
        self.scenario_spec_with(&BTreeMap::new())
    }

    /// Like [`RunConfig::scenario_spec`], with extra parameter overrides for a
    /// named builder.
    pub fn scenario_spec_with(
        &self,
        extra: &BTreeMap<String, f64>,
    ) -> Result<ScenarioSpec, ConfigError> {
        let sc = &self.scenario;
        let mut spec = match (&sc.name, &sc.inline) {
            (Some(_), Some(_)) => {
                return Err(invalid("scenario", "give either `name` or `inline`, not both"))
            }
            (None, None) => return Err(invalid("scenario", "missing `name` or `inline`")),
            (None, Some(inline)) => {
                if !extra.is_empty() || !sc.params.is_empty() {
                    return Err(invalid("scenario.params", "only apply to named scenarios"));
                }
                inline.clone()
            }
            (Some(name), None) => {
                let mut params = sc.params.clone();
                params.extend(extra.iter().map(|(k, v)| (k.clone(), *v)));
                scenarios::named(name, &params).map_err(|e| invalid("scenario", e.to_string()))?
            }
        };
        if let Some(grid) = self.grid {
            spec.grid = grid;
        }
        if let Some(initial) = sc.initial {
            spec.initial = initial;
        }
        if self.compat.unscaled_interaction {
            spec.quadrature = InteractionQuadrature::Unscaled;
        }
        spec.grid
            .build()
            .map_err(|e| invalid("grid", e.to_string()))?;
        if spec.eps.len() != spec.components() || spec.potentials.len() != spec.components() {
            return Err(invalid(
                "scenario.inline",
                format!(
                    "{} components in the coupling matrix but {} diffusion coefficients and {} potentials",
                    spec.components(),
                    spec.eps.len(),
                    spec.potentials.len()
                ),
            ));
        }
        Ok(spec)
    }

    /// Parameter sets of the sweep, in table order.
    pub fn sweep_points(&self) -> Vec<BTreeMap<String, f64>> {
        match &self.sweep.parameter {
            Some(p) => self
                .sweep
                .values
                .iter()
                .map(|v| BTreeMap::from([(p.clone(), *v)]))
                .collect(),
            None => self.sweep.points.clone(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable")
    }
}
