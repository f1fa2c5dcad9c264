use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thermolimit::ensemble::SiteSampler;
use thermolimit::regularization::Target;
use thermolimit::spin_boson::IntegrandForm;
use thermolimit::zurek::BathSize;

use crate::error::{CliError, CliResult};
use crate::output::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Scaling,
    Spinboson,
    Zurek,
    Regularize,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Scaling => "scaling",
            Experiment::Spinboson => "spinboson",
            Experiment::Zurek => "zurek",
            Experiment::Regularize => "regularize",
        }
    }

    pub fn is_stochastic(self) -> bool {
        self == Experiment::Scaling
    }
}

/// Config file contents. `parameters` is kept as raw JSON until the
/// experiment is known, then parsed strictly.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default = "empty_object")]
    pub parameters: Value,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
    /// Sweep only: parameter name → values.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub ranges: BTreeMap<String, RangeSpec>,
    /// Sweep only: largest allowed cross product.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_points: Option<usize>,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

pub const DEFAULT_SEED: u64 = 7;

impl ExperimentConfig {
    /// Built-in configuration for a bare `run <experiment>`.
    pub fn default_for(experiment: Experiment) -> Self {
        Self {
            experiment,
            parameters: empty_object(),
            seed: experiment.is_stochastic().then_some(DEFAULT_SEED),
            output_path: None,
            format: None,
            ranges: BTreeMap::new(),
            max_points: None,
        }
    }

    /// Reads and parses a config file. Nothing is written on failure.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn set_parameter(&mut self, key: &str, value: Value) -> CliResult<()> {
        match &mut self.parameters {
            Value::Object(map) => {
                map.insert(key.to_string(), value);
                Ok(())
            }
            _ => Err(CliError::Config("parameters must be a JSON object".into())),
        }
    }

    /// Checks that the parameters parse for the chosen experiment and that
    /// stochastic experiments carry a seed.
    pub fn validate(&self) -> CliResult<()> {
        if self.experiment.is_stochastic() && self.seed.is_none() {
            return Err(CliError::Config(format!(
                "experiment {} needs a seed (config `seed` or --seed)",
                self.experiment.name()
            )));
        }
        Params::parse(self.experiment, &self.parameters).map(|_| ())
    }
}

/// Evenly spaced grid including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    #[serde(default)]
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

const MAX_GRID_POINTS: usize = 1_000_000;

impl TimeGrid {
    pub fn values(&self) -> CliResult<Vec<f64>> {
        if !self.start.is_finite() || !self.stop.is_finite() || self.stop < self.start {
            return Err(CliError::Config(format!(
                "time grid needs finite start <= stop, got [{}, {}]",
                self.start, self.stop
            )));
        }
        if self.points == 0 || self.points > MAX_GRID_POINTS {
            return Err(CliError::Config(format!(
                "time grid needs 1..={MAX_GRID_POINTS} points, got {}",
                self.points
            )));
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|k| self.start + step * k as f64)
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingParams {
    pub n_list: Vec<usize>,
    pub sampler: SiteSampler,
}

impl Default for ScalingParams {
    fn default() -> Self {
        Self {
            n_list: (1..=6).map(|k| 10usize.pow(k)).collect(),
            sampler: SiteSampler::UniformMagnetization {
                m_min: 0.3,
                m_max: 0.9,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpinBosonParams {
    pub n_spins: usize,
    pub delta: f64,
    pub omega: f64,
    pub g: f64,
    /// Omitted: sized from the largest coherent amplitude.
    pub fock_dim: Option<usize>,
    pub times: TimeGrid,
    pub integrand: IntegrandForm,
}

impl Default for SpinBosonParams {
    fn default() -> Self {
        Self {
            n_spins: 2,
            delta: 0.0,
            omega: 1.0,
            g: 0.5,
            fock_dim: None,
            times: TimeGrid {
                start: 0.0,
                stop: 4.0 * std::f64::consts::PI,
                points: 16,
            },
            integrand: IntegrandForm::Derived,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZurekParams {
    pub n_spins: BathSize,
    pub lambda: f64,
    pub times: TimeGrid,
    /// Averaging window for the limit report.
    pub window: f64,
}

impl Default for ZurekParams {
    fn default() -> Self {
        Self {
            n_spins: BathSize::Finite(10),
            lambda: 1.0,
            times: TimeGrid {
                start: 0.0,
                stop: std::f64::consts::PI,
                points: 201,
            },
            window: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegularizeParams {
    pub target: Target,
    pub epsilons: Vec<f64>,
    pub windows: Vec<f64>,
}

impl Default for RegularizeParams {
    fn default() -> Self {
        Self {
            target: Target::Cos,
            epsilons: vec![1e-1, 1e-2, 1e-3, 1e-4],
            windows: vec![1e1, 1e2, 1e3, 1e4],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Scaling(ScalingParams),
    Spinboson(SpinBosonParams),
    Zurek(ZurekParams),
    Regularize(RegularizeParams),
}

impl Params {
    pub fn parse(experiment: Experiment, raw: &Value) -> CliResult<Self> {
        fn typed<T: serde::de::DeserializeOwned>(e: Experiment, raw: &Value) -> CliResult<T> {
            serde_json::from_value(raw.clone())
                .map_err(|err| CliError::Config(format!("{} parameters: {err}", e.name())))
        }
        Ok(match experiment {
            Experiment::Scaling => Params::Scaling(typed(experiment, raw)?),
            Experiment::Spinboson => Params::Spinboson(typed(experiment, raw)?),
            Experiment::Zurek => Params::Zurek(typed(experiment, raw)?),
            Experiment::Regularize => Params::Regularize(typed(experiment, raw)?),
        })
    }
}

/// Sweep range: an explicit list, or `points` evenly spaced values on
/// [start, stop].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RangeSpec {
    List(Vec<Value>),
    Linspace {
        start: f64,
        stop: f64,
        points: usize,
    },
}

impl RangeSpec {
    pub fn values(&self, name: &str) -> CliResult<Vec<Value>> {
        let values = match self {
            RangeSpec::List(v) => v.clone(),
            RangeSpec::Linspace {
                start,
                stop,
                points,
            } => TimeGrid {
                start: *start,
                stop: *stop,
                points: *points,
            }
            .values()
            .map_err(|e| CliError::Config(format!("range {name}: {e}")))?
            .into_iter()
            .map(Value::from)
            .collect(),
        };
        if values.is_empty() {
            return Err(CliError::Config(format!("range {name} is empty")));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_number() && !v.is_string()) {
            return Err(CliError::Config(format!(
                "range {name}: unsupported value {bad}"
            )));
        }
        Ok(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn grid_includes_endpoints() {
        let g = TimeGrid {
            start: 0.0,
            stop: 1.0,
            points: 5,
        };
        assert_eq!(g.values().unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(TimeGrid {
            start: 0.0,
            stop: 1.0,
            points: 0
        }
        .values()
        .is_err());
    }

    #[test]
    fn unknown_parameter_rejected() {
        let err = Params::parse(Experiment::Zurek, &json!({ "n": 3 })).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let p = Params::parse(Experiment::Zurek, &json!({ "n_spins": "infinite" })).unwrap();
        assert!(matches!(
            p,
            Params::Zurek(ZurekParams {
                n_spins: BathSize::Infinite,
                ..
            })
        ));
    }

    #[test]
    fn stochastic_needs_seed() {
        let mut cfg = ExperimentConfig::default_for(Experiment::Scaling);
        assert!(cfg.validate().is_ok());
        cfg.seed = None;
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn ranges_parse() {
        let r: RangeSpec = serde_json::from_value(json!([1, 2, 3])).unwrap();
        assert_eq!(r.values("n").unwrap().len(), 3);
        let r: RangeSpec =
            serde_json::from_value(json!({ "start": 0.0, "stop": 1.0, "points": 3 })).unwrap();
        assert_eq!(
            r.values("t").unwrap(),
            vec![json!(0.0), json!(0.5), json!(1.0)]
        );
        let r: RangeSpec = serde_json::from_value(json!([])).unwrap();
        assert!(r.values("n").is_err());
    }
}
