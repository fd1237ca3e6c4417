//! Experiment configuration: one JSON document per run, validated into a runnable experiment.

use crate::float_text;
use leibniz_core::distributions::{JointDensity, Marginal};
use leibniz_core::estimators::{EstimatorConfig, EstimatorId};
use leibniz_core::models::{
    distribution_id, model_american_option, model_gg1, model_log_inventory, model_max_threshold, model_push_out,
    model_san, AmericanOption, AmericanOptionParams, GG1Params, GG1Queue, Interarrival, Model,
};
use leibniz_core::transforms::{LogShift, Polynomial};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use thiserror::Error;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("`{field}`: {message}")]
    Field { field: &'static str, message: String },
}

fn field(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field { field, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Model tag plus its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// ψ = 1{log(X1 + θ) + log(X2 + θ) < q}.
    LogInventory {
        distribution: JointDensity,
        #[serde(with = "float_text")]
        q: f64,
    },
    /// ψ = 1{max(X1, X2) ≤ θ}.
    MaxThreshold { distribution: JointDensity },
    /// ψ = φ(log(X + θ)) with polynomial φ.
    Smooth {
        distribution: JointDensity,
        linear: Vec<f64>,
        #[serde(default)]
        quadratic: Vec<Vec<f64>>,
    },
    /// ψ = 1{every listed path is no longer than θ}.
    San { edges: Vec<Marginal>, paths: Vec<Vec<u8>>, selected: Vec<usize> },
    /// θ is the threshold at `exercise_date` (0-based).
    AmericanOption {
        option: AmericanOptionParams,
        #[serde(default)]
        exercise_date: usize,
    },
    /// θ is the admission level of the queue.
    Gg1 { queue: GG1Params },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    #[serde(with = "float_text")]
    pub theta: f64,
    pub estimators: Vec<EstimatorId>,
    #[serde(default = "default_reps")]
    pub n_reps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface_reps: Option<usize>,
    #[serde(default = "default_fd_delta")]
    pub fd_delta: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_crn")]
    pub crn: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    /// Fill the oracle column when an oracle exists.
    #[serde(default)]
    pub oracle: bool,
}

fn default_reps() -> usize {
    10_000
}

fn default_fd_delta() -> f64 {
    0.02
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_crn() -> bool {
    true
}

impl RunConfig {
    pub fn from_json(text: &str, path: &Path) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|source| ConfigError::Parse { path: path.to_path_buf(), source })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        Self::from_json(&text, path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn estimator_config(&self, workers: usize) -> EstimatorConfig {
        EstimatorConfig {
            fd_delta: self.fd_delta,
            n_reps: self.n_reps,
            surface_reps: self.surface_reps,
            seed: self.seed,
            crn: self.crn,
            workers,
        }
    }
}

/// A model built from its spec, with θ already applied where θ is a model parameter.
pub enum Experiment {
    Density(Model),
    Option { option: AmericanOption, date: usize },
    Queue(GG1Queue),
}

impl Experiment {
    pub fn model_id(&self) -> String {
        match self {
            Experiment::Density(m) => m.name.clone(),
            Experiment::Option { .. } => "american_option".into(),
            Experiment::Queue(_) => "gg1".into(),
        }
    }

    pub fn distribution_id(&self) -> String {
        match self {
            Experiment::Density(m) => distribution_id(&m.density),
            Experiment::Option { option, .. } => format!("gbm({})", option.params.sigma),
            Experiment::Queue(q) => match q.params.interarrival {
                Interarrival::Deterministic { value } => format!("uniform_admission:deterministic({value})"),
                Interarrival::Exponential { rate } => format!("uniform_admission:exp({rate})"),
            },
        }
    }

    pub fn supports(&self, id: EstimatorId) -> bool {
        match self {
            Experiment::Density(m) => match id {
                EstimatorId::Fd => true,
                EstimatorId::LeibnizDivergence => m.chart.is_some(),
                EstimatorId::LeibnizIntegral => m.push_out.is_some(),
                EstimatorId::IpaLr => {
                    m.push_out.as_ref().is_some_and(|p| p.outer.gradient(&vec![0.0; p.transform.dim()]).is_some())
                }
                EstimatorId::ConditionalLeibniz | EstimatorId::Dpa => false,
            },
            Experiment::Option { .. } => matches!(id, EstimatorId::Fd | EstimatorId::ConditionalLeibniz),
            Experiment::Queue(_) => matches!(id, EstimatorId::Fd | EstimatorId::Dpa),
        }
    }
}

/// Builds the model and checks every field that can be checked before running.
pub fn build_experiment(cfg: &RunConfig) -> Result<Experiment, ConfigError> {
    if cfg.estimators.is_empty() {
        return Err(field("estimators", "list is empty"));
    }
    if cfg.n_reps < 2 {
        return Err(field("n_reps", "must be at least 2"));
    }
    if cfg.surface_reps.is_some_and(|n| n < 2) {
        return Err(field("surface_reps", "must be at least 2"));
    }
    if !(cfg.fd_delta > 0.0) || !cfg.fd_delta.is_finite() {
        return Err(field("fd_delta", "must be positive"));
    }
    if !cfg.theta.is_finite() {
        return Err(field("theta", "must be finite"));
    }
    let model_err = |e: leibniz_core::Error| field("model", e.to_string());
    let exp = match &cfg.model {
        ModelSpec::LogInventory { distribution, q } => {
            Experiment::Density(model_log_inventory(distribution.clone(), *q).map_err(model_err)?)
        }
        ModelSpec::MaxThreshold { distribution } => {
            Experiment::Density(model_max_threshold(distribution.clone()).map_err(model_err)?)
        }
        ModelSpec::Smooth { distribution, linear, quadratic } => {
            let dim = distribution.dim();
            if linear.len() != dim || quadratic.iter().any(|r| r.len() != dim) || quadratic.len() > dim {
                return Err(field("model", format!("polynomial coefficients must match dimension {dim}")));
            }
            let outer = Polynomial { linear: linear.clone(), quadratic: quadratic.clone() };
            Experiment::Density(
                model_push_out(
                    "smooth",
                    distribution.clone(),
                    Arc::new(LogShift { dim }),
                    Arc::new(outer),
                    (0.0, f64::INFINITY),
                )
                .map_err(model_err)?,
            )
        }
        ModelSpec::San { edges, paths, selected } => {
            Experiment::Density(model_san(edges.clone(), paths.clone(), selected.clone()).map_err(model_err)?)
        }
        ModelSpec::AmericanOption { option, exercise_date } => {
            let base = model_american_option(option.clone()).map_err(model_err)?;
            if *exercise_date + 1 >= base.n_periods() {
                return Err(field("model", format!("exercise_date {exercise_date} has no early exercise")));
            }
            let option = base.with_threshold(*exercise_date, cfg.theta).map_err(|e| field("theta", e.to_string()))?;
            Experiment::Option { option, date: *exercise_date }
        }
        ModelSpec::Gg1 { queue } => Experiment::Queue(model_gg1(queue.clone()).map_err(model_err)?),
    };
    match &exp {
        Experiment::Density(m) => m.check_theta(cfg.theta).map_err(|e| field("theta", e.to_string()))?,
        Experiment::Queue(_) if !(cfg.theta > 0.0 && cfg.theta < 1.0) => {
            return Err(field("theta", "admission level must lie in (0, 1)"))
        }
        _ => {}
    }
    if let Some(id) = cfg.estimators.iter().find(|id| !exp.supports(**id)) {
        return Err(field("estimators", format!("`{id}` is not available for model `{}`", exp.model_id())));
    }
    Ok(exp)
}
