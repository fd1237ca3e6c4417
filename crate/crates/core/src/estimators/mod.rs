//! Per-path derivative estimators and the replication engine that turns them into estimates
//! with standard errors.

mod branching;
mod estimate;
mod integral;
mod paths;
mod replicate;

pub use branching::{
    dpa_derivative, dpa_path, option_fd_estimate, option_path_derivative, option_threshold_derivative,
    queue_fd_estimate,
};
pub use estimate::{DerivativeEstimate, EstimatorConfig, EstimatorId, FaceContribution, FaceTreatment};
pub use integral::{leibniz_integral_estimate, surface_term, SurfaceTerm};
pub use paths::{
    fd_estimate, ipa_lr_estimate, ipa_lr_path, leibniz_divergence_estimate, leibniz_divergence_path,
    leibniz_volume_path, NON_INTEGRABLE_D,
};
pub use replicate::{
    default_workers, derived_seed, mean_and_se, path_stream, replicate, run_paths, PathRng, Replication,
};

use crate::error::{Error, Result};
use crate::models::Model;

/// Runs estimator `id` on a density model.
pub fn estimate(m: &Model, id: EstimatorId, theta: f64, cfg: &EstimatorConfig) -> Result<DerivativeEstimate> {
    match id {
        EstimatorId::Fd => fd_estimate(m, theta, cfg),
        EstimatorId::LeibnizDivergence => leibniz_divergence_estimate(m, theta, cfg),
        EstimatorId::LeibnizIntegral => leibniz_integral_estimate(m, theta, cfg),
        EstimatorId::IpaLr => ipa_lr_estimate(m, theta, cfg),
        EstimatorId::ConditionalLeibniz | EstimatorId::Dpa => {
            Err(Error::UnsupportedEstimator { estimator: id.to_string(), model: m.name.clone() })
        }
    }
}
