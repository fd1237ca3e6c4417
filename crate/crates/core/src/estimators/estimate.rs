use crate::distributions::Face;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorId {
    Fd,
    LeibnizDivergence,
    LeibnizIntegral,
    IpaLr,
    ConditionalLeibniz,
    Dpa,
}

impl EstimatorId {
    pub const ALL: [EstimatorId; 6] = [
        EstimatorId::Fd,
        EstimatorId::LeibnizDivergence,
        EstimatorId::LeibnizIntegral,
        EstimatorId::IpaLr,
        EstimatorId::ConditionalLeibniz,
        EstimatorId::Dpa,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorId::Fd => "fd",
            EstimatorId::LeibnizDivergence => "leibniz_divergence",
            EstimatorId::LeibnizIntegral => "leibniz_integral",
            EstimatorId::IpaLr => "ipa_lr",
            EstimatorId::ConditionalLeibniz => "conditional_leibniz",
            EstimatorId::Dpa => "dpa",
        }
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL.into_iter().find(|e| e.as_str() == s).ok_or_else(|| format!("unknown estimator `{s}`"))
    }
}

/// Replication settings.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub fd_delta: f64,
    pub n_reps: usize,
    /// Draws per sampled face; `None` means `n_reps`.
    pub surface_reps: Option<usize>,
    pub seed: u64,
    /// Common random numbers at θ ± δ in the FD estimator.
    pub crn: bool,
    pub workers: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            fd_delta: 0.02,
            n_reps: 10_000,
            surface_reps: None,
            seed: 20_240_601,
            crn: true,
            workers: super::replicate::default_workers(),
        }
    }
}

impl EstimatorConfig {
    pub fn surface_reps(&self) -> usize {
        self.surface_reps.unwrap_or(self.n_reps)
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.fd_delta > 0.0) || self.n_reps < 2 || self.surface_reps() < 2 {
            return Err(crate::Error::InvalidParameter("need fd_delta > 0, n_reps >= 2 and surface_reps >= 2".into()));
        }
        Ok(())
    }
}

/// How a face of the support enters the surface term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceTreatment {
    /// Marginal density zero at the endpoint.
    Vanishing,
    /// Evaluated on every main-stream path with the coordinate pinned to the endpoint.
    MainStream,
    /// Deterministic evaluation at a point mass.
    PointMass,
    /// Fresh draws from the face conditional.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceContribution {
    pub face: Face,
    pub treatment: FaceTreatment,
    pub boundary_density: f64,
    pub value: f64,
    pub std_error: f64,
    pub draws: u64,
}

/// Point estimate of dE[ψ]/dθ with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeEstimate {
    pub estimator: EstimatorId,
    pub mean: f64,
    pub std_error: f64,
    pub n_reps: usize,
    pub runtime_s: f64,
    pub rejected_samples: u64,
    /// Draws taken from face conditionals beyond the main stream.
    pub conditional_draws: u64,
    /// Face evaluations performed on main-stream paths.
    pub main_stream_face_evaluations: u64,
    pub surface_breakdown: Option<Vec<FaceContribution>>,
    pub unstable: bool,
}

impl DerivativeEstimate {
    pub(crate) fn from_replication(estimator: EstimatorId, r: super::Replication) -> Self {
        Self {
            estimator,
            mean: r.mean,
            std_error: r.std_error,
            n_reps: r.n_reps,
            runtime_s: r.runtime_s,
            rejected_samples: r.rejected_samples,
            conditional_draws: 0,
            main_stream_face_evaluations: 0,
            surface_breakdown: None,
            unstable: !r.mean.is_finite(),
        }
    }
}
