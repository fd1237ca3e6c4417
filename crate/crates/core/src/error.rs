use thiserror::Error;

/// Failures raised by the numerical, distributional and estimation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular matrix: |det| = {det:e} is at or below 1e-12")]
    SingularMatrix { det: f64 },

    #[error("quadrature did not converge: successive refinements differ by {change:e}")]
    NonConvergent { change: f64 },

    #[error("point {point:?} lies outside the support")]
    OutsideSupport { point: Vec<f64> },

    #[error("conditional inversion failed to bracket within {iterations} iterations")]
    NumericalInversionFailure { iterations: usize },

    #[error("no built-in conditional sampler for {face}: {reason}")]
    UnsupportedConditional { face: String, reason: String },

    #[error("infeasible region at theta = {theta}: lower corner maps to {lhs} > q = {q}")]
    InfeasibleRegion { theta: f64, lhs: f64, q: f64 },

    #[error("theta = {theta} is outside the admissible interval ({lo}, {hi})")]
    ThetaOutOfRange { theta: f64, lo: f64, hi: f64 },

    #[error("performance is not differentiable: {0}")]
    NotDifferentiable(String),

    #[error("invalid exercise thresholds: {0}")]
    InvalidThresholds(String),

    #[error("square sub-incidence matrix of the selected edges is rank deficient")]
    RankDeficientIncidence,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("estimator `{estimator}` is not available for model `{model}`")]
    UnsupportedEstimator { estimator: String, model: String },

    #[error("no oracle available: {0}")]
    NoOracle(String),

    #[error("sampling rejected {0} consecutive draws at singular Jacobians")]
    TooManyRejections(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
