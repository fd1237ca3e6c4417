//! Marginal laws, copulas, joint densities with scores, samplers, and the conditional laws on
//! the faces of the support used by the surface estimator.

mod copula;
pub mod diagnostics;
mod joint;
mod marginal;
pub mod special;

pub use copula::Copula;
pub use joint::{conditional_cdf_fgm_at_zero, sample_fgm_at_zero, BoundaryConditional, Face, FaceCdf, JointDensity};
pub use marginal::{Interval, Marginal, Side};

/// Draws one point from `d`.
pub fn sample_joint<R: rand::Rng + ?Sized>(d: &JointDensity, rng: &mut R) -> crate::Result<Vec<f64>> {
    d.sample(rng)
}
