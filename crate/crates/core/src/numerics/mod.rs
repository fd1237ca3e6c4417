//! Small dense linear algebra, deterministic quadrature, mollifier smoothing and a numerical
//! check of the two Leibniz rules on moving planar domains.

pub mod leibniz_rules;
pub mod linalg;
pub mod mollifier;
pub mod quadrature;

pub use leibniz_rules::{builtin_cases, verify_leibniz_rules, BaseSet, LeibnizCheck, MovingDomainCase};
pub use linalg::{invert_small, solve, SmallMatrix, SINGULAR_THRESHOLD};
pub use mollifier::mollify_1d;
pub use quadrature::{
    adaptive_simpson, graded_gauss_legendre, integrate_region_2d, integrate_region_2d_simpson, GaussLegendre,
    QuadratureReport, Region2D,
};

/// Sample-space point.
pub type Point = Vec<f64>;

/// (f(t + delta) - f(t - delta)) / (2 delta).
pub fn central_difference<F: FnMut(f64) -> f64>(mut f: F, t: f64, delta: f64) -> f64 {
    assert!(delta > 0.0);
    (f(t + delta) - f(t - delta)) / (2.0 * delta)
}
