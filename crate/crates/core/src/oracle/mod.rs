//! Deterministic ground-truth derivatives by quadrature and finite differences, plus the
//! pointwise identity check relating the volume estimator to IPA-LR.

mod inventory;
mod option;
mod queue;

pub use inventory::{log_inventory_probability, truth_log_inventory, truth_max_threshold, OracleReport, ORACLE_DELTA};
pub use option::{option_expected_payoff, truth_option_2period};
pub use queue::truth_gg1_two_customers;

use crate::error::Result;
use crate::estimators::path_stream;
use crate::models::Model;
use crate::transforms::s_vector;
use rand::Rng;

/// Max over `n_points` random (x, θ) of the discrepancy between
/// φ(g)·d + s·∇ₓlog f·φ + φ·div s + ∇ₓ(φ∘g)·s and a central difference of φ(g(x, θ)) in θ,
/// relative to max(1, |difference|). θ is drawn uniformly from `theta_window`.
pub fn verify_identity_ipalr(m: &Model, n_points: usize, theta_window: (f64, f64), seed: u64) -> Result<f64> {
    let Some(p) = m.push_out.as_ref() else {
        return Err(crate::Error::UnsupportedEstimator { estimator: "ipa_lr".into(), model: m.name.clone() });
    };
    let mut rng = path_stream(seed, 0);
    let mut worst = 0.0f64;
    for _ in 0..n_points {
        let x = m.density.sample(&mut rng)?;
        let theta = rng.random_range(theta_window.0..theta_window.1);
        let y = p.transform.apply(&x, theta);
        let phi = p.outer.value(&y);
        let grad_y = p.outer.gradient(&y).ok_or_else(|| {
            crate::Error::NotDifferentiable(format!("model `{}` has an indicator performance", m.name))
        })?;
        let s = s_vector(p.transform.as_ref(), &x, theta)?;
        let score = m.density.score_x(&x)?;
        let jac = p.transform.jacobian(&x, theta);
        let n = x.len();
        let grad_x: Vec<f64> = (0..n).map(|j| (0..n).map(|i| grad_y[i] * jac[(i, j)]).sum()).collect();
        let div_s = p.transform.div_s(&x, theta);
        let d = -(dot(&s, &score) + div_s);
        let lhs = phi * d + dot(&s, &score) * phi + phi * div_s + dot(&grad_x, &s);
        let h = 1e-5 * theta.abs().max(1.0);
        let rhs = (p.outer.value(&p.transform.apply(&x, theta + h)) - p.outer.value(&p.transform.apply(&x, theta - h)))
            / (2.0 * h);
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
    }
    Ok(worst)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
