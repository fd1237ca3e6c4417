use super::estimate::{DerivativeEstimate, EstimatorConfig, EstimatorId};
use super::replicate::replicate;
use crate::error::{Error, Result};
use crate::models::Model;
use crate::transforms::{chart_contains, d_scalar};

/// |d| above this marks the volume estimator as non-integrable on the run.
pub const NON_INTEGRABLE_D: f64 = 1e6;

fn unsupported(id: EstimatorId, m: &Model) -> Error {
    Error::UnsupportedEstimator { estimator: id.to_string(), model: m.name.clone() }
}

/// Central finite difference (ψ(X, θ+δ) − ψ(X', θ−δ)) / 2δ with X' = X under common random numbers.
pub fn fd_estimate(m: &Model, theta: f64, cfg: &EstimatorConfig) -> Result<DerivativeEstimate> {
    cfg.validate()?;
    let delta = cfg.fd_delta;
    m.check_theta(theta)?;
    m.check_theta(theta - delta)?;
    m.check_theta(theta + delta)?;
    let r = replicate(
        |rng| {
            let x = m.density.sample(rng)?;
            let x2 = if cfg.crn { x.clone() } else { m.density.sample(rng)? };
            Ok((m.performance(&x, theta + delta) - m.performance(&x2, theta - delta)) / (2.0 * delta))
        },
        cfg.n_reps,
        cfg.seed,
        cfg.workers,
    )?;
    Ok(DerivativeEstimate::from_replication(EstimatorId::Fd, r))
}

/// Chart-based path value
/// 1{x ∈ h(V, θ)}·(∂_θφ + φ l + (∇ₓ log f · w + Σ_i ∂_{x_i} w_i) φ + ∇ₓφ · w), w = ∂_θh ∘ h⁻¹.
pub fn leibniz_divergence_path(m: &Model, x: &[f64], theta: f64) -> Result<f64> {
    let chart = m.chart.as_ref().ok_or_else(|| unsupported(EstimatorId::LeibnizDivergence, m))?;
    if !m.density.contains(x) {
        return Err(Error::OutsideSupport { point: x.to_vec() });
    }
    if !chart_contains(chart.as_ref(), x, theta) {
        return Ok(0.0);
    }
    let w = chart.velocity(x, theta)?;
    let cross = chart.cross_partials(x, theta)?;
    let score = m.density.score_x(x)?;
    let l = m.density.score_theta(x, theta);
    let (phi, dphi, grad) = match &m.factor {
        Some(f) => (f.value(x, theta), f.dtheta(x, theta), f.grad_x(x, theta)),
        None => (1.0, 0.0, vec![0.0; x.len()]),
    };
    let transport: f64 = score.iter().zip(&w).map(|(a, b)| a * b).sum();
    let along: f64 = grad.iter().zip(&w).map(|(a, b)| a * b).sum();
    Ok(dphi + phi * l + (transport + cross) * phi + along)
}

pub fn leibniz_divergence_estimate(m: &Model, theta: f64, cfg: &EstimatorConfig) -> Result<DerivativeEstimate> {
    cfg.validate()?;
    m.check_theta(theta)?;
    if m.chart.is_none() {
        return Err(unsupported(EstimatorId::LeibnizDivergence, m));
    }
    let r =
        replicate(|rng| leibniz_divergence_path(m, &m.density.sample(rng)?, theta), cfg.n_reps, cfg.seed, cfg.workers)?;
    Ok(DerivativeEstimate::from_replication(EstimatorId::LeibnizDivergence, r))
}

/// Volume path φ(g(x, θ))·(d + l) and |d|, the latter 0 when φ vanishes.
pub fn leibniz_volume_path(m: &Model, x: &[f64], theta: f64) -> Result<(f64, f64)> {
    let p = m.push_out.as_ref().ok_or_else(|| unsupported(EstimatorId::LeibnizIntegral, m))?;
    if !m.density.contains(x) {
        return Err(Error::OutsideSupport { point: x.to_vec() });
    }
    let phi = p.outer.value(&p.transform.apply(x, theta));
    if phi == 0.0 {
        return Ok((0.0, 0.0));
    }
    let d = d_scalar(p.transform.as_ref(), &m.density, x, theta)?;
    Ok((phi * (d + m.density.score_theta(x, theta)), d.abs()))
}

/// φ(g) l + ∇_yφ(g) · ∂_θg.
pub fn ipa_lr_path(m: &Model, x: &[f64], theta: f64) -> Result<f64> {
    let p = m.push_out.as_ref().ok_or_else(|| unsupported(EstimatorId::IpaLr, m))?;
    let y = p.transform.apply(x, theta);
    let grad = p
        .outer
        .gradient(&y)
        .ok_or_else(|| Error::NotDifferentiable(format!("model `{}` has an indicator performance", m.name)))?;
    let dg = p.transform.dtheta(x, theta);
    let phi = p.outer.value(&y);
    Ok(phi * m.density.score_theta(x, theta) + grad.iter().zip(&dg).map(|(a, b)| a * b).sum::<f64>())
}

pub fn ipa_lr_estimate(m: &Model, theta: f64, cfg: &EstimatorConfig) -> Result<DerivativeEstimate> {
    cfg.validate()?;
    m.check_theta(theta)?;
    let p = m.push_out.as_ref().ok_or_else(|| unsupported(EstimatorId::IpaLr, m))?;
    if p.outer.gradient(&vec![0.0; p.transform.dim()]).is_none() {
        return Err(Error::NotDifferentiable(format!("model `{}` has an indicator performance", m.name)));
    }
    let r = replicate(|rng| ipa_lr_path(m, &m.density.sample(rng)?, theta), cfg.n_reps, cfg.seed, cfg.workers)?;
    Ok(DerivativeEstimate::from_replication(EstimatorId::IpaLr, r))
}
