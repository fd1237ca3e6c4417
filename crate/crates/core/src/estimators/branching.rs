//! Threshold derivatives that branch on a single decision: American-option exercise thresholds and
//! the admission level of a single-server queue.

use super::estimate::{DerivativeEstimate, EstimatorConfig, EstimatorId};
use super::replicate::replicate;
use crate::distributions::special::normal_pdf;
use crate::error::{Error, Result};
use crate::models::{gbm_step_inverse, AmericanOption, Branch, GG1Queue};
use rand_distr::{Distribution, StandardNormal};

fn normals<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Single-path conditional estimator of dE[J_T]/ds_k for exercise date `k` (0-based).
///
/// The path is branched at date k with the cum-dividend price pinned to s_k, once continuing and
/// once exercising, and the payoff gap is weighted by φ(x*)/∂ₓh(x*).
pub fn option_path_derivative(opt: &AmericanOption, k: usize, x: &[f64]) -> f64 {
    let p = &opt.params;
    let Some(st) = opt.s_tilde_before(x, k) else {
        return 0.0;
    };
    let s = p.thresholds[k];
    let target = s - opt.pv_dividends(k);
    let dt = opt.dt(k);
    let x_star = gbm_step_inverse(target, st, dt, p.rate, p.sigma);
    let weight = normal_pdf(x_star) / (target * p.sigma * dt.sqrt());
    let cont = opt.payoff(x, Some(Branch { date: k, price: s, exercise: Some(false) }));
    let exer = opt.payoff(x, Some(Branch { date: k, price: s, exercise: Some(true) }));
    weight * (cont - exer)
}

fn check_date(opt: &AmericanOption, k: usize) -> Result<()> {
    if k + 1 >= opt.n_periods() {
        return Err(Error::InvalidThresholds(format!(
            "exercise date {k} out of range for {} early dates",
            opt.n_periods() - 1
        )));
    }
    let p = &opt.params;
    if !(p.thresholds[k] > opt.pv_dividends(k)) {
        return Err(Error::InvalidThresholds(format!("threshold {k} does not exceed the remaining dividends")));
    }
    Ok(())
}

pub fn option_threshold_derivative(
    opt: &AmericanOption,
    k: usize,
    cfg: &EstimatorConfig,
) -> Result<DerivativeEstimate> {
    cfg.validate()?;
    check_date(opt, k)?;
    let n = opt.n_periods();
    let r = replicate(|rng| Ok(option_path_derivative(opt, k, &normals(n, rng))), cfg.n_reps, cfg.seed, cfg.workers)?;
    Ok(DerivativeEstimate::from_replication(EstimatorId::ConditionalLeibniz, r))
}

/// Central difference in s_k of the discounted payoff, with common random numbers when `cfg.crn`.
pub fn option_fd_estimate(
    opt: &AmericanOption,
    k: usize,
    delta: f64,
    cfg: &EstimatorConfig,
) -> Result<DerivativeEstimate> {
    cfg.validate()?;
    check_date(opt, k)?;
    let s = opt.params.thresholds[k];
    let up = opt.with_threshold(k, s + delta)?;
    let down = opt.with_threshold(k, s - delta)?;
    let n = opt.n_periods();
    let r = replicate(
        |rng| {
            let x = normals(n, rng);
            let x2 = if cfg.crn { x.clone() } else { normals(n, rng) };
            Ok((up.payoff(&x, None) - down.payoff(&x2, None)) / (2.0 * delta))
        },
        cfg.n_reps,
        cfg.seed,
        cfg.workers,
    )?;
    Ok(DerivativeEstimate::from_replication(EstimatorId::Fd, r))
}

/// Σᵢ [ψ(X_i = θ⁻) − ψ(X_i = θ⁺)] + ∂_θψ on one draw.
pub fn dpa_path(q: &GG1Queue, d: &crate::models::QueueDraw, theta: f64) -> f64 {
    let (_, ipa) = q.evaluate(d, theta);
    let jumps: f64 = (0..q.params.n_customers)
        .map(|i| q.evaluate_with(d, theta, Some((i, true))).0 - q.evaluate_with(d, theta, Some((i, false))).0)
        .sum();
    jumps + ipa
}

fn check_unit_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(Error::ThetaOutOfRange { theta, lo: 0.0, hi: 1.0 })
    }
}

pub fn dpa_derivative(q: &GG1Queue, theta: f64, cfg: &EstimatorConfig) -> Result<DerivativeEstimate> {
    cfg.validate()?;
    check_unit_theta(theta)?;
    let r = replicate(|rng| Ok(dpa_path(q, &q.draw(rng), theta)), cfg.n_reps, cfg.seed, cfg.workers)?;
    Ok(DerivativeEstimate::from_replication(EstimatorId::Dpa, r))
}

/// Central difference of ψ in θ with common random numbers when `cfg.crn`.
pub fn queue_fd_estimate(q: &GG1Queue, theta: f64, delta: f64, cfg: &EstimatorConfig) -> Result<DerivativeEstimate> {
    cfg.validate()?;
    check_unit_theta(theta - delta)?;
    check_unit_theta(theta + delta)?;
    let r = replicate(
        |rng| {
            let d = q.draw(rng);
            let d2 = if cfg.crn { d.clone() } else { q.draw(rng) };
            Ok((q.evaluate(&d, theta + delta).0 - q.evaluate(&d2, theta - delta).0) / (2.0 * delta))
        },
        cfg.n_reps,
        cfg.seed,
        cfg.workers,
    )?;
    Ok(DerivativeEstimate::from_replication(EstimatorId::Fd, r))
}
