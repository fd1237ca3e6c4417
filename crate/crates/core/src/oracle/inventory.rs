use crate::distributions::{JointDensity, Marginal};
use crate::error::{Error, Result};
use crate::numerics::{
    adaptive_simpson, central_difference, graded_gauss_legendre, integrate_region_2d, GaussLegendre, Region2D,
};
use serde::Serialize;

/// Central-difference step of the log-inventory and max-threshold oracles.
pub const ORACLE_DELTA: f64 = 1e-4;
const GRADING_LEVELS: usize = 40;
const SIMPSON_TOL: f64 = 1e-12;
const BACKEND_AGREEMENT: f64 = 1e-7;

/// Oracle derivative with its convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleReport {
    pub derivative: f64,
    /// E[ψ] at θ.
    pub probability: f64,
    /// |Q(2n) − Q(n)| of the Gauss–Legendre rule at θ.
    pub quadrature_change: f64,
    /// Derivative from an independent backend: adaptive Simpson, or a closed form where one exists.
    pub cross_check: f64,
    /// Change in the derivative when the step is halved.
    pub step_change: f64,
    pub order: usize,
}

/// P(log(X1 + θ) + log(X2 + θ) < q) as ∫₀^{F₁(x̄)} P(X2 < b(x1) | X1 = x1) du with x1 = F₁⁻¹(u)
/// and b(x1) = e^q/(x1 + θ) − θ, on a graded Gauss–Legendre rule of the given order.
pub fn log_inventory_probability(d: &JointDensity, q: f64, theta: f64, order: usize) -> Result<f64> {
    let rule = GaussLegendre::new(order);
    line_integral(d, q, theta, |f, a, b| graded_gauss_legendre(&rule, f, a, b, GRADING_LEVELS))
}

fn line_integral<Q>(d: &JointDensity, q: f64, theta: f64, quad: Q) -> Result<f64>
where
    Q: FnOnce(&mut dyn FnMut(f64) -> f64, f64, f64) -> f64,
{
    if d.dim() != 2 || d.support().iter().any(|s| s.lo != 0.0 || s.hi != f64::INFINITY) {
        return Err(Error::NoOracle("log-inventory oracle needs a density on (0, ∞)²".into()));
    }
    let eq = q.exp();
    let x1_max = eq / theta - theta;
    if !(x1_max > 0.0) {
        return Ok(0.0);
    }
    let m1 = d.marginal(0);
    let u_max = m1.cdf(x1_max);
    let u_min = 1e-14 * u_max;
    let mut f = |u: f64| {
        let x1 = m1.quantile(u.max(u_min));
        let b = eq / (x1 + theta) - theta;
        if b <= 0.0 {
            return 0.0;
        }
        d.conditional_cdf_2_given_1(x1, b)
    };
    let v = quad(&mut f, 0.0, u_max);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonConvergent { change: f64::INFINITY })
    }
}

fn simpson_probability(d: &JointDensity, q: f64, theta: f64) -> Result<f64> {
    line_integral(d, q, theta, |f, a, b| adaptive_simpson(f, a, b, SIMPSON_TOL))
}

/// d/dθ P(log(X1 + θ) + log(X2 + θ) < q) by a central difference of the line integral, with the
/// order doubled from 32 until the probability moves by less than 1e-10, and cross-checked
/// against the adaptive-Simpson backend.
pub fn truth_log_inventory(d: &JointDensity, q: f64, theta: f64) -> Result<OracleReport> {
    d.validate()?;
    if !(theta > ORACLE_DELTA) {
        return Err(Error::ThetaOutOfRange { theta, lo: ORACLE_DELTA, hi: f64::INFINITY });
    }
    let mut order = 32;
    let mut prev = log_inventory_probability(d, q, theta, order)?;
    let (probability, change) = loop {
        let next = log_inventory_probability(d, q, theta, 2 * order)?;
        let change = (next - prev).abs();
        order *= 2;
        if change < 1e-10 {
            break (next, change);
        }
        if order >= 256 {
            return Err(Error::NonConvergent { change });
        }
        prev = next;
    };
    let p = |t: f64| log_inventory_probability(d, q, t, order).unwrap_or(f64::NAN);
    let derivative = central_difference(p, theta, ORACLE_DELTA);
    let half = central_difference(p, theta, 0.5 * ORACLE_DELTA);
    let ps = |t: f64| simpson_probability(d, q, t).unwrap_or(f64::NAN);
    let cross_check = central_difference(ps, theta, ORACLE_DELTA);
    if !((cross_check - derivative).abs() <= BACKEND_AGREEMENT) {
        return Err(Error::NonConvergent { change: (cross_check - derivative).abs() });
    }
    Ok(OracleReport {
        derivative,
        probability,
        quadrature_change: change,
        cross_check,
        step_change: (half - derivative).abs(),
        order,
    })
}

fn is_uniform_square(d: &JointDensity) -> bool {
    let uniform = |m: &Marginal| *m == Marginal::Uniform01;
    match d {
        JointDensity::Independent { marginals } => marginals.len() == 2 && marginals.iter().all(uniform),
        JointDensity::Copula { marginals, .. } => d.is_independent() && marginals.iter().all(uniform),
        JointDensity::BivariateLognormal { .. } => false,
    }
}

/// d/dθ P(max(X1, X2) ≤ θ): 2θ for the uniform square, otherwise a central difference of the
/// rectangle probability by region quadrature.
pub fn truth_max_threshold(d: &JointDensity, theta: f64) -> Result<OracleReport> {
    d.validate()?;
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::ThetaOutOfRange { theta, lo: 0.0, hi: 1.0 });
    }
    if d.dim() != 2 || d.support().iter().any(|s| s.lo != 0.0 || s.hi != 1.0) {
        return Err(Error::NoOracle("max-threshold oracle needs a density on (0, 1)²".into()));
    }
    if is_uniform_square(d) {
        return Ok(OracleReport {
            derivative: 2.0 * theta,
            probability: theta * theta,
            quadrature_change: 0.0,
            cross_check: 2.0 * theta,
            step_change: 0.0,
            order: 0,
        });
    }
    let prob = |t: f64| -> Result<(f64, f64, usize)> {
        let t = t.min(1.0);
        let r = Region2D::rectangle((0.0, t), (0.0, t));
        let rep = integrate_region_2d(|a, b| d.pdf(&[a, b]), &r, 16)?;
        Ok((rep.value, rep.change, rep.order))
    };
    let (probability, quadrature_change, order) = prob(theta)?;
    let delta = ORACLE_DELTA.min(0.5 * theta).min(0.5 * (1.0 - theta));
    let dp = |dl: f64| -> Result<f64> { Ok((prob(theta + dl)?.0 - prob(theta - dl)?.0) / (2.0 * dl)) };
    let derivative = dp(delta)?;
    let step_change = (dp(0.5 * delta)? - derivative).abs();
    let simpson = |t: f64| {
        crate::numerics::integrate_region_2d_simpson(
            |a, b| d.pdf(&[a, b]),
            &Region2D::rectangle((0.0, t), (0.0, t)),
            1e-11,
        )
    };
    let cross_check = (simpson(theta + delta) - simpson(theta - delta)) / (2.0 * delta);
    Ok(OracleReport { derivative, probability, quadrature_change, cross_check, step_change, order })
}
