use super::OracleReport;
use crate::distributions::special::normal_pdf;
use crate::error::{Error, Result};
use crate::models::{gbm_step, gbm_step_inverse, AmericanOption};
use crate::numerics::GaussLegendre;

/// Half-width of the truncated normal axes; the neglected mass is below 1e-20.
const AXIS: f64 = 9.5;
const PANELS: usize = 4;

fn piecewise(rule: &GaussLegendre, f: &mut dyn FnMut(f64) -> f64, breaks: &[f64]) -> f64 {
    breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let h = (w[1] - w[0]) / PANELS as f64;
            (0..PANELS).map(|j| rule.integrate(&mut *f, w[0] + j as f64 * h, w[0] + (j + 1) as f64 * h)).sum::<f64>()
        })
        .sum()
}

fn clamp_axis(x: f64) -> f64 {
    x.clamp(-AXIS, AXIS)
}

/// E[J_T] of a two-period option by Gauss–Legendre quadrature over both innovations, with the
/// first axis split at the exercise boundary x* and the second at the strike crossing.
pub fn option_expected_payoff(opt: &AmericanOption, order: usize) -> Result<f64> {
    if opt.n_periods() != 2 {
        return Err(Error::NoOracle(format!("option oracle covers two periods, model has {}", opt.n_periods())));
    }
    let p = &opt.params;
    let rule = GaussLegendre::new(order);
    let (dt1, dt2) = (opt.dt(0), opt.dt(1));
    let pv = opt.pv_dividends(0);
    let x_star = gbm_step_inverse(p.thresholds[0] - pv, opt.s_tilde0(), dt1, p.rate, p.sigma);
    let mut outer = |x1: f64| {
        let s_cont = gbm_step(x1, opt.s_tilde0(), dt1, p.rate, p.sigma);
        let kink = clamp_axis(gbm_step_inverse(p.strike, s_cont, dt2, p.rate, p.sigma));
        let mut inner = |x2: f64| normal_pdf(x2) * opt.payoff(&[x1, x2], None);
        normal_pdf(x1) * piecewise(&rule, &mut inner, &[-AXIS, kink, AXIS])
    };
    let xs = clamp_axis(x_star);
    let v = piecewise(&rule, &mut outer, &[-AXIS, xs, AXIS]);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonConvergent { change: f64::INFINITY })
    }
}

/// dE[J_T]/ds₁ for a two-period option by a central difference with step 1e-3·s₁ of the split
/// quadrature; the order is doubled from 32 until E[J_T] moves by less than 1e-8.
pub fn truth_option_2period(opt: &AmericanOption) -> Result<OracleReport> {
    let mut order = 32;
    let mut prev = option_expected_payoff(opt, order)?;
    let (probability, change) = loop {
        let next = option_expected_payoff(opt, 2 * order)?;
        let change = (next - prev).abs();
        order *= 2;
        if change < 1e-8 {
            break (next, change);
        }
        if order >= 256 {
            return Err(Error::NonConvergent { change });
        }
        prev = next;
    };
    let s = opt.params.thresholds[0];
    let value = |d: f64| -> Result<f64> {
        let up = option_expected_payoff(&opt.with_threshold(0, s + d)?, order)?;
        let down = option_expected_payoff(&opt.with_threshold(0, s - d)?, order)?;
        Ok((up - down) / (2.0 * d))
    };
    let delta = 1e-3 * s;
    let derivative = value(delta)?;
    let half = value(0.5 * delta)?;
    Ok(OracleReport {
        derivative,
        probability,
        quadrature_change: change,
        cross_check: boundary_formula(opt),
        step_change: (half - derivative).abs(),
        order,
    })
}

fn black_scholes_call(s: f64, k: f64, r: f64, sigma: f64, tau: f64) -> f64 {
    use crate::distributions::special::normal_cdf;
    let sd = sigma * tau.sqrt();
    let d1 = ((s / k).ln() + (r + 0.5 * sigma * sigma) * tau) / sd;
    s * normal_cdf(d1) - k * (-r * tau).exp() * normal_cdf(d1 - sd)
}

/// φ(x*)/∂ₓh(x*)·(e^{−r t₁}·C(s₁ − D) − e^{−r t₁}(s₁ − K)), the boundary term in closed form.
fn boundary_formula(opt: &AmericanOption) -> f64 {
    let p = &opt.params;
    let s = p.thresholds[0];
    let target = s - opt.pv_dividends(0);
    let dt1 = opt.dt(0);
    let x_star = gbm_step_inverse(target, opt.s_tilde0(), dt1, p.rate, p.sigma);
    let disc = (-p.rate * p.dates[0]).exp();
    let cont = disc * black_scholes_call(target, p.strike, p.rate, p.sigma, opt.dt(1));
    normal_pdf(x_star) / (target * p.sigma * dt1.sqrt()) * (cont - disc * (s - p.strike))
}
