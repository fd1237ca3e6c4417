use super::OracleReport;
use crate::error::{Error, Result};
use crate::models::{GG1Queue, Interarrival, QueueDraw};
use crate::numerics::{central_difference, GaussLegendre};

const ORDER: usize = 24;

/// Roots in (0, 1) of S(θ, x) = y for a service law affine in x.
fn kink(law: &crate::models::ServiceLaw, theta: f64, y: f64) -> Option<f64> {
    let slope = law.c_x + law.c_theta_x * theta;
    if slope == 0.0 {
        return None;
    }
    let x = (y - law.c0 - law.c_theta * theta) / slope;
    (x > 0.0 && x < 1.0).then_some(x)
}

fn expected(q: &GG1Queue, theta: f64, y: f64, rule: &GaussLegendre) -> f64 {
    let p = &q.params;
    let mut b1 = vec![0.0, theta, 1.0];
    b1.extend(kink(&p.service_plus, theta, y));
    b1.extend(kink(&p.service_minus, theta, y));
    b1.sort_by(f64::total_cmp);
    let b2 = [0.0, theta, 1.0];
    let mut total = 0.0;
    for w1 in b1.windows(2).filter(|w| w[1] > w[0]) {
        for (x1, wt1) in rule.mapped(w1[0], w1[1]) {
            for w2 in b2.windows(2).filter(|w| w[1] > w[0]) {
                for (x2, wt2) in rule.mapped(w2[0], w2[1]) {
                    let d = QueueDraw { x: vec![x1, x2], y: vec![y] };
                    total += wt1 * wt2 * q.evaluate(&d, theta).0;
                }
            }
        }
    }
    total
}

/// dE[ψ]/dθ for two customers with a deterministic interarrival time, by piecewise tensor
/// quadrature split at θ and at the kinks of the Lindley recursion, then a central difference.
pub fn truth_gg1_two_customers(q: &GG1Queue, theta: f64) -> Result<OracleReport> {
    let p = &q.params;
    let Interarrival::Deterministic { value: y } = p.interarrival else {
        return Err(Error::NoOracle("queue oracle needs a deterministic interarrival time".into()));
    };
    if p.n_customers != 2 {
        return Err(Error::NoOracle(format!("queue oracle covers two customers, model has {}", p.n_customers)));
    }
    let delta = 1e-4;
    if !(theta > delta && theta < 1.0 - delta) {
        return Err(Error::ThetaOutOfRange { theta, lo: delta, hi: 1.0 - delta });
    }
    let rule = GaussLegendre::new(ORDER);
    let fine = GaussLegendre::new(2 * ORDER);
    let probability = expected(q, theta, y, &fine);
    let derivative = central_difference(|t| expected(q, t, y, &fine), theta, delta);
    let coarse = central_difference(|t| expected(q, t, y, &rule), theta, delta);
    let half = central_difference(|t| expected(q, t, y, &fine), theta, 0.5 * delta);
    Ok(OracleReport {
        derivative,
        probability,
        quadrature_change: (coarse - derivative).abs(),
        cross_check: coarse,
        step_change: (half - derivative).abs(),
        order: 2 * ORDER,
    })
}
