//! Single-server queue whose admission variables switch between two service-time laws.

use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

/// S(θ, x) = c0 + c_theta θ + c_x x + c_theta_x θ x.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceLaw {
    #[serde(default)]
    pub c0: f64,
    #[serde(default)]
    pub c_theta: f64,
    #[serde(default)]
    pub c_x: f64,
    #[serde(default)]
    pub c_theta_x: f64,
}

impl ServiceLaw {
    pub fn constant(c: f64) -> Self {
        Self { c0: c, ..Self::default() }
    }

    pub fn value(&self, theta: f64, x: f64) -> f64 {
        self.c0 + self.c_theta * theta + self.c_x * x + self.c_theta_x * theta * x
    }

    pub fn dtheta(&self, _theta: f64, x: f64) -> f64 {
        self.c_theta + self.c_theta_x * x
    }

    /// Minimum over the unit square (the law is bilinear, so a corner attains it).
    fn min_on_unit_square(&self) -> f64 {
        [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]
            .iter()
            .map(|&(t, x)| self.value(t, x))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Interarrival {
    Deterministic { value: f64 },
    Exponential { rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueueStatistic {
    #[default]
    MeanWait,
    TotalWait,
    MeanSystemTime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GG1Params {
    pub n_customers: usize,
    pub service_plus: ServiceLaw,
    pub service_minus: ServiceLaw,
    pub interarrival: Interarrival,
    #[serde(default)]
    pub statistic: QueueStatistic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GG1Queue {
    pub params: GG1Params,
}

/// One replication's primitive draws.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueDraw {
    /// Admission variables, Uniform(0, 1).
    pub x: Vec<f64>,
    /// Interarrival times Y_1..Y_{n-1}.
    pub y: Vec<f64>,
}

pub fn model_gg1(p: GG1Params) -> Result<GG1Queue> {
    if p.n_customers == 0 {
        return Err(Error::InvalidParameter("queue needs at least one customer".into()));
    }
    for (name, s) in [("service_plus", p.service_plus), ("service_minus", p.service_minus)] {
        if !(s.min_on_unit_square() >= 0.0) {
            return Err(Error::InvalidParameter(format!("{name} must be nonnegative on (0,1)²")));
        }
    }
    match p.interarrival {
        Interarrival::Deterministic { value } if value >= 0.0 && value.is_finite() => {}
        Interarrival::Exponential { rate } if rate > 0.0 && rate.is_finite() => {}
        other => return Err(Error::InvalidParameter(format!("invalid interarrival law {other:?}"))),
    }
    Ok(GG1Queue { params: p })
}

impl GG1Queue {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> QueueDraw {
        let n = self.params.n_customers;
        let x = (0..n).map(|_| rng.random::<f64>()).collect();
        let y = (0..n.saturating_sub(1))
            .map(|_| match self.params.interarrival {
                Interarrival::Deterministic { value } => value,
                Interarrival::Exponential { rate } => Exp::new(rate).expect("validated rate").sample(rng),
            })
            .collect();
        QueueDraw { x, y }
    }

    /// (ψ, ∂_θψ) with admission X_i ≤ θ selecting S⁺ and the other draws held fixed.
    pub fn evaluate(&self, d: &QueueDraw, theta: f64) -> (f64, f64) {
        self.evaluate_with(d, theta, None)
    }

    /// Like `evaluate`, with customer `i` forced to admitted (`true`) or not, at X_i = θ.
    pub fn evaluate_with(&self, d: &QueueDraw, theta: f64, force: Option<(usize, bool)>) -> (f64, f64) {
        let p = &self.params;
        let n = p.n_customers;
        let (mut w, mut dw) = (0.0, 0.0);
        let (mut total, mut dtotal) = (0.0, 0.0);
        for i in 0..n {
            let (admitted, xi) = match force {
                Some((j, adm)) if j == i => (adm, theta),
                _ => (d.x[i] <= theta, d.x[i]),
            };
            let law = if admitted { p.service_plus } else { p.service_minus };
            let (s, ds) = (law.value(theta, xi), law.dtheta(theta, xi));
            let (a, da) = match p.statistic {
                QueueStatistic::MeanWait | QueueStatistic::TotalWait => (w, dw),
                QueueStatistic::MeanSystemTime => (w + s, dw + ds),
            };
            total += a;
            dtotal += da;
            if i + 1 < n {
                let next = w + s - d.y[i];
                if next > 0.0 {
                    w = next;
                    dw += ds;
                } else {
                    w = 0.0;
                    dw = 0.0;
                }
            }
        }
        match p.statistic {
            QueueStatistic::TotalWait => (total, dtotal),
            _ => (total / n as f64, dtotal / n as f64),
        }
    }
}
