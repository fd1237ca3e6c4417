//! Bermudan-style call on a stock paying fixed cash dividends, exercised early by thresholds.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmericanOptionParams {
    pub s0: f64,
    pub strike: f64,
    pub rate: f64,
    pub sigma: f64,
    /// Cash dividend paid at each early-exercise date t_1..t_{n-1}.
    pub dividends: Vec<f64>,
    /// t_1 < ... < t_n = T.
    pub dates: Vec<f64>,
    /// Exercise thresholds s_1..s_{n-1}.
    pub thresholds: Vec<f64>,
}

impl Default for AmericanOptionParams {
    fn default() -> Self {
        Self {
            s0: 100.0,
            strike: 100.0,
            rate: 0.05,
            sigma: 0.2,
            dividends: vec![2.0],
            dates: vec![0.5, 1.0],
            thresholds: vec![105.0],
        }
    }
}

/// Override of the cum-dividend price at one exercise date.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    /// Exercise-date index k (0-based, so date t_{k+1}).
    pub date: usize,
    pub price: f64,
    /// `None` applies the threshold rule; `Some(true)` forces exercise.
    pub exercise: Option<bool>,
}

/// Validated option model.
#[derive(Debug, Clone, PartialEq)]
pub struct AmericanOption {
    pub params: AmericanOptionParams,
    /// Present value at t_i of dividends paid at t_i, ..., t_{n-1}.
    pv_dividends: Vec<f64>,
    /// S0 minus the present value of all dividends.
    s_tilde0: f64,
}

/// GBM step h(x, s, Δt) = s exp((r − σ²/2)Δt + σ√Δt x).
pub fn gbm_step(x: f64, s: f64, dt: f64, rate: f64, sigma: f64) -> f64 {
    s * ((rate - 0.5 * sigma * sigma) * dt + sigma * dt.sqrt() * x).exp()
}

/// Inverse of `gbm_step` in x.
pub fn gbm_step_inverse(y: f64, s: f64, dt: f64, rate: f64, sigma: f64) -> f64 {
    ((y / s).ln() - (rate - 0.5 * sigma * sigma) * dt) / (sigma * dt.sqrt())
}

pub fn model_american_option(p: AmericanOptionParams) -> Result<AmericanOption> {
    let n = p.dates.len();
    if n < 2 {
        return Err(Error::InvalidParameter("need at least one early-exercise date and maturity".into()));
    }
    if p.dividends.len() != n - 1 || p.thresholds.len() != n - 1 {
        return Err(Error::InvalidParameter(format!("{} dates need {} dividends and thresholds", n, n - 1)));
    }
    let finite_pos = |v: f64| v.is_finite() && v > 0.0;
    if !finite_pos(p.s0) || !finite_pos(p.strike) || !finite_pos(p.sigma) || !p.rate.is_finite() {
        return Err(Error::InvalidParameter("s0, strike and sigma must be positive, rate finite".into()));
    }
    let mut prev = 0.0;
    for &t in &p.dates {
        if !(t > prev) || !t.is_finite() {
            return Err(Error::InvalidParameter("dates must be strictly increasing from 0".into()));
        }
        prev = t;
    }
    if p.dividends.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
        return Err(Error::InvalidParameter("dividends must be nonnegative".into()));
    }
    for (i, (&s, &d)) in p.thresholds.iter().zip(&p.dividends).enumerate() {
        if !(s > p.strike && s > d) || !s.is_finite() {
            return Err(Error::InvalidThresholds(format!(
                "threshold {i} = {s} must exceed the strike {} and the dividend {d}",
                p.strike
            )));
        }
    }
    let pv_dividends: Vec<f64> = (0..n - 1)
        .map(|i| (i..n - 1).map(|k| p.dividends[k] * (-p.rate * (p.dates[k] - p.dates[i])).exp()).sum())
        .collect();
    let s_tilde0 = p.s0 - (0..n - 1).map(|k| p.dividends[k] * (-p.rate * p.dates[k]).exp()).sum::<f64>();
    if !(s_tilde0 > 0.0) {
        return Err(Error::InvalidParameter("dividends exceed the stock price".into()));
    }
    Ok(AmericanOption { params: p, pv_dividends, s_tilde0 })
}

impl AmericanOption {
    pub fn n_periods(&self) -> usize {
        self.params.dates.len()
    }

    pub fn maturity(&self) -> f64 {
        *self.params.dates.last().expect("validated")
    }

    pub fn dt(&self, i: usize) -> f64 {
        self.params.dates[i] - if i == 0 { 0.0 } else { self.params.dates[i - 1] }
    }

    pub fn s_tilde0(&self) -> f64 {
        self.s_tilde0
    }

    /// Present value at exercise date k of the remaining dividends.
    pub fn pv_dividends(&self, k: usize) -> f64 {
        self.pv_dividends[k]
    }

    pub fn with_threshold(&self, k: usize, s: f64) -> Result<Self> {
        let mut p = self.params.clone();
        p.thresholds[k] = s;
        model_american_option(p)
    }

    fn step(&self, x: f64, s: f64, i: usize) -> f64 {
        gbm_step(x, s, self.dt(i), self.params.rate, self.params.sigma)
    }

    /// Dividend-adjusted price S̃ entering date k, along path `x`, or `None` if exercised earlier.
    pub fn s_tilde_before(&self, x: &[f64], k: usize) -> Option<f64> {
        let mut st = self.s_tilde0;
        for i in 0..k {
            let cum = self.step(x[i], st, i) + self.pv_dividends[i];
            if cum > self.params.thresholds[i] {
                return None;
            }
            st = cum - self.pv_dividends[i];
        }
        Some(st)
    }

    /// Cum-dividend prices S_{i−} along path `x` until exercise or the last early date.
    pub fn cum_dividend_prices(&self, x: &[f64]) -> Vec<f64> {
        let mut st = self.s_tilde0;
        let mut out = Vec::new();
        for i in 0..self.n_periods() - 1 {
            let cum = self.step(x[i], st, i) + self.pv_dividends[i];
            out.push(cum);
            if cum > self.params.thresholds[i] {
                break;
            }
            st = cum - self.pv_dividends[i];
        }
        out
    }

    /// Discounted payoff J_T of innovation path `x`, optionally overriding one date.
    pub fn payoff(&self, x: &[f64], branch: Option<Branch>) -> f64 {
        let p = &self.params;
        let n = self.n_periods();
        let big_t = self.maturity();
        let mut st = self.s_tilde0;
        for i in 0..n - 1 {
            let mut cum = self.step(x[i], st, i) + self.pv_dividends[i];
            let mut exercise = cum > p.thresholds[i];
            if let Some(b) = branch.filter(|b| b.date == i) {
                cum = b.price;
                exercise = b.exercise.unwrap_or(cum > p.thresholds[i]);
            }
            if exercise {
                return (-p.rate * big_t).exp() * (cum - p.strike) * (p.rate * (big_t - p.dates[i])).exp();
            }
            st = cum - self.pv_dividends[i];
        }
        let s_t = self.step(x[n - 1], st, n - 1);
        (-p.rate * big_t).exp() * (s_t - p.strike).max(0.0)
    }
}
