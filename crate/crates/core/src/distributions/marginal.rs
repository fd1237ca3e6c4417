use super::special::*;
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, Gamma, Open01, StandardNormal};
use serde::{Deserialize, Serialize};

/// Open interval (lo, hi); endpoints may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains_open(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn endpoint(&self, side: Side) -> f64 {
        match side {
            Side::Lower => self.lo,
            Side::Upper => self.hi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lower,
    Upper,
}

/// Univariate law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Marginal {
    Exponential {
        rate: f64,
    },
    /// Unit scale.
    Gamma {
        shape: f64,
    },
    LogNormal {
        mu: f64,
        sigma: f64,
    },
    Uniform01,
    Normal {
        mu: f64,
        sigma: f64,
    },
    /// Density (k + 1) x^k on (0, 1).
    Power {
        exponent: f64,
    },
}

impl Marginal {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Marginal::Exponential { rate } => rate > 0.0 && rate.is_finite(),
            Marginal::Gamma { shape } => shape > 0.0 && shape.is_finite(),
            Marginal::LogNormal { mu, sigma } | Marginal::Normal { mu, sigma } => {
                mu.is_finite() && sigma > 0.0 && sigma.is_finite()
            }
            Marginal::Uniform01 => true,
            Marginal::Power { exponent } => exponent >= 0.0 && exponent.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("marginal parameters out of range: {self:?}")))
        }
    }

    pub fn support(&self) -> Interval {
        match self {
            Marginal::Exponential { .. } | Marginal::Gamma { .. } | Marginal::LogNormal { .. } => {
                Interval::new(0.0, f64::INFINITY)
            }
            Marginal::Uniform01 | Marginal::Power { .. } => Interval::new(0.0, 1.0),
            Marginal::Normal { .. } => Interval::new(f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let s = self.support();
        if !(x >= s.lo && x <= s.hi) {
            return 0.0;
        }
        match *self {
            Marginal::Exponential { rate } => rate * (-rate * x).exp(),
            Marginal::Gamma { shape } => gamma_pdf(shape, x),
            Marginal::LogNormal { mu, sigma } => {
                if x == 0.0 {
                    0.0
                } else {
                    normal_pdf((x.ln() - mu) / sigma) / (sigma * x)
                }
            }
            Marginal::Uniform01 => 1.0,
            Marginal::Normal { mu, sigma } => normal_pdf((x - mu) / sigma) / sigma,
            Marginal::Power { exponent } => (exponent + 1.0) * x.powf(exponent),
        }
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        match *self {
            Marginal::Exponential { rate } => rate.ln() - rate * x,
            Marginal::Gamma { shape } => (shape - 1.0) * x.ln() - x - statrs::function::gamma::ln_gamma(shape),
            Marginal::LogNormal { mu, sigma } => {
                let z = (x.ln() - mu) / sigma;
                -0.5 * z * z - (sigma * x * (2.0 * std::f64::consts::PI).sqrt()).ln()
            }
            Marginal::Normal { mu, sigma } => {
                let z = (x - mu) / sigma;
                -0.5 * z * z - (sigma * (2.0 * std::f64::consts::PI).sqrt()).ln()
            }
            _ => self.pdf(x).ln(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let s = self.support();
        if x <= s.lo {
            return 0.0;
        }
        if x >= s.hi {
            return 1.0;
        }
        match *self {
            Marginal::Exponential { rate } => -(-rate * x).exp_m1(),
            Marginal::Gamma { shape } => gamma_cdf(shape, x),
            Marginal::LogNormal { mu, sigma } => normal_cdf((x.ln() - mu) / sigma),
            Marginal::Uniform01 => x,
            Marginal::Normal { mu, sigma } => normal_cdf((x - mu) / sigma),
            Marginal::Power { exponent } => x.powf(exponent + 1.0),
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        let s = self.support();
        if p <= 0.0 {
            return s.lo;
        }
        if p >= 1.0 {
            return s.hi;
        }
        match *self {
            Marginal::Exponential { rate } => -(-p).ln_1p() / rate,
            Marginal::Gamma { shape } => gamma_quantile(shape, p),
            Marginal::LogNormal { mu, sigma } => (mu + sigma * normal_quantile(p)).exp(),
            Marginal::Uniform01 => p,
            Marginal::Normal { mu, sigma } => mu + sigma * normal_quantile(p),
            Marginal::Power { exponent } => p.powf(1.0 / (exponent + 1.0)),
        }
    }

    /// d/dx log pdf at an interior point.
    pub fn score(&self, x: f64) -> f64 {
        match *self {
            Marginal::Exponential { rate } => -rate,
            Marginal::Gamma { shape } => (shape - 1.0) / x - 1.0,
            Marginal::LogNormal { mu, sigma } => -(1.0 + (x.ln() - mu) / (sigma * sigma)) / x,
            Marginal::Uniform01 => 0.0,
            Marginal::Normal { mu, sigma } => -(x - mu) / (sigma * sigma),
            Marginal::Power { exponent } => exponent / x,
        }
    }

    /// Limit of the density at a support endpoint (0 for infinite endpoints).
    pub fn boundary_density(&self, side: Side) -> f64 {
        let e = self.support().endpoint(side);
        if e.is_infinite() {
            return 0.0;
        }
        match (*self, side) {
            (Marginal::Power { exponent }, Side::Lower) => {
                if exponent == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            _ => self.pdf(e),
        }
    }

    /// Draws an interior point. Gamma laws use the Marsaglia–Tsang sampler; the rest invert the cdf.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let s = self.support();
        loop {
            let x = match *self {
                Marginal::Gamma { shape } => Gamma::new(shape, 1.0).expect("validated gamma shape").sample(rng),
                Marginal::Normal { mu, sigma } => {
                    mu + sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
                }
                Marginal::LogNormal { mu, sigma } => {
                    (mu + sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)).exp()
                }
                _ => self.quantile(rng.sample(Open01)),
            };
            if s.contains_open(x) {
                return x;
            }
        }
    }
}
