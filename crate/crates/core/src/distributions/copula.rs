use super::special::{normal_cdf, normal_pdf, normal_quantile};
use crate::error::{Error, Result};
use crate::numerics::{graded_gauss_legendre, integrate_region_2d, GaussLegendre, Region2D};
use serde::{Deserialize, Serialize};

/// Bivariate dependence structure on the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Copula {
    Independence,
    Clayton {
        #[serde(default = "default_alpha")]
        alpha: f64,
    },
    Fgm {
        #[serde(default = "default_alpha")]
        alpha: f64,
    },
    Gaussian {
        rho: f64,
    },
}

fn default_alpha() -> f64 {
    1.0
}

const BISECTION_ITERATIONS: usize = 200;

impl Copula {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Copula::Independence => true,
            Copula::Clayton { alpha } => alpha > 0.0 && alpha.is_finite(),
            Copula::Fgm { alpha } => (-1.0..=1.0).contains(&alpha),
            Copula::Gaussian { rho } => rho > -1.0 && rho < 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("copula parameter out of range: {self:?}")))
        }
    }

    pub fn cdf(&self, u: f64, v: f64) -> f64 {
        let (u, v) = (u.clamp(0.0, 1.0), v.clamp(0.0, 1.0));
        if u == 0.0 || v == 0.0 {
            return 0.0;
        }
        match *self {
            Copula::Independence => u * v,
            Copula::Clayton { alpha } => (u.powf(-alpha) + v.powf(-alpha) - 1.0).max(1.0).powf(-1.0 / alpha),
            Copula::Fgm { alpha } => u * v * (1.0 + alpha * (1.0 - u) * (1.0 - v)),
            Copula::Gaussian { .. } => {
                if u == 1.0 {
                    return v;
                }
                if v == 1.0 {
                    return u;
                }
                let rule = GaussLegendre::new(64);
                graded_gauss_legendre(&rule, |s| self.conditional_cdf(s, v), 0.0, u, 30)
            }
        }
    }

    pub fn density(&self, u: f64, v: f64) -> f64 {
        match *self {
            Copula::Independence => 1.0,
            Copula::Clayton { alpha } => {
                let s = u.powf(-alpha) + v.powf(-alpha) - 1.0;
                (1.0 + alpha) * (u * v).powf(-1.0 - alpha) * s.powf(-2.0 - 1.0 / alpha)
            }
            Copula::Fgm { alpha } => 1.0 + alpha * (1.0 - 2.0 * u) * (1.0 - 2.0 * v),
            Copula::Gaussian { rho } => {
                let (a, b) = (normal_quantile(u), normal_quantile(v));
                let r2 = 1.0 - rho * rho;
                (-(rho * rho * (a * a + b * b) - 2.0 * rho * a * b) / (2.0 * r2)).exp() / r2.sqrt()
            }
        }
    }

    /// ∂_u log c(u, v).
    pub fn dlog_density_du(&self, u: f64, v: f64) -> f64 {
        match *self {
            Copula::Independence => 0.0,
            Copula::Clayton { alpha } => {
                let s = u.powf(-alpha) + v.powf(-alpha) - 1.0;
                -(1.0 + alpha) / u + (2.0 * alpha + 1.0) * u.powf(-alpha - 1.0) / s
            }
            Copula::Fgm { alpha } => -2.0 * alpha * (1.0 - 2.0 * v) / (1.0 + alpha * (1.0 - 2.0 * u) * (1.0 - 2.0 * v)),
            Copula::Gaussian { rho } => {
                let (a, b) = (normal_quantile(u), normal_quantile(v));
                -(rho * rho * a - rho * b) / ((1.0 - rho * rho) * normal_pdf(a))
            }
        }
    }

    /// ∂_v log c(u, v); every built-in copula is exchangeable.
    pub fn dlog_density_dv(&self, u: f64, v: f64) -> f64 {
        self.dlog_density_du(v, u)
    }

    /// ∂_u C(u, v): the cdf of V given U = u.
    pub fn conditional_cdf(&self, u: f64, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        if v >= 1.0 {
            return 1.0;
        }
        match *self {
            Copula::Independence => v,
            Copula::Clayton { alpha } => {
                if u <= 0.0 {
                    return 1.0;
                }
                let s = u.powf(-alpha) + v.powf(-alpha) - 1.0;
                u.powf(-alpha - 1.0) * s.powf(-1.0 / alpha - 1.0)
            }
            Copula::Fgm { alpha } => v + alpha * v * (1.0 - v) * (1.0 - 2.0 * u),
            Copula::Gaussian { rho } => {
                let a = normal_quantile(u);
                normal_cdf((normal_quantile(v) - rho * a) / (1.0 - rho * rho).sqrt())
            }
        }
    }

    /// Solves ∂_u C(u, v) = w for v, in closed form where available and by bisection otherwise.
    pub fn conditional_quantile(&self, u: f64, w: f64) -> Result<f64> {
        let v = match *self {
            Copula::Independence => w,
            Copula::Clayton { alpha } => {
                let t = (w.powf(-alpha / (1.0 + alpha)) - 1.0) * u.powf(-alpha) + 1.0;
                t.powf(-1.0 / alpha)
            }
            Copula::Fgm { alpha } => fgm_root(alpha * (1.0 - 2.0 * u), w),
            Copula::Gaussian { rho } => {
                let a = normal_quantile(u);
                normal_cdf(rho * a + (1.0 - rho * rho).sqrt() * normal_quantile(w))
            }
        };
        if v.is_finite() && (0.0..=1.0).contains(&v) {
            Ok(v)
        } else {
            self.conditional_quantile_bisect(u, w)
        }
    }

    /// Bisection on the conditional cdf with a 1e-12 bracket tolerance.
    pub fn conditional_quantile_bisect(&self, u: f64, w: f64) -> Result<f64> {
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..BISECTION_ITERATIONS {
            let mid = 0.5 * (lo + hi);
            if self.conditional_cdf(u, mid) < w {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-12 {
                return Ok(0.5 * (lo + hi));
            }
        }
        Err(Error::NumericalInversionFailure { iterations: BISECTION_ITERATIONS })
    }

    /// ∫∫ c over the unit square: tensor rule for bounded densities, nested graded rules
    /// when the density blows up at the corners.
    pub fn total_mass(&self) -> Result<f64> {
        match self {
            Copula::Independence | Copula::Fgm { .. } => {
                let r = Region2D::rectangle((0.0, 1.0), (0.0, 1.0));
                Ok(integrate_region_2d(|u, v| self.density(u, v), &r, 16)?.value)
            }
            _ => {
                let rule = GaussLegendre::new(24);
                Ok(graded_gauss_legendre(
                    &rule,
                    |u| graded_gauss_legendre(&rule, |v| self.density(u, v), 0.0, 1.0, 40),
                    0.0,
                    1.0,
                    40,
                ))
            }
        }
    }
}

/// Root in [0, 1] of k v² - (1 + k) v + w = 0, i.e. the inverse of v ↦ (1 + k) v - k v².
pub(crate) fn fgm_root(k: f64, w: f64) -> f64 {
    if k.abs() < 1e-12 {
        return w;
    }
    let b = 1.0 + k;
    let disc = (b * b - 4.0 * k * w).max(0.0);
    // numerically stable form of (b - sqrt(disc)) / (2k)
    2.0 * w / (b + disc.sqrt())
}
