use super::region::RegionU;
use crate::distributions::Interval;
use crate::error::{Error, Result};
use crate::numerics::{invert_small, SmallMatrix};
use std::sync::Arc;

/// Parametrisation x = h(v, θ) of an indicator region by a box V.
pub trait DomainChart: Send + Sync {
    fn dim(&self) -> usize;
    fn v_box(&self) -> Vec<Interval>;
    fn h(&self, v: &[f64], theta: f64) -> Result<Vec<f64>>;
    /// h⁻¹(x, θ), or `None` when x has no preimage.
    fn h_inverse(&self, x: &[f64], theta: f64) -> Option<Vec<f64>>;
    fn dtheta_h(&self, v: &[f64], theta: f64) -> Result<Vec<f64>>;
    /// Velocity field (∂_θh) ∘ h⁻¹ at x.
    fn velocity(&self, x: &[f64], theta: f64) -> Result<Vec<f64>>;
    /// Σ_i ∂_{x_i}[(∂_θh)_i ∘ h⁻¹](x, θ).
    fn cross_partials(&self, x: &[f64], theta: f64) -> Result<f64>;
    /// Whether a point of V lies in the box (boundary handling is chart specific).
    fn v_contains(&self, v: &[f64]) -> bool {
        self.v_box().iter().zip(v).all(|(b, &t)| t > b.lo && t < b.hi)
    }
}

/// True iff h⁻¹(x, θ) exists and lies in V.
pub fn chart_contains(c: &dyn DomainChart, x: &[f64], theta: f64) -> bool {
    c.h_inverse(x, theta).is_some_and(|v| c.v_contains(&v))
}

/// Strictly increasing coordinate map z(x, θ) with inverse and partial derivatives.
pub trait MonotoneCoordinate: Send + Sync {
    fn z(&self, x: f64, theta: f64) -> f64;
    fn z_inv(&self, y: f64, theta: f64) -> f64;
    fn dz_dx(&self, x: f64, theta: f64) -> f64;
    fn dz_dtheta(&self, x: f64, theta: f64) -> f64;
    fn dzinv_dy(&self, y: f64, theta: f64) -> f64;
    fn dzinv_dtheta(&self, y: f64, theta: f64) -> f64;
}

/// z(x, θ) = log(x + θ).
#[derive(Debug, Clone, Copy)]
pub struct LogShiftCoordinate;

impl MonotoneCoordinate for LogShiftCoordinate {
    fn z(&self, x: f64, theta: f64) -> f64 {
        (x + theta).ln()
    }
    fn z_inv(&self, y: f64, theta: f64) -> f64 {
        y.exp() - theta
    }
    fn dz_dx(&self, x: f64, theta: f64) -> f64 {
        1.0 / (x + theta)
    }
    fn dz_dtheta(&self, x: f64, theta: f64) -> f64 {
        1.0 / (x + theta)
    }
    fn dzinv_dy(&self, y: f64, _theta: f64) -> f64 {
        y.exp()
    }
    fn dzinv_dtheta(&self, _y: f64, _theta: f64) -> f64 {
        -1.0
    }
}

/// Chart of {x : x_i > a_i, Σ_{j≤i} z_j(x_j) + Σ_{j>i} z_j(a_j) ≤ q for all i} built coordinate
/// by coordinate: h_i = (upper_i − a_i) v_i + a_i with upper_i = z_i⁻¹(q − Σ_{j<i} z_j(h_j) − Σ_{j>i} z_j(a_j)).
pub struct InventoryChart {
    coords: Vec<Arc<dyn MonotoneCoordinate>>,
    lower: Vec<f64>,
    q: f64,
}

/// One pass of the recursion.
struct Sweep {
    x: Vec<f64>,
    v: Vec<f64>,
    velocity: Vec<f64>,
    cross: f64,
}

enum Known<'a> {
    V(&'a [f64]),
    X(&'a [f64]),
}

pub fn build_inventory_chart(
    coords: Vec<Arc<dyn MonotoneCoordinate>>,
    lower: Vec<f64>,
    q: f64,
) -> Result<InventoryChart> {
    if coords.is_empty() || coords.len() != lower.len() {
        return Err(Error::InvalidParameter("inventory chart needs one lower endpoint per coordinate map".into()));
    }
    if lower.iter().any(|a| !a.is_finite()) || q.is_nan() {
        return Err(Error::InvalidParameter("inventory chart needs finite lower endpoints".into()));
    }
    Ok(InventoryChart { coords, lower, q })
}

impl InventoryChart {
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Errors with `InfeasibleRegion` when Σ z_i(a_i, θ) > q.
    pub fn check_feasible(&self, theta: f64) -> Result<()> {
        let lhs: f64 = self.coords.iter().zip(&self.lower).map(|(z, &a)| z.z(a, theta)).sum();
        if lhs > self.q {
            Err(Error::InfeasibleRegion { theta, lhs, q: self.q })
        } else {
            Ok(())
        }
    }

    fn sweep(&self, known: Known, theta: f64) -> Option<Sweep> {
        let n = self.coords.len();
        let (mut x, mut v, mut w) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let mut cross = 0.0;
        let tail: Vec<f64> = self.coords.iter().zip(&self.lower).map(|(z, &a)| z.z(a, theta)).collect();
        let tail_dtheta: Vec<f64> = self.coords.iter().zip(&self.lower).map(|(z, &a)| z.dz_dtheta(a, theta)).collect();
        let (mut used, mut used_dtheta) = (0.0, 0.0);
        for i in 0..n {
            let zi = &self.coords[i];
            let rest: f64 = tail[i + 1..].iter().sum();
            let rest_dtheta: f64 = tail_dtheta[i + 1..].iter().sum();
            let r = self.q - used - rest;
            let dr = -used_dtheta - rest_dtheta;
            let upper = zi.z_inv(r, theta);
            let mut span = upper - self.lower[i];
            if let Known::V(_) = known {
                if span > -1e-12 * (1.0 + self.lower[i].abs()) {
                    span = span.max(0.0);
                }
            }
            if !(span > 0.0 || (span == 0.0 && matches!(known, Known::V(_)))) {
                return None;
            }
            match known {
                Known::V(vv) => {
                    v[i] = vv[i];
                    x[i] = self.lower[i] + span * v[i];
                }
                Known::X(xx) => {
                    x[i] = xx[i];
                    v[i] = (x[i] - self.lower[i]) / span;
                }
            }
            let dupper = zi.dzinv_dy(r, theta) * dr + zi.dzinv_dtheta(r, theta);
            w[i] = dupper * v[i];
            if span > 0.0 {
                cross += dupper / span;
            }
            used += zi.z(x[i], theta);
            used_dtheta += zi.dz_dx(x[i], theta) * w[i] + zi.dz_dtheta(x[i], theta);
        }
        Some(Sweep { x, v, velocity: w, cross })
    }
}

impl DomainChart for InventoryChart {
    fn dim(&self) -> usize {
        self.coords.len()
    }

    fn v_box(&self) -> Vec<Interval> {
        vec![Interval::new(0.0, 1.0); self.coords.len()]
    }

    fn h(&self, v: &[f64], theta: f64) -> Result<Vec<f64>> {
        self.check_feasible(theta)?;
        self.sweep(Known::V(v), theta).map(|s| s.x).ok_or(Error::InfeasibleRegion { theta, lhs: f64::NAN, q: self.q })
    }

    fn h_inverse(&self, x: &[f64], theta: f64) -> Option<Vec<f64>> {
        if x.len() != self.dim() || self.check_feasible(theta).is_err() {
            return None;
        }
        self.sweep(Known::X(x), theta).map(|s| s.v)
    }

    fn dtheta_h(&self, v: &[f64], theta: f64) -> Result<Vec<f64>> {
        self.check_feasible(theta)?;
        self.sweep(Known::V(v), theta).map(|s| s.velocity).ok_or(Error::InfeasibleRegion {
            theta,
            lhs: f64::NAN,
            q: self.q,
        })
    }

    fn velocity(&self, x: &[f64], theta: f64) -> Result<Vec<f64>> {
        self.check_feasible(theta)?;
        self.sweep(Known::X(x), theta).map(|s| s.velocity).ok_or(Error::OutsideSupport { point: x.to_vec() })
    }

    fn cross_partials(&self, x: &[f64], theta: f64) -> Result<f64> {
        self.check_feasible(theta)?;
        self.sweep(Known::X(x), theta).map(|s| s.cross).ok_or(Error::OutsideSupport { point: x.to_vec() })
    }
}

/// Chart h(v, θ) = θ M⁻¹ v of {x : M x / θ ∈ U} for a box U.
pub struct LinearChart {
    matrix: SmallMatrix,
    inverse: SmallMatrix,
    region: RegionU,
}

impl LinearChart {
    pub fn new(matrix: SmallMatrix, region: RegionU) -> Result<Self> {
        let (inverse, _) = invert_small(&matrix)?;
        Ok(Self { matrix, inverse, region })
    }
}

impl DomainChart for LinearChart {
    fn dim(&self) -> usize {
        self.matrix.n()
    }

    fn v_box(&self) -> Vec<Interval> {
        self.region.bounds.iter().map(|b| Interval::new(b.lo, b.hi)).collect()
    }

    fn v_contains(&self, v: &[f64]) -> bool {
        self.region.contains(v)
    }

    fn h(&self, v: &[f64], theta: f64) -> Result<Vec<f64>> {
        Ok(self.inverse.mul_vec(v).into_iter().map(|t| theta * t).collect())
    }

    fn h_inverse(&self, x: &[f64], theta: f64) -> Option<Vec<f64>> {
        (theta > 0.0).then(|| self.matrix.mul_vec(x).into_iter().map(|t| t / theta).collect())
    }

    fn dtheta_h(&self, v: &[f64], _theta: f64) -> Result<Vec<f64>> {
        Ok(self.inverse.mul_vec(v))
    }

    fn velocity(&self, x: &[f64], theta: f64) -> Result<Vec<f64>> {
        Ok(x.iter().map(|t| t / theta).collect())
    }

    fn cross_partials(&self, _x: &[f64], theta: f64) -> Result<f64> {
        Ok(self.dim() as f64 / theta)
    }
}
