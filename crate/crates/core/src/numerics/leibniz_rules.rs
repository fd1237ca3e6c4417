//! Moving planar domains D_θ = φ(U, θ) and a checker that evaluates the boundary form and the
//! divergence form of the derivative of ∫_{D_θ} G(x, θ) dx against a finite-difference reference.

use super::central_difference;
use super::quadrature::{integrate_region_2d, GaussLegendre, Region2D};
use crate::error::Result;
use std::f64::consts::PI;

type P2 = [f64; 2];
type Map = Box<dyn Fn(P2, f64) -> P2 + Send + Sync>;
type Scalar = Box<dyn Fn(P2, f64) -> f64 + Send + Sync>;

const BOUNDARY_PANELS: usize = 256;
const PANEL_NODES: usize = 8;
const REFERENCE_DELTA: f64 = 1e-4;

/// Fixed base set U that φ(·, θ) deforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseSet {
    UnitDisk,
    UnitSquare,
}

impl BaseSet {
    /// Parametrisation of U by the unit square: (point, area Jacobian).
    fn interior(self, w: P2) -> (P2, f64) {
        match self {
            BaseSet::UnitSquare => (w, 1.0),
            BaseSet::UnitDisk => {
                let (r, t) = (w[0], 2.0 * PI * w[1]);
                ([r * t.cos(), r * t.sin()], 2.0 * PI * r)
            }
        }
    }

    /// Counter-clockwise boundary pieces, each parametrised on [0, 1]: (point, tangent).
    fn boundary(self) -> Vec<fn(f64) -> (P2, P2)> {
        match self {
            BaseSet::UnitDisk => vec![|t| {
                let a = 2.0 * PI * t;
                ([a.cos(), a.sin()], [-2.0 * PI * a.sin(), 2.0 * PI * a.cos()])
            }],
            BaseSet::UnitSquare => {
                vec![|t| ([t, 0.0], [1.0, 0.0]), |t| ([1.0, t], [0.0, 1.0]), |t| ([1.0 - t, 1.0], [-1.0, 0.0]), |t| {
                    ([0.0, 1.0 - t], [0.0, -1.0])
                }]
            }
        }
    }
}

/// A domain D_θ = φ(U, θ) with an integrand G and its velocity field v = ∂_θφ ∘ φ⁻¹.
pub struct MovingDomainCase {
    pub name: &'static str,
    pub base_set: BaseSet,
    pub phi_map: Map,
    pub phi_inverse: Map,
    /// Rows of J_φ(u, θ).
    pub phi_jacobian: Box<dyn Fn(P2, f64) -> [P2; 2] + Send + Sync>,
    pub integrand: Scalar,
    pub integrand_dtheta: Scalar,
    pub integrand_grad: Map,
    pub velocity: Map,
    pub velocity_div: Scalar,
}

/// The two rule forms and the finite-difference reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeibnizCheck {
    pub surface_form: f64,
    pub divergence_form: f64,
    pub reference: f64,
}

impl MovingDomainCase {
    /// Outward unit normal at the boundary point image of base-boundary parameter `t` on piece `piece`.
    pub fn normal(&self, piece: usize, t: f64, theta: f64) -> P2 {
        let (u, du) = self.base_set.boundary()[piece](t);
        let tau = apply(&(self.phi_jacobian)(u, theta), du);
        let len = tau[0].hypot(tau[1]);
        [tau[1] / len, -tau[0] / len]
    }

    /// ∫_{D_θ} F(x) dx computed on U through φ.
    fn domain_integral(&self, f: impl Fn(P2) -> f64, theta: f64) -> Result<f64> {
        let region = Region2D::rectangle((0.0, 1.0), (0.0, 1.0));
        let rep = integrate_region_2d(
            |w1, w2| {
                let (u, jb) = self.base_set.interior([w1, w2]);
                let j = (self.phi_jacobian)(u, theta);
                let det = (j[0][0] * j[1][1] - j[0][1] * j[1][0]).abs();
                f((self.phi_map)(u, theta)) * det * jb
            },
            &region,
            16,
        )?;
        Ok(rep.value)
    }

    /// d/dθ ∫_{D_θ} G by central difference with step 1e-4.
    pub fn reference(&self, theta: f64) -> Result<f64> {
        let mut failure = None;
        let d = central_difference(
            |s| match self.domain_integral(|x| (self.integrand)(x, s), s) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    f64::NAN
                }
            },
            theta,
            REFERENCE_DELTA,
        );
        match failure {
            Some(e) => Err(e),
            None => Ok(d),
        }
    }
}

fn apply(j: &[P2; 2], v: P2) -> P2 {
    [j[0][0] * v[0] + j[0][1] * v[1], j[1][0] * v[0] + j[1][1] * v[1]]
}

/// Evaluates the boundary form ∮ G (v·n) dσ + ∫ ∂_θG and the divergence form
/// ∫ div(G v) + ∂_θG, together with the finite-difference reference.
pub fn verify_leibniz_rules(case: &MovingDomainCase, theta: f64) -> Result<LeibnizCheck> {
    let rule = GaussLegendre::new(PANEL_NODES);
    let mut boundary = 0.0;
    for piece in case.base_set.boundary() {
        for p in 0..BOUNDARY_PANELS {
            let (a, b) = (p as f64 / BOUNDARY_PANELS as f64, (p + 1) as f64 / BOUNDARY_PANELS as f64);
            boundary += rule.integrate(
                |t| {
                    let (u, du) = piece(t);
                    let x = (case.phi_map)(u, theta);
                    let tau = apply(&(case.phi_jacobian)(u, theta), du);
                    let v = (case.velocity)(x, theta);
                    // G (v · n) |τ| with n |τ| = (τ2, -τ1)
                    (case.integrand)(x, theta) * (v[0] * tau[1] - v[1] * tau[0])
                },
                a,
                b,
            );
        }
    }
    let dtheta = case.domain_integral(|x| (case.integrand_dtheta)(x, theta), theta)?;
    let divergence = case.domain_integral(
        |x| {
            let g = (case.integrand)(x, theta);
            let grad = (case.integrand_grad)(x, theta);
            let v = (case.velocity)(x, theta);
            grad[0] * v[0] + grad[1] * v[1] + g * (case.velocity_div)(x, theta) + (case.integrand_dtheta)(x, theta)
        },
        theta,
    )?;
    Ok(LeibnizCheck { surface_form: boundary + dtheta, divergence_form: divergence, reference: case.reference(theta)? })
}

fn scaled(name: &'static str, base_set: BaseSet, integrand: Scalar, grad: Map) -> MovingDomainCase {
    MovingDomainCase {
        name,
        base_set,
        phi_map: Box::new(|u, t| [t * u[0], t * u[1]]),
        phi_inverse: Box::new(|x, t| [x[0] / t, x[1] / t]),
        phi_jacobian: Box::new(|_, t| [[t, 0.0], [0.0, t]]),
        integrand,
        integrand_dtheta: Box::new(|_, _| 0.0),
        integrand_grad: grad,
        velocity: Box::new(|x, t| [x[0] / t, x[1] / t]),
        velocity_div: Box::new(|_, t| 2.0 / t),
    }
}

/// Disk of radius θ with G ≡ 1.
pub fn disk_case() -> MovingDomainCase {
    scaled("disk", BaseSet::UnitDisk, Box::new(|_, _| 1.0), Box::new(|_, _| [0.0, 0.0]))
}

/// Square (0, θ)² with G ≡ 1.
pub fn square_case() -> MovingDomainCase {
    scaled("square", BaseSet::UnitSquare, Box::new(|_, _| 1.0), Box::new(|_, _| [0.0, 0.0]))
}

/// Square (0, θ)² with G(x) = x1 + x2.
pub fn square_linear_case() -> MovingDomainCase {
    scaled("square_linear", BaseSet::UnitSquare, Box::new(|x, _| x[0] + x[1]), Box::new(|_, _| [1.0, 1.0]))
}

/// Unit disk translated along (1, 1/2)·θ with a θ-dependent Gaussian-weighted integrand.
pub fn translating_disk_case() -> MovingDomainCase {
    fn g(x: P2, t: f64) -> f64 {
        (1.0 + x[0] * x[1]) * (-0.5 * t * (x[0] * x[0] + x[1] * x[1])).exp()
    }
    MovingDomainCase {
        name: "translating_disk",
        base_set: BaseSet::UnitDisk,
        phi_map: Box::new(|u, t| [u[0] + t, u[1] + 0.5 * t]),
        phi_inverse: Box::new(|x, t| [x[0] - t, x[1] - 0.5 * t]),
        phi_jacobian: Box::new(|_, _| [[1.0, 0.0], [0.0, 1.0]]),
        integrand: Box::new(g),
        integrand_dtheta: Box::new(|x, t| -0.5 * (x[0] * x[0] + x[1] * x[1]) * g(x, t)),
        integrand_grad: Box::new(|x, t| {
            let e = (-0.5 * t * (x[0] * x[0] + x[1] * x[1])).exp();
            let p = 1.0 + x[0] * x[1];
            [x[1] * e - t * x[0] * p * e, x[0] * e - t * x[1] * p * e]
        }),
        velocity: Box::new(|_, _| [1.0, 0.5]),
        velocity_div: Box::new(|_, _| 0.0),
    }
}

/// Sheared, stretched disk φ(u, θ) = (θ u1 + θ² u2 / 2, (1 + θ) u2) with G = sin(x1 + θ) + x2².
pub fn sheared_ellipse_case() -> MovingDomainCase {
    MovingDomainCase {
        name: "sheared_ellipse",
        base_set: BaseSet::UnitDisk,
        phi_map: Box::new(|u, t| [t * u[0] + 0.5 * t * t * u[1], (1.0 + t) * u[1]]),
        phi_inverse: Box::new(|x, t| {
            let u2 = x[1] / (1.0 + t);
            [(x[0] - 0.5 * t * t * u2) / t, u2]
        }),
        phi_jacobian: Box::new(|_, t| [[t, 0.5 * t * t], [0.0, 1.0 + t]]),
        integrand: Box::new(|x, t| (x[0] + t).sin() + x[1] * x[1]),
        integrand_dtheta: Box::new(|x, t| (x[0] + t).cos()),
        integrand_grad: Box::new(|x, t| [(x[0] + t).cos(), 2.0 * x[1]]),
        velocity: Box::new(|x, t| [x[0] / t + t * x[1] / (2.0 * (1.0 + t)), x[1] / (1.0 + t)]),
        velocity_div: Box::new(|_, t| 1.0 / t + 1.0 / (1.0 + t)),
    }
}

pub fn builtin_cases() -> Vec<MovingDomainCase> {
    vec![disk_case(), square_case(), square_linear_case(), translating_disk_case(), sheared_ellipse_case()]
}
