use super::copula::Copula;
use super::marginal::{Interval, Marginal, Side};
use super::special::{normal_cdf, normal_quantile};
use crate::error::{Error, Result};
use crate::numerics::Point;
use rand::Rng;
use rand_distr::{Distribution, Open01, StandardNormal};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Joint law of the input vector X.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum JointDensity {
    /// Sklar construction c(F1, F2) f1 f2.
    Copula { copula: Copula, marginals: [Marginal; 2] },
    /// exp of a standard bivariate normal pair with correlation rho.
    BivariateLognormal { rho: f64 },
    /// Product of independent marginals in any dimension.
    Independent { marginals: Vec<Marginal> },
}

/// Face {x_coord = endpoint} of the support rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Face {
    pub coord: usize,
    pub side: Side,
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.side {
            Side::Lower => "lower",
            Side::Upper => "upper",
        };
        write!(f, "face (x{}, {s})", self.coord + 1)
    }
}

/// Law of X given that X lies on a face.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryConditional {
    /// The marginal density vanishes at the endpoint, so the face contributes nothing.
    Vanishing,
    /// The remaining coordinates keep their unconditional law.
    ReducesToMarginal,
    /// X is a.s. this point.
    PointMass(Point),
    /// The other coordinate has cdf ∂_uC(u_face, F(x)) with u_face ∈ {0, 1}.
    TransformedCdf(FaceCdf),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceCdf {
    pub copula: Copula,
    pub other: Marginal,
    pub other_coord: usize,
    pub u_face: f64,
}

impl FaceCdf {
    pub fn cdf(&self, x: f64) -> f64 {
        self.copula.conditional_cdf(self.u_face, self.other.cdf(x))
    }

    pub fn quantile(&self, w: f64) -> Result<f64> {
        Ok(self.other.quantile(self.copula.conditional_quantile(self.u_face, w)?))
    }
}

/// 2F - F², the law of X2 given X1 = 0 under FGM(1).
pub fn conditional_cdf_fgm_at_zero(m2: &Marginal, x2: f64) -> f64 {
    let f = m2.cdf(x2);
    2.0 * f - f * f
}

/// Draw from the inverse of 2F - F².
pub fn sample_fgm_at_zero(m2: &Marginal, w: f64) -> f64 {
    m2.quantile(1.0 - (1.0 - w).sqrt())
}

const STD_LOGNORMAL: Marginal = Marginal::LogNormal { mu: 0.0, sigma: 1.0 };

impl JointDensity {
    pub fn validate(&self) -> Result<()> {
        match self {
            JointDensity::Copula { copula, marginals } => {
                copula.validate()?;
                marginals.iter().try_for_each(Marginal::validate)
            }
            JointDensity::BivariateLognormal { rho } => {
                if *rho > -1.0 && *rho < 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("lognormal correlation {rho} not in (-1, 1)")))
                }
            }
            JointDensity::Independent { marginals } => {
                if marginals.is_empty() {
                    return Err(Error::InvalidParameter("independent law needs a marginal".into()));
                }
                marginals.iter().try_for_each(Marginal::validate)
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            JointDensity::Independent { marginals } => marginals.len(),
            _ => 2,
        }
    }

    pub fn marginal(&self, i: usize) -> Marginal {
        match self {
            JointDensity::Copula { marginals, .. } => marginals[i],
            JointDensity::BivariateLognormal { .. } => STD_LOGNORMAL,
            JointDensity::Independent { marginals } => marginals[i],
        }
    }

    pub fn support(&self) -> Vec<Interval> {
        (0..self.dim()).map(|i| self.marginal(i).support()).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.support().iter().zip(x).all(|(s, &v)| s.contains_open(v))
    }

    pub fn is_independent(&self) -> bool {
        matches!(self, JointDensity::Independent { .. } | JointDensity::Copula { copula: Copula::Independence, .. })
            || matches!(self, JointDensity::Copula { copula: Copula::Gaussian { rho }, .. } if *rho == 0.0)
    }

    pub fn pdf(&self, x: &[f64]) -> f64 {
        if !self.contains(x) {
            return 0.0;
        }
        match self {
            JointDensity::Copula { copula, marginals: [m1, m2] } => {
                copula.density(m1.cdf(x[0]), m2.cdf(x[1])) * m1.pdf(x[0]) * m2.pdf(x[1])
            }
            _ => self.ln_pdf(x).exp(),
        }
    }

    pub fn ln_pdf(&self, x: &[f64]) -> f64 {
        if !self.contains(x) {
            return f64::NEG_INFINITY;
        }
        match self {
            JointDensity::Copula { copula, marginals: [m1, m2] } => {
                copula.density(m1.cdf(x[0]), m2.cdf(x[1])).ln() + m1.ln_pdf(x[0]) + m2.ln_pdf(x[1])
            }
            JointDensity::BivariateLognormal { rho } => {
                let (y1, y2) = (x[0].ln(), x[1].ln());
                let r2 = 1.0 - rho * rho;
                -(y1 * y1 - 2.0 * rho * y1 * y2 + y2 * y2) / (2.0 * r2)
                    - (2.0 * std::f64::consts::PI).ln()
                    - 0.5 * r2.ln()
                    - y1
                    - y2
            }
            JointDensity::Independent { marginals } => marginals.iter().zip(x).map(|(m, &v)| m.ln_pdf(v)).sum(),
        }
    }

    /// ∇ₓ log f at an interior point.
    pub fn score_x(&self, x: &[f64]) -> Result<Vec<f64>> {
        if !self.contains(x) {
            return Err(Error::OutsideSupport { point: x.to_vec() });
        }
        Ok(match self {
            JointDensity::Copula { copula, marginals: [m1, m2] } => {
                let (u, v) = (m1.cdf(x[0]), m2.cdf(x[1]));
                vec![
                    copula.dlog_density_du(u, v) * m1.pdf(x[0]) + m1.score(x[0]),
                    copula.dlog_density_dv(u, v) * m2.pdf(x[1]) + m2.score(x[1]),
                ]
            }
            JointDensity::BivariateLognormal { rho } => {
                let (y1, y2) = (x[0].ln(), x[1].ln());
                let r2 = 1.0 - rho * rho;
                vec![-1.0 / x[0] - (y1 - rho * y2) / (r2 * x[0]), -1.0 / x[1] - (y2 - rho * y1) / (r2 * x[1])]
            }
            JointDensity::Independent { marginals } => marginals.iter().zip(x).map(|(m, &v)| m.score(v)).collect(),
        })
    }

    /// ∂_θ log f; every built-in law is free of θ.
    pub fn score_theta(&self, _x: &[f64], _theta: f64) -> f64 {
        0.0
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Point> {
        match self {
            JointDensity::Copula { copula, marginals: [m1, m2] } => loop {
                let (x1, u) = match m1 {
                    Marginal::Gamma { .. } => {
                        let x1 = m1.sample(rng);
                        (x1, m1.cdf(x1))
                    }
                    _ => {
                        let u: f64 = rng.sample(Open01);
                        (m1.quantile(u), u)
                    }
                };
                let w: f64 = rng.sample(Open01);
                let v = copula.conditional_quantile(u, w)?;
                let x = vec![x1, m2.quantile(v)];
                if self.contains(&x) {
                    return Ok(x);
                }
            },
            JointDensity::BivariateLognormal { rho } => {
                let z1: f64 = StandardNormal.sample(rng);
                let z2: f64 = StandardNormal.sample(rng);
                Ok(vec![z1.exp(), (rho * z1 + (1.0 - rho * rho).sqrt() * z2).exp()])
            }
            JointDensity::Independent { marginals } => Ok(marginals.iter().map(|m| m.sample(rng)).collect()),
        }
    }

    /// Conditional cdf of X2 given X1 = x1 (bivariate laws only).
    pub fn conditional_cdf_2_given_1(&self, x1: f64, x2: f64) -> f64 {
        match self {
            JointDensity::Copula { copula, marginals: [m1, m2] } => copula.conditional_cdf(m1.cdf(x1), m2.cdf(x2)),
            JointDensity::BivariateLognormal { rho } => {
                if x2 <= 0.0 {
                    return 0.0;
                }
                normal_cdf((x2.ln() - rho * x1.ln()) / (1.0 - rho * rho).sqrt())
            }
            JointDensity::Independent { marginals } => marginals[1].cdf(x2),
        }
    }

    /// Quantile of X2 given X1 = x1 (bivariate laws only).
    pub fn conditional_quantile_2_given_1(&self, x1: f64, w: f64) -> Result<f64> {
        match self {
            JointDensity::Copula { copula, marginals: [m1, m2] } => {
                Ok(m2.quantile(copula.conditional_quantile(m1.cdf(x1), w)?))
            }
            JointDensity::BivariateLognormal { rho } => {
                Ok((rho * x1.ln() + (1.0 - rho * rho).sqrt() * normal_quantile(w)).exp())
            }
            JointDensity::Independent { marginals } => Ok(marginals[1].quantile(w)),
        }
    }

    /// Every face with a finite endpoint.
    pub fn finite_faces(&self) -> Vec<Face> {
        let mut out = Vec::new();
        for (coord, s) in self.support().iter().enumerate() {
            for side in [Side::Lower, Side::Upper] {
                if s.endpoint(side).is_finite() {
                    out.push(Face { coord, side });
                }
            }
        }
        out
    }

    pub fn boundary_density(&self, face: Face) -> f64 {
        self.marginal(face.coord).boundary_density(face.side)
    }

    /// Classifies the law of X on a face.
    pub fn boundary_conditional(&self, face: Face) -> Result<BoundaryConditional> {
        let unsupported =
            |reason: &str| Error::UnsupportedConditional { face: face.to_string(), reason: reason.to_string() };
        if face.coord >= self.dim() {
            return Err(unsupported("coordinate out of range"));
        }
        let endpoint = self.marginal(face.coord).support().endpoint(face.side);
        if !endpoint.is_finite() {
            return Err(unsupported("endpoint is infinite"));
        }
        if self.boundary_density(face) == 0.0 {
            return Ok(BoundaryConditional::Vanishing);
        }
        if self.is_independent() {
            return Ok(BoundaryConditional::ReducesToMarginal);
        }
        let JointDensity::Copula { copula, marginals } = self else {
            return Err(unsupported("no conditional law for this construction"));
        };
        let other_coord = 1 - face.coord;
        let other = marginals[other_coord];
        let u_face = match face.side {
            Side::Lower => 0.0,
            Side::Upper => 1.0,
        };
        let point_mass = |other_side: Side| {
            let v = other.support().endpoint(other_side);
            if !v.is_finite() {
                return Err(unsupported("conditional mass escapes to an infinite endpoint"));
            }
            let mut p = vec![0.0; 2];
            p[face.coord] = endpoint;
            p[other_coord] = v;
            Ok(BoundaryConditional::PointMass(p))
        };
        match (*copula, face.side) {
            (Copula::Clayton { .. }, Side::Lower) => point_mass(Side::Lower),
            (Copula::Gaussian { rho }, side) => {
                let toward_lower = (rho > 0.0) == (side == Side::Lower);
                point_mass(if toward_lower { Side::Lower } else { Side::Upper })
            }
            (Copula::Clayton { .. }, Side::Upper) | (Copula::Fgm { .. }, _) => {
                Ok(BoundaryConditional::TransformedCdf(FaceCdf { copula: *copula, other, other_coord, u_face }))
            }
            (Copula::Independence, _) => Ok(BoundaryConditional::ReducesToMarginal),
        }
    }

    /// Draws X conditional on lying on `face`.
    pub fn sample_face<R: Rng + ?Sized>(&self, face: Face, rng: &mut R) -> Result<Point> {
        let endpoint = self.marginal(face.coord).support().endpoint(face.side);
        match self.boundary_conditional(face)? {
            BoundaryConditional::Vanishing => Err(Error::UnsupportedConditional {
                face: face.to_string(),
                reason: "face has zero boundary density".into(),
            }),
            BoundaryConditional::ReducesToMarginal => {
                let mut x = self.sample(rng)?;
                x[face.coord] = endpoint;
                Ok(x)
            }
            BoundaryConditional::PointMass(p) => Ok(p),
            BoundaryConditional::TransformedCdf(fc) => {
                let w: f64 = rng.sample(Open01);
                let mut x = vec![0.0; 2];
                x[face.coord] = endpoint;
                x[fc.other_coord] = fc.quantile(w)?;
                Ok(x)
            }
        }
    }
}
