use super::estimate::{DerivativeEstimate, EstimatorConfig, EstimatorId, FaceContribution, FaceTreatment};
use super::paths::{leibniz_volume_path, NON_INTEGRABLE_D};
use super::replicate::{derived_seed, mean_and_se, run_paths};
use crate::distributions::{BoundaryConditional, Face, Side};
use crate::error::{Error, Result};
use crate::models::Model;
use crate::transforms::s_vector;
use std::time::Instant;

#[cfg(not(feature = "mutation-surface-sign"))]
const SURFACE_SIGN: f64 = 1.0;
#[cfg(feature = "mutation-surface-sign")]
const SURFACE_SIGN: f64 = -1.0;

/// One finite face with its treatment.
#[derive(Debug, Clone)]
struct FacePlan {
    face: Face,
    conditional: BoundaryConditional,
    density: f64,
    endpoint: f64,
}

impl FacePlan {
    fn treatment(&self) -> FaceTreatment {
        match self.conditional {
            BoundaryConditional::Vanishing => FaceTreatment::Vanishing,
            BoundaryConditional::ReducesToMarginal => FaceTreatment::MainStream,
            BoundaryConditional::PointMass(_) => FaceTreatment::PointMass,
            BoundaryConditional::TransformedCdf(_) => FaceTreatment::Sampled,
        }
    }
}

fn plan_faces(m: &Model) -> Result<Vec<FacePlan>> {
    m.density
        .finite_faces()
        .into_iter()
        .map(|face| {
            Ok(FacePlan {
                face,
                conditional: m.density.boundary_conditional(face)?,
                density: m.density.boundary_density(face),
                endpoint: m.density.marginal(face.coord).support().endpoint(face.side),
            })
        })
        .collect()
}

/// Signed face integrand ± f_{X_i}(endpoint)·φ(g(p, θ))·(s(p, θ)·e_i) at a face point p.
fn face_value(m: &Model, plan: &FacePlan, p: &[f64], theta: f64) -> Result<f64> {
    let po = m.push_out.as_ref().expect("checked by caller");
    let phi = po.outer.value(&po.transform.apply(p, theta));
    if phi == 0.0 {
        return Ok(0.0);
    }
    let s = s_vector(po.transform.as_ref(), p, theta)?;
    let inner = phi * s[plan.face.coord];
    if inner == 0.0 {
        return Ok(0.0);
    }
    let sign = match plan.face.side {
        Side::Lower => -1.0,
        Side::Upper => 1.0,
    };
    Ok(SURFACE_SIGN * sign * plan.density * inner)
}

/// Surface term on its own: every non-vanishing face is evaluated at its point mass or averaged
/// over `surface_reps` fresh draws from the face conditional.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceTerm {
    pub value: f64,
    pub std_error: f64,
    pub faces: Vec<FaceContribution>,
    pub conditional_draws: u64,
    /// Some face has an infinite boundary density.
    pub divergent: bool,
}

fn sampled_face(m: &Model, plan: &FacePlan, idx: usize, theta: f64, cfg: &EstimatorConfig) -> Result<FaceContribution> {
    let n = cfg.surface_reps();
    let (vals, _) = run_paths(n, derived_seed(cfg.seed, 0xFACE + idx as u64), cfg.workers, |rng| {
        let p = m.density.sample_face(plan.face, rng)?;
        face_value(m, plan, &p, theta)
    })?;
    let (value, std_error) = mean_and_se(&vals);
    Ok(FaceContribution {
        face: plan.face,
        treatment: plan.treatment(),
        boundary_density: plan.density,
        value,
        std_error,
        draws: n as u64,
    })
}

fn fixed_face(plan: &FacePlan, value: f64) -> FaceContribution {
    FaceContribution {
        face: plan.face,
        treatment: plan.treatment(),
        boundary_density: plan.density,
        value,
        std_error: 0.0,
        draws: 0,
    }
}

pub fn surface_term(m: &Model, theta: f64, cfg: &EstimatorConfig) -> Result<SurfaceTerm> {
    cfg.validate()?;
    if m.push_out.is_none() {
        return Err(Error::UnsupportedEstimator { estimator: "leibniz_integral".into(), model: m.name.clone() });
    }
    let mut faces = Vec::new();
    let mut draws = 0;
    for (idx, plan) in plan_faces(m)?.iter().enumerate() {
        let c = match &plan.conditional {
            BoundaryConditional::Vanishing => fixed_face(plan, 0.0),
            BoundaryConditional::PointMass(p) => fixed_face(plan, face_value(m, plan, p, theta)?),
            _ => sampled_face(m, plan, idx, theta, cfg)?,
        };
        draws += c.draws;
        faces.push(c);
    }
    Ok(SurfaceTerm {
        value: faces.iter().map(|f| f.value).sum(),
        std_error: faces.iter().map(|f| f.std_error * f.std_error).sum::<f64>().sqrt(),
        divergent: faces.iter().any(|f| f.boundary_density.is_infinite() && f.value != 0.0),
        conditional_draws: draws,
        faces,
    })
}

struct PathParts {
    total: f64,
    faces: Vec<f64>,
    abs_d: f64,
}

/// Volume estimator plus surface term. Faces whose conditional law is the unconditional one are
/// evaluated on the main-stream path; point masses are exact; other faces use fresh draws with
/// their own budget, and the standard errors are combined in quadrature.
pub fn leibniz_integral_estimate(m: &Model, theta: f64, cfg: &EstimatorConfig) -> Result<DerivativeEstimate> {
    cfg.validate()?;
    m.check_theta(theta)?;
    if m.push_out.is_none() {
        return Err(Error::UnsupportedEstimator { estimator: "leibniz_integral".into(), model: m.name.clone() });
    }
    let start = Instant::now();
    let plans = plan_faces(m)?;
    let reused: Vec<&FacePlan> = plans.iter().filter(|p| p.treatment() == FaceTreatment::MainStream).collect();
    let (parts, rejected) = run_paths(cfg.n_reps, cfg.seed, cfg.workers, |rng| {
        let x = m.density.sample(rng)?;
        let (vol, abs_d) = leibniz_volume_path(m, &x, theta)?;
        let mut faces = Vec::with_capacity(reused.len());
        for plan in &reused {
            let mut p = x.clone();
            p[plan.face.coord] = plan.endpoint;
            faces.push(face_value(m, plan, &p, theta)?);
        }
        Ok(PathParts { total: vol + faces.iter().sum::<f64>(), faces, abs_d })
    })?;
    let totals: Vec<f64> = parts.iter().map(|p| p.total).collect();
    let (main_mean, main_se) = mean_and_se(&totals);
    let heavy = parts.iter().any(|p| p.abs_d > NON_INTEGRABLE_D);

    let mut breakdown = Vec::new();
    let mut extra = 0.0;
    let mut extra_var = 0.0;
    let mut draws = 0;
    for (idx, plan) in plans.iter().enumerate() {
        let c = match &plan.conditional {
            BoundaryConditional::Vanishing => fixed_face(plan, 0.0),
            BoundaryConditional::PointMass(p) => fixed_face(plan, face_value(m, plan, p, theta)?),
            BoundaryConditional::ReducesToMarginal => {
                let j = reused.iter().position(|r| r.face == plan.face).expect("reused face");
                let vals: Vec<f64> = parts.iter().map(|p| p.faces[j]).collect();
                let (value, std_error) = mean_and_se(&vals);
                FaceContribution { std_error, ..fixed_face(plan, value) }
            }
            BoundaryConditional::TransformedCdf(_) => sampled_face(m, plan, idx, theta, cfg)?,
        };
        if c.treatment != FaceTreatment::MainStream {
            extra += c.value;
            extra_var += c.std_error * c.std_error;
        }
        draws += c.draws;
        breakdown.push(c);
    }
    let divergent = breakdown.iter().any(|f| f.boundary_density.is_infinite() && f.value != 0.0);
    let mean = main_mean + extra;
    Ok(DerivativeEstimate {
        estimator: EstimatorId::LeibnizIntegral,
        mean,
        std_error: (main_se * main_se + extra_var).sqrt(),
        n_reps: cfg.n_reps,
        runtime_s: start.elapsed().as_secs_f64(),
        rejected_samples: rejected,
        conditional_draws: draws,
        main_stream_face_evaluations: (cfg.n_reps * reused.len()) as u64,
        surface_breakdown: Some(breakdown),
        unstable: heavy || divergent || !mean.is_finite(),
    })
}
