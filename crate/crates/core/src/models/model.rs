use crate::distributions::{Copula, JointDensity, Marginal};
use crate::error::{Error, Result};
use crate::transforms::{chart_contains, DomainChart, OuterFunction, RegionU, Transform};
use std::sync::Arc;

pub type PerformanceFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;
pub type MapFn = Arc<dyn Fn(&[f64], f64) -> Vec<f64> + Send + Sync>;

/// ψ(x, θ) = φ(g(x, θ)).
#[derive(Clone)]
pub struct PushOut {
    pub transform: Arc<dyn Transform>,
    pub outer: Arc<dyn OuterFunction>,
}

/// ψ(x, θ) = 1{g(x, θ) ∈ U} written with a map whose image constraint is a box.
#[derive(Clone)]
pub struct IndicatorForm {
    pub map: MapFn,
    pub region: RegionU,
}

impl IndicatorForm {
    pub fn contains(&self, x: &[f64], theta: f64) -> bool {
        self.region.contains(&(self.map)(x, theta))
    }
}

/// Smooth factor φ(x, θ) multiplying the chart indicator.
pub trait SmoothFactor: Send + Sync {
    fn value(&self, x: &[f64], theta: f64) -> f64;
    fn dtheta(&self, x: &[f64], theta: f64) -> f64;
    fn grad_x(&self, x: &[f64], theta: f64) -> Vec<f64>;
}

/// Benchmark problem: input law, performance and its available representations.
#[derive(Clone)]
pub struct Model {
    pub name: String,
    pub density: JointDensity,
    pub performance: PerformanceFn,
    pub push_out: Option<PushOut>,
    pub chart: Option<Arc<dyn DomainChart>>,
    pub indicator: Option<IndicatorForm>,
    pub factor: Option<Arc<dyn SmoothFactor>>,
    /// Open interval of admissible θ.
    pub theta_range: (f64, f64),
    pub q: Option<f64>,
}

impl std::fmt::Debug for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Model")
            .field("name", &self.name)
            .field("density", &self.density)
            .field("theta_range", &self.theta_range)
            .field("q", &self.q)
            .finish_non_exhaustive()
    }
}

impl Model {
    pub fn performance(&self, x: &[f64], theta: f64) -> f64 {
        (self.performance)(x, theta)
    }

    /// ψ through the chart: φ(x, θ)·1{h⁻¹(x, θ) ∈ V}.
    pub fn chart_performance(&self, x: &[f64], theta: f64) -> Option<f64> {
        let chart = self.chart.as_ref()?;
        if !chart_contains(chart.as_ref(), x, theta) {
            return Some(0.0);
        }
        Some(self.factor.as_ref().map_or(1.0, |f| f.value(x, theta)))
    }

    /// ψ through the push-out: φ(g(x, θ)).
    pub fn push_out_performance(&self, x: &[f64], theta: f64) -> Option<f64> {
        let p = self.push_out.as_ref()?;
        Some(p.outer.value(&p.transform.apply(x, theta)))
    }

    pub fn check_theta(&self, theta: f64) -> Result<()> {
        let (lo, hi) = self.theta_range;
        if theta > lo && theta < hi {
            Ok(())
        } else {
            Err(Error::ThetaOutOfRange { theta, lo, hi })
        }
    }

    /// Replaces the unit factor of a chart model with a smooth φ(x, θ).
    pub fn with_factor(mut self, factor: Arc<dyn SmoothFactor>) -> Self {
        let chart = self.chart.clone().expect("with_factor needs a chart model");
        let f = factor.clone();
        self.performance = Arc::new(move |x, t| if chart_contains(chart.as_ref(), x, t) { f.value(x, t) } else { 0.0 });
        self.factor = Some(factor);
        self.push_out = None;
        self.indicator = None;
        self
    }

    pub fn distribution_id(&self) -> String {
        distribution_id(&self.density)
    }
}

fn marginal_id(m: &Marginal) -> String {
    match *m {
        Marginal::Exponential { rate } => format!("exp({rate})"),
        Marginal::Gamma { shape } => format!("gamma({shape})"),
        Marginal::LogNormal { mu, sigma } => format!("lognormal({mu};{sigma})"),
        Marginal::Uniform01 => "uniform".into(),
        Marginal::Normal { mu, sigma } => format!("normal({mu};{sigma})"),
        Marginal::Power { exponent } => format!("power({exponent})"),
    }
}

/// Compact comma-free identifier of an input law.
pub fn distribution_id(d: &JointDensity) -> String {
    match d {
        JointDensity::Copula { copula, marginals } => {
            let c = match *copula {
                Copula::Independence => "independence".to_string(),
                Copula::Clayton { alpha } => format!("clayton({alpha})"),
                Copula::Fgm { alpha } => format!("fgm({alpha})"),
                Copula::Gaussian { rho } => format!("gaussian({rho})"),
            };
            format!("{c}:{}/{}", marginal_id(&marginals[0]), marginal_id(&marginals[1]))
        }
        JointDensity::BivariateLognormal { rho } => format!("bivariate_lognormal({rho})"),
        JointDensity::Independent { marginals } => {
            let ms: Vec<String> = marginals.iter().map(marginal_id).collect();
            format!("independent:{}", ms.join("/"))
        }
    }
}
