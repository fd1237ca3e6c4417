use crate::distributions::JointDensity;
use crate::error::{Error, Result};
use crate::numerics::{solve, SmallMatrix};

/// Change of variables y = g(x, θ) with its derivatives.
pub trait Transform: Send + Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], theta: f64) -> Vec<f64>;
    /// J_g(x, θ) = ∂g/∂x.
    fn jacobian(&self, x: &[f64], theta: f64) -> SmallMatrix;
    fn dtheta(&self, x: &[f64], theta: f64) -> Vec<f64>;
    /// Divergence in x of s = J_g⁻¹ ∂_θg.
    fn div_s(&self, x: &[f64], theta: f64) -> f64;
    /// Description of g(Ω, θ).
    fn image_note(&self) -> &str;
    fn image_theta_independent(&self) -> bool;
    /// Closed form of s when one is known.
    fn s_closed_form(&self, _x: &[f64], _theta: f64) -> Option<Vec<f64>> {
        None
    }
}

/// s(x, θ) = J_g⁻¹ ∂_θg, from the closed form when available and otherwise by a direct solve.
pub fn s_vector(t: &dyn Transform, x: &[f64], theta: f64) -> Result<Vec<f64>> {
    match t.s_closed_form(x, theta) {
        Some(s) => Ok(s),
        None => solve(&t.jacobian(x, theta), &t.dtheta(x, theta)),
    }
}

/// d(x, θ) = div(−f s)/f = −(s·∇ₓ log f + div s).
pub fn d_scalar(t: &dyn Transform, d: &JointDensity, x: &[f64], theta: f64) -> Result<f64> {
    let s = s_vector(t, x, theta)?;
    let score = d.score_x(x)?;
    Ok(-(s.iter().zip(&score).map(|(a, b)| a * b).sum::<f64>() + t.div_s(x, theta)))
}

/// g_i = log(x_i + θ).
#[derive(Debug, Clone, Copy)]
pub struct LogShift {
    pub dim: usize,
}

impl Transform for LogShift {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, x: &[f64], theta: f64) -> Vec<f64> {
        x.iter().map(|v| (v + theta).ln()).collect()
    }
    fn jacobian(&self, x: &[f64], theta: f64) -> SmallMatrix {
        SmallMatrix::diag(&x.iter().map(|v| 1.0 / (v + theta)).collect::<Vec<_>>())
    }
    fn dtheta(&self, x: &[f64], theta: f64) -> Vec<f64> {
        x.iter().map(|v| 1.0 / (v + theta)).collect()
    }
    fn s_closed_form(&self, x: &[f64], _theta: f64) -> Option<Vec<f64>> {
        Some(vec![1.0; x.len()])
    }
    fn div_s(&self, _x: &[f64], _theta: f64) -> f64 {
        0.0
    }
    fn image_note(&self) -> &str {
        "g(Ω, θ) = (log θ, ∞)^n; depends on θ"
    }
    fn image_theta_independent(&self) -> bool {
        false
    }
}

/// g = x − θ·1.
#[derive(Debug, Clone, Copy)]
pub struct Shift {
    pub dim: usize,
}

impl Transform for Shift {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, x: &[f64], theta: f64) -> Vec<f64> {
        x.iter().map(|v| v - theta).collect()
    }
    fn jacobian(&self, _x: &[f64], _theta: f64) -> SmallMatrix {
        SmallMatrix::identity(self.dim)
    }
    fn dtheta(&self, _x: &[f64], _theta: f64) -> Vec<f64> {
        vec![-1.0; self.dim]
    }
    fn div_s(&self, _x: &[f64], _theta: f64) -> f64 {
        0.0
    }
    fn image_note(&self) -> &str {
        "g(Ω, θ) = Ω − θ; depends on θ"
    }
    fn image_theta_independent(&self) -> bool {
        false
    }
}

/// g = M x / θ for an invertible matrix M.
#[derive(Debug, Clone)]
pub struct LinearScale {
    pub matrix: SmallMatrix,
    note: String,
    theta_independent: bool,
}

impl LinearScale {
    pub fn new(matrix: SmallMatrix, note: impl Into<String>, theta_independent: bool) -> Result<Self> {
        if !(matrix.det().abs() > crate::numerics::SINGULAR_THRESHOLD) {
            return Err(Error::SingularMatrix { det: matrix.det() });
        }
        Ok(Self { matrix, note: note.into(), theta_independent })
    }

    /// g = x / θ.
    pub fn scaling(dim: usize) -> Self {
        Self { matrix: SmallMatrix::identity(dim), note: "g(Ω, θ) = Ω / θ".into(), theta_independent: false }
    }
}

impl Transform for LinearScale {
    fn dim(&self) -> usize {
        self.matrix.n()
    }
    fn apply(&self, x: &[f64], theta: f64) -> Vec<f64> {
        self.matrix.mul_vec(x).into_iter().map(|v| v / theta).collect()
    }
    fn jacobian(&self, _x: &[f64], theta: f64) -> SmallMatrix {
        self.matrix.scale(1.0 / theta)
    }
    fn dtheta(&self, x: &[f64], theta: f64) -> Vec<f64> {
        self.matrix.mul_vec(x).into_iter().map(|v| -v / (theta * theta)).collect()
    }
    fn div_s(&self, _x: &[f64], theta: f64) -> f64 {
        -(self.dim() as f64) / theta
    }
    fn image_note(&self) -> &str {
        &self.note
    }
    fn image_theta_independent(&self) -> bool {
        self.theta_independent
    }
    fn s_closed_form(&self, x: &[f64], theta: f64) -> Option<Vec<f64>> {
        Some(x.iter().map(|v| -v / theta).collect())
    }
}
