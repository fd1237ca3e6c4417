use serde::{Deserialize, Serialize};

/// Interval constraint on one coordinate of g(x, θ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Bound {
    pub fn open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: false, hi_closed: false }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub fn contains(&self, y: f64) -> bool {
        let above = if self.lo_closed { y >= self.lo } else { y > self.lo };
        let below = if self.hi_closed { y <= self.hi } else { y < self.hi };
        above && below
    }
}

/// Product of per-coordinate intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionU {
    pub bounds: Vec<Bound>,
}

impl RegionU {
    pub fn new(bounds: Vec<Bound>) -> Self {
        Self { bounds }
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        y.len() == self.bounds.len() && self.bounds.iter().zip(y).all(|(b, &v)| b.contains(v))
    }
}

/// Outer function φ of a push-out performance ψ(x, θ) = φ(g(x, θ)).
pub trait OuterFunction: Send + Sync {
    fn value(&self, y: &[f64]) -> f64;
    /// ∇φ(y), or `None` when φ is an indicator.
    fn gradient(&self, y: &[f64]) -> Option<Vec<f64>>;
}

impl OuterFunction for RegionU {
    fn value(&self, y: &[f64]) -> f64 {
        if self.contains(y) {
            1.0
        } else {
            0.0
        }
    }

    fn gradient(&self, _y: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

/// 1{y1 + ... + yn < q}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumBelow {
    pub q: f64,
}

impl OuterFunction for SumBelow {
    fn value(&self, y: &[f64]) -> f64 {
        if y.iter().sum::<f64>() < self.q {
            1.0
        } else {
            0.0
        }
    }

    fn gradient(&self, _y: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

/// Smooth polynomial φ(y) = c·y + Σ_ij Q_ij y_i y_j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub linear: Vec<f64>,
    #[serde(default)]
    pub quadratic: Vec<Vec<f64>>,
}

impl Polynomial {
    pub fn linear(c: Vec<f64>) -> Self {
        Self { linear: c, quadratic: Vec::new() }
    }
}

impl OuterFunction for Polynomial {
    fn value(&self, y: &[f64]) -> f64 {
        let lin: f64 = self.linear.iter().zip(y).map(|(c, v)| c * v).sum();
        let quad: f64 = self
            .quadratic
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().enumerate().map(|(j, q)| q * y[i] * y[j]).sum::<f64>())
            .sum();
        lin + quad
    }

    fn gradient(&self, y: &[f64]) -> Option<Vec<f64>> {
        let mut g: Vec<f64> = (0..y.len()).map(|i| self.linear.get(i).copied().unwrap_or(0.0)).collect();
        for (i, row) in self.quadratic.iter().enumerate() {
            for (j, q) in row.iter().enumerate() {
                g[i] += q * y[j];
                g[j] += q * y[i];
            }
        }
        Some(g)
    }
}
