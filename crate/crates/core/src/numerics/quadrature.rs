//! Gauss–Legendre rules, region quadrature in the plane and an adaptive Simpson backend.

use crate::error::{Error, Result};

/// Refinement is accepted once doubling the order moves the result by less than this.
pub const CONVERGED_CHANGE: f64 = 1e-8;
/// Refinement fails with `NonConvergent` above this change.
pub const NONCONVERGENT_CHANGE: f64 = 1e-6;
const MAX_ORDER: usize = 512;
/// Graded cells narrower than this many ulps of their endpoint are merged into their neighbour.
const MIN_GRADED_ULPS: f64 = 512.0;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (c + h * x, h * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Legendre polynomial P_n and its derivative at x.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Composite rule on panels that shrink geometrically toward both endpoints, for integrands
/// with endpoint singularities. Panel breakpoints scale with (a, b), so the result is a smooth
/// function of the endpoints.
pub fn graded_gauss_legendre<F: FnMut(f64) -> f64>(
    rule: &GaussLegendre,
    mut f: F,
    a: f64,
    b: f64,
    levels: usize,
) -> f64 {
    let len = b - a;
    if len == 0.0 {
        return 0.0;
    }
    let resolvable = |width: f64, end: f64| width.abs() >= MIN_GRADED_ULPS * f64::EPSILON * end.abs();
    let mut breaks = vec![a];
    for k in (1..=levels).rev() {
        let width = len * 0.5 * 0.5f64.powi(k as i32);
        if resolvable(width, a) {
            breaks.push(a + width);
        }
    }
    breaks.push(a + 0.5 * len);
    for k in 1..=levels {
        let width = len * 0.5 * 0.5f64.powi(k as i32);
        if resolvable(width, b) {
            breaks.push(b - width);
        }
    }
    breaks.push(b);
    breaks.windows(2).map(|w| rule.integrate(&mut f, w[0], w[1])).sum()
}

/// Recursive adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&mut f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Planar region {a < x1 < b, lower(x1) < x2 < upper(x1)}.
pub struct Region2D<'a> {
    pub x1_range: (f64, f64),
    pub x2_lower: Box<dyn Fn(f64) -> f64 + Sync + 'a>,
    pub x2_upper: Box<dyn Fn(f64) -> f64 + Sync + 'a>,
}

impl<'a> Region2D<'a> {
    pub fn new(
        x1_range: (f64, f64),
        x2_lower: impl Fn(f64) -> f64 + Sync + 'a,
        x2_upper: impl Fn(f64) -> f64 + Sync + 'a,
    ) -> Self {
        Self { x1_range, x2_lower: Box::new(x2_lower), x2_upper: Box::new(x2_upper) }
    }

    pub fn rectangle(x1: (f64, f64), x2: (f64, f64)) -> Self {
        Self::new(x1, move |_| x2.0, move |_| x2.1)
    }
}

/// Result of a refined quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureReport {
    pub value: f64,
    /// |Q(2n) - Q(n)| at the accepted order.
    pub change: f64,
    pub order: usize,
}

fn tensor_rule<F: Fn(f64, f64) -> f64>(f: &F, r: &Region2D, rule: &GaussLegendre) -> f64 {
    let (a, b) = r.x1_range;
    rule.mapped(a, b)
        .map(|(x1, w1)| {
            let (lo, hi) = ((r.x2_lower)(x1), (r.x2_upper)(x1));
            if hi <= lo {
                return 0.0;
            }
            w1 * rule.mapped(lo, hi).map(|(x2, w2)| w2 * f(x1, x2)).sum::<f64>()
        })
        .sum()
}

/// Tensor Gauss–Legendre over a planar region with order doubling from `order` until two
/// successive results agree to 1e-8. Errors with `NonConvergent` when the final change exceeds 1e-6.
pub fn integrate_region_2d<F: Fn(f64, f64) -> f64>(f: F, r: &Region2D, order: usize) -> Result<QuadratureReport> {
    assert!(order >= 8, "integrate_region_2d needs at least 8 nodes");
    let (a, b) = r.x1_range;
    if !(b > a) {
        return Ok(QuadratureReport { value: 0.0, change: 0.0, order });
    }
    let mut n = order;
    let mut prev = tensor_rule(&f, r, &GaussLegendre::new(n));
    loop {
        let next_n = 2 * n;
        let next = tensor_rule(&f, r, &GaussLegendre::new(next_n));
        let change = (next - prev).abs();
        if change < CONVERGED_CHANGE || next_n >= MAX_ORDER {
            if change > NONCONVERGENT_CHANGE || !next.is_finite() {
                return Err(Error::NonConvergent { change });
            }
            return Ok(QuadratureReport { value: next, change, order: next_n });
        }
        prev = next;
        n = next_n;
    }
}

/// Nested adaptive Simpson over the same region description; an independent cross-check backend.
pub fn integrate_region_2d_simpson<F: Fn(f64, f64) -> f64>(f: F, r: &Region2D, tol: f64) -> f64 {
    let (a, b) = r.x1_range;
    if !(b > a) {
        return 0.0;
    }
    let width = b - a;
    adaptive_simpson(
        |x1| {
            let (lo, hi) = ((r.x2_lower)(x1), (r.x2_upper)(x1));
            if hi <= lo {
                0.0
            } else {
                adaptive_simpson(|x2| f(x1, x2), lo, hi, 0.1 * tol / width)
            }
        },
        a,
        b,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        let rule = GaussLegendre::new(10);
        let v = rule.integrate(|x| x.powi(19) + x.powi(18), -1.0, 1.0);
        assert!((v - 2.0 / 19.0).abs() < 1e-14);
        let s: f64 = rule.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn large_orders_stay_accurate() {
        let rule = GaussLegendre::new(256);
        let v = rule.integrate(f64::exp, 0.0, 1.0);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn unit_square_area() {
        let r = Region2D::rectangle((0.0, 1.0), (0.0, 1.0));
        let rep = integrate_region_2d(|_, _| 1.0, &r, 8).unwrap();
        assert!((rep.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn triangle_area() {
        let r = Region2D::new((0.0, 1.0), |_| 0.0, |x1| 1.0 - x1);
        let rep = integrate_region_2d(|_, _| 1.0, &r, 8).unwrap();
        assert!((rep.value - 0.5).abs() < 1e-14);
    }

    #[test]
    fn graded_rule_handles_endpoint_singularity() {
        let v = graded_gauss_legendre(&GaussLegendre::new(16), |x| 1.0 / x.sqrt(), 0.0, 1.0, 60);
        assert!((v - 2.0).abs() < 1e-10, "{v}");
        let rule = GaussLegendre::new(32);
        let v = graded_gauss_legendre(&rule, |x| 1.0 / x.sqrt() + 1.0 / (1.0 - x).sqrt(), 0.0, 1.0, 60);
        assert!((v - 4.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn simpson_matches_closed_form() {
        let v = adaptive_simpson(f64::sin, 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-11);
    }
}
