use super::quadrature::GaussLegendre;
use std::sync::OnceLock;

const NODES: usize = 64;

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NODES))
}

/// Unnormalised bump exp(-1/(1-z^2)) on |z| < 1.
pub fn bump(z: f64) -> f64 {
    if z.abs() < 1.0 {
        (-1.0 / (1.0 - z * z)).exp()
    } else {
        0.0
    }
}

/// (phi * q_j)(y) with q_j(z) = j·phi0(j z) and phi0 the unit-mass bump, on a 64-node rule
/// over [y - 1/j, y + 1/j]. The kernel is normalised against the same nodes, so constants are
/// reproduced to rounding.
pub fn mollify_1d<F: Fn(f64) -> f64>(phi: F, j: u32, y: f64) -> f64 {
    assert!(j >= 1);
    let jf = f64::from(j);
    let (mut num, mut mass) = (0.0, 0.0);
    for (z, w) in rule().mapped(-1.0 / jf, 1.0 / jf) {
        let k = w * bump(jf * z);
        num += k * phi(y - z);
        mass += k;
    }
    num / mass
}
