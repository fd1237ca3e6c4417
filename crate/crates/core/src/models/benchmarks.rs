use super::model::{IndicatorForm, Model, PushOut};
use crate::distributions::{JointDensity, Marginal};
use crate::error::{Error, Result};
use crate::numerics::SmallMatrix;
use crate::transforms::{
    build_inventory_chart, Bound, LinearChart, LinearScale, LogShift, LogShiftCoordinate, MonotoneCoordinate, RegionU,
    Shift, SumBelow, Transform,
};
use std::sync::Arc;

fn require_support(d: &JointDensity, dim: usize, lo: f64, hi: f64, what: &str) -> Result<()> {
    d.validate()?;
    let ok = d.dim() == dim && d.support().iter().all(|s| s.lo == lo && s.hi == hi);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} needs a density supported on ({lo}, {hi})^{dim}")))
    }
}

/// ψ = 1{max(X1, X2) ≤ θ} on (0, 1)².
pub fn model_max_threshold(d: JointDensity) -> Result<Model> {
    require_support(&d, 2, 0.0, 1.0, "max-threshold model")?;
    let unit = RegionU::new(vec![Bound::closed(0.0, 1.0); 2]);
    let chart = LinearChart::new(SmallMatrix::identity(2), unit.clone())?;
    Ok(Model {
        name: "max_threshold".into(),
        density: d,
        performance: Arc::new(|x, t| if x[0].max(x[1]) <= t { 1.0 } else { 0.0 }),
        push_out: Some(PushOut {
            transform: Arc::new(Shift { dim: 2 }),
            outer: Arc::new(RegionU::new(vec![Bound::closed(f64::NEG_INFINITY, 0.0); 2])),
        }),
        chart: Some(Arc::new(chart)),
        indicator: Some(IndicatorForm { map: Arc::new(|x, t| x.iter().map(|v| v / t).collect()), region: unit }),
        factor: None,
        theta_range: (0.0, 1.0),
        q: None,
    })
}

/// ψ = 1{log(X1 + θ) + log(X2 + θ) < q} on ℝ₊².
pub fn model_log_inventory(d: JointDensity, q: f64) -> Result<Model> {
    require_support(&d, 2, 0.0, f64::INFINITY, "log-inventory model")?;
    if q.is_nan() {
        return Err(Error::InvalidParameter("q must be a number".into()));
    }
    let coord: Arc<dyn MonotoneCoordinate> = Arc::new(LogShiftCoordinate);
    let chart = build_inventory_chart(vec![coord.clone(), coord], vec![0.0, 0.0], q)?;
    let hi = (0.5 * q).exp();
    Ok(Model {
        name: "log_inventory".into(),
        density: d,
        performance: Arc::new(move |x, t| if (x[0] + t).ln() + (x[1] + t).ln() < q { 1.0 } else { 0.0 }),
        push_out: Some(PushOut { transform: Arc::new(LogShift { dim: 2 }), outer: Arc::new(SumBelow { q }) }),
        chart: Some(Arc::new(chart)),
        indicator: Some(IndicatorForm {
            map: Arc::new(|x, t| {
                let a = (x[0] + t).ln();
                vec![a + t.ln(), a + (x[1] + t).ln()]
            }),
            region: RegionU::new(vec![Bound::open(f64::NEG_INFINITY, q); 2]),
        }),
        factor: None,
        theta_range: (0.0, if hi > 0.0 { hi } else { f64::INFINITY }),
        q: Some(q),
    })
}

/// Stochastic activity network: ψ = Π_i 1{0 ≤ Σ_k a_ik X_k ≤ θ} with independent edge lengths.
///
/// Rows of the push-out matrix are the paths followed by unit rows for every unselected edge,
/// so g = M x / θ maps ℝ₊ⁿ onto a cone that does not move with θ.
pub fn model_san(edge_laws: Vec<Marginal>, paths: Vec<Vec<u8>>, selected: Vec<usize>) -> Result<Model> {
    let n = edge_laws.len();
    let density = JointDensity::Independent { marginals: edge_laws };
    density.validate()?;
    if density.support().iter().any(|s| s.lo < 0.0) {
        return Err(Error::InvalidParameter("edge lengths must be nonnegative".into()));
    }
    let m = paths.len();
    if m == 0 || m > n || selected.len() != m {
        return Err(Error::InvalidParameter(format!(
            "need one selected edge per path: {m} paths, {} selected, {n} edges",
            selected.len()
        )));
    }
    for (i, p) in paths.iter().enumerate() {
        if p.len() != n || p.iter().any(|&a| a > 1) {
            return Err(Error::InvalidParameter(format!("path {i} must be a 0/1 row of length {n}")));
        }
        if paths[..i].contains(p) {
            return Err(Error::InvalidParameter(format!("path {i} repeats an earlier row")));
        }
    }
    let mut seen = vec![false; n];
    for &e in &selected {
        if e >= n || seen[e] {
            return Err(Error::InvalidParameter(format!("selected edge {e} is invalid or repeated")));
        }
        seen[e] = true;
    }
    let sub = SmallMatrix::from_rows(
        &paths.iter().map(|p| selected.iter().map(|&e| f64::from(p[e])).collect()).collect::<Vec<_>>(),
    );
    if !(sub.det().abs() > crate::numerics::SINGULAR_THRESHOLD) {
        return Err(Error::RankDeficientIncidence);
    }
    let mut rows: Vec<Vec<f64>> = paths.iter().map(|p| p.iter().map(|&a| f64::from(a)).collect()).collect();
    for e in (0..n).filter(|e| !seen[*e]) {
        let mut r = vec![0.0; n];
        r[e] = 1.0;
        rows.push(r);
    }
    let matrix = SmallMatrix::from_rows(&rows);
    let mut bounds = vec![Bound::closed(0.0, 1.0); m];
    bounds.extend(std::iter::repeat_n(Bound::closed(0.0, f64::INFINITY), n - m));
    let region = RegionU::new(bounds);
    let transform = LinearScale::new(matrix.clone(), "g(Ω, θ) = M ℝ₊ⁿ, a cone that does not depend on θ", true)?;
    let chart = LinearChart::new(matrix, region.clone())?;
    let t2 = transform.clone();
    let perf_paths = paths.clone();
    Ok(Model {
        name: "san".into(),
        density,
        performance: Arc::new(move |x, t| {
            let ok = perf_paths.iter().all(|p| {
                let len: f64 = p.iter().zip(x).map(|(&a, v)| f64::from(a) * v).sum();
                (0.0..=t).contains(&len)
            });
            if ok {
                1.0
            } else {
                0.0
            }
        }),
        push_out: Some(PushOut { transform: Arc::new(transform), outer: Arc::new(region.clone()) }),
        chart: Some(Arc::new(chart)),
        indicator: Some(IndicatorForm { map: Arc::new(move |x, t| t2.apply(x, t)), region }),
        factor: None,
        theta_range: (0.0, f64::INFINITY),
        q: None,
    })
}

/// Bridge network with edges s→a, s→b, a→b, a→t, b→t; paths {1,4}, {2,5}, {1,3,5};
/// the push-out acts on edges 4, 5, 3.
pub fn san_bridge(edge: Marginal) -> Result<Model> {
    model_san(vec![edge; 5], vec![vec![1, 0, 0, 1, 0], vec![0, 1, 0, 0, 1], vec![1, 0, 1, 0, 1]], vec![3, 4, 2])
}

/// Smooth push-out performance φ(g(x, θ)) over a given law; no chart.
pub fn model_push_out(
    name: &str,
    density: JointDensity,
    transform: Arc<dyn Transform>,
    outer: Arc<dyn crate::transforms::OuterFunction>,
    theta_range: (f64, f64),
) -> Result<Model> {
    density.validate()?;
    if transform.dim() != density.dim() {
        return Err(Error::InvalidParameter("transform and density dimensions differ".into()));
    }
    let (t, o) = (transform.clone(), outer.clone());
    Ok(Model {
        name: name.into(),
        density,
        performance: Arc::new(move |x, th| o.value(&t.apply(x, th))),
        push_out: Some(PushOut { transform, outer }),
        chart: None,
        indicator: None,
        factor: None,
        theta_range,
        q: None,
    })
}
