use leibniz_core::distributions::{Copula, JointDensity, Marginal};
use leibniz_core::estimators::path_stream;
use leibniz_core::models::{model_log_inventory, model_max_threshold, san_bridge};
use leibniz_core::numerics::{central_difference, solve, SmallMatrix};
use leibniz_core::transforms::{
    build_inventory_chart, chart_contains, d_scalar, s_vector, DomainChart, LinearScale, LogShift, LogShiftCoordinate,
    MonotoneCoordinate, Shift, Transform,
};
use leibniz_core::Error;
use proptest::prelude::*;
use std::sync::Arc;

const EXP: Marginal = Marginal::Exponential { rate: 1.0 };
const Q: f64 = 0.5;

fn inventory_chart(q: f64) -> impl DomainChart {
    let z: Arc<dyn MonotoneCoordinate> = Arc::new(LogShiftCoordinate);
    build_inventory_chart(vec![z.clone(), z], vec![0.0, 0.0], q).unwrap()
}

fn independent_exp() -> JointDensity {
    JointDensity::Copula { copula: Copula::Independence, marginals: [EXP, EXP] }
}

#[test]
fn s_vector_examples() {
    let x = [0.7, 2.1];
    assert_eq!(s_vector(&LogShift { dim: 2 }, &x, 1.3).unwrap(), vec![1.0, 1.0]);
    let s = s_vector(&LinearScale::scaling(2), &x, 2.0).unwrap();
    assert!((s[0] + 0.35).abs() < 1e-15 && (s[1] + 1.05).abs() < 1e-15);
    assert_eq!(s_vector(&Shift { dim: 2 }, &x, 0.4).unwrap(), vec![-1.0, -1.0]);
}

#[test]
fn d_scalar_examples() {
    assert_eq!(d_scalar(&LogShift { dim: 2 }, &independent_exp(), &[0.2, 3.0], 1.0).unwrap(), 2.0);
    let fgm = JointDensity::Copula { copula: Copula::Fgm { alpha: 1.0 }, marginals: [EXP, EXP] };
    let x = [0.5, 0.5];
    let score = fgm.score_x(&x).unwrap();
    let d = d_scalar(&LogShift { dim: 2 }, &fgm, &x, 1.0).unwrap();
    assert!((d + score[0] + score[1]).abs() < 1e-14);
}

#[test]
fn d_scalar_outside_support() {
    let r = d_scalar(&LogShift { dim: 2 }, &independent_exp(), &[-1.0, 1.0], 1.0);
    assert!(matches!(r, Err(Error::OutsideSupport { .. })));
}

#[test]
fn inventory_chart_closed_form() {
    let c = inventory_chart(Q);
    let eq = Q.exp();
    for theta in [0.6, 1.0, 1.2] {
        for v in [[0.3, 0.8], [0.9, 0.1], [0.5, 0.5]] {
            let x = c.h(&v, theta).unwrap();
            let h1 = (eq / theta - theta) * v[0];
            let h2 = (eq / (h1 + theta) - theta) * v[1];
            assert!((x[0] - h1).abs() < 1e-12 && (x[1] - h2).abs() < 1e-12);
            let dh1 = c.dtheta_h(&v, theta).unwrap()[0];
            let expected = -(eq + theta * theta) / (theta * (eq - theta * theta)) * h1;
            assert!((dh1 - expected).abs() < 1e-12, "{dh1} vs {expected}");
        }
    }
}

#[test]
fn inventory_chart_reaches_boundary() {
    let c = inventory_chart(Q);
    let x = c.h(&[1.0, 1.0], 1.0).unwrap();
    assert!(((x[0] + 1.0).ln() + (x[1] + 1.0).ln() - Q).abs() < 1e-10);
}

#[test]
fn chart_membership_examples() {
    let c = inventory_chart(Q);
    assert!(chart_contains(&c, &[0.1, 0.1], 1.0));
    assert!(!chart_contains(&c, &[1.0, 1.0], 1.0));
}

#[test]
fn infeasible_chart() {
    let c = build_inventory_chart(vec![Arc::new(LogShiftCoordinate), Arc::new(LogShiftCoordinate)], vec![0.0, 0.0], Q)
        .unwrap();
    assert!(c.check_feasible(1.0).is_ok());
    assert!(matches!(c.check_feasible(1.5), Err(Error::InfeasibleRegion { .. })));
}

#[test]
fn chart_agrees_with_direct_indicator() {
    let c = inventory_chart(Q);
    let d = independent_exp();
    let mut rng = path_stream(11, 0);
    let mut agree = 0;
    let thetas: Vec<f64> = (0..20).map(|i| 0.3 + 0.045 * f64::from(i)).collect();
    for theta in &thetas {
        for _ in 0..500 {
            let mut x = d.sample(&mut rng).unwrap();
            x.iter_mut().for_each(|v| *v *= 0.5);
            let direct = (x[0] + theta).ln() + (x[1] + theta).ln() <= Q;
            agree += usize::from(direct == chart_contains(&c, &x, *theta));
        }
    }
    assert_eq!(agree, 10_000);
}

#[test]
fn model_charts_match_performance() {
    let bridge = san_bridge(EXP).unwrap();
    let maxt = model_max_threshold(JointDensity::Independent { marginals: vec![Marginal::Uniform01; 2] }).unwrap();
    let inv = model_log_inventory(independent_exp(), Q).unwrap();
    let mut rng = path_stream(12, 0);
    for (m, thetas) in [(&bridge, [1.5, 3.0, 4.5]), (&maxt, [0.2, 0.5, 0.9]), (&inv, [0.5, 1.0, 1.2])] {
        for theta in thetas {
            for _ in 0..2_000 {
                let x = m.density.sample(&mut rng).unwrap();
                let psi = m.performance(&x, theta);
                assert_eq!(m.chart_performance(&x, theta), Some(psi), "{} at {theta}", m.name);
                assert_eq!(m.push_out_performance(&x, theta), Some(psi), "{} at {theta}", m.name);
                let ind = m.indicator.as_ref().unwrap().contains(&x, theta);
                assert_eq!(f64::from(u8::from(ind)), psi, "{} at {theta}", m.name);
            }
        }
    }
}

#[test]
fn san_image_is_nonnegative() {
    let m = san_bridge(EXP).unwrap();
    let t = &m.push_out.as_ref().unwrap().transform;
    assert!(t.image_theta_independent());
    let mut rng = path_stream(13, 0);
    for theta in [0.5, 1.0, 2.0, 4.0] {
        for _ in 0..10_000 {
            let x = m.density.sample(&mut rng).unwrap();
            assert!(t.apply(&x, theta).iter().all(|&y| y >= 0.0));
        }
    }
}

proptest! {
    #[test]
    fn inventory_chart_roundtrip(v1 in 0.001f64..0.999, v2 in 0.001f64..0.999, theta in 0.3f64..1.25) {
        let c = inventory_chart(Q);
        let x = c.h(&[v1, v2], theta).unwrap();
        let back = c.h_inverse(&x, theta).unwrap();
        let again = c.h(&back, theta).unwrap();
        prop_assert!((again[0] - x[0]).abs() < 1e-10 && (again[1] - x[1]).abs() < 1e-10);
        prop_assert!((back[0] - v1).abs() < 1e-9 && (back[1] - v2).abs() < 1e-9);
    }

    #[test]
    fn inventory_dtheta_h_matches_difference(v1 in 0.01f64..0.99, v2 in 0.01f64..0.99, theta in 0.3f64..1.2) {
        let c = inventory_chart(Q);
        let v = [v1, v2];
        let dh = c.dtheta_h(&v, theta).unwrap();
        for i in 0..2 {
            let fd = central_difference(|t| c.h(&v, t).unwrap()[i], theta, 1e-6);
            prop_assert!((dh[i] - fd).abs() <= 1e-5 * fd.abs().max(1e-3));
        }
    }

    #[test]
    fn inventory_velocity_and_cross_partials(v1 in 0.05f64..0.95, v2 in 0.05f64..0.95, theta in 0.4f64..1.2) {
        let c = inventory_chart(Q);
        let x = c.h(&[v1, v2], theta).unwrap();
        let vel = c.velocity(&x, theta).unwrap();
        let dh = c.dtheta_h(&[v1, v2], theta).unwrap();
        prop_assert!((vel[0] - dh[0]).abs() < 1e-10 && (vel[1] - dh[1]).abs() < 1e-10);
        let mut div = 0.0;
        for i in 0..2 {
            div += central_difference(
                |t| {
                    let mut y = x.clone();
                    y[i] = t;
                    c.velocity(&y, theta).unwrap()[i]
                },
                x[i],
                1e-6,
            );
        }
        let cross = c.cross_partials(&x, theta).unwrap();
        prop_assert!((cross - div).abs() <= 1e-5 * div.abs().max(1.0));
    }

    #[test]
    fn linear_scale_s_solves_jacobian_system(x1 in 0.0f64..5.0, x2 in 0.0f64..5.0, x3 in 0.0f64..5.0, theta in 0.1f64..4.0) {
        let t = LinearScale::new(
            SmallMatrix::from_rows(&[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0], vec![0.0, 0.0, 1.0]]),
            "test",
            true,
        ).unwrap();
        let x = [x1, x2, x3];
        let s = s_vector(&t, &x, theta).unwrap();
        let solved = solve(&t.jacobian(&x, theta), &t.dtheta(&x, theta)).unwrap();
        for ((si, xi), v) in s.iter().zip(&x).zip(&solved) {
            prop_assert_eq!(*si, -xi / theta);
            prop_assert!((si - v).abs() < 1e-12 * (1.0 + xi / theta));
        }
        let fd_div: f64 = (0..3)
            .map(|i| central_difference(|v| { let mut y = x; y[i] = v; s_vector(&t, &y, theta).unwrap()[i] }, x[i], 1e-4))
            .sum();
        prop_assert!((t.div_s(&x, theta) - fd_div).abs() < 1e-8);
    }
}
