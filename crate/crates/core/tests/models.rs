use leibniz_core::distributions::{Copula, JointDensity, Marginal};
use leibniz_core::estimators::path_stream;
use leibniz_core::models::{
    gbm_step, gbm_step_inverse, model_american_option, model_gg1, model_log_inventory, model_max_threshold, model_san,
    san_bridge, AmericanOptionParams, Branch, GG1Params, Interarrival, QueueDraw, QueueStatistic, ServiceLaw,
};
use leibniz_core::Error;
use proptest::prelude::*;

const EXP: Marginal = Marginal::Exponential { rate: 1.0 };

#[test]
fn max_threshold_performance() {
    let m = model_max_threshold(JointDensity::Independent { marginals: vec![Marginal::Uniform01; 2] }).unwrap();
    assert_eq!(m.performance(&[0.3, 0.4], 0.5), 1.0);
    assert_eq!(m.performance(&[0.6, 0.4], 0.5), 0.0);
    assert!(m.check_theta(0.5).is_ok());
    assert!(matches!(m.check_theta(1.0), Err(Error::ThetaOutOfRange { .. })));
}

#[test]
fn max_threshold_needs_unit_square() {
    let d = JointDensity::Copula { copula: Copula::Independence, marginals: [EXP, EXP] };
    assert!(matches!(model_max_threshold(d), Err(Error::InvalidParameter(_))));
}

#[test]
fn log_inventory_performance() {
    let d = JointDensity::Copula { copula: Copula::Independence, marginals: [EXP, EXP] };
    let m = model_log_inventory(d, 0.5).unwrap();
    assert_eq!(m.performance(&[0.1, 0.1], 1.0), 1.0);
    assert_eq!(m.performance(&[1.0, 1.0], 1.0), 0.0);
    assert!(m.check_theta(1.0).is_ok());
    assert!(m.check_theta(0.5f64.exp().sqrt() + 0.01).is_err());
}

#[test]
fn log_inventory_needs_positive_support() {
    let d = JointDensity::Copula {
        copula: Copula::Gaussian { rho: 0.2 },
        marginals: [Marginal::Normal { mu: 0.0, sigma: 1.0 }; 2],
    };
    assert!(model_log_inventory(d, 0.5).is_err());
}

#[test]
fn san_performance_counts_paths() {
    let m = san_bridge(EXP).unwrap();
    let x = [1.0, 2.0, 0.5, 1.5, 0.7];
    // Path lengths 2.5, 2.7 and 2.2.
    assert_eq!(m.performance(&x, 2.7), 1.0);
    assert_eq!(m.performance(&x, 2.6), 0.0);
}

#[test]
fn san_rank_deficient_selection() {
    let r = model_san(vec![EXP; 3], vec![vec![1, 1, 0], vec![1, 1, 1]], vec![0, 1]);
    assert!(matches!(r, Err(Error::RankDeficientIncidence)));
}

#[test]
fn san_rejects_bad_incidence() {
    assert!(model_san(vec![EXP; 2], vec![vec![1, 0], vec![1, 0]], vec![0, 1]).is_err());
    assert!(model_san(vec![EXP; 2], vec![vec![1, 2]], vec![0]).is_err());
    assert!(model_san(vec![EXP; 2], vec![vec![1, 1]], vec![0, 1]).is_err());
    assert!(model_san(vec![Marginal::Normal { mu: 0.0, sigma: 1.0 }], vec![vec![1]], vec![0]).is_err());
}

fn benchmark_option() -> leibniz_core::models::AmericanOption {
    model_american_option(AmericanOptionParams::default()).unwrap()
}

#[test]
fn option_threshold_validation() {
    let mut p = AmericanOptionParams::default();
    p.thresholds = vec![95.0];
    assert!(matches!(model_american_option(p), Err(Error::InvalidThresholds(_))));
    let mut p = AmericanOptionParams::default();
    p.dividends = vec![1.0, 1.0];
    assert!(matches!(model_american_option(p), Err(Error::InvalidParameter(_))));
}

#[test]
fn option_without_volatility_never_exercises_early() {
    let mut p = AmericanOptionParams::default();
    p.sigma = 1e-10;
    p.thresholds = vec![150.0];
    let opt = model_american_option(p.clone()).unwrap();
    let mut rng = path_stream(21, 0);
    let s_tilde = opt.s_tilde0() * (p.rate * 1.0).exp();
    let expected = (-p.rate).exp() * (s_tilde - p.strike).max(0.0);
    for _ in 0..100 {
        let x: Vec<f64> = (0..2).map(|_| Marginal::Normal { mu: 0.0, sigma: 1.0 }.sample(&mut rng)).collect();
        assert!((opt.payoff(&x, None) - expected).abs() < 1e-6);
        assert_eq!(opt.cum_dividend_prices(&x).len(), 1);
    }
}

#[test]
fn gbm_inverse() {
    let y = gbm_step(0.37, 100.0, 0.5, 0.05, 0.2);
    assert!((gbm_step_inverse(y, 100.0, 0.5, 0.05, 0.2) - 0.37).abs() < 1e-12);
}

proptest! {
    #[test]
    fn option_payoff_nonnegative(x1 in -6.0f64..6.0, x2 in -6.0f64..6.0) {
        prop_assert!(benchmark_option().payoff(&[x1, x2], None) >= 0.0);
    }

    #[test]
    fn option_branch_hook_is_consistent(x1 in -4.0f64..4.0, x2 in -4.0f64..4.0) {
        let opt = benchmark_option();
        let x = [x1, x2];
        let cum = opt.cum_dividend_prices(&x)[0];
        let branch = Branch { date: 0, price: cum, exercise: None };
        prop_assert_eq!(opt.payoff(&x, Some(branch)).to_bits(), opt.payoff(&x, None).to_bits());
        let forced = Branch { date: 0, price: cum, exercise: Some(cum > opt.params.thresholds[0]) };
        prop_assert_eq!(opt.payoff(&x, Some(forced)).to_bits(), opt.payoff(&x, None).to_bits());
    }

    #[test]
    fn queue_is_zero_without_service(x in prop::collection::vec(0.0f64..1.0, 5), y in prop::collection::vec(0.0f64..3.0, 4), theta in 0.01f64..0.99) {
        let q = model_gg1(GG1Params {
            n_customers: 5,
            service_plus: ServiceLaw::constant(0.0),
            service_minus: ServiceLaw::constant(0.0),
            interarrival: Interarrival::Exponential { rate: 1.0 },
            statistic: QueueStatistic::MeanWait,
        }).unwrap();
        let r = q.evaluate(&QueueDraw { x, y }, theta);
        prop_assert_eq!(r, (0.0, 0.0));
    }

    #[test]
    fn queue_waits_nonnegative(x in prop::collection::vec(0.0f64..1.0, 6), y in prop::collection::vec(0.0f64..2.0, 5), theta in 0.01f64..0.99) {
        let q = model_gg1(GG1Params {
            n_customers: 6,
            service_plus: ServiceLaw { c0: 0.5, c_theta: 1.0, ..ServiceLaw::default() },
            service_minus: ServiceLaw { c0: 0.2, c_x: 0.5, ..ServiceLaw::default() },
            interarrival: Interarrival::Exponential { rate: 1.0 },
            statistic: QueueStatistic::TotalWait,
        }).unwrap();
        let (total, _) = q.evaluate(&QueueDraw { x, y }, theta);
        prop_assert!(total >= 0.0);
    }
}

#[test]
fn underloaded_deterministic_queue_never_waits() {
    let q = model_gg1(GG1Params {
        n_customers: 10,
        service_plus: ServiceLaw::constant(1.0),
        service_minus: ServiceLaw::constant(1.0),
        interarrival: Interarrival::Deterministic { value: 2.0 },
        statistic: QueueStatistic::MeanWait,
    })
    .unwrap();
    let mut rng = path_stream(22, 0);
    for _ in 0..100 {
        assert_eq!(q.evaluate(&q.draw(&mut rng), 0.5), (0.0, 0.0));
    }
}

#[test]
fn queue_lindley_by_hand() {
    let q = model_gg1(GG1Params {
        n_customers: 3,
        service_plus: ServiceLaw::constant(2.0),
        service_minus: ServiceLaw::constant(1.0),
        interarrival: Interarrival::Deterministic { value: 1.0 },
        statistic: QueueStatistic::TotalWait,
    })
    .unwrap();
    let d = QueueDraw { x: vec![0.1, 0.9, 0.2], y: vec![1.0, 1.0] };
    // W = 0, 1, 1.
    assert_eq!(q.evaluate(&d, 0.5).0, 2.0);
}

#[test]
fn queue_rejects_negative_service() {
    let r = model_gg1(GG1Params {
        n_customers: 2,
        service_plus: ServiceLaw { c0: 0.1, c_theta: -1.0, ..ServiceLaw::default() },
        service_minus: ServiceLaw::constant(1.0),
        interarrival: Interarrival::Deterministic { value: 1.0 },
        statistic: QueueStatistic::MeanWait,
    });
    assert!(r.is_err());
}
