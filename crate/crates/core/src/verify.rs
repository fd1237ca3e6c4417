//! The invariant suite behind `leibniz verify`: every check returns its worst error against a
//! pinned tolerance.

use crate::distributions::{Copula, JointDensity, Marginal};
use crate::estimators::{
    dpa_derivative, estimate, option_threshold_derivative, surface_term, EstimatorConfig, EstimatorId,
};
use crate::models::{
    model_american_option, model_gg1, model_log_inventory, model_max_threshold, model_push_out, AmericanOptionParams,
    GG1Params, Interarrival, QueueStatistic, ServiceLaw,
};
use crate::numerics::builtin_cases;
use crate::numerics::leibniz_rules::verify_leibniz_rules;
use crate::oracle::{truth_gg1_two_customers, truth_log_inventory, truth_option_2period, verify_identity_ipalr};
use crate::transforms::{LogShift, Polynomial};
use crate::Result;
use serde::Serialize;
use std::sync::Arc;

/// Seed shared by every Monte Carlo check of the suite.
pub const VERIFY_SEED: u64 = 20_240_601;
const MC_REPS: usize = 10_000;
/// Exact value of −E(ψ | X_i = 0) summed over the two faces for independent Exp(1) inputs.
const INDEPENDENT_SURFACE: f64 = -0.954_572_482_030_331;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantResult {
    pub name: String,
    pub passed: bool,
    /// Worst observed error, in the units named by `tolerance`.
    pub max_error: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub results: Vec<InvariantResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InvariantResult> {
        self.results.iter().filter(|r| !r.passed)
    }
}

fn check(name: &str, max_error: f64, tolerance: f64, detail: String) -> InvariantResult {
    InvariantResult { name: name.into(), passed: max_error <= tolerance, max_error, tolerance, detail }
}

fn failed(name: &str, err: crate::Error) -> InvariantResult {
    InvariantResult {
        name: name.into(),
        passed: false,
        max_error: f64::INFINITY,
        tolerance: 0.0,
        detail: err.to_string(),
    }
}

fn run(name: &str, f: impl FnOnce() -> Result<InvariantResult>) -> InvariantResult {
    f().unwrap_or_else(|e| failed(name, e))
}

/// Independent Exp(1), FGM(1)+Exp(1), bivariate lognormal ρ ∈ {0.1, 0.9}, and Clayton(1) with
/// Gamma(a) marginals for a ∈ {0.5, 1, 2}.
pub fn log_inventory_configurations() -> Vec<(&'static str, JointDensity)> {
    let e = Marginal::Exponential { rate: 1.0 };
    let clayton = |shape| JointDensity::Copula {
        copula: Copula::Clayton { alpha: 1.0 },
        marginals: [Marginal::Gamma { shape }; 2],
    };
    vec![
        ("independent", JointDensity::Copula { copula: Copula::Independence, marginals: [e, e] }),
        ("fgm", JointDensity::Copula { copula: Copula::Fgm { alpha: 1.0 }, marginals: [e, e] }),
        ("lognormal_0.1", JointDensity::BivariateLognormal { rho: 0.1 }),
        ("lognormal_0.9", JointDensity::BivariateLognormal { rho: 0.9 }),
        ("clayton_0.5", clayton(0.5)),
        ("clayton_1", clayton(1.0)),
        ("clayton_2", clayton(2.0)),
    ]
}

fn mc_config() -> EstimatorConfig {
    EstimatorConfig { n_reps: MC_REPS, seed: VERIFY_SEED, ..EstimatorConfig::default() }
}

fn leibniz_rules() -> InvariantResult {
    run("leibniz_rules", || {
        let theta = 0.8;
        let mut worst = 0.0f64;
        let mut detail = Vec::new();
        for case in builtin_cases() {
            let c = verify_leibniz_rules(&case, theta)?;
            let forms = (c.surface_form - c.divergence_form).abs();
            let fd = (c.surface_form - c.reference).abs().max((c.divergence_form - c.reference).abs());
            worst = worst.max(forms / 1e-6).max(fd / 1e-5);
            detail.push(format!("{}: forms {forms:.1e}, fd {fd:.1e}", case.name));
            if case.name == "disk" {
                let exact = (c.surface_form - 2.0 * std::f64::consts::PI * theta).abs();
                worst = worst.max(exact / 1e-6);
            }
        }
        Ok(check("leibniz_rules", worst, 1.0, detail.join("; ")))
    })
}

fn ipalr_identity() -> InvariantResult {
    run("ipalr_identity", || {
        let e = Marginal::Exponential { rate: 1.0 };
        let density = JointDensity::Copula { copula: Copula::Fgm { alpha: 0.7 }, marginals: [e, e] };
        let shift = Arc::new(LogShift { dim: 2 });
        let outers = [
            Polynomial::linear(vec![1.0, 1.0]),
            Polynomial::linear(vec![0.0, 0.0]),
            Polynomial { linear: vec![0.3, -1.2], quadratic: vec![vec![0.5, 0.25], vec![0.0, -0.75]] },
        ];
        let mut worst = 0.0f64;
        for outer in outers {
            let m = model_push_out("smooth", density.clone(), shift.clone(), Arc::new(outer), (0.0, f64::INFINITY))?;
            worst = worst.max(verify_identity_ipalr(&m, 500, (0.5, 1.5), VERIFY_SEED)?);
        }
        Ok(check("ipalr_identity", worst, 1e-5, "500 points each for linear, constant and quadratic φ".into()))
    })
}

fn oracle_consistency() -> InvariantResult {
    run("oracle_consistency", || {
        let mut worst = 0.0f64;
        for (_, d) in log_inventory_configurations() {
            let r = truth_log_inventory(&d, 0.5, 1.0)?;
            worst = worst.max((r.cross_check - r.derivative).abs() / 1e-7).max(r.step_change / 1e-6);
        }
        Ok(check("oracle_consistency", worst, 1.0, "backend gap / 1e-7 and step change / 1e-6".into()))
    })
}

fn surface_sign() -> InvariantResult {
    run("surface_sign", || {
        let e = Marginal::Exponential { rate: 1.0 };
        let m = model_log_inventory(JointDensity::Copula { copula: Copula::Independence, marginals: [e, e] }, 0.5)?;
        let s = surface_term(&m, 1.0, &mc_config())?;
        let z = (s.value - INDEPENDENT_SURFACE).abs() / s.std_error;
        Ok(check(
            "surface_sign",
            z,
            3.0,
            format!("surface {:.4} ({:.4}) vs {INDEPENDENT_SURFACE:.4}", s.value, s.std_error),
        ))
    })
}

fn unbiasedness() -> InvariantResult {
    run("unbiasedness", || {
        let cfg = mc_config();
        let mut worst = 0.0f64;
        let mut detail = Vec::new();
        for (name, d) in log_inventory_configurations() {
            let truth = truth_log_inventory(&d, 0.5, 1.0)?.derivative;
            let m = model_log_inventory(d, 0.5)?;
            let mut ids = vec![EstimatorId::Fd, EstimatorId::LeibnizDivergence];
            if !name.starts_with("clayton_0.5") && !name.starts_with("clayton_1") {
                ids.push(EstimatorId::LeibnizIntegral);
            }
            for id in ids {
                let r = estimate(&m, id, 1.0, &cfg)?;
                let z = (r.mean - truth).abs() / r.std_error;
                worst = worst.max(z);
                detail.push(format!("{name}/{id}: {z:.2}"));
            }
        }
        Ok(check("unbiasedness", worst, 3.0, detail.join(", ")))
    })
}

fn estimator_agreement() -> InvariantResult {
    run("estimator_agreement", || {
        let cfg = mc_config();
        let mut worst = 0.0f64;
        for (name, d) in log_inventory_configurations() {
            if name == "clayton_0.5" || name == "clayton_1" {
                continue;
            }
            let m = model_log_inventory(d, 0.5)?;
            let a = estimate(&m, EstimatorId::LeibnizDivergence, 1.0, &cfg)?;
            let b = estimate(&m, EstimatorId::LeibnizIntegral, 1.0, &cfg)?;
            worst = worst.max((a.mean - b.mean).abs() / (a.std_error + b.std_error));
        }
        Ok(check("estimator_agreement", worst, 3.0, "|divergence − integral| / (SE₁ + SE₂)".into()))
    })
}

fn surface_gating() -> InvariantResult {
    run("surface_gating", || {
        let mut cfg = mc_config();
        cfg.n_reps = 2_000;
        cfg.surface_reps = Some(1_500);
        let configs = log_inventory_configurations();
        let mut bad = 0.0;
        let mut detail = Vec::new();
        for (name, d) in configs {
            let expected = match name {
                "fgm" => 2 * 1_500,
                _ => 0,
            };
            let m = model_log_inventory(d, 0.5)?;
            let r = estimate(&m, EstimatorId::LeibnizIntegral, 1.0, &cfg)?;
            let reuse = if name == "independent" { 2 * 2_000 } else { 0 };
            if r.conditional_draws != expected || r.main_stream_face_evaluations != reuse {
                bad += 1.0;
            }
            detail.push(format!("{name}: {} draws, {} reused", r.conditional_draws, r.main_stream_face_evaluations));
        }
        Ok(check("surface_gating", bad, 0.0, detail.join(", ")))
    })
}

fn determinism() -> InvariantResult {
    run("determinism", || {
        let m = model_log_inventory(log_inventory_configurations().swap_remove(1).1, 0.5)?;
        let mut cfg = mc_config();
        cfg.n_reps = 2_000;
        cfg.workers = 1;
        let a = estimate(&m, EstimatorId::LeibnizIntegral, 1.0, &cfg)?;
        cfg.workers = 4;
        let b = estimate(&m, EstimatorId::LeibnizIntegral, 1.0, &cfg)?;
        let same = a.mean.to_bits() == b.mean.to_bits() && a.std_error.to_bits() == b.std_error.to_bits();
        Ok(check("determinism", if same { 0.0 } else { (a.mean - b.mean).abs() }, 0.0, "1 vs 4 workers".into()))
    })
}

fn max_threshold() -> InvariantResult {
    run("max_threshold", || {
        let cfg = mc_config();
        let mut worst = 0.0f64;
        let cases = [
            (JointDensity::Independent { marginals: vec![Marginal::Uniform01; 2] }, 1.0),
            (JointDensity::Independent { marginals: vec![Marginal::Power { exponent: 1.0 }; 2] }, 0.5),
        ];
        for (d, exact) in cases {
            let m = model_max_threshold(d)?;
            let r = estimate(&m, EstimatorId::LeibnizDivergence, 0.5, &cfg)?;
            worst = worst.max((r.mean - exact).abs() / r.std_error);
        }
        Ok(check("max_threshold", worst, 3.0, "divergence estimator vs 2θ and 4θ³ in SE units".into()))
    })
}

fn instability() -> InvariantResult {
    run("instability", || {
        let cfg = mc_config();
        let configs = log_inventory_configurations();
        let get = |n: &str| configs.iter().find(|c| c.0 == n).expect("listed").1.clone();
        let heavy = estimate(&model_log_inventory(get("clayton_0.5"), 0.5)?, EstimatorId::LeibnizIntegral, 1.0, &cfg)?;
        let light = estimate(&model_log_inventory(get("clayton_2"), 0.5)?, EstimatorId::LeibnizIntegral, 1.0, &cfg)?;
        let bad = f64::from(u8::from(!heavy.unstable)) + f64::from(u8::from(light.unstable));
        Ok(check(
            "instability",
            bad,
            0.0,
            format!("gamma 0.5 unstable={}, gamma 2 unstable={}", heavy.unstable, light.unstable),
        ))
    })
}

fn conditional_estimators() -> InvariantResult {
    run("conditional_estimators", || {
        let cfg = mc_config();
        let opt = model_american_option(AmericanOptionParams::default())?;
        let truth = truth_option_2period(&opt)?.derivative;
        let r = option_threshold_derivative(&opt, 0, &cfg)?;
        let z_opt = (r.mean - truth).abs() / r.std_error;
        let queue = model_gg1(GG1Params {
            n_customers: 2,
            service_plus: ServiceLaw::constant(1.0),
            service_minus: ServiceLaw::constant(0.5),
            interarrival: Interarrival::Deterministic { value: 0.75 },
            statistic: QueueStatistic::TotalWait,
        })?;
        let truth_q = truth_gg1_two_customers(&queue, 0.5)?.derivative;
        let q = dpa_derivative(&queue, 0.5, &cfg)?;
        let err_q = (q.mean - truth_q).abs();
        let worst = z_opt.max(if err_q < 1e-9 { 0.0 } else { err_q / q.std_error.max(1e-12) });
        Ok(check("conditional_estimators", worst, 3.0, format!("option z = {z_opt:.2}, queue error = {err_q:.1e}")))
    })
}

/// Runs every invariant.
pub fn run_invariants() -> VerifyReport {
    VerifyReport {
        results: vec![
            leibniz_rules(),
            ipalr_identity(),
            oracle_consistency(),
            surface_sign(),
            surface_gating(),
            unbiasedness(),
            estimator_agreement(),
            max_threshold(),
            instability(),
            conditional_estimators(),
            determinism(),
        ],
    }
}
