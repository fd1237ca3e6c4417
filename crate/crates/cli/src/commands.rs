//! Subcommands of the `leibniz` binary.

use crate::config::{build_experiment, ConfigError, Experiment, ModelSpec, OutputFormat, RunConfig, DEFAULT_SEED};
use crate::output::{format_cell, summary_table, write_rows, ResultRow};
use clap::{Args, Parser, Subcommand};
use leibniz_core::estimators::{
    default_workers, dpa_derivative, estimate, option_fd_estimate, option_threshold_derivative, queue_fd_estimate,
    DerivativeEstimate, EstimatorConfig, EstimatorId,
};
use leibniz_core::models::model_log_inventory;
use leibniz_core::oracle::{
    truth_gg1_two_customers, truth_log_inventory, truth_max_threshold, truth_option_2period, OracleReport,
};
use leibniz_core::verify::{log_inventory_configurations, run_invariants};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_ESTIMATOR: u8 = 3;
pub const EXIT_NO_ORACLE: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "leibniz", version, about = "Stochastic derivative estimators for discontinuous performances")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct RunFlags {
    /// Master seed; overrides the config file and LEIBNIZ_SEED.
    #[arg(long, env = "LEIBNIZ_SEED")]
    pub seed: Option<u64>,
    /// Replications per estimator.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Worker threads (default: available parallelism).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Record wall-clock runtimes; without it runtime_s is 0 so outputs are reproducible byte for byte.
    #[arg(long)]
    pub timing: bool,
}

impl RunFlags {
    fn workers(&self) -> usize {
        self.workers.map_or_else(default_workers, |w| w as usize)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the estimators listed in a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Seven-configuration log-inventory grid: FD, Leibniz integral and divergence, plus oracle.
    Table1 {
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run the invariant suite.
    Verify {
        #[arg(short, long)]
        verbose: bool,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the oracle derivative for the model of a config file.
    Oracle {
        #[arg(long)]
        config: PathBuf,
    },
}

pub fn dispatch(cli: Cli) -> u8 {
    match cli.command {
        Command::Run { config, flags } => cmd_run(&config, &flags),
        Command::Table1 { flags } => cmd_table1(&flags),
        Command::Verify { verbose, format, out } => cmd_verify(verbose, format, out.as_deref()),
        Command::Oracle { config } => cmd_oracle(&config),
    }
}

fn config_error(e: &ConfigError) -> u8 {
    eprintln!("config error: {e}");
    EXIT_CONFIG
}

/// Runs one estimator on a built experiment.
pub fn run_estimator(
    exp: &Experiment,
    id: EstimatorId,
    theta: f64,
    cfg: &EstimatorConfig,
) -> leibniz_core::Result<DerivativeEstimate> {
    match exp {
        Experiment::Density(m) => estimate(m, id, theta, cfg),
        Experiment::Option { option, date } => match id {
            EstimatorId::ConditionalLeibniz => option_threshold_derivative(option, *date, cfg),
            _ => option_fd_estimate(option, *date, cfg.fd_delta, cfg),
        },
        Experiment::Queue(q) => match id {
            EstimatorId::Dpa => dpa_derivative(q, theta, cfg),
            _ => queue_fd_estimate(q, theta, cfg.fd_delta, cfg),
        },
    }
}

/// Oracle derivative for a built experiment.
pub fn experiment_oracle(exp: &Experiment, spec: &ModelSpec, theta: f64) -> leibniz_core::Result<OracleReport> {
    use leibniz_core::Error;
    match (exp, spec) {
        (Experiment::Density(m), ModelSpec::LogInventory { q, .. }) => truth_log_inventory(&m.density, *q, theta),
        (Experiment::Density(m), ModelSpec::MaxThreshold { .. }) => truth_max_threshold(&m.density, theta),
        (Experiment::Option { option, .. }, _) => truth_option_2period(option),
        (Experiment::Queue(q), _) => truth_gg1_two_customers(q, theta),
        (Experiment::Density(m), _) => Err(Error::NoOracle(format!("no oracle ships for model `{}`", m.name))),
    }
}

fn apply_flags(cfg: &mut RunConfig, flags: &RunFlags) {
    if let Some(s) = flags.seed {
        cfg.seed = s;
    }
    if let Some(n) = flags.reps {
        cfg.n_reps = n;
    }
    if let Some(p) = &flags.out {
        cfg.output_path = Some(p.clone());
    }
    if let Some(f) = flags.format {
        cfg.format = f;
    }
}

fn emit(rows: &[ResultRow], format: OutputFormat, path: Option<&Path>) -> std::io::Result<()> {
    match path {
        Some(p) => write_rows(rows, format, std::fs::File::create(p)?),
        None => write_rows(rows, format, std::io::stdout().lock()),
    }
}

/// Rows for every estimator of a validated config.
pub fn run_rows(cfg: &RunConfig, exp: &Experiment, workers: usize, timing: bool) -> Result<Vec<ResultRow>, String> {
    let ecfg = cfg.estimator_config(workers);
    let oracle =
        if cfg.oracle { experiment_oracle(exp, &cfg.model, cfg.theta).ok().map(|r| r.derivative) } else { None };
    cfg.estimators
        .iter()
        .map(|&id| {
            let est = run_estimator(exp, id, cfg.theta, &ecfg).map_err(|e| format!("{id}: {e}"))?;
            Ok(ResultRow {
                model: exp.model_id(),
                distribution: exp.distribution_id(),
                estimator: id.to_string(),
                theta: cfg.theta,
                mean: est.mean,
                std_error: est.std_error,
                n_reps: est.n_reps,
                runtime_s: if timing { est.runtime_s } else { 0.0 },
                unstable: est.unstable,
                rejected: est.rejected_samples,
                oracle,
                seed: cfg.seed,
            })
        })
        .collect()
}

pub fn cmd_run(path: &Path, flags: &RunFlags) -> u8 {
    let mut cfg = match RunConfig::load(path) {
        Ok(c) => c,
        Err(e) => return config_error(&e),
    };
    apply_flags(&mut cfg, flags);
    let exp = match build_experiment(&cfg) {
        Ok(e) => e,
        Err(e) => return config_error(&e),
    };
    let rows = match run_rows(&cfg, &exp, flags.workers(), flags.timing) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("estimator failure: {e}");
            return EXIT_ESTIMATOR;
        }
    };
    if let Err(e) = emit(&rows, cfg.format, cfg.output_path.as_deref()) {
        eprintln!("cannot write results: {e}");
        return EXIT_ESTIMATOR;
    }
    if cfg.output_path.is_some() {
        print!("{}", summary_table(&rows));
    }
    EXIT_OK
}

const TABLE1_LABELS: [&str; 7] = [
    "Independence Exp(1)",
    "FGM(1) Exp(1)",
    "Lognormal rho=0.1",
    "Lognormal rho=0.9",
    "Clayton(1) Gamma(0.5)",
    "Clayton(1) Gamma(1)",
    "Clayton(1) Gamma(2)",
];

pub const TABLE1_ESTIMATORS: [EstimatorId; 3] =
    [EstimatorId::Fd, EstimatorId::LeibnizIntegral, EstimatorId::LeibnizDivergence];

/// Rows of the seven-configuration grid at q = 0.5, θ = 1, in configuration-major order.
pub fn table1_rows(seed: u64, n_reps: usize, workers: usize, timing: bool) -> Result<Vec<ResultRow>, String> {
    let cfg = EstimatorConfig { n_reps, seed, workers, ..EstimatorConfig::default() };
    let mut rows = Vec::new();
    for (_, d) in log_inventory_configurations() {
        let oracle = truth_log_inventory(&d, 0.5, 1.0).map_err(|e| format!("oracle: {e}"))?.derivative;
        let m = model_log_inventory(d, 0.5).map_err(|e| e.to_string())?;
        for id in TABLE1_ESTIMATORS {
            let est = estimate(&m, id, 1.0, &cfg).map_err(|e| format!("{} {id}: {e}", m.distribution_id()))?;
            rows.push(ResultRow {
                model: m.name.clone(),
                distribution: m.distribution_id(),
                estimator: id.to_string(),
                theta: 1.0,
                mean: est.mean,
                std_error: est.std_error,
                n_reps: est.n_reps,
                runtime_s: if timing { est.runtime_s } else { 0.0 },
                unstable: est.unstable,
                rejected: est.rejected_samples,
                oracle: Some(oracle),
                seed,
            });
        }
    }
    Ok(rows)
}

/// One line per configuration: FD, Leibniz integral and Leibniz divergence cells plus the oracle.
pub fn format_table1(rows: &[ResultRow]) -> String {
    let mut s = format!(
        "{:<24} {:>22} {:>22} {:>22} {:>10}\n",
        "distribution", "FD", "Leibniz integral", "Leibniz divergence", "oracle"
    );
    for (label, chunk) in TABLE1_LABELS.iter().zip(rows.chunks(TABLE1_ESTIMATORS.len())) {
        let cell = |r: &ResultRow| format!("{}{}", format_cell(r.mean, r.std_error), if r.unstable { "*" } else { "" });
        s.push_str(&format!(
            "{:<24} {:>22} {:>22} {:>22} {:>10.4}\n",
            label,
            cell(&chunk[0]),
            cell(&chunk[1]),
            cell(&chunk[2]),
            chunk[0].oracle.unwrap_or(f64::NAN)
        ));
    }
    s.push_str("* unstable: heavy-tailed or divergent estimator, raw value shown\n");
    s
}

pub fn cmd_table1(flags: &RunFlags) -> u8 {
    let seed = flags.seed.unwrap_or(DEFAULT_SEED);
    let n_reps = flags.reps.unwrap_or(10_000);
    if n_reps < 2 {
        eprintln!("config error: `reps`: must be at least 2");
        return EXIT_CONFIG;
    }
    let rows = match table1_rows(seed, n_reps, flags.workers(), flags.timing) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("estimator failure: {e}");
            return EXIT_ESTIMATOR;
        }
    };
    let table = format_table1(&rows);
    print!("{table}");
    if let Some(dir) = &flags.out {
        let format = flags.format.unwrap_or_default();
        let ext = match format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        };
        let written = std::fs::create_dir_all(dir)
            .and_then(|_| emit(&rows, format, Some(&dir.join(format!("table1.{ext}")))))
            .and_then(|_| std::fs::write(dir.join("table1.txt"), &table));
        if let Err(e) = written {
            eprintln!("cannot write results: {e}");
            return EXIT_ESTIMATOR;
        }
    }
    EXIT_OK
}

pub fn cmd_verify(verbose: bool, format: Option<OutputFormat>, out: Option<&Path>) -> u8 {
    let report = run_invariants();
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    if format == Some(OutputFormat::Json) {
        println!("{json}");
    } else {
        let mut stdout = std::io::stdout().lock();
        for r in &report.results {
            let _ = writeln!(stdout, "{} {}", if r.passed { "PASS" } else { "FAIL" }, r.name);
            if verbose {
                let _ =
                    writeln!(stdout, "     max_error {:.3e} (tolerance {:.1e}) {}", r.max_error, r.tolerance, r.detail);
            }
        }
    }
    if let Some(p) = out {
        if let Err(e) = std::fs::write(p, &json) {
            eprintln!("cannot write report: {e}");
        }
    }
    if report.all_passed() {
        EXIT_OK
    } else {
        let names: Vec<&str> = report.failures().map(|r| r.name.as_str()).collect();
        eprintln!("failed invariants: {}", names.join(", "));
        EXIT_VERIFY_FAILED
    }
}

pub fn cmd_oracle(path: &Path) -> u8 {
    let cfg = match RunConfig::load(path) {
        Ok(c) => c,
        Err(e) => return config_error(&e),
    };
    let exp = match build_experiment(&cfg) {
        Ok(e) => e,
        Err(e) => return config_error(&e),
    };
    match experiment_oracle(&exp, &cfg.model, cfg.theta) {
        Ok(r) => {
            println!("derivative {:.12}", r.derivative);
            println!("expectation {:.12}", r.probability);
            println!("quadrature_change {:.3e}", r.quadrature_change);
            println!("cross_check {:.12}", r.cross_check);
            println!("step_change {:.3e}", r.step_change);
            println!("order {}", r.order);
            EXIT_OK
        }
        Err(leibniz_core::Error::NoOracle(msg)) => {
            eprintln!("no oracle: {msg}");
            EXIT_NO_ORACLE
        }
        Err(e) => {
            eprintln!("oracle failure: {e}");
            EXIT_ESTIMATOR
        }
    }
}
