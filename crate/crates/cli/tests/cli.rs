use leibniz_cli::commands::{EXIT_CONFIG, EXIT_NO_ORACLE, EXIT_OK};
use leibniz_cli::config::{ModelSpec, OutputFormat, RunConfig};
use leibniz_cli::output::{read_rows, write_rows, ResultRow, CSV_HEADER};
use leibniz_core::distributions::{Copula, JointDensity, Marginal};
use leibniz_core::estimators::EstimatorId;
use proptest::prelude::*;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn leibniz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leibniz")).args(args).env_remove("LEIBNIZ_SEED").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn inventory_config() -> RunConfig {
    let text = std::fs::read_to_string(configs_dir().join("inventory_fgm.json")).unwrap();
    RunConfig::from_json(&text, Path::new("inventory_fgm.json")).unwrap()
}

fn write_config(dir: &Path, name: &str, cfg: &RunConfig) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, cfg.to_json()).unwrap();
    p
}

fn same_float(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
}

fn same_row(a: &ResultRow, b: &ResultRow) -> bool {
    a.model == b.model
        && a.distribution == b.distribution
        && a.estimator == b.estimator
        && same_float(a.theta, b.theta)
        && same_float(a.mean, b.mean)
        && same_float(a.std_error, b.std_error)
        && a.n_reps == b.n_reps
        && same_float(a.runtime_s, b.runtime_s)
        && a.unstable == b.unstable
        && a.rejected == b.rejected
        && match (a.oracle, b.oracle) {
            (Some(x), Some(y)) => same_float(x, y),
            (None, None) => true,
            _ => false,
        }
        && a.seed == b.seed
}

fn special_float() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6f64..1e6, Just(f64::INFINITY), Just(f64::NEG_INFINITY), Just(f64::NAN), Just(0.0), Just(-0.0),]
}

prop_compose! {
    fn result_row()(
        mean in special_float(),
        std_error in special_float(),
        oracle in prop::option::of(special_float()),
        theta in -10.0f64..10.0,
        n_reps in 2usize..1_000_000,
        unstable in any::<bool>(),
        rejected in any::<u64>(),
        seed in any::<u64>(),
        estimator in prop::sample::select(EstimatorId::ALL.to_vec()),
    ) -> ResultRow {
        ResultRow {
            model: "log_inventory".into(),
            distribution: "fgm(1):exp(1)/exp(1)".into(),
            estimator: estimator.to_string(),
            theta,
            mean,
            std_error,
            n_reps,
            runtime_s: 0.0,
            unstable,
            rejected,
            oracle,
            seed,
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rows_survive_both_encodings(rows in prop::collection::vec(result_row(), 1..6)) {
        for format in [OutputFormat::Csv, OutputFormat::Json] {
            let mut buf = Vec::new();
            write_rows(&rows, format, &mut buf).unwrap();
            let back = read_rows(std::str::from_utf8(&buf).unwrap(), format).unwrap();
            prop_assert_eq!(back.len(), rows.len());
            for (a, b) in rows.iter().zip(&back) {
                prop_assert!(same_row(a, b), "{:?} vs {:?}", a, b);
            }
        }
    }

    #[test]
    fn config_survives_json(
        q in -2.0f64..2.0,
        alpha in -1.0f64..1.0,
        theta in 0.1f64..1.2,
        n_reps in 2usize..100_000,
        seed in any::<u64>(),
        crn in any::<bool>(),
        oracle in any::<bool>(),
        surface_reps in prop::option::of(2usize..5_000),
    ) {
        let e = Marginal::Exponential { rate: 1.0 };
        let cfg = RunConfig {
            model: ModelSpec::LogInventory {
                distribution: JointDensity::Copula { copula: Copula::Fgm { alpha }, marginals: [e, e] },
                q,
            },
            theta,
            estimators: vec![EstimatorId::Fd, EstimatorId::LeibnizDivergence],
            n_reps,
            surface_reps,
            fd_delta: 0.02,
            seed,
            crn,
            output_path: None,
            format: OutputFormat::Json,
            oracle,
        };
        let back = RunConfig::from_json(&cfg.to_json(), Path::new("mem.json")).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

#[test]
fn shipped_configs_parse_and_validate() {
    let mut n = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let p = entry.unwrap().path();
        let cfg = RunConfig::load(&p).unwrap();
        assert!(leibniz_cli::config::build_experiment(&cfg).is_ok(), "{}", p.display());
        n += 1;
    }
    assert!(n >= 5);
}

#[test]
fn unknown_fields_are_rejected() {
    let mut v: serde_json::Value = serde_json::from_str(&inventory_config().to_json()).unwrap();
    v["reps"] = 10.into();
    assert!(RunConfig::from_json(&v.to_string(), Path::new("x.json")).is_err());
}

#[test]
fn csv_header_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = inventory_config();
    cfg.estimators = vec![EstimatorId::LeibnizDivergence];
    let p = write_config(dir.path(), "c.json", &cfg);
    let out = leibniz(&["run", "--config", p.to_str().unwrap(), "--reps", "50", "--workers", "1"]);
    assert_eq!(code(&out), i32::from(EXIT_OK));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "model,distribution,estimator,theta,mean,std_error,n_reps,runtime_s,unstable,rejected,oracle,seed"
    );
    assert_eq!(
        CSV_HEADER,
        "model,distribution,estimator,theta,mean,std_error,n_reps,runtime_s,unstable,rejected,oracle,seed"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("log_inventory,fgm(1):exp(1)/exp(1),leibniz_divergence,1.0,"), "{row}");
    assert!(lines.next().is_none());
}

#[test]
fn empty_estimator_list_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = inventory_config();
    cfg.estimators.clear();
    let p = write_config(dir.path(), "c.json", &cfg);
    let out = leibniz(&["run", "--config", p.to_str().unwrap()]);
    assert_eq!(code(&out), i32::from(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&out.stderr).contains("estimators"));
}

#[test]
fn ipa_lr_on_an_indicator_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = inventory_config();
    cfg.estimators = vec![EstimatorId::IpaLr];
    let p = write_config(dir.path(), "c.json", &cfg);
    assert_eq!(code(&leibniz(&["run", "--config", p.to_str().unwrap()])), i32::from(EXIT_CONFIG));
}

#[test]
fn bad_inputs_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&leibniz(&["run", "--config", missing.to_str().unwrap()])), i32::from(EXIT_CONFIG));
    let garbled = dir.path().join("garbled.json");
    std::fs::write(&garbled, "{ \"model\": ").unwrap();
    assert_eq!(code(&leibniz(&["run", "--config", garbled.to_str().unwrap()])), i32::from(EXIT_CONFIG));
    let mut cfg = inventory_config();
    cfg.theta = 2.0;
    let p = write_config(dir.path(), "theta.json", &cfg);
    assert_eq!(code(&leibniz(&["run", "--config", p.to_str().unwrap()])), i32::from(EXIT_CONFIG));
}

#[test]
fn missing_oracles_exit_four() {
    let san = configs_dir().join("san_bridge.json");
    assert_eq!(code(&leibniz(&["oracle", "--config", san.to_str().unwrap()])), i32::from(EXIT_NO_ORACLE));

    let text = std::fs::read_to_string(configs_dir().join("american_option.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["model"]["option"]["dividends"] = serde_json::json!([1.0, 1.0]);
    v["model"]["option"]["dates"] = serde_json::json!([0.3, 0.6, 1.0]);
    v["model"]["option"]["thresholds"] = serde_json::json!([110.0, 110.0]);
    v["theta"] = 110.0.into();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("three_period.json");
    std::fs::write(&p, v.to_string()).unwrap();
    assert_eq!(code(&leibniz(&["oracle", "--config", p.to_str().unwrap()])), i32::from(EXIT_NO_ORACLE));
}

#[test]
fn oracle_prints_frozen_value() {
    let p = configs_dir().join("inventory_fgm.json");
    let out = leibniz(&["oracle", "--config", p.to_str().unwrap()]);
    assert_eq!(code(&out), i32::from(EXIT_OK));
    let text = String::from_utf8(out.stdout).unwrap();
    let d: f64 = text.lines().next().unwrap().strip_prefix("derivative ").unwrap().parse().unwrap();
    assert!((d + 0.848_601_329_0).abs() < 1e-9, "{d}");
}

#[test]
fn output_is_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs_dir().join("inventory_fgm.json");
    let mut files = Vec::new();
    for workers in ["1", "7"] {
        let out = dir.path().join(format!("w{workers}.csv"));
        let o = leibniz(&[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--reps",
            "3000",
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), i32::from(EXIT_OK), "{}", String::from_utf8_lossy(&o.stderr));
        files.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn json_output_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs_dir().join("gg1_queue.json");
    let out = dir.path().join("q.json");
    let o = leibniz(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--reps",
        "500",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), i32::from(EXIT_OK));
    let rows = read_rows(&std::fs::read_to_string(&out).unwrap(), OutputFormat::Json).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].estimator, "dpa");
    assert_eq!(rows[0].mean, 0.25);
    assert!(String::from_utf8_lossy(&o.stdout).contains("dpa"));
}

fn seed_of(stdout: &[u8]) -> u64 {
    let rows = read_rows(std::str::from_utf8(stdout).unwrap(), OutputFormat::Csv).unwrap();
    rows[0].seed
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = inventory_config();
    cfg.estimators = vec![EstimatorId::Fd];
    let p = write_config(dir.path(), "c.json", &cfg);
    let path = p.to_str().unwrap();
    let base = ["run", "--config", path, "--reps", "20", "--workers", "1"];

    let from_file = leibniz(&base);
    assert_eq!(seed_of(&from_file.stdout), 7);

    let bin = env!("CARGO_BIN_EXE_leibniz");
    let from_env = Command::new(bin).args(base).env("LEIBNIZ_SEED", "11").output().unwrap();
    assert_eq!(seed_of(&from_env.stdout), 11);

    let from_flag = Command::new(bin).args(base).args(["--seed", "13"]).env("LEIBNIZ_SEED", "11").output().unwrap();
    assert_eq!(seed_of(&from_flag.stdout), 13);
}

#[test]
fn zero_workers_rejected() {
    let p = configs_dir().join("inventory_fgm.json");
    let out = leibniz(&["run", "--config", p.to_str().unwrap(), "--workers", "0"]);
    assert_ne!(code(&out), i32::from(EXIT_OK));
}
