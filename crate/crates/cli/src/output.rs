//! Result rows and their CSV and JSON encodings.

use crate::config::OutputFormat;
use crate::float_text;
use serde::{Deserialize, Serialize};
use std::io::Write;

pub const CSV_HEADER: &str =
    "model,distribution,estimator,theta,mean,std_error,n_reps,runtime_s,unstable,rejected,oracle,seed";

/// One estimator run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRow {
    pub model: String,
    pub distribution: String,
    pub estimator: String,
    #[serde(with = "float_text")]
    pub theta: f64,
    #[serde(with = "float_text")]
    pub mean: f64,
    #[serde(with = "float_text")]
    pub std_error: f64,
    pub n_reps: usize,
    #[serde(with = "float_text")]
    pub runtime_s: f64,
    pub unstable: bool,
    pub rejected: u64,
    #[serde(with = "float_text::option")]
    pub oracle: Option<f64>,
    pub seed: u64,
}

pub fn write_rows<W: Write>(rows: &[ResultRow], format: OutputFormat, out: W) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if rows.is_empty() {
                w.write_record(CSV_HEADER.split(','))?;
            }
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()
        }
        OutputFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)
        }
    }
}

pub fn read_rows(text: &str, format: OutputFormat) -> Result<Vec<ResultRow>, String> {
    match format {
        OutputFormat::Csv => {
            csv::Reader::from_reader(text.as_bytes()).deserialize().collect::<Result<_, _>>().map_err(|e| e.to_string())
        }
        OutputFormat::Json => serde_json::from_str(text).map_err(|e| e.to_string()),
    }
}

/// `mean(se)` with three decimals, or scientific notation for large magnitudes.
pub fn format_cell(mean: f64, se: f64) -> String {
    let fmt = |v: f64| {
        if v.is_finite() && v.abs() < 1e3 {
            format!("{v:.3}")
        } else {
            format!("{v:.3e}")
        }
    };
    format!("{}({})", fmt(mean), fmt(se))
}

/// Human-readable summary of a run.
pub fn summary_table(rows: &[ResultRow]) -> String {
    let mut s =
        format!("{:<22} {:<44} {:>24} {:>10} {:>9}\n", "estimator", "distribution", "mean(se)", "oracle", "unstable");
    for r in rows {
        let oracle = r.oracle.map_or_else(|| "-".to_string(), |o| format!("{o:.4}"));
        s.push_str(&format!(
            "{:<22} {:<44} {:>24} {:>10} {:>9}\n",
            r.estimator,
            r.distribution,
            format_cell(r.mean, r.std_error),
            oracle,
            if r.unstable { "yes" } else { "" }
        ));
    }
    s
}
