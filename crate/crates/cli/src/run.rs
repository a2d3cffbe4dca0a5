//! Experiment execution: build the configured pipeline, walk the signal
//! window by window, measure, and emit the CSV series plus a summary report.

use std::fmt;

use qfir_core::cascade::{CascadedFilter, DilationMode};
use qfir_core::encoding::{choose_qubits, encode_window, ScalePolicy};
use qfir_core::filter::{fir_apply, two_tone, FilterSpec, Signal};
use qfir_core::sampling::{estimate, sample, split_seed};
use qfir_core::unitary::{
    apply, build_filter_unitary, ideal_probability, reconstruct_magnitude, Projector,
};
use serde::Serialize;

use crate::config::{self, ExperimentConfig, Mode, RunArgs, SignalSpec};
use crate::csvio::{self, CsvRow};

#[derive(Debug)]
pub enum CliError {
    Parse {
        line: usize,
        detail: String,
    },
    NonUniformSampling {
        line: usize,
        expected: f64,
        actual: f64,
    },
    Config(String),
    Numerical(qfir_core::Error),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse { line, detail } => write!(f, "line {line}: {detail}"),
            CliError::NonUniformSampling {
                line,
                expected,
                actual,
            } => write!(
                f,
                "line {line}: sample interval {actual} differs from {expected} inferred from the first rows"
            ),
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Numerical(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Numerical(_) => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io",
            CliError::Numerical(_) => "numerical",
            _ => "config",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "kind": self.kind(), "error": self.to_string() }).to_string()
    }
}

impl From<qfir_core::Error> for CliError {
    fn from(e: qfir_core::Error) -> Self {
        use qfir_core::Error as E;
        match e {
            E::AliasedTone { .. }
            | E::ZeroFilter
            | E::WrongArity { .. }
            | E::ArityMismatch { .. }
            | E::ScaleOverflow { .. }
            | E::DimensionMismatch { .. }
            | E::NonFinite { .. } => CliError::Config(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

/// Aggregate agreement metrics over one run.
#[derive(Debug, Serialize)]
pub struct ComparisonReport {
    /// Root-mean-square error between reconstructed and classical |y|.
    pub rmse_ideal_vs_classical: f64,
    /// Mean |sampled_prob - ideal_prob| over the series.
    pub mean_abs_dev_sampled_vs_ideal: f64,
    pub max_unitarity_residual: f64,
    /// Subnormalization of the cascade's first stage; absent in single mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

pub fn run(args: RunArgs) -> Result<(), CliError> {
    let cfg = config::resolve(args)?;
    let (rows, report) = execute(&cfg)?;
    csvio::write_series(&cfg.out, &rows)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    Ok(())
}

fn load_signal(cfg: &ExperimentConfig) -> Result<Signal, CliError> {
    match &cfg.signal {
        SignalSpec::TwoTone {
            f_low,
            f_high,
            n,
            dt,
        } => Ok(two_tone(*n, *f_low, *f_high, *dt)?),
        SignalSpec::Csv(path) => csvio::ingest_csv(path),
    }
}

fn scale_policy(cfg: &ExperimentConfig, x: &Signal, d: usize) -> Result<ScalePolicy, CliError> {
    Ok(match cfg.m {
        Some(m) => ScalePolicy::new(m, d)?,
        None => ScalePolicy::from_signal(x, d)?,
    })
}

pub fn execute(cfg: &ExperimentConfig) -> Result<(Vec<CsvRow>, ComparisonReport), CliError> {
    let x = load_signal(cfg)?;
    match cfg.mode {
        Mode::Single => {
            let f = FilterSpec::new(cfg.taps.clone())?;
            let d = f.d();
            let s = scale_policy(cfg, &x, d)?;
            let u = build_filter_unitary(&f, choose_qubits(d))?;
            let slot = Projector::output_slot(d);
            let classical = fir_apply(&f, &x);

            let mut rows = Vec::with_capacity(x.len());
            for n in 0..x.len() {
                let out = apply(&u, &encode_window(&x, n, d, &s)?)?;
                let p = ideal_probability(&out, slot);
                let rec = sample(&out, cfg.shots, split_seed(cfg.seed, n as u64))?
                    .with_target(slot.index);
                let est = estimate(&rec, rec.target_index);
                let y = classical.at(n as isize);
                rows.push(CsvRow {
                    n,
                    t_seconds: n as f64 * x.sample_interval(),
                    classical_y: y.re,
                    classical_abs_y: y.norm(),
                    ideal_prob: p,
                    sampled_prob: est.p_hat,
                    reconstructed_abs_y: reconstruct_magnitude(p, &f, &s),
                });
            }
            let report = summarize(&rows, u.certificate().residual, None);
            Ok((rows, report))
        }
        Mode::Cascade => {
            let f1 = FilterSpec::new(vec![cfg.factors[0], cfg.factors[1]])?;
            let f2 = FilterSpec::new(vec![cfg.factors[2], cfg.factors[3]])?;
            let mode = if cfg.paper_literal_dilation {
                DilationMode::PaperLiteral
            } else {
                DilationMode::Exact
            };
            let cascade = CascadedFilter::build(f1.clone(), f2.clone(), mode)?;
            let d = cascade.d();
            let s = scale_policy(cfg, &x, d)?;
            let slot = cascade.output_slot();
            let classical = fir_apply(&f2, &fir_apply(&f1, &x));

            let mut rows = Vec::with_capacity(x.len());
            for n in 0..x.len() {
                let out = cascade.run_window(&encode_window(&x, n, d, &s)?)?;
                let p = out.amplitude(slot).norm_sqr();
                let rec =
                    sample(&out, cfg.shots, split_seed(cfg.seed, n as u64))?.with_target(slot);
                let est = estimate(&rec, rec.target_index);
                let y = classical.at(n as isize);
                rows.push(CsvRow {
                    n,
                    t_seconds: n as f64 * x.sample_interval(),
                    classical_y: y.re,
                    classical_abs_y: y.norm(),
                    ideal_prob: p,
                    sampled_prob: est.p_hat,
                    reconstructed_abs_y: cascade.reconstruct_magnitude(p, &s),
                });
            }
            let report = summarize(
                &rows,
                cascade.operator().max_residual(),
                Some(cascade.alpha()),
            );
            Ok((rows, report))
        }
    }
}

fn summarize(rows: &[CsvRow], max_residual: f64, alpha: Option<f64>) -> ComparisonReport {
    let n = rows.len().max(1) as f64;
    let rmse = (rows
        .iter()
        .map(|r| (r.reconstructed_abs_y - r.classical_abs_y).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let mad = rows
        .iter()
        .map(|r| (r.sampled_prob - r.ideal_prob).abs())
        .sum::<f64>()
        / n;
    ComparisonReport {
        rmse_ideal_vs_classical: rmse,
        mean_abs_dev_sampled_vs_ideal: mad,
        max_unitarity_residual: max_residual,
        alpha,
    }
}
