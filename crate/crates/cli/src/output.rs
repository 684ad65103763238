use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::time::Instant;

use acasimir::acoustics::PressureEval;
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;

/// Numeric table written as `sweep.csv`.
pub struct Table {
    header: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn new() -> Self {
        Self {
            header: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub fn column(mut self, name: impl Into<String>, values: Vec<f64>) -> Self {
        debug_assert!(self.columns.first().is_none_or(|c| c.len() == values.len()));
        self.header.push(name.into());
        self.columns.push(values);
        self
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    /// Header plus one line per row, every value as `{:.16e}`.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for i in 0..self.rows() {
            for (j, col) in self.columns.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                write!(out, "{:.16e}", col[i]).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Integrand evaluation counts and worst error estimate, shareable across
/// worker threads.
#[derive(Default)]
pub struct QuadratureStats {
    evals: AtomicUsize,
    integrals: AtomicUsize,
    // bit pattern of a non-negative f64; integer order matches float order
    max_error: AtomicU64,
}

impl QuadratureStats {
    pub fn record(&self, e: &PressureEval) {
        self.add(1, e.evals, e.error);
    }

    pub fn add(&self, integrals: usize, evals: usize, error: f64) {
        self.integrals.fetch_add(integrals, Ordering::Relaxed);
        self.evals.fetch_add(evals, Ordering::Relaxed);
        self.max_error
            .fetch_max(error.abs().to_bits(), Ordering::Relaxed);
    }

    pub fn summary(&self) -> QuadratureSummary {
        QuadratureSummary {
            integrals: self.integrals.load(Ordering::Relaxed),
            evaluations: self.evals.load(Ordering::Relaxed),
            max_error_estimate: f64::from_bits(self.max_error.load(Ordering::Relaxed)),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct QuadratureSummary {
    pub integrals: usize,
    pub evaluations: usize,
    /// Pa for pressures.
    pub max_error_estimate: f64,
}

#[derive(Debug, Serialize)]
pub struct Stage {
    pub name: String,
    pub seconds: f64,
}

/// Wall-clock timer for named stages.
pub struct Stages {
    stages: Vec<Stage>,
}

impl Stages {
    pub fn new() -> Self {
        Self { stages: Vec::new() }
    }

    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let v = f();
        self.record(name, start);
        v
    }

    pub fn record(&mut self, name: &str, start: Instant) {
        self.stages.push(Stage {
            name: name.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
    }

    pub fn into_vec(self) -> Vec<Stage> {
        self.stages
    }
}

/// Pressure at one predicted resonance `n π c / ω₁`.
#[derive(Debug, Serialize)]
pub struct PeakSign {
    pub n: usize,
    pub gap_m: f64,
    pub pressure_pa: f64,
    /// Sign under the active convention.
    pub sign: f64,
    /// Sign with the overall sign of the pressure formula taken as printed.
    pub printed_sign: f64,
    pub repulsive: bool,
}

#[derive(Debug, Serialize)]
pub struct SignReport {
    pub convention: String,
    pub expected: &'static str,
    pub peaks: Vec<PeakSign>,
    pub mismatches: usize,
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub threads: usize,
    pub stages: Vec<Stage>,
    pub quadrature: QuadratureSummary,
    pub sign_report: SignReport,
    pub results: Value,
    pub warnings: Vec<String>,
}

pub fn write_outputs(dir: &Path, table: &Table, manifest: &Manifest<'_>) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("sweep.csv"), table.to_csv())?;
    let mut json = serde_json::to_string_pretty(manifest).map_err(io::Error::other)?;
    json.push('\n');
    fs::write(dir.join("manifest.json"), json)
}
