//! The JSON verification report.
//!
//! The document is deterministic for a fixed configuration except for the
//! top-level `timestamp` field.

use std::path::Path;

use serde::Serialize;

use crate::config::{Mode, PlotKind, SampleCounts, SuiteConfig, Tolerances};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// Curve parameter the check ran at, if it depends on one.
    pub t: Option<String>,
    pub status: Status,
    pub mandatory: bool,
    /// `None` when no sample produced a residual.
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub samples: usize,
    pub witnesses: Vec<String>,
    pub notes: Vec<String>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, t: Option<String>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            t,
            status: Status::Pass,
            mandatory: true,
            max_residual: None,
            tolerance,
            samples: 0,
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn informational(mut self) -> Self {
        self.mandatory = false;
        self
    }

    /// Records a residual; non-finite residuals count as failures.
    pub fn residual(&mut self, r: f64) {
        let r = if r.is_nan() { f64::INFINITY } else { r };
        self.max_residual = Some(self.max_residual.map_or(r, |m| m.max(r)));
    }

    pub fn fail(&mut self, witness: impl Into<String>) {
        self.status = Status::Fail;
        self.witnesses.push(witness.into());
    }

    /// Fails unless the recorded residual is within tolerance.
    pub fn settle(mut self) -> Self {
        if let Some(r) = self.max_residual {
            if !(r <= self.tolerance) {
                self.status = Status::Fail;
            }
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Display name including the parameter.
    pub fn label(&self) -> String {
        match &self.t {
            Some(t) => format!("{}[t={}]", self.name, t),
            None => self.name.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub t: String,
    pub mode: Mode,
    pub samples: SampleCounts,
    pub seed: u64,
    pub tolerances: Tolerances,
    /// `[min, max]` of the real part of `x`, real part of `z`, imaginary part
    /// of `x`, imaginary part of `z`.
    pub region: [[f64; 2]; 4],
    pub sweep: Vec<String>,
    pub control_web: bool,
    pub plots: Vec<PlotKind>,
}

impl ConfigEcho {
    pub fn new(c: &SuiteConfig) -> Self {
        let r = &c.region;
        Self {
            t: c.t.to_string(),
            mode: c.mode,
            samples: c.samples,
            seed: c.seed,
            tolerances: c.tol,
            region: [r.x_re, r.z_re, r.x_im, r.z_im].map(|(a, b)| [a, b]),
            sweep: c.sweep.iter().map(ToString::to_string).collect(),
            control_web: c.control_web,
            plots: c.plots.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    /// True iff every mandatory check passed.
    pub pass: bool,
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub mandatory_failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    /// Seconds since the Unix epoch; the only field that varies between
    /// runs of one configuration.
    pub timestamp: u64,
    pub summary: Summary,
    pub config: ConfigEcho,
    pub checks: Vec<CheckRecord>,
    /// Discrepancies between printed formulas and their verified forms.
    pub notes: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("cannot serialize report: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl VerificationReport {
    pub fn assemble(config: &SuiteConfig, checks: Vec<CheckRecord>, notes: Vec<String>, timestamp: u64) -> Self {
        let failed = checks.iter().filter(|c| !c.passed()).count();
        let mandatory_failures: Vec<String> = checks.iter().filter(|c| c.mandatory && !c.passed()).map(CheckRecord::label).collect();
        Self {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
            summary: Summary {
                pass: mandatory_failures.is_empty(),
                checks: checks.len(),
                passed: checks.len() - failed,
                failed,
                mandatory_failures,
            },
            config: ConfigEcho::new(config),
            checks,
            notes,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.pass
    }

    pub fn check(&self, name: &str) -> impl Iterator<Item = &CheckRecord> {
        let name = name.to_string();
        self.checks.iter().filter(move |c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String, ReportError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// The JSON document with the timestamp zeroed, for comparisons.
    pub fn canonical_json(&self) -> Result<String, ReportError> {
        Self { timestamp: 0, ..self.clone() }.to_json()
    }

    pub fn write(&self, path: &Path) -> Result<(), ReportError> {
        std::fs::write(path, self.to_json()?).map_err(|source| ReportError::Write { path: path.display().to_string(), source })
    }
}
