use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const REPORT_SCHEMA: &str = "scslab-report-1";
pub const SCS_CSV_HEADER: [&str; 8] = ["k", "X", "Y", "ratio", "lhs", "rhs", "residual", "yardstick"];
pub const CFS_CSV_HEADER: [&str; 7] = ["X", "Y", "alpha", "S", "prediction", "residual", "normalized_residual"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Corollary1,
    Corollary2,
    MainTheorem,
    TransitionCurve,
    Cfs,
    Selftest,
}

impl Mode {
    pub const ALL: [Mode; 6] =
        [Mode::Corollary1, Mode::Corollary2, Mode::MainTheorem, Mode::TransitionCurve, Mode::Cfs, Mode::Selftest];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Corollary1 => "corollary1",
            Mode::Corollary2 => "corollary2",
            Mode::MainTheorem => "main-theorem",
            Mode::TransitionCurve => "transition-curve",
            Mode::Cfs => "cfs",
            Mode::Selftest => "selftest",
        }
    }

    /// Modes whose rows compare a shifted-convolution LHS with a prediction.
    pub fn is_scs(self) -> bool {
        matches!(self, Mode::Corollary1 | Mode::Corollary2 | Mode::MainTheorem)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown mode {s:?}")))
    }
}

/// One (X, Y) comparison. `ratio` is Y^2/X for shifted-convolution modes and
/// Y/X for the Jacobi-symbol mode.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub weight: Option<u32>,
    pub x: f64,
    pub y: f64,
    pub ratio: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub yardstick: f64,
    pub normalized_residual: f64,
}

impl ReportRow {
    pub fn new(weight: Option<u32>, x: f64, y: f64, ratio: f64, lhs: f64, rhs: f64, yardstick: f64) -> Self {
        let residual = lhs - rhs;
        Self { weight, x, y, ratio, lhs, rhs, residual, yardstick, normalized_residual: residual / yardstick }
    }
}

/// A named pass/fail invariant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub cache_id: Option<String>,
    pub version: String,
}

impl Provenance {
    pub fn new(config_hash: String, cache_id: Option<String>) -> Self {
        Self { config_hash, cache_id, version: env!("CARGO_PKG_VERSION").to_string() }
    }
}

/// Limits used by the regime summary: LHS/X as Y^2/X grows, and the scale
/// dividing |LHS| in the short-shift bound |LHS| <= X^{1/2} Y.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegimeLimits {
    pub large_ratio_slope: f64,
    pub small_ratio_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: &'static str,
    pub mode: Mode,
    pub rows: Vec<ReportRow>,
    /// Hard invariants; the run passes iff all of them pass.
    pub checks: Vec<Check>,
    pub limits: Option<RegimeLimits>,
    pub provenance: Provenance,
}

impl VerificationReport {
    pub fn new(mode: Mode, rows: Vec<ReportRow>, checks: Vec<Check>, provenance: Provenance) -> Self {
        Self { schema: REPORT_SCHEMA, mode, rows, checks, limits: None, provenance }
    }

    pub fn with_limits(mut self, limits: RegimeLimits) -> Self {
        self.limits = Some(limits);
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Writes the rows in the column layout of the report's mode.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.mode == Mode::Cfs {
            w.write_record(CFS_CSV_HEADER)?;
            for r in &self.rows {
                w.write_record([r.x, r.y, r.ratio, r.lhs, r.rhs, r.residual, r.normalized_residual].map(|v| v.to_string()))?;
            }
        } else {
            w.write_record(SCS_CSV_HEADER)?;
            for r in &self.rows {
                let k = r.weight.map(|k| k.to_string()).unwrap_or_default();
                let vals = [r.x, r.y, r.ratio, r.lhs, r.rhs, r.residual, r.yardstick].map(|v| v.to_string());
                w.write_record(std::iter::once(k).chain(vals))?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }
}

/// Hex SHA-256 of the JSON serialization.
pub fn config_hash<S: Serialize>(value: &S) -> Result<String> {
    let bytes = serde_json::to_vec(value)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}
