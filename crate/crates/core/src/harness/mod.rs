//! Run configuration, end-to-end verification runs and their reports.

pub mod config;
pub mod regime;
pub mod report;
pub mod run;
pub mod selftest;

pub use config::{AlphaGrid, ContourOverrides, KernelChoice, RunConfig, YRule, DEFAULT_MAX_COEFFICIENTS};
pub use regime::{regime_summary, Regime, RegimeBucket, RegimeSummary};
pub use report::{
    config_hash, Check, Mode, Provenance, RegimeLimits, ReportRow, VerificationReport, CFS_CSV_HEADER, REPORT_SCHEMA,
    SCS_CSV_HEADER,
};
pub use run::{cfs_points, run, scs_points, RunOutcome};
pub use selftest::selftest_checks;
