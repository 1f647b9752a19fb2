use serde::Serialize;

use super::report::{Check, VerificationReport};

/// Rows with Y^2/X at or below this are short-shift rows.
pub const SMALL_RATIO_MAX: f64 = 0.1;
/// Rows with Y^2/X at or above this are long-shift rows.
pub const LARGE_RATIO_MIN: f64 = 10.0;
/// Allowed relative distance of LHS/X from its long-shift limit.
pub const LARGE_RATIO_TOL: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    SmallRatio,
    Transition,
    LargeRatio,
}

/// Ratios recomputed as Y^2/X from Y = sqrt(ratio X) may be off by an ulp.
const BOUNDARY_SLACK: f64 = 1e-9;

impl Regime {
    pub fn classify(ratio: f64) -> Self {
        if ratio <= SMALL_RATIO_MAX * (1.0 + BOUNDARY_SLACK) {
            Regime::SmallRatio
        } else if ratio >= LARGE_RATIO_MIN * (1.0 - BOUNDARY_SLACK) {
            Regime::LargeRatio
        } else {
            Regime::Transition
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeBucket {
    pub regime: Regime,
    /// Indices into the report rows.
    pub rows: Vec<usize>,
    /// Limiting statement for the bucket; none for the transition bucket.
    pub check: Option<Check>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RegimeSummary {
    pub buckets: Vec<RegimeBucket>,
}

impl RegimeSummary {
    pub fn bucket(&self, regime: Regime) -> Option<&RegimeBucket> {
        self.buckets.iter().find(|b| b.regime == regime)
    }

    pub fn passed(&self) -> bool {
        self.buckets.iter().filter_map(|b| b.check.as_ref()).all(|c| c.passed)
    }
}

/// Buckets the rows of a shifted-convolution report by Y^2/X and checks the
/// limiting statements: LHS/X tends to the long-shift slope, and in the
/// short-shift regime |LHS| / norm stays below X^{1/2} Y. Nonempty buckets
/// only, in the order small, transition, large.
pub fn regime_summary(report: &VerificationReport) -> RegimeSummary {
    let mut buckets = Vec::new();
    for regime in [Regime::SmallRatio, Regime::Transition, Regime::LargeRatio] {
        let rows: Vec<usize> =
            (0..report.rows.len()).filter(|&i| Regime::classify(report.rows[i].ratio) == regime).collect();
        if rows.is_empty() {
            continue;
        }
        let check = report.limits.and_then(|lim| match regime {
            Regime::Transition => None,
            Regime::SmallRatio => {
                let worst = rows
                    .iter()
                    .map(|&i| {
                        let r = &report.rows[i];
                        (r.lhs / lim.small_ratio_norm).abs() / (r.x.sqrt() * r.y)
                    })
                    .fold(0.0f64, f64::max);
                Some(Check::new(
                    "short-shift cancellation",
                    worst <= 1.0,
                    format!("max |LHS|/({:.6e} X^(1/2) Y) = {worst:.4}", lim.small_ratio_norm),
                ))
            }
            Regime::LargeRatio => {
                let worst = rows
                    .iter()
                    .map(|&i| {
                        let r = &report.rows[i];
                        (r.lhs / r.x / lim.large_ratio_slope - 1.0).abs()
                    })
                    .fold(0.0f64, f64::max);
                Some(Check::new(
                    "long-shift limit",
                    worst <= LARGE_RATIO_TOL,
                    format!("max |LHS/(X slope) - 1| = {worst:.4} with slope {:.8e}", lim.large_ratio_slope),
                ))
            }
        });
        buckets.push(RegimeBucket { regime, rows, check });
    }
    RegimeSummary { buckets }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::report::{Mode, Provenance, RegimeLimits, ReportRow};

    fn report(rows: Vec<ReportRow>) -> VerificationReport {
        VerificationReport::new(Mode::Corollary1, rows, vec![], Provenance::new(String::new(), None))
            .with_limits(RegimeLimits { large_ratio_slope: -2.0, small_ratio_norm: 10.0 })
    }

    fn row(x: f64, ratio: f64, lhs: f64) -> ReportRow {
        let y = (ratio * x).sqrt();
        ReportRow::new(Some(12), x, y, ratio, lhs, 0.0, 1.0)
    }

    #[test]
    fn empty_report_gives_empty_summary() {
        assert!(regime_summary(&report(vec![])).buckets.is_empty());
    }

    #[test]
    fn log_spaced_grid_fills_three_buckets() {
        let rows = (0..9).map(|i| row(1e4, 0.01 * 10f64.powf(i as f64 / 2.0), -1.0)).collect();
        let s = regime_summary(&report(rows));
        assert_eq!(s.buckets.len(), 3);
        assert_eq!(s.bucket(Regime::SmallRatio).unwrap().rows, vec![0, 1, 2]);
        assert_eq!(s.bucket(Regime::Transition).unwrap().rows, vec![3, 4, 5]);
        assert_eq!(s.bucket(Regime::LargeRatio).unwrap().rows, vec![6, 7, 8]);
        assert!(s.bucket(Regime::Transition).unwrap().check.is_none());
    }

    #[test]
    fn limiting_checks() {
        // Long shift: LHS/X = -1.9 is within 10% of -2.
        let s = regime_summary(&report(vec![row(100.0, 25.0, -190.0), row(100.0, 0.01, 5.0)]));
        assert!(s.passed());
        let s = regime_summary(&report(vec![row(100.0, 25.0, -150.0)]));
        assert!(!s.passed());
        // Short shift: X^{1/2} Y = 10 at X = 100, ratio 0.01; norm 10 allows |LHS| <= 100.
        let s = regime_summary(&report(vec![row(100.0, 0.01, -101.0)]));
        assert!(!s.passed());
    }

    #[test]
    fn no_limits_means_no_checks() {
        let mut r = report(vec![row(100.0, 25.0, -150.0)]);
        r.limits = None;
        let s = regime_summary(&r);
        assert_eq!(s.buckets.len(), 1);
        assert!(s.buckets[0].check.is_none());
    }
}
