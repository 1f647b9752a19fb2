use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{KernelChoice, RunConfig, YRule};
use super::regime::{regime_summary, RegimeSummary};
use super::report::{Check, Mode, Provenance, RegimeLimits, ReportRow, VerificationReport};
use super::selftest::selftest_checks;
use crate::cfs::{cfs_verify, CfsQuery};
use crate::eigenforms::{check_hecke_relations, coefficient_id, default_cache_dir, CoefficientCache, Eigenform};
use crate::error::{Error, Result};
use crate::scs::{corollary1_n_trunc, corollary2_lhs, n_trunc_incomplete_gamma, scs_fast, scs_weighted, SCSQuery};
use crate::specfun::ln_gamma_real;
use crate::transition::{
    corollary1_rhs, corollary2_rhs, kernel_yardstick, main_theorem_rhs, write_samples_csv, yardstick, SmoothingKernel,
    Transition, TransitionSample,
};

/// Coefficient tables are requested in multiples of this, so nearby runs
/// share cache files.
const COEFFICIENT_QUANTUM: usize = 20_000;
/// Prefix on which cached coefficients are re-checked against the Hecke relations.
const HECKE_PREFIX: usize = 5_000;
/// Relative tail accuracy certified by every c_f sample.
const TAIL_TOL: f64 = 5e-9;

#[derive(Clone, Debug, Serialize)]
pub struct RunOutcome {
    pub report: VerificationReport,
    pub regimes: Option<RegimeSummary>,
    pub samples: Vec<TransitionSample<f64>>,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

/// Executes the configured mode and writes `<mode>.csv` and `<mode>.json`
/// into the output directory if one is set.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let mut outcome = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| execute(cfg))?,
        None => execute(cfg)?,
    };
    if let Some(dir) = &cfg.out_dir {
        outcome.files = write_outputs(dir, &outcome)?;
    }
    Ok(outcome)
}

fn execute(cfg: &RunConfig) -> Result<RunOutcome> {
    let hash = cfg.hash()?;
    match cfg.mode {
        Mode::Selftest => {
            let report = VerificationReport::new(Mode::Selftest, vec![], selftest_checks(), Provenance::new(hash, None));
            Ok(RunOutcome { report, regimes: None, samples: vec![], files: vec![] })
        }
        Mode::Cfs => run_cfs(cfg, hash),
        Mode::TransitionCurve => run_curve(cfg, hash),
        Mode::Corollary1 | Mode::Corollary2 | Mode::MainTheorem => run_scs(cfg, hash),
    }
}

/// (X, Y) pairs of a shifted-convolution run; ratios are Y^2/X.
pub fn scs_points(cfg: &RunConfig) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &x in &cfg.x_grid {
        for &v in cfg.y_rule.values() {
            let y = match cfg.y_rule {
                YRule::Ratio(_) => (v * x).sqrt(),
                YRule::Fixed(_) | YRule::Grid(_) => v,
            };
            out.push((x, y));
        }
    }
    out
}

/// (X, Y) pairs of a Jacobi-symbol run; ratios are Y/X.
pub fn cfs_points(cfg: &RunConfig) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for &x in &cfg.x_grid {
        for &v in cfg.y_rule.values() {
            let y = match cfg.y_rule {
                YRule::Ratio(_) => (v * x).round().max(1.0),
                YRule::Fixed(_) | YRule::Grid(_) => v,
            };
            out.push((x as u64, y as u64));
        }
    }
    out
}

fn cache_for(cfg: &RunConfig) -> CoefficientCache {
    CoefficientCache::new(cfg.cache_dir.clone().unwrap_or_else(default_cache_dir))
}

fn round_up(n: usize) -> usize {
    n.div_ceil(COEFFICIENT_QUANTUM).max(1) * COEFFICIENT_QUANTUM
}

/// Runs `body` on a coefficient table of at least `initial` entries, growing
/// the table whenever `body` reports that it needs more.
fn with_coefficients<R>(
    cfg: &RunConfig,
    initial: usize,
    mut body: impl FnMut(&Eigenform<f64>) -> Result<R>,
) -> Result<(R, String, Check)> {
    let cache = cache_for(cfg);
    let mut n = round_up(initial);
    loop {
        if n > cfg.max_coefficients {
            return Err(Error::Config(format!(
                "the requested X needs N = {n} coefficients, above the feasibility bound {}; lower X or raise the bound",
                cfg.max_coefficients
            )));
        }
        let f = cache.acquire::<f64>(cfg.weight, n)?;
        match body(&f) {
            Err(Error::InsufficientCoefficients { need, .. }) => n = round_up(need.max(n + 1)),
            other => {
                let prefix = Eigenform::<f64>::from_coefficients(cfg.weight, f.coefficients()[..=HECKE_PREFIX.min(n)].to_vec())?;
                let hecke = check_hecke_relations(&prefix);
                let check = Check::new(
                    "coefficient table",
                    hecke.failures() == 0,
                    format!("{} Hecke failures on the first {} coefficients", hecke.failures(), prefix.len()),
                );
                return Ok((other?, coefficient_id(&f)?, check));
            }
        }
    }
}

fn transition<'a>(cfg: &RunConfig, f: &'a Eigenform<f64>) -> Result<Transition<'a, f64>> {
    Transition::new(f, cfg.contour.spec()?)
}

fn sym2_check(tr: &Transition<f64>) -> Check {
    let s = tr.sym2();
    Check::new(
        "symmetric-square cross-check",
        s.agree,
        format!("smoothed {} vs slope {} (relative gap {:.2e})", s.smoothed.value, s.slope.value, s.relative_gap()),
    )
}

fn kernel_for(cfg: &RunConfig, x: f64) -> Result<SmoothingKernel<f64>> {
    match cfg.kernel {
        KernelChoice::PointMass => SmoothingKernel::point_mass_for(x),
        KernelChoice::GammaCutoff => SmoothingKernel::gamma_cutoff(x),
        KernelChoice::Bump { relative_width, points } => {
            let y0 = 1.0 / (4.0 * std::f64::consts::PI * x);
            SmoothingKernel::bump(y0, relative_width * y0, points)
        }
    }
}

fn scs_row(cfg: &RunConfig, tr: &Transition<f64>, x: f64, y: f64) -> Result<ReportRow> {
    let f = tr.eigenform();
    let k = cfg.weight;
    let ratio = y * y / x;
    match cfg.mode {
        Mode::Corollary1 => {
            let q = SCSQuery::with_eps(x, y, cfg.eps_trunc)?;
            q.check_corollary1()?;
            let pred = corollary1_rhs(tr, x, y, cfg.theta)?;
            Ok(ReportRow::new(Some(k), x, y, ratio, scs_fast(f, &q)?, pred.rhs, pred.yardstick))
        }
        Mode::Corollary2 => {
            let lhs = corollary2_lhs(f, x, y, cfg.eps_trunc)?;
            let pred = corollary2_rhs(tr, x, y)?;
            Ok(ReportRow::new(Some(k), x, y, ratio, lhs, pred.rhs, yardstick(x, y, cfg.theta)))
        }
        Mode::MainTheorem => {
            let psi = kernel_for(cfg, x)?;
            let lhs = scs_weighted(f, &psi, y, cfg.eps_trunc)?;
            let pred = main_theorem_rhs(tr, &psi, y)?;
            Ok(ReportRow::new(Some(k), x, y, ratio, lhs, pred.value, kernel_yardstick(k, &psi, y, cfg.theta)?))
        }
        _ => unreachable!("not a shifted-convolution mode"),
    }
}

fn initial_need(cfg: &RunConfig, points: &[(f64, f64)]) -> Result<usize> {
    let mut need = 0;
    for &(x, y) in points {
        let n = match (cfg.mode, cfg.kernel) {
            (Mode::Corollary2, _) | (Mode::MainTheorem, KernelChoice::GammaCutoff) => {
                n_trunc_incomplete_gamma(cfg.weight, x, y, cfg.eps_trunc)?
            }
            _ => corollary1_n_trunc(cfg.weight, &SCSQuery::with_eps(x, y, cfg.eps_trunc)?)?,
        };
        need = need.max(n);
    }
    Ok(need)
}

fn run_scs(cfg: &RunConfig, hash: String) -> Result<RunOutcome> {
    let points = scs_points(cfg);
    let initial = initial_need(cfg, &points)?;
    let ((rows, sym2, limits), cache_id, table) = with_coefficients(cfg, initial, |f| {
        let tr = transition(cfg, f)?;
        let rows = points.par_iter().map(|&(x, y)| scs_row(cfg, &tr, x, y)).collect::<Result<Vec<_>>>()?;
        let gamma_k = ln_gamma_real(cfg.weight as f64)?.exp();
        let limits = match cfg.mode {
            Mode::Corollary1 => Some(RegimeLimits { large_ratio_slope: -tr.constant(), small_ratio_norm: gamma_k }),
            Mode::Corollary2 => Some(RegimeLimits { large_ratio_slope: -tr.constant() / gamma_k, small_ratio_norm: 1.0 }),
            _ => None,
        };
        Ok((rows, sym2_check(&tr), limits))
    })?;
    let finite = rows.iter().all(|r| r.lhs.is_finite() && r.rhs.is_finite() && r.normalized_residual.is_finite());
    let checks = vec![table, sym2, Check::new("finite rows", finite, format!("{} rows", rows.len()))];
    let mut report = VerificationReport::new(cfg.mode, rows, checks, Provenance::new(hash, Some(cache_id)));
    report.limits = limits;
    let regimes = report.limits.map(|_| regime_summary(&report));
    Ok(RunOutcome { report, regimes, samples: vec![], files: vec![] })
}

fn run_curve(cfg: &RunConfig, hash: String) -> Result<RunOutcome> {
    let alphas = cfg.alpha_grid.values();
    let ((samples, sym2), cache_id, table) = with_coefficients(cfg, 0, |f| {
        let tr = transition(cfg, f)?;
        Ok((tr.c_f_many(&alphas)?, sym2_check(&tr)))
    })?;
    let worst = samples.iter().map(|s| s.tail_bound / s.value.abs().max(1.0)).fold(0.0f64, f64::max);
    let certified = Check::new("certified tails", worst <= TAIL_TOL, format!("max relative tail bound {worst:.2e}"));
    let report = VerificationReport::new(
        Mode::TransitionCurve,
        vec![],
        vec![table, sym2, certified],
        Provenance::new(hash, Some(cache_id)),
    );
    Ok(RunOutcome { report, regimes: None, samples, files: vec![] })
}

fn run_cfs(cfg: &RunConfig, hash: String) -> Result<RunOutcome> {
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (x, y) in cfs_points(cfg) {
        let q = CfsQuery::<f64>::new(x, y)?.with_kmax(cfg.kmax)?.with_quad_tol(cfg.quad_tol)?;
        let sub = cfs_verify(&q)?;
        rows.extend(sub.rows);
        checks.extend(sub.checks.into_iter().map(|c| Check::new(format!("{} (X={x}, Y={y})", c.name), c.passed, c.detail)));
    }
    let report = VerificationReport::new(Mode::Cfs, rows, checks, Provenance::new(hash, None));
    Ok(RunOutcome { report, regimes: None, samples: vec![], files: vec![] })
}

#[derive(Serialize)]
struct JsonOutput<'a> {
    #[serde(flatten)]
    report: &'a VerificationReport,
    regimes: &'a Option<RegimeSummary>,
}

fn write_outputs(dir: &std::path::Path, outcome: &RunOutcome) -> Result<Vec<PathBuf>> {
    let mode = outcome.report.mode;
    let mut files = Vec::new();
    if mode != Mode::Selftest {
        let csv_path = dir.join(format!("{mode}.csv"));
        let out = BufWriter::new(File::create(&csv_path)?);
        if mode == Mode::TransitionCurve {
            write_samples_csv(out, &outcome.samples)?;
        } else {
            outcome.report.write_csv(out)?;
        }
        files.push(csv_path);
    }
    let json_path = dir.join(format!("{mode}.json"));
    let json = JsonOutput { report: &outcome.report, regimes: &outcome.regimes };
    serde_json::to_writer_pretty(BufWriter::new(File::create(&json_path)?), &json)?;
    files.push(json_path);
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::AlphaGrid;

    fn config(mode: Mode, dir: &tempfile::TempDir) -> RunConfig {
        let mut c = RunConfig::new(mode);
        c.cache_dir = Some(dir.path().join("cache"));
        c.out_dir = Some(dir.path().join("out"));
        c
    }

    #[test]
    fn corollary1_small_run() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = config(Mode::Corollary1, &dir);
        c.x_grid = vec![500.0];
        c.y_rule = YRule::Ratio(vec![0.1, 1.0, 10.0]);
        let out = run(&c).unwrap();
        assert!(out.passed(), "{:?}", out.report.checks);
        assert_eq!(out.report.rows.len(), 3);
        for r in &out.report.rows {
            assert_eq!(r.weight, Some(12));
            assert!((r.ratio - r.y * r.y / r.x).abs() < 1e-12);
            assert!(r.normalized_residual.is_finite());
        }
        assert_eq!(out.regimes.as_ref().unwrap().buckets.len(), 3);
        let csv = std::fs::read_to_string(dir.path().join("out/corollary1.csv")).unwrap();
        assert!(csv.starts_with("k,X,Y,ratio,lhs,rhs,residual,yardstick\n"));
        let json: serde_json::Value =
            serde_json::from_reader(File::open(dir.path().join("out/corollary1.json")).unwrap()).unwrap();
        assert_eq!(json["schema"], "scslab-report-1");
        assert!(json["provenance"]["cache_id"].as_str().unwrap().starts_with("k12-N"));
        assert!(json["regimes"]["buckets"].is_array());
    }

    #[test]
    fn changing_theta_changes_only_yardstick_columns() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = config(Mode::Corollary2, &dir);
        a.x_grid = vec![400.0];
        a.y_rule = YRule::Grid(vec![4.0, 9.0]);
        a.out_dir = None;
        let mut b = a.clone();
        b.theta = crate::transition::Theta::Ramanujan;
        let (ra, rb) = (run(&a).unwrap().report, run(&b).unwrap().report);
        assert_ne!(ra.provenance.config_hash, rb.provenance.config_hash);
        for (p, q) in ra.rows.iter().zip(&rb.rows) {
            assert_eq!((p.x, p.y, p.ratio, p.lhs, p.rhs, p.residual), (q.x, q.y, q.ratio, q.lhs, q.rhs, q.residual));
            assert_ne!(p.yardstick, q.yardstick);
            assert_ne!(p.normalized_residual, q.normalized_residual);
        }
    }

    #[test]
    fn transition_curve_schema() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = config(Mode::TransitionCurve, &dir);
        c.alpha_grid = AlphaGrid { lo: 0.5, hi: 50.0, points: 50 };
        let out = run(&c).unwrap();
        assert!(out.passed(), "{:?}", out.report.checks);
        assert_eq!(out.samples.len(), 50);
        let csv = std::fs::read_to_string(dir.path().join("out/transition-curve.csv")).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "alpha,c_f,tail_bound,nterms");
        assert_eq!(lines.count(), 50);
    }

    #[test]
    fn cfs_rows_and_ratio_rule() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = config(Mode::Cfs, &dir);
        c.x_grid = vec![300.0];
        c.y_rule = YRule::Ratio(vec![0.5, 2.0]);
        let out = run(&c).unwrap();
        assert!(out.passed());
        let ys: Vec<f64> = out.report.rows.iter().map(|r| r.y).collect();
        assert_eq!(ys, vec![150.0, 600.0]);
        assert!(dir.path().join("out/cfs.csv").exists());
    }

    #[test]
    fn infeasible_x_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = config(Mode::Corollary1, &dir);
        c.x_grid = vec![1e6];
        c.y_rule = YRule::Ratio(vec![1.0]);
        assert!(matches!(run(&c), Err(Error::Config(msg)) if msg.contains("feasibility")));
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = config(Mode::MainTheorem, &dir);
        a.x_grid = vec![300.0];
        a.y_rule = YRule::Grid(vec![5.0]);
        a.kernel = KernelChoice::Bump { relative_width: 0.05, points: 41 };
        a.out_dir = None;
        let mut b = a.clone();
        b.threads = Some(1);
        a.threads = Some(3);
        assert_eq!(run(&a).unwrap().report.rows, run(&b).unwrap().report.rows);
    }
}
