use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use scslab::eigenforms::{coefficient_id, CoefficientCache, CACHE_DIR_ENV};
use scslab::harness::{run, AlphaGrid, KernelChoice, Mode, RunConfig, RunOutcome, YRule};
use scslab::scs::{corollary1_n_trunc, n_trunc_incomplete_gamma, SCSQuery};
use scslab::transition::Theta;
use scslab::Error;

const EXIT_INVARIANT: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "scslab", version, about = "Numerical checks of averaged shifted convolution sums and the Jacobi-symbol transition theorem")]
#[command(after_help = format!("The coefficient cache lives in ./.scslab-cache unless {CACHE_DIR_ENV} is set.\nExit status: 0 pass, 1 invariant failure, 2 configuration error."))]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build (or rebuild) the Hecke eigenvalue table for a weight.
    BuildCache(BuildCacheArgs),
    /// Compare shifted-convolution sums with their predicted main terms.
    Verify(VerifyArgs),
    /// Tabulate the transition function c_f on a geometric alpha grid.
    Curve(CurveArgs),
    /// Compare Jacobi-symbol double sums with the transition-function prediction.
    Cfs(CfsArgs),
    /// Run the quick property suites of every module.
    Selftest(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Directory for CSV and JSON outputs.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildCacheArgs {
    #[arg(long, default_value_t = 12)]
    weight: u32,
    /// Number of coefficients; derived from --x and --ratio when absent.
    #[arg(long)]
    n: Option<usize>,
    /// Largest X the table must serve.
    #[arg(long, default_value_t = 10_000.0)]
    x: f64,
    /// Largest ratio Y^2/X the table must serve.
    #[arg(long, default_value_t = 10.0)]
    ratio: f64,
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    /// Overwrite an existing (possibly corrupt) table.
    #[arg(long)]
    rebuild: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyMode {
    Corollary1,
    Corollary2,
    MainTheorem,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    PointMass,
    GammaCutoff,
    Bump,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "corollary1")]
    mode: VerifyMode,
    #[arg(long, default_value_t = 12)]
    weight: u32,
    /// X values (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "10000")]
    x: Vec<f64>,
    /// Ratios Y^2/X (comma separated); ignored when --y is given.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.3,1,3,10")]
    ratio: Vec<f64>,
    /// Explicit Y values (comma separated).
    #[arg(long, value_delimiter = ',')]
    y: Option<Vec<f64>>,
    /// Truncation tolerance of the n-sums.
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    /// Exponent toward Ramanujan in the yardstick: 0 or 7/64.
    #[arg(long, default_value = "7/64", value_parser = parse_theta)]
    theta: Theta,
    /// Kernel of the main-theorem mode.
    #[arg(long, value_enum, default_value = "point-mass")]
    kernel: KernelArg,
    /// Bump half-width relative to its centre 1/(4 pi X).
    #[arg(long, default_value_t = 0.05)]
    bump_width: f64,
    #[arg(long, default_value_t = 201)]
    bump_points: usize,
    /// Contour abscissa of the W_k integral.
    #[arg(long)]
    sigma: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long, default_value_t = 12)]
    weight: u32,
    #[arg(long, default_value_t = 0.01)]
    alpha_min: f64,
    #[arg(long, default_value_t = 100.0)]
    alpha_max: f64,
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long)]
    sigma: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CfsArgs {
    /// X values (comma separated integers).
    #[arg(long, value_delimiter = ',', default_value = "10000")]
    x: Vec<f64>,
    /// Ratios Y/X (comma separated); ignored when --y is given.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    ratio: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    y: Option<Vec<f64>>,
    /// Truncation of the k-sums in C(alpha).
    #[arg(long, default_value_t = 10_000)]
    kmax: usize,
    #[arg(long, default_value_t = 1e-10)]
    quad_tol: f64,
    #[command(flatten)]
    common: CommonArgs,
}

fn parse_theta(s: &str) -> Result<Theta, String> {
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|e| format!("{e}"))?;
            let den: f64 = den.trim().parse().map_err(|e| format!("{e}"))?;
            num / den
        }
        None => s.trim().parse().map_err(|e| format!("{e}"))?,
    };
    Theta::from_f64(value).map_err(|e| e.to_string())
}

fn y_rule(ratio: Vec<f64>, y: Option<Vec<f64>>) -> YRule {
    match y {
        Some(ys) if ys.len() == 1 => YRule::Fixed(ys[0]),
        Some(ys) => YRule::Grid(ys),
        None => YRule::Ratio(ratio),
    }
}

fn apply_common(cfg: &mut RunConfig, common: CommonArgs) {
    cfg.threads = common.threads;
    cfg.out_dir = common.out;
}

fn build_cache(args: BuildCacheArgs) -> Result<ExitCode, Error> {
    let n = match args.n {
        Some(n) => n,
        None => {
            let y = (args.ratio * args.x).sqrt();
            let q = SCSQuery::with_eps(args.x, y, args.eps)?;
            corollary1_n_trunc(args.weight, &q)?.max(n_trunc_incomplete_gamma(args.weight, args.x, y, args.eps)?)
        }
    };
    let cache = CoefficientCache::from_env();
    let f = if args.rebuild { cache.rebuild::<f64>(args.weight, n)? } else { cache.acquire::<f64>(args.weight, n)? };
    println!("{} -> {}", coefficient_id(&f)?, cache.dir().display());
    Ok(ExitCode::SUCCESS)
}

fn print_outcome(out: &RunOutcome) {
    let report = &out.report;
    println!("mode {}  config {}", report.mode, &report.provenance.config_hash[..16]);
    if let Some(id) = &report.provenance.cache_id {
        println!("coefficients {id}");
    }
    if !report.rows.is_empty() {
        println!("{:>10} {:>10} {:>10} {:>16} {:>16} {:>12}", "X", "Y", "ratio", "lhs", "rhs", "normalized");
        for r in &report.rows {
            println!(
                "{:>10} {:>10.4} {:>10.4} {:>16.8e} {:>16.8e} {:>12.4e}",
                r.x, r.y, r.ratio, r.lhs, r.rhs, r.normalized_residual
            );
        }
    }
    if !out.samples.is_empty() {
        println!("{} transition samples", out.samples.len());
    }
    if let Some(regimes) = &out.regimes {
        for b in &regimes.buckets {
            let status = match &b.check {
                Some(c) => format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail),
                None => "no limiting statement".to_string(),
            };
            println!("regime {:?} rows {:?}: {status}", b.regime, b.rows);
        }
    }
    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    for f in &out.files {
        println!("wrote {}", f.display());
    }
}

fn execute(cfg: RunConfig) -> Result<ExitCode, Error> {
    let out = run(&cfg)?;
    print_outcome(&out);
    Ok(if out.passed() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_INVARIANT) })
}

fn dispatch(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::BuildCache(args) => build_cache(args),
        Command::Verify(args) => {
            let mode = match args.mode {
                VerifyMode::Corollary1 => Mode::Corollary1,
                VerifyMode::Corollary2 => Mode::Corollary2,
                VerifyMode::MainTheorem => Mode::MainTheorem,
            };
            let mut cfg = RunConfig::new(mode);
            cfg.weight = args.weight;
            cfg.x_grid = args.x;
            cfg.y_rule = y_rule(args.ratio, args.y);
            cfg.eps_trunc = args.eps;
            cfg.theta = args.theta;
            cfg.contour.sigma = args.sigma;
            cfg.kernel = match args.kernel {
                KernelArg::PointMass => KernelChoice::PointMass,
                KernelArg::GammaCutoff => KernelChoice::GammaCutoff,
                KernelArg::Bump => KernelChoice::Bump { relative_width: args.bump_width, points: args.bump_points },
            };
            apply_common(&mut cfg, args.common);
            execute(cfg)
        }
        Command::Curve(args) => {
            let mut cfg = RunConfig::new(Mode::TransitionCurve);
            cfg.weight = args.weight;
            cfg.alpha_grid = AlphaGrid { lo: args.alpha_min, hi: args.alpha_max, points: args.points };
            cfg.contour.sigma = args.sigma;
            apply_common(&mut cfg, args.common);
            execute(cfg)
        }
        Command::Cfs(args) => {
            let mut cfg = RunConfig::new(Mode::Cfs);
            cfg.x_grid = args.x;
            cfg.y_rule = y_rule(args.ratio, args.y);
            cfg.kmax = args.kmax;
            cfg.quad_tol = args.quad_tol;
            apply_common(&mut cfg, args.common);
            execute(cfg)
        }
        Command::Selftest(common) => {
            let mut cfg = RunConfig::new(Mode::Selftest);
            apply_common(&mut cfg, common);
            execute(cfg)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Domain(_) | Error::Hypothesis(_) | Error::UnsupportedWeight { .. } => {
                    ExitCode::from(EXIT_CONFIG)
                }
                Error::Cache { .. } => {
                    eprintln!("the coefficient cache is corrupt; rerun `scslab build-cache --rebuild` with the same weight and size");
                    ExitCode::from(EXIT_INVARIANT)
                }
                _ => ExitCode::from(EXIT_INVARIANT),
            }
        }
    }
}
