use std::fs;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::report::Mode;
use crate::eigenforms::SUPPORTED_WEIGHTS;
use crate::error::{Error, Result};
use crate::scs::DEFAULT_EPS_TRUNC;
use crate::specfun::ContourSpec;
use crate::transition::Theta;

/// Largest coefficient count a run may request.
pub const DEFAULT_MAX_COEFFICIENTS: usize = 4_000_000;

/// How Y is chosen for each X.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum YRule {
    /// The same Y for every X.
    Fixed(f64),
    /// One row per ratio: Y^2/X for shifted-convolution modes, Y/X for the
    /// Jacobi-symbol mode.
    Ratio(Vec<f64>),
    /// Explicit Y values.
    Grid(Vec<f64>),
}

impl YRule {
    pub fn values(&self) -> &[f64] {
        match self {
            YRule::Fixed(y) => std::slice::from_ref(y),
            YRule::Ratio(r) | YRule::Grid(r) => r,
        }
    }
}

/// Kernel used by the main-theorem mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelChoice {
    PointMass,
    GammaCutoff,
    /// Smooth bump around y0 = 1/(4 pi X) of half-width `relative_width * y0`.
    Bump { relative_width: f64, points: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ContourOverrides {
    pub sigma: Option<f64>,
    pub step: Option<f64>,
    pub tmax: Option<f64>,
}

impl ContourOverrides {
    pub fn spec(&self) -> Result<ContourSpec<f64>> {
        let d = ContourSpec::<f64>::default();
        if let Some(sigma) = self.sigma {
            if !(sigma > 1.0) {
                return Err(Error::Config(format!("contour abscissa must exceed 1, got {sigma}")));
            }
        }
        ContourSpec::new(self.sigma.unwrap_or(d.sigma), self.step.unwrap_or(d.step), self.tmax.unwrap_or(d.tmax))
    }
}

/// Geometric alpha grid for the transition curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl AlphaGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.lo];
        }
        let step = (self.hi / self.lo).ln() / (self.points - 1) as f64;
        (0..self.points).map(|i| self.lo * (step * i as f64).exp()).collect()
    }
}

impl Default for AlphaGrid {
    fn default() -> Self {
        Self { lo: 0.01, hi: 100.0, points: 50 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub weight: u32,
    pub x_grid: Vec<f64>,
    pub y_rule: YRule,
    pub eps_trunc: f64,
    pub contour: ContourOverrides,
    pub theta: Theta,
    pub kernel: KernelChoice,
    pub alpha_grid: AlphaGrid,
    pub kmax: usize,
    pub quad_tol: f64,
    pub max_coefficients: usize,
    /// Directory for CSV and JSON outputs; nothing is written when absent.
    pub out_dir: Option<PathBuf>,
    /// Coefficient cache directory; the environment default when absent.
    pub cache_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        let (x_grid, y_rule) = match mode {
            Mode::Cfs => (vec![10_000.0], YRule::Ratio(vec![1.0])),
            _ => (vec![10_000.0], YRule::Ratio(vec![0.1, 0.3, 1.0, 3.0, 10.0])),
        };
        Self {
            mode,
            weight: 12,
            x_grid,
            y_rule,
            eps_trunc: DEFAULT_EPS_TRUNC,
            contour: ContourOverrides::default(),
            theta: Theta::default(),
            kernel: KernelChoice::PointMass,
            alpha_grid: AlphaGrid::default(),
            kmax: crate::cfs::DEFAULT_KMAX,
            quad_tol: crate::cfs::DEFAULT_QUAD_TOL,
            max_coefficients: DEFAULT_MAX_COEFFICIENTS,
            out_dir: None,
            cache_dir: None,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !SUPPORTED_WEIGHTS.contains(&self.weight) {
            return bad(format!("weight {} unsupported; choose one of {SUPPORTED_WEIGHTS:?}", self.weight));
        }
        let positive = |v: &[f64]| !v.is_empty() && v.iter().all(|x| x.is_finite() && *x > 0.0);
        if self.mode != Mode::Selftest && self.mode != Mode::TransitionCurve {
            if !positive(&self.x_grid) {
                return bad(format!("X grid must be nonempty and positive, got {:?}", self.x_grid));
            }
            if !positive(self.y_rule.values()) {
                return bad(format!("Y rule must be nonempty and positive, got {:?}", self.y_rule));
            }
        }
        if self.mode == Mode::Cfs {
            let integral = |v: &f64| v.fract() == 0.0 && *v >= 1.0 && *v <= u32::MAX as f64;
            if !self.x_grid.iter().all(integral) {
                return bad(format!("Jacobi-symbol sums need integer X >= 1, got {:?}", self.x_grid));
            }
            if let YRule::Fixed(_) | YRule::Grid(_) = self.y_rule {
                if !self.y_rule.values().iter().all(integral) {
                    return bad(format!("Jacobi-symbol sums need integer Y >= 1, got {:?}", self.y_rule));
                }
            }
        }
        if !(self.eps_trunc > 0.0 && self.eps_trunc <= 1e-6) {
            return bad(format!("eps must lie in (0, 1e-6], got {}", self.eps_trunc));
        }
        self.contour.spec()?;
        let g = self.alpha_grid;
        if !(g.lo > 0.0 && g.hi >= g.lo && g.hi.is_finite() && g.points >= 1) {
            return bad(format!("alpha grid needs 0 < lo <= hi and points >= 1, got {g:?}"));
        }
        if let KernelChoice::Bump { relative_width, points } = self.kernel {
            if !(relative_width > 0.0 && relative_width < 1.0) || points < 3 {
                return bad(format!("bump needs 0 < relative width < 1 and >= 3 points, got {relative_width}, {points}"));
            }
        }
        crate::cfs::CfsQuery::<f64>::new(1, 1)?.with_kmax(self.kmax)?.with_quad_tol(self.quad_tol)?;
        if self.threads == Some(0) {
            return bad("thread count must be positive".into());
        }
        if let Some(dir) = &self.out_dir {
            check_writable(dir)?;
        }
        Ok(())
    }

    /// Hash of the fields that determine the numerical output; paths and
    /// the thread count are excluded.
    pub fn hash(&self) -> Result<String> {
        let mut canonical = self.clone();
        canonical.out_dir = None;
        canonical.cache_dir = None;
        canonical.threads = None;
        super::report::config_hash(&canonical)
    }
}

fn check_writable(dir: &PathBuf) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Config(format!("output directory {}: {e}", dir.display())))?;
    tempfile_probe(dir).map_err(|e| Error::Config(format!("output directory {} is not writable: {e}", dir.display())))
}

fn tempfile_probe(dir: &std::path::Path) -> std::io::Result<()> {
    let probe = dir.join(".scslab-write-probe");
    fs::write(&probe, b"")?;
    fs::remove_file(probe)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for m in Mode::ALL {
            RunConfig::new(m).validate().unwrap();
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let base = RunConfig::new(Mode::Corollary1);
        let cases: Vec<Box<dyn Fn(&mut RunConfig)>> = vec![
            Box::new(|c| c.weight = 14),
            Box::new(|c| c.x_grid.clear()),
            Box::new(|c| c.x_grid = vec![-1.0]),
            Box::new(|c| c.y_rule = YRule::Ratio(vec![])),
            Box::new(|c| c.eps_trunc = 1e-3),
            Box::new(|c| c.contour.sigma = Some(0.5)),
            Box::new(|c| c.alpha_grid.lo = 0.0),
            Box::new(|c| c.kernel = KernelChoice::Bump { relative_width: 2.0, points: 10 }),
            Box::new(|c| c.kmax = 3),
            Box::new(|c| c.threads = Some(0)),
        ];
        for (i, mutate) in cases.iter().enumerate() {
            let mut c = base.clone();
            mutate(&mut c);
            assert!(matches!(c.validate(), Err(Error::Config(_)) | Err(Error::Domain(_))), "case {i}");
        }
        let mut c = RunConfig::new(Mode::Cfs);
        c.x_grid = vec![10.5];
        assert!(c.validate().is_err());
    }

    #[test]
    fn unwritable_output_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("plain-file");
        fs::write(&file, b"x").unwrap();
        let mut c = RunConfig::new(Mode::Corollary1);
        c.out_dir = Some(file.join("sub"));
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn hash_ignores_paths_and_threads_but_not_theta() {
        let a = RunConfig::new(Mode::Corollary1);
        let mut b = a.clone();
        b.threads = Some(3);
        b.out_dir = Some("elsewhere".into());
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.theta = Theta::Ramanujan;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
    }

    #[test]
    fn json_round_trip() {
        let mut c = RunConfig::new(Mode::MainTheorem);
        c.kernel = KernelChoice::Bump { relative_width: 0.1, points: 101 };
        c.y_rule = YRule::Grid(vec![5.0, 10.0]);
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), c);
    }

    #[test]
    fn alpha_grid_is_geometric() {
        let g = AlphaGrid { lo: 0.01, hi: 100.0, points: 5 }.values();
        for (v, want) in g.iter().zip([0.01, 0.1, 1.0, 10.0, 100.0]) {
            assert!((v / want - 1.0).abs() < 1e-12);
        }
    }
}
