use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::{from_usize, lit, Real};
use crate::specfun::{gamma_q, ln_upper_incomplete_gamma};

/// How the h-sum is cut off.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HWindow {
    /// h <= Y with weight one (floor(Y) terms).
    #[default]
    Sharp,
    /// Weight one up to Y/2, then a C-infinity taper reaching zero at Y.
    Smooth,
}

impl HWindow {
    pub fn weight<T: Real>(self, h: usize, y: T) -> T {
        let hf = from_usize::<T>(h);
        match self {
            HWindow::Sharp => {
                if hf <= y { T::one() } else { T::zero() }
            }
            HWindow::Smooth => {
                let half = lit::<T>(0.5) * y;
                if hf <= half {
                    T::one()
                } else if hf >= y {
                    T::zero()
                } else {
                    let t = (y - hf) / half;
                    let a = (-T::one() / t).exp();
                    let b = (-T::one() / (T::one() - t)).exp();
                    a / (a + b)
                }
            }
        }
    }
}

/// Parameters of a smoothed shifted-convolution sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SCSQuery<T> {
    pub x: T,
    pub y: T,
    pub eps_trunc: T,
    pub window: HWindow,
}

pub const DEFAULT_EPS_TRUNC: f64 = 1e-8;

impl<T: Real> SCSQuery<T> {
    pub fn new(x: T, y: T) -> Result<Self> {
        Self::with_eps(x, y, lit(DEFAULT_EPS_TRUNC))
    }

    pub fn with_eps(x: T, y: T, eps_trunc: T) -> Result<Self> {
        let q = Self { x, y, eps_trunc, window: HWindow::Sharp };
        q.validate()?;
        Ok(q)
    }

    pub fn smooth_window(self) -> Self {
        Self { window: HWindow::Smooth, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x >= T::one()) || !self.x.is_finite() {
            return Err(Error::Domain(format!("X must be >= 1, got {}", self.x)));
        }
        if !(self.y >= T::zero()) || !self.y.is_finite() {
            return Err(Error::Domain(format!("Y must be >= 0, got {}", self.y)));
        }
        if !(self.eps_trunc > T::zero()) || self.eps_trunc > lit(1e-6) {
            return Err(Error::Domain(format!("eps_trunc must lie in (0, 1e-6], got {}", self.eps_trunc)));
        }
        Ok(())
    }

    /// Number of shifts, floor(Y).
    pub fn shifts(&self) -> usize {
        self.y.floor().to_usize().unwrap_or(0)
    }

    /// Corollary-1 hypothesis 1 <= Y <= X.
    pub fn check_corollary1(&self) -> Result<()> {
        if !(self.y >= T::one()) || !(self.y <= self.x) {
            return Err(Error::Hypothesis(format!("corollary1 requires 1 <= Y <= X, got X = {}, Y = {}", self.x, self.y)));
        }
        Ok(())
    }
}

/// Crude mean-square bound for |lambda(n) lambda(n+h)| used in truncation.
const PAIR_MEAN_BOUND: f64 = 2.0;

/// Truncation for the exponential weight: the summand behaves like
/// (m/X)^{k-1} e^{-m/X}, so with u = m/X the dropped part of the double sum is
/// at most about 2 Y X Gamma(k, u). Returns ceil(u X) for the smallest u >= k-1
/// making that below eps X.
pub fn n_trunc_exponential<T: Real>(weight: u32, x: T, y: T, eps: T) -> Result<usize> {
    let k = lit::<T>(weight as f64);
    let target = (eps / (lit::<T>(PAIR_MEAN_BOUND) * y.max(T::one()))).ln();
    let mut u = k - T::one();
    while ln_upper_incomplete_gamma(k, u)? > target {
        u = u + lit::<T>(0.25);
    }
    Ok((u * x).ceil().to_usize().unwrap_or(usize::MAX))
}

/// Truncation for the incomplete-gamma weight Q(k-1, (k-1) m / X): smallest
/// u with 2 Y u Q(k-1, (k-1) u) <= eps, giving ceil(u X).
pub fn n_trunc_incomplete_gamma<T: Real>(weight: u32, x: T, y: T, eps: T) -> Result<usize> {
    let s = lit::<T>(weight as f64 - 1.0);
    let scale = lit::<T>(PAIR_MEAN_BOUND) * y.max(T::one());
    let mut u = T::one();
    while scale * u * gamma_q(s, s * u)? > eps {
        u = u + lit::<T>(0.05);
    }
    Ok((u * x).ceil().to_usize().unwrap_or(usize::MAX))
}
