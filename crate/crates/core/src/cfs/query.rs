use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::{lit, Real};

pub const DEFAULT_KMAX: usize = 10_000;
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Limits of the Jacobi-symbol double sum over odd m <= X, odd n <= Y, and
/// the numerical controls of C(alpha).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CfsQuery<T> {
    pub x: u64,
    pub y: u64,
    pub kmax: usize,
    pub quad_tol: T,
}

impl<T: Real> CfsQuery<T> {
    pub fn new(x: u64, y: u64) -> Result<Self> {
        let q = Self { x, y, kmax: DEFAULT_KMAX, quad_tol: lit(DEFAULT_QUAD_TOL) };
        q.validate()?;
        Ok(q)
    }

    pub fn with_kmax(mut self, kmax: usize) -> Result<Self> {
        self.kmax = kmax;
        self.validate()?;
        Ok(self)
    }

    pub fn with_quad_tol(mut self, quad_tol: T) -> Result<Self> {
        self.quad_tol = quad_tol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.x == 0 || self.y == 0 {
            return Err(Error::Config(format!("sum limits must be >= 1, got X={}, Y={}", self.x, self.y)));
        }
        if self.kmax < 10 {
            return Err(Error::Config(format!("kmax must be >= 10, got {}", self.kmax)));
        }
        if !(self.quad_tol > T::zero()) || !self.quad_tol.is_finite() {
            return Err(Error::Config(format!("quad_tol must be positive, got {}", self.quad_tol)));
        }
        Ok(())
    }

    /// alpha = Y / X.
    pub fn alpha(&self) -> T {
        T::from_u64(self.y).unwrap() / T::from_u64(self.x).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(CfsQuery::<f64>::new(0, 5).is_err());
        assert!(CfsQuery::<f64>::new(5, 0).is_err());
        let q = CfsQuery::<f64>::new(10, 30).unwrap();
        assert_eq!(q.alpha(), 3.0);
        assert!(q.with_kmax(9).is_err());
        assert!(q.with_quad_tol(0.0).is_err());
        assert!(q.with_quad_tol(f64::NAN).is_err());
    }
}
