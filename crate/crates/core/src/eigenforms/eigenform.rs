use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::series::{delta_series, eisenstein_series, IntegerSeries};
use crate::error::{Error, Result};
use crate::num::Real;

/// Weights k for which S_k(SL_2(Z)) is one-dimensional.
pub const SUPPORTED_WEIGHTS: &[u32] = &[12, 16, 18, 20, 22, 26];

/// Normalized Hecke eigenform of level 1: exact coefficients a(n) in the
/// weight-k arithmetic normalization and eigenvalues
/// lambda(n) = a(n) / n^((k-1)/2).
///
/// Index 0 of both vectors is a placeholder (a(0) = 0).
#[derive(Clone, Debug)]
pub struct Eigenform<T> {
    weight: u32,
    coeffs: Vec<BigInt>,
    lambda: Vec<T>,
}

impl<T: Real> Eigenform<T> {
    /// Wraps exact coefficients `a(0..=N)`; `coeffs[0]` must be zero and
    /// `coeffs[1]` one.
    pub fn from_coefficients(weight: u32, coeffs: Vec<BigInt>) -> Result<Self> {
        check_weight(weight)?;
        if coeffs.len() < 2 || !coeffs[0].is_zero() || coeffs[1] != BigInt::from(1) {
            return Err(Error::Domain("eigenform coefficients must start 0, 1".into()));
        }
        let half = 0.5 * (weight as f64 - 1.0);
        let lambda = coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| {
                if n == 0 {
                    return T::zero();
                }
                let a = a.to_f64().unwrap_or(f64::NAN);
                let scale = (half * (n as f64).ln()).exp();
                T::from_f64(a / scale).unwrap_or_else(T::nan)
            })
            .collect();
        Ok(Self { weight, coeffs, lambda })
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Truncation length N (largest n with a known coefficient).
    pub fn len(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn a(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }

    pub fn lambda(&self, n: usize) -> T {
        self.lambda[n]
    }

    /// Exact coefficients indexed from 0 (index 0 unused).
    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Eigenvalues indexed from 0 (index 0 unused).
    pub fn lambdas(&self) -> &[T] {
        &self.lambda
    }

    /// Errors unless at least `need` coefficients are available.
    pub fn require(&self, need: usize) -> Result<()> {
        if self.len() < need {
            return Err(Error::InsufficientCoefficients { have: self.len(), need });
        }
        Ok(())
    }
}

pub(crate) fn check_weight(weight: u32) -> Result<()> {
    if SUPPORTED_WEIGHTS.contains(&weight) {
        Ok(())
    } else {
        Err(Error::UnsupportedWeight { weight, supported: SUPPORTED_WEIGHTS })
    }
}

/// The unique normalized cusp form of weight `weight` as a q-series with
/// coefficients 0..=n: Delta times a monomial in E_4 and E_6.
pub fn cusp_form_series(weight: u32, n: usize) -> Result<IntegerSeries> {
    check_weight(weight)?;
    let len = n + 1;
    let delta = delta_series(n)?;
    let (e4_power, e6_power) = match weight {
        12 => (0, 0),
        16 => (1, 0),
        18 => (0, 1),
        20 => (2, 0),
        22 => (1, 1),
        26 => (2, 1),
        _ => unreachable!(),
    };
    let mut f = delta;
    if e4_power > 0 {
        let e4 = eisenstein_series(4, n)?;
        for _ in 0..e4_power {
            f = f.mul_trunc(&e4, len)?;
        }
    }
    if e6_power > 0 {
        let e6 = eisenstein_series(6, n)?;
        f = f.mul_trunc(&e6, len)?;
    }
    Ok(f)
}

/// Builds the level-1 eigenform of weight `weight` with coefficients up to n.
pub fn build_eigenform<T: Real>(weight: u32, n: usize) -> Result<Eigenform<T>> {
    check_weight(weight)?;
    if n < 2 {
        return Err(Error::Domain(format!("eigenform length must be at least 2, got {n}")));
    }
    let series = cusp_form_series(weight, n)?;
    Eigenform::from_coefficients(weight, series.into_coeffs())
}
