//! Exact integer power series (q-expansions).

use std::ops::{Index, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::ntt;
use crate::error::{Error, Result};

/// Below this many coefficient products the schoolbook route is used.
const SCHOOLBOOK_CUTOFF: usize = 64 * 64;

/// Power series with exact integer coefficients, index 0 is the constant term.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntegerSeries {
    coeffs: Vec<BigInt>,
}

impl IntegerSeries {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self { coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect() }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    pub fn truncated(mut self, len: usize) -> Self {
        self.coeffs.truncate(len);
        self
    }

    /// Full Cauchy product (length `len(x) + len(y) - 1`).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.is_empty() || other.is_empty() {
            return Ok(Self::default());
        }
        self.mul_trunc(other, self.len() + other.len() - 1)
    }

    /// Cauchy product truncated to the first `len` coefficients.
    pub fn mul_trunc(&self, other: &Self, len: usize) -> Result<Self> {
        if self.len().saturating_mul(other.len()) <= SCHOOLBOOK_CUTOFF {
            return Ok(self.mul_schoolbook(other, len));
        }
        let xs = &self.coeffs[..self.len().min(len)];
        let ys = &other.coeffs[..other.len().min(len)];
        Ok(Self::new(ntt::convolve(xs, ys, len)?))
    }

    /// Quadratic-time reference product truncated to `len` coefficients.
    pub fn mul_schoolbook(&self, other: &Self, len: usize) -> Self {
        let mut out = vec![BigInt::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Exact division of every coefficient by `d`.
    pub fn div_exact(&self, d: i64) -> Result<Self> {
        let divisor = BigInt::from(d);
        let mut out = Vec::with_capacity(self.len());
        for (index, c) in self.coeffs.iter().enumerate() {
            let (q, r) = c.div_rem(&divisor);
            if !r.is_zero() {
                return Err(Error::InexactDivision { divisor: d, index });
            }
            out.push(q);
        }
        Ok(Self::new(out))
    }

    /// Multiply by q^shift (prepend zeros), keeping the first `len` terms.
    pub fn shift(&self, shift: usize, len: usize) -> Self {
        let mut out = vec![BigInt::zero(); shift.min(len)];
        out.extend(self.coeffs.iter().take(len.saturating_sub(shift)).cloned());
        Self::new(out)
    }

    pub fn max_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.abs().bits()).max().unwrap_or(0)
    }
}

impl Index<usize> for IntegerSeries {
    type Output = BigInt;
    fn index(&self, i: usize) -> &BigInt {
        &self.coeffs[i]
    }
}

impl Sub for &IntegerSeries {
    type Output = IntegerSeries;
    fn sub(self, rhs: &IntegerSeries) -> IntegerSeries {
        let n = self.len().max(rhs.len());
        let zero = BigInt::zero();
        IntegerSeries::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) - rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

/// Exact product of two series: the full Cauchy product via NTT/CRT.
pub fn series_multiply(x: &IntegerSeries, y: &IntegerSeries) -> Result<IntegerSeries> {
    x.mul(y)
}

/// Divisor power sums sigma_r(n) for n in 0..=n_max (sigma_r(0) = 0), by sieve.
pub fn divisor_power_sums(r: u32, n_max: usize) -> Vec<BigInt> {
    // u128 suffices while sigma_r(n) <= zeta(r) n^r < 2^127.
    let fits = (n_max as f64).powi(r as i32) * 2.0 < 1.0e38;
    if fits {
        let mut out = vec![0u128; n_max + 1];
        for d in 1..=n_max {
            let dp = (d as u128).pow(r);
            for m in (d..=n_max).step_by(d) {
                out[m] += dp;
            }
        }
        return out.into_iter().map(BigInt::from).collect();
    }
    let mut out = vec![BigInt::zero(); n_max + 1];
    for d in 1..=n_max {
        let dp = BigInt::from(d).pow(r);
        for m in (d..=n_max).step_by(d) {
            out[m] += &dp;
        }
    }
    out
}

/// Normalized Eisenstein series E_4 = 1 + 240 sum sigma_3(n) q^n or
/// E_6 = 1 - 504 sum sigma_5(n) q^n, coefficients 0..=n.
pub fn eisenstein_series(weight: u32, n: usize) -> Result<IntegerSeries> {
    let (r, c) = match weight {
        4 => (3, 240i64),
        6 => (5, -504i64),
        w => return Err(Error::EisensteinWeight(w)),
    };
    let mut coeffs = divisor_power_sums(r, n);
    let c = BigInt::from(c);
    for s in coeffs.iter_mut().skip(1) {
        *s *= &c;
    }
    coeffs[0] = BigInt::from(1);
    Ok(IntegerSeries::new(coeffs))
}

/// Delta = (E_4^3 - E_6^2) / 1728, coefficients 0..=n, i.e. Ramanujan tau(m)
/// at index m.
pub fn delta_series(n: usize) -> Result<IntegerSeries> {
    let len = n + 1;
    let e4 = eisenstein_series(4, n)?;
    let e6 = eisenstein_series(6, n)?;
    let e4_sq = e4.mul_trunc(&e4, len)?;
    let e4_cubed = e4_sq.mul_trunc(&e4, len)?;
    let e6_sq = e6.mul_trunc(&e6, len)?;
    (&e4_cubed - &e6_sq).div_exact(1728)
}
