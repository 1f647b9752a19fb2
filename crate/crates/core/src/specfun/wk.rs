//! The Mellin–Barnes weight
//!
//!   W_k(x) = (1/2 pi i) int_(sigma) Gamma(s+k-1) Gamma(s-1/2) / Gamma(2-s) x^{-s} ds,  sigma > 1,
//!
//! by contour quadrature, by its left-shift residue expansion, and through a
//! precomputed kernel for repeated evaluation.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::num::{from_usize, lit, Real};
use crate::specfun::contour::{contour_quadrature, ContourSpec, LineKernel};
use crate::specfun::gamma::ln_gamma;

/// ln of the gamma ratio Gamma(s+k-1) Gamma(s-1/2) / Gamma(2-s).
pub fn ln_gamma_ratio<T: Real>(weight: u32, s: Complex<T>) -> Result<Complex<T>> {
    let shift = lit::<T>(weight as f64 - 1.0);
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    Ok(ln_gamma(s + shift)? + ln_gamma(s - half)? - ln_gamma(Complex::new(two, T::zero()) - s)?)
}

fn check_args<T: Real>(weight: u32, x: T, spec: &ContourSpec<T>) -> Result<()> {
    if weight < 2 {
        return Err(Error::Domain(format!("W_k needs weight >= 2, got {weight}")));
    }
    if !(x > T::zero()) {
        return Err(Error::Domain(format!("W_k needs x > 0, got {x}")));
    }
    if !(spec.sigma > T::one()) {
        return Err(Error::Domain(format!("W_k contour needs sigma > 1, got {}", spec.sigma)));
    }
    spec.validate()
}

/// W_k(x) with diagnostics from the quadrature.
#[derive(Clone, Copy, Debug)]
pub struct WkValue<T> {
    pub value: T,
    /// Imaginary part left by the quadrature; zero up to rounding.
    pub imag: T,
    pub error: T,
}

/// W_k(x) by trapezoidal quadrature on the line Re(s) = spec.sigma.
pub fn w_k<T: Real>(weight: u32, x: T, spec: &ContourSpec<T>) -> Result<WkValue<T>> {
    check_args(weight, x, spec)?;
    let ln_x = x.ln();
    let v = contour_quadrature(
        |s| match ln_gamma_ratio(weight, s) {
            Ok(lg) => (lg - s * ln_x).exp(),
            Err(_) => Complex::new(T::nan(), T::nan()),
        },
        spec,
    )?;
    Ok(WkValue { value: v.value.re, imag: v.value.im, error: v.error })
}

/// Residue expansion of W_k with its truncation diagnostics.
#[derive(Clone, Debug)]
pub struct ResidueSeries<T> {
    pub value: T,
    /// Sum of the magnitudes of the last retained term of each pole family.
    pub tail_estimate: T,
    pub terms: usize,
    /// Pole indices skipped because a zero of 1/Gamma(2-s) cancels them.
    /// The two pole families sit at half-integers and at integers <= 1-k,
    /// and 1/Gamma(2-s) vanishes only at integers >= 2, so this stays empty.
    pub skipped: Vec<usize>,
}

/// W_k(x) as the sum of residues at s = 1/2 - m (from Gamma(s-1/2)) and at
/// s = 1 - k - m (from Gamma(s+k-1)), m = 0..terms for each family.
pub fn w_k_residue_series<T: Real>(weight: u32, x: T, terms: usize) -> Result<ResidueSeries<T>> {
    if weight < 2 {
        return Err(Error::Domain(format!("W_k needs weight >= 2, got {weight}")));
    }
    if !(x > T::zero()) {
        return Err(Error::Domain(format!("W_k needs x > 0, got {x}")));
    }
    let k = lit::<T>(weight as f64);
    let half = lit::<T>(0.5);
    let ln_x = x.ln();
    let re = |z: T| Complex::new(z, T::zero());

    let mut half_family = T::zero();
    let mut int_family = T::zero();
    let mut last_half = T::zero();
    let mut last_int = T::zero();
    for m in 0..terms {
        let mf = from_usize::<T>(m);
        let sign = if m % 2 == 0 { T::one() } else { -T::one() };
        // (-1)^m/m! Gamma(k-1/2-m)/Gamma(3/2+m) x^{m-1/2}
        let ln_a = ln_gamma(re(k - half - mf))? - ln_gamma(re(mf + T::one()))? - ln_gamma(re(mf + lit(1.5)))?
            + re((mf - half) * ln_x);
        let a = sign * ln_a.exp().re;
        // (-1)^m/m! Gamma(1/2-k-m)/Gamma(k+1+m) x^{k-1+m}
        let ln_b = ln_gamma(re(half - k - mf))? - ln_gamma(re(mf + T::one()))? - ln_gamma(re(k + T::one() + mf))?
            + re((k - T::one() + mf) * ln_x);
        let b = sign * ln_b.exp().re;
        half_family = half_family + a;
        int_family = int_family + b;
        last_half = a.abs();
        last_int = b.abs();
    }
    Ok(ResidueSeries {
        value: half_family + int_family,
        tail_estimate: last_half + last_int,
        terms,
        skipped: Vec::new(),
    })
}

/// Abscissae A > 1/2 at which the moment bound M_A is tabulated. They avoid
/// integers so the line never passes through a zero of 1/Gamma(2-s).
fn bound_abscissae() -> Vec<f64> {
    let mut a = vec![0.75, 1.25, 1.75];
    let mut v: f64 = 2.5;
    while v <= 250.0 {
        a.push(v);
        v = if v < 20.0 { v + 1.0 } else { (v * 1.1).round() + 0.5 };
    }
    a
}

/// Precomputed W_k on a fixed contour together with a rigorous decay
/// envelope.
#[derive(Clone, Debug)]
pub struct WkKernel<T> {
    weight: u32,
    line: LineKernel<T>,
    /// (A, ln M_A) with |W_k(x)| <= M_A x^{-A}.
    bounds: Vec<(T, T)>,
}

impl<T: Real> WkKernel<T> {
    pub fn new(weight: u32, spec: ContourSpec<T>) -> Result<Self> {
        check_args(weight, T::one(), &spec)?;
        let line = LineKernel::new(spec, |s| Ok(ln_gamma_ratio(weight, s)?.exp()))?;
        let bounds = bound_abscissae()
            .into_par_iter()
            .map(|a| Ok((lit::<T>(a), lit::<T>(ln_moment(weight, a)?))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { weight, line, bounds })
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn spec(&self) -> &ContourSpec<T> {
        self.line.spec()
    }

    /// W_k(x) for x > 0.
    pub fn eval(&self, x: T) -> T {
        self.line.eval(x)
    }

    /// (W_k(x), x W_k'(x)).
    pub fn eval_with_derivative(&self, x: T) -> (T, T) {
        self.line.eval_with_derivative(x)
    }

    /// Envelope min_A M_A x^{-A} with M_A = (1/2 pi) int |G(A+it)| dt,
    /// obtained by moving the line to Re(s) = A.
    pub fn decay_bound(&self, x: T) -> T {
        let ln_x = x.ln();
        self.bounds
            .iter()
            .map(|&(a, ln_m)| ln_m - a * ln_x)
            .fold(T::infinity(), |acc, v| acc.min(v))
            .exp()
    }

    /// The tabulated pairs (A, ln M_A).
    pub fn moment_bounds(&self) -> &[(T, T)] {
        &self.bounds
    }
}

/// ln M_A with a 1% safety margin on the trapezoid value of the smooth,
/// unimodal integrand |G(A+it)|.
fn ln_moment(weight: u32, a: f64) -> Result<f64> {
    // The peak of |G(A+it)| widens like sqrt(A).
    let step = 0.1 * (0.5 * a.sqrt()).max(1.0);
    let ln_abs = |t: f64| -> Result<f64> { Ok(ln_gamma_ratio::<f64>(weight, Complex::new(a, t))?.re) };
    let mut values = Vec::new();
    let mut peak = f64::NEG_INFINITY;
    let mut j = 0usize;
    loop {
        let v = ln_abs(step * j as f64)?;
        peak = peak.max(v);
        values.push(v);
        j += 1;
        // Past the peak the integrand decays like e^{-pi t/2}; stop 80 e-folds down.
        if v < peak - 80.0 && j > 10 {
            break;
        }
        if j > 2_000_000 {
            return Err(Error::Quadrature(format!("moment bound at A={a} did not settle")));
        }
    }
    let mut sum = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let w = if i == 0 { 1.0 } else { 2.0 };
        sum += w * (v - peak).exp();
    }
    let integral = sum * step;
    Ok(peak + integral.ln() + (1.01f64).ln() - (2.0 * std::f64::consts::PI).ln())
}
