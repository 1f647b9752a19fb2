//! L(1, sym^2 f) by two independent routes, plus a third check through the
//! functional equation of L(s, f x f).

use num_complex::Complex;

use crate::eigenforms::Eigenform;
use crate::error::{Error, Result};
use crate::num::{from_usize, lit, CompensatedSum, Real};
use crate::specfun::{ln_gamma, ln_gamma_real, zeta_real, ContourSpec, LineKernel};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sym2Method {
    /// Smoothed Dirichlet series sum_n b(n) V(n) with b(n) = sum_{m^2 d = n} lambda(d^2),
    /// where the weight V carries the dual-sum correction of the functional equation.
    DirichletSmoothed,
    /// Slope of the exponentially smoothed mean square sum_n lambda(n)^2 e^{-n/T}.
    RankinSlope,
    /// Residue extracted from the theta relation of L(s, f x f); cross-check only.
    ThetaRelation,
}

#[derive(Clone, Copy, Debug)]
pub struct Sym2Estimate<T> {
    pub method: Sym2Method,
    pub value: T,
    pub error: T,
}

/// Both estimates and whether they agree within their combined error.
#[derive(Clone, Copy, Debug)]
pub struct Sym2CrossCheck<T> {
    pub smoothed: Sym2Estimate<T>,
    pub slope: Sym2Estimate<T>,
    pub agree: bool,
}

impl<T: Real> Sym2CrossCheck<T> {
    /// The smoothed estimate, which is the more accurate of the two.
    pub fn value(&self) -> T {
        self.smoothed.value
    }

    pub fn relative_gap(&self) -> T {
        (self.smoothed.value - self.slope.value).abs() / self.smoothed.value.abs()
    }
}

pub fn sym2_l1<T: Real>(f: &Eigenform<T>, method: Sym2Method) -> Result<Sym2Estimate<T>> {
    match method {
        Sym2Method::DirichletSmoothed => dirichlet_smoothed(f),
        Sym2Method::RankinSlope => rankin_slope(f),
        Sym2Method::ThetaRelation => rankin_selberg_residue(f),
    }
}

pub fn sym2_l1_cross_checked<T: Real>(f: &Eigenform<T>) -> Result<Sym2CrossCheck<T>> {
    let smoothed = dirichlet_smoothed(f)?;
    let slope = rankin_slope(f)?;
    let gap = (smoothed.value - slope.value).abs();
    Ok(Sym2CrossCheck { smoothed, slope, agree: gap <= smoothed.error + slope.error })
}

/// Relative size below which a smoothed term is dropped.
const SMOOTH_CUTOFF: f64 = 1e-18;

fn contour() -> ContourSpec<f64> {
    ContourSpec { sigma: 2.0, step: 0.05, tmax: 60.0 }
}

fn cast_spec<T: Real>(s: ContourSpec<f64>) -> ContourSpec<T> {
    ContourSpec { sigma: lit(s.sigma), step: lit(s.step), tmax: lit(s.tmax) }
}

/// ln of pi^{-3w/2} Gamma((w+1)/2) Gamma((w+k-1)/2) Gamma((w+k)/2).
fn ln_sym2_gamma<T: Real>(weight: u32, w: Complex<T>) -> Result<Complex<T>> {
    let half = lit::<T>(0.5);
    let k = lit::<T>(weight as f64);
    Ok(ln_gamma((w + T::one()) * half)?
        + ln_gamma((w + k - T::one()) * half)?
        + ln_gamma((w + k) * half)?
        - w * (lit::<T>(1.5) * T::PI().ln()))
}

/// Smoothing weights V(0..=n), stopping once they fall below the cutoff.
fn smoothing_weights<T: Real>(weight: u32, limit: usize) -> Result<Vec<T>> {
    let kernel = LineKernel::new(cast_spec::<T>(contour()), |w: Complex<T>| {
        let one = Complex::new(T::one(), T::zero());
        Ok(ln_sym2_gamma(weight, w)?.exp() * ((w - one).inv() + w.inv()))
    })?;
    let mut v = vec![T::zero()];
    let v1 = kernel.eval(T::one());
    for n in 1..=limit {
        let value = kernel.eval(from_usize::<T>(n));
        v.push(value);
        if n > 4 && value.abs() < lit::<T>(SMOOTH_CUTOFF) * v1.abs() {
            return Ok(v);
        }
    }
    Err(Error::Quadrature(format!("smoothing weights still significant at n = {limit}")))
}

fn dirichlet_smoothed<T: Real>(f: &Eigenform<T>) -> Result<Sym2Estimate<T>> {
    let k = f.weight();
    let weights = smoothing_weights::<T>(k, 100_000)?;
    let n_max = weights.len() - 1;
    let d_max = n_max;
    f.require(d_max * d_max)?;
    let lam = f.lambdas();
    // b(n) = sum_{m^2 d = n} lambda(d^2)
    let mut b = vec![T::zero(); n_max + 1];
    let mut m = 1usize;
    while m * m <= n_max {
        let m2 = m * m;
        for d in 1..=n_max / m2 {
            b[m2 * d] = b[m2 * d] + lam[d * d];
        }
        m += 1;
    }
    let mut acc = CompensatedSum::new();
    for n in 1..=n_max {
        acc.add(b[n] * weights[n]);
    }
    let big_lambda = acc.value();
    let half = lit::<T>(0.5);
    let kf = lit::<T>(k as f64);
    let ln_gamma_at_one = ln_gamma_real(T::one())? + ln_gamma_real(kf * half)? + ln_gamma_real((kf + T::one()) * half)?
        - lit::<T>(1.5) * T::PI().ln();
    let value = big_lambda / ln_gamma_at_one.exp();
    // Dropped terms are below the cutoff; quadrature on the analytic strip is
    // at roundoff, so the estimate is dominated by accumulated rounding.
    let error = value.abs() * (lit::<T>(1e3) * T::eps() + lit::<T>(SMOOTH_CUTOFF) * from_usize::<T>(n_max));
    Ok(Sym2Estimate { method: Sym2Method::DirichletSmoothed, value, error })
}

/// Smoothed mean square sum_{n <= N} lambda(n)^2 e^{-n/T}.
fn smoothed_mean_square<T: Real>(lam2: &[T], t: T) -> T {
    let mut acc = CompensatedSum::new();
    for (n, &l) in lam2.iter().enumerate().skip(1) {
        acc.add(l * (-from_usize::<T>(n) / t).exp());
    }
    acc.value()
}

/// Depth of the exponential cutoff relative to N: e^{-40} ~ 4e-18.
const SLOPE_DEPTH: f64 = 40.0;

fn rankin_slope<T: Real>(f: &Eigenform<T>) -> Result<Sym2Estimate<T>> {
    let n = f.len();
    let t_max = from_usize::<T>(n) / lit::<T>(SLOPE_DEPTH);
    if t_max < lit::<T>(64.0) {
        return Err(Error::InsufficientCoefficients { have: n, need: (64.0 * SLOPE_DEPTH) as usize });
    }
    let lam2: Vec<T> = f.lambdas().iter().map(|&l| l * l).collect();
    // dyadic scales T_max/8, T_max/4, T_max/2, T_max
    let ts: Vec<T> = (0..4).map(|j| t_max / lit::<T>((1u32 << (3 - j)) as f64)).collect();
    let ss: Vec<T> = ts.iter().map(|&t| smoothed_mean_square(&lam2, t)).collect();
    let slope = |i: usize, j: usize| (ss[j] - ss[i]) / (ts[j] - ts[i]);
    // Least-squares line through the four points.
    let nf = lit::<T>(4.0);
    let mean_t = ts.iter().copied().sum::<T>() / nf;
    let mean_s = ss.iter().copied().sum::<T>() / nf;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    for (&t, &s) in ts.iter().zip(ss.iter()) {
        sxy = sxy + (t - mean_t) * (s - mean_s);
        sxx = sxx + (t - mean_t) * (t - mean_t);
    }
    let zeta2 = zeta_real(lit::<T>(2.0))?;
    let value = sxy / sxx * zeta2;
    let error = (slope(2, 3) - slope(0, 1)).abs() * zeta2 + value.abs() * lit::<T>(1e-12);
    Ok(Sym2Estimate { method: Sym2Method::RankinSlope, value, error })
}

/// Residue of L(s, f x f) at s = 1 (which is L(1, sym^2 f)) from the theta
/// relation of the completed function Lambda(s) = (2 pi)^{-2s} Gamma(s) Gamma(s+k-1) L(s, f x f):
///
///   sum c(n) Phi(n x) - x^{-1} sum c(n) Phi(n / x) = r (1/x - 1),  r = Res Lambda,
///
/// with c(n) = sum_{m^2 d = n} lambda(d)^2 and Phi the inverse Mellin transform
/// of the gamma factor. Evaluated at x = 1/2.
pub fn rankin_selberg_residue<T: Real>(f: &Eigenform<T>) -> Result<Sym2Estimate<T>> {
    let k = f.weight();
    let kf = lit::<T>(k as f64);
    let two_pi_ln = (lit::<T>(2.0) * T::PI()).ln();
    let kernel = LineKernel::new(cast_spec::<T>(contour()), |w: Complex<T>| {
        Ok((ln_gamma(w)? + ln_gamma(w + kf - T::one())? - w * (two_pi_ln * lit::<T>(2.0))).exp())
    })?;
    let phi1 = kernel.eval(lit::<T>(0.5));
    let mut n_max = 1usize;
    loop {
        let v = kernel.eval(from_usize::<T>(n_max) * lit::<T>(0.5));
        if n_max > 4 && v.abs() < lit::<T>(SMOOTH_CUTOFF) * phi1.abs() {
            break;
        }
        n_max += 1;
        if n_max > 1_000_000 {
            return Err(Error::Quadrature("theta kernel did not decay".into()));
        }
    }
    f.require(n_max)?;
    let lam = f.lambdas();
    let mut c = vec![T::zero(); n_max + 1];
    let mut m = 1usize;
    while m * m <= n_max {
        let m2 = m * m;
        for d in 1..=n_max / m2 {
            c[m2 * d] = c[m2 * d] + lam[d] * lam[d];
        }
        m += 1;
    }
    let mut near = CompensatedSum::new();
    let mut far = CompensatedSum::new();
    for n in 1..=n_max {
        let nf = from_usize::<T>(n);
        near.add(c[n] * kernel.eval(nf * lit::<T>(0.5)));
        far.add(c[n] * kernel.eval(nf * lit::<T>(2.0)));
    }
    let residue = near.value() - lit::<T>(2.0) * far.value();
    let gamma_at_one = (ln_gamma_real(kf)? - lit::<T>(2.0) * two_pi_ln).exp();
    let value = residue / gamma_at_one;
    let error = value.abs() * lit::<T>(1e3) * T::eps();
    Ok(Sym2Estimate { method: Sym2Method::ThetaRelation, value, error })
}
