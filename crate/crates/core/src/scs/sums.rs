//! The left-hand sides: smoothed shifted-convolution double sums.

use rayon::prelude::*;

use crate::eigenforms::Eigenform;
use crate::error::{Error, Result};
use crate::num::{from_usize, lit, pairwise_sum, CompensatedSum, Real};
use crate::scs::correlate::{autocorrelation, blockwise_correlation};
use crate::scs::query::{n_trunc_exponential, n_trunc_incomplete_gamma, SCSQuery};
use crate::specfun::{gamma_q, gauss_legendre, ln_gamma_real, ln_upper_incomplete_gamma};
use crate::transition::SmoothingKernel;

/// Accumulation order for the direct double sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumOrder {
    Compensated,
    Pairwise,
}

fn half_k<T: Real>(f: &Eigenform<T>) -> T {
    lit::<T>((f.weight() as f64 - 1.0) / 2.0)
}

/// lambda(n) (n/X)^{(k-1)/2} for n = 0..=len (index 0 is zero).
fn scaled_lambdas<T: Real>(f: &Eigenform<T>, x: T, len: usize) -> Vec<T> {
    let e = half_k(f);
    let lam = f.lambdas();
    (0..=len)
        .map(|n| if n == 0 { T::zero() } else { lam[n] * (from_usize::<T>(n) / x).powf(e) })
        .collect()
}

fn sum_in_order<T: Real>(values: &[T], order: SumOrder) -> T {
    match order {
        SumOrder::Compensated => values.iter().copied().collect::<CompensatedSum<T>>().value(),
        SumOrder::Pairwise => pairwise_sum(values),
    }
}

/// Truncation point used by scs_direct / scs_fast for this query.
pub fn corollary1_n_trunc<T: Real>(weight: u32, q: &SCSQuery<T>) -> Result<usize> {
    n_trunc_exponential(weight, q.x, q.y, q.eps_trunc)
}

/// Sum over h <= Y, n of lambda(n) lambda(n+h) (n(n+h)/X^2)^{(k-1)/2} e^{-(n+h)/X}
/// by the double loop, parallel over h.
pub fn scs_direct<T: Real>(f: &Eigenform<T>, q: &SCSQuery<T>) -> Result<T> {
    scs_direct_ordered(f, q, SumOrder::Compensated)
}

pub fn scs_direct_ordered<T: Real>(f: &Eigenform<T>, q: &SCSQuery<T>, order: SumOrder) -> Result<T> {
    q.validate()?;
    let shifts = q.shifts();
    if shifts == 0 {
        return Ok(T::zero());
    }
    let n = corollary1_n_trunc(f.weight(), q)?;
    f.require(n)?;
    let a = scaled_lambdas(f, q.x, n);
    let b: Vec<T> = a.iter().enumerate().map(|(m, &v)| v * (-from_usize::<T>(m) / q.x).exp()).collect();
    let per_h: Vec<T> = (1..=shifts)
        .into_par_iter()
        .map(|h| {
            let w = q.window.weight(h, q.y);
            if w == T::zero() || h >= n {
                return T::zero();
            }
            let terms: Vec<T> = (1..=n - h).map(|i| a[i] * b[i + h]).collect();
            w * sum_in_order(&terms, order)
        })
        .collect();
    Ok(sum_in_order(&per_h, order))
}

/// Same sum as scs_direct from one FFT autocorrelation of
/// A(n) = lambda(n) (n/X)^{(k-1)/2} e^{-n/(2X)}, using
/// e^{-(n+h)/X} = e^{-n/(2X)} e^{-(n+h)/(2X)} e^{-h/(2X)}.
pub fn scs_fast<T: Real>(f: &Eigenform<T>, q: &SCSQuery<T>) -> Result<T> {
    q.validate()?;
    let shifts = q.shifts();
    if shifts == 0 {
        return Ok(T::zero());
    }
    let n = corollary1_n_trunc(f.weight(), q)?;
    f.require(n)?;
    let half = lit::<T>(0.5);
    let a: Vec<T> = scaled_lambdas(f, q.x, n)
        .into_iter()
        .enumerate()
        .map(|(m, v)| v * (-half * from_usize::<T>(m) / q.x).exp())
        .collect();
    let r = autocorrelation(&a, shifts);
    let per_h: Vec<T> = (1..=shifts)
        .map(|h| q.window.weight(h, q.y) * r[h] * (-half * from_usize::<T>(h) / q.x).exp())
        .collect();
    Ok(per_h.iter().copied().collect::<CompensatedSum<T>>().value())
}

/// Sum over h <= Y, n of lambda(n) lambda(n+h) (n/(n+h))^{(k-1)/2} Q(k-1, (k-1)(n+h)/X),
/// Q the regularized upper incomplete gamma function.
pub fn corollary2_lhs<T: Real>(f: &Eigenform<T>, x: T, y: T, eps_trunc: T) -> Result<T> {
    let q = SCSQuery::with_eps(x, y, eps_trunc)?;
    let shifts = q.shifts();
    if shifts == 0 {
        return Ok(T::zero());
    }
    let n = n_trunc_incomplete_gamma(f.weight(), x, y, eps_trunc)?;
    f.require(n)?;
    let s = lit::<T>(f.weight() as f64 - 1.0);
    let a = scaled_lambdas(f, x, n);
    let e = half_k(f);
    let lam = f.lambdas();
    let b = (0..=n)
        .into_par_iter()
        .map(|m| {
            if m == 0 {
                return Ok(T::zero());
            }
            let mf = from_usize::<T>(m);
            Ok(lam[m] * (mf / x).powf(-e) * gamma_q(s, s * mf / x)?)
        })
        .collect::<Result<Vec<T>>>()?;
    let per_h: Vec<T> = (1..=shifts)
        .into_par_iter()
        .map(|h| {
            if h >= n {
                return T::zero();
            }
            (1..=n - h).map(|i| a[i] * b[i + h]).collect::<CompensatedSum<T>>().value()
        })
        .collect();
    Ok(per_h.iter().copied().collect::<CompensatedSum<T>>().value())
}

/// S_f(psi, Y) = sum over h <= Y, n of a(n) a(n+h) int psi(y) e^{-4 pi (n+h) y} y^{k-2} dy,
/// a(n) = lambda(n) n^{(k-1)/2}.
pub fn scs_weighted<T: Real>(f: &Eigenform<T>, psi: &SmoothingKernel<T>, y: T, eps_trunc: T) -> Result<T> {
    if psi.is_zero() {
        return Ok(T::zero());
    }
    let k = lit::<T>(f.weight() as f64);
    let four_pi = lit::<T>(4.0) * T::PI();
    match psi {
        SmoothingKernel::PointMass { y0 } => {
            if !(*y0 > T::zero()) {
                return Err(Error::Domain(format!("point mass must sit at y0 > 0, got {y0}")));
            }
            let x_eff = T::one() / (four_pi * *y0);
            let q = SCSQuery::with_eps(x_eff, y, eps_trunc)?;
            let scale = ((k - lit::<T>(2.0)) * y0.ln() + (k - T::one()) * x_eff.ln()).exp();
            Ok(scale * scs_fast(f, &q)?)
        }
        SmoothingKernel::GammaCutoff { x } => {
            let q = SCSQuery::with_eps(*x, y, eps_trunc)?;
            let n = n_trunc_incomplete_gamma(f.weight(), *x, y, eps_trunc)?;
            f.require(n)?;
            let s = k - T::one();
            let c0 = -four_pi.ln() - ln_gamma_real(s)?;
            let ln_w = |m: usize| -> Result<LogWeight<T>> {
                let mf = from_usize::<T>(m);
                let ln_abs = c0 - s * (four_pi * mf).ln() + ln_upper_incomplete_gamma(s, s * mf / *x)?;
                Ok(LogWeight { ln_abs, sign: T::one() })
            };
            correlate_weighted(f, &q, n, ln_w)
        }
        SmoothingKernel::Sampled { ys, psi } => {
            if !(ys[0] > T::zero()) {
                return Err(Error::Domain("kernel support reaches y = 0 where the weight diverges".into()));
            }
            let x_eff = (T::one() / (four_pi * ys[0])).max(T::one());
            let q = SCSQuery::with_eps(x_eff, y, eps_trunc)?;
            let n = n_trunc_exponential(f.weight(), x_eff, y, eps_trunc)?;
            f.require(n)?;
            let nodes = kernel_nodes(ys, psi, four_pi * from_usize::<T>(n));
            let km2 = k - lit::<T>(2.0);
            // log-sum-exp over positive and negative node contributions
            let ln_w = |m: usize| -> Result<LogWeight<T>> {
                let mf = from_usize::<T>(m);
                let mut pos = Vec::new();
                let mut neg = Vec::new();
                for &(yy, w) in &nodes {
                    let l = w.abs().ln() + km2 * yy.ln() - four_pi * mf * yy;
                    if w > T::zero() { pos.push(l) } else { neg.push(l) }
                }
                Ok(signed_log(log_sum_exp(&pos), log_sum_exp(&neg)))
            };
            correlate_weighted(f, &q, n, ln_w)
        }
    }
}

fn log_sum_exp<T: Real>(v: &[T]) -> T {
    let m = v.iter().copied().fold(T::neg_infinity(), T::max);
    if m == T::neg_infinity() {
        return m;
    }
    m + v.iter().map(|&x| (x - m).exp()).sum::<T>().ln()
}

/// A weight stored as sign * exp(ln_abs).
#[derive(Clone, Copy, Debug)]
struct LogWeight<T> {
    ln_abs: T,
    sign: T,
}

/// e^p - e^n as a LogWeight.
fn signed_log<T: Real>(p: T, n: T) -> LogWeight<T> {
    if p >= n {
        LogWeight { ln_abs: p + (-(n - p).exp()).ln_1p(), sign: T::one() }
    } else {
        LogWeight { ln_abs: n + (-(p - n).exp()).ln_1p(), sign: -T::one() }
    }
}

/// Gauss–Legendre nodes (y, weight * psi(y)) for the piecewise-linear kernel,
/// subdivided so that rate * (cell width) stays below 8.
fn kernel_nodes<T: Real>(ys: &[T], psi: &[T], rate: T) -> Vec<(T, T)> {
    let (gx, gw) = gauss_legendre::<T>(16);
    let mut out = Vec::new();
    for (w, p) in ys.windows(2).zip(psi.windows(2)) {
        if p[0] == T::zero() && p[1] == T::zero() {
            continue;
        }
        let pieces = ((rate * (w[1] - w[0])) / lit::<T>(8.0)).ceil().to_usize().unwrap_or(1).max(1);
        let width = (w[1] - w[0]) / from_usize::<T>(pieces);
        for j in 0..pieces {
            let a = w[0] + width * from_usize::<T>(j);
            let half = lit::<T>(0.5) * width;
            for (&t, &g) in gx.iter().zip(gw.iter()) {
                let yy = a + half * (t + T::one());
                let pv = p[0] + (p[1] - p[0]) * (yy - w[0]) / (w[1] - w[0]);
                if pv != T::zero() {
                    out.push((yy, g * half * pv));
                }
            }
        }
    }
    out
}

/// sum_h window(h) sum_n a(n) a(n+h) W(n+h) with log-weights.
fn correlate_weighted<T, F>(f: &Eigenform<T>, q: &SCSQuery<T>, n: usize, ln_w: F) -> Result<T>
where
    T: Real,
    F: Fn(usize) -> Result<LogWeight<T>> + Sync,
{
    let shifts = q.shifts();
    if shifts == 0 {
        return Ok(T::zero());
    }
    let e = half_k(f);
    let lam = &f.lambdas()[..=n];
    let weights = (0..=n)
        .into_par_iter()
        .map(|m| if m == 0 { Ok(LogWeight { ln_abs: T::neg_infinity(), sign: T::one() }) } else { ln_w(m) })
        .collect::<Result<Vec<_>>>()?;
    let ln_n: Vec<T> = (0..=n).map(|m| if m == 0 { T::zero() } else { e * from_usize::<T>(m).ln() }).collect();
    let la: Vec<T> = ln_n.clone();
    let lb: Vec<T> = ln_n.iter().zip(weights.iter()).map(|(&l, w)| l + w.ln_abs).collect();
    let sb: Vec<T> = lam.iter().zip(weights.iter()).map(|(&l, w)| l * w.sign).collect();
    let r = blockwise_correlation(lam, &la, &sb, &lb, shifts);
    let per_h: Vec<T> = (1..=shifts).map(|h| q.window.weight(h, q.y) * r[h]).collect();
    Ok(per_h.iter().copied().collect::<CompensatedSum<T>>().value())
}
