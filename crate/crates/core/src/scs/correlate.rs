//! FFT correlations of real sequences.

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::num::{from_usize, lit, CompensatedSum, Real};

fn fft_len(n: usize) -> usize {
    n.next_power_of_two().max(2)
}

/// R(h) = sum_n a[n] a[n+h] for h = 0..=max_lag.
pub fn autocorrelation<T: Real>(a: &[T], max_lag: usize) -> Vec<T> {
    if a.is_empty() {
        return vec![T::zero(); max_lag + 1];
    }
    let len = fft_len(a.len() + max_lag + 1);
    let mut planner = FftPlanner::<T>::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    let mut buf: Vec<Complex<T>> = a.iter().map(|&v| Complex::new(v, T::zero())).collect();
    buf.resize(len, Complex::new(T::zero(), T::zero()));
    fwd.process(&mut buf);
    for z in buf.iter_mut() {
        *z = Complex::new(z.norm_sqr(), T::zero());
    }
    inv.process(&mut buf);
    let scale = T::one() / from_usize::<T>(len);
    (0..=max_lag).map(|h| if h < a.len() { buf[h].re * scale } else { T::zero() }).collect()
}

/// R(h) = sum_n a[n] b[n+h] for h = 0..=max_lag, both real, computed with a
/// single complex transform of a + i b.
pub fn cross_correlation<T: Real>(a: &[T], b: &[T], max_lag: usize) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return vec![T::zero(); max_lag + 1];
    }
    let len = fft_len((a.len() + max_lag + 1).max(b.len() + 1));
    let mut planner = FftPlanner::<T>::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    let zero = Complex::new(T::zero(), T::zero());
    let mut z = vec![zero; len];
    for (i, &v) in a.iter().enumerate() {
        z[i].re = v;
    }
    for (i, &v) in b.iter().enumerate() {
        z[i].im = v;
    }
    fwd.process(&mut z);
    let half = lit::<T>(0.5);
    let mut prod = vec![zero; len];
    for k in 0..len {
        let zk = z[k];
        let zr = z[(len - k) % len].conj();
        let fa = (zk + zr) * half;
        let fb = (zk - zr) * Complex::new(T::zero(), -half);
        prod[k] = fa.conj() * fb;
    }
    inv.process(&mut prod);
    let scale = T::one() / from_usize::<T>(len);
    (0..=max_lag).map(|h| prod[h].re * scale).collect()
}

/// Largest allowed deviation (in e-folds) of the log-weight gap from its
/// chord within one segment.
const SEGMENT_DEVIATION: f64 = 2.0;
const MAX_SEGMENT: usize = 1 << 16;

/// Splits 1..=n into segments on which g = (la - lb)/2 is close to linear.
fn segments<T: Real>(la: &[T], lb: &[T], n: usize) -> Vec<(usize, usize)> {
    let gap = |i: usize| lit::<T>(0.5) * (la[i] - lb[i]);
    let fits = |a: usize, b: usize| -> bool {
        let (ga, gb) = (gap(a), gap(b - 1));
        if !ga.is_finite() || !gb.is_finite() {
            return b - a <= 1;
        }
        let span = from_usize::<T>((b - 1 - a).max(1));
        (a..b).all(|i| {
            let g = gap(i);
            !g.is_finite() || {
                let chord = ga + (gb - ga) * from_usize::<T>(i - a) / span;
                (g - chord).abs() <= lit(SEGMENT_DEVIATION)
            }
        })
    };
    let mut out = Vec::new();
    let mut start = 1usize;
    while start <= n {
        let mut len = 1usize;
        while len < MAX_SEGMENT && start + 2 * len <= n + 1 && fits(start, start + 2 * len) {
            len *= 2;
        }
        out.push((start, start + len));
        start += len;
    }
    out
}

/// R(h) = sum_n sa[n] sb[n+h] exp(la[n] + lb[n+h]) for h = 0..=max_lag, where
/// sa, sb hold signed unit-scale values (eigenvalues) and la, lb are
/// log-weights of possibly huge dynamic range. The n-range is split into
/// segments on which (la - lb)/2 is nearly linear, say g0 + beta n; there the
/// factors are tilted to exp(la - beta n) and exp(lb + beta m), which balances
/// them, and the exact factor e^{-beta h} is restored per lag. Short segments
/// are summed directly. Index 0 of every slice is ignored.
pub fn blockwise_correlation<T: Real>(sa: &[T], la: &[T], sb: &[T], lb: &[T], max_lag: usize) -> Vec<T> {
    let n = sa.len().saturating_sub(1);
    assert!(la.len() == sa.len() && lb.len() == sa.len() && sb.len() == sa.len(), "log-weight length mismatch");
    if n == 0 {
        return vec![T::zero(); max_lag + 1];
    }
    let segs = segments(la, lb, n);
    let direct_below = 4 * max_lag + 64;
    let partial: Vec<Vec<T>> = segs
        .par_iter()
        .map(|&(start, end)| {
            let end_b = (end + max_lag).min(n + 1);
            let last = end - 1;
            let g = |i: usize| lit::<T>(0.5) * (la[i] - lb[i]);
            let beta = if last > start && g(start).is_finite() && g(last).is_finite() {
                (g(last) - g(start)) / from_usize::<T>(last - start)
            } else {
                T::zero()
            };
            let tilt = |i: usize| beta * from_usize::<T>(i - start);
            let ta: Vec<T> = (start..end).map(|i| la[i] - tilt(i)).collect();
            let tb: Vec<T> = (start..end_b).map(|i| lb[i] + tilt(i)).collect();
            let ca = ta.iter().copied().fold(T::neg_infinity(), T::max);
            let cb = tb.iter().copied().fold(T::neg_infinity(), T::max);
            if ca == T::neg_infinity() || cb == T::neg_infinity() {
                return vec![T::zero(); max_lag + 1];
            }
            let a: Vec<T> = (start..end).map(|i| sa[i] * (ta[i - start] - ca).exp()).collect();
            let b: Vec<T> = (start..end_b).map(|i| sb[i] * (tb[i - start] - cb).exp()).collect();
            let r: Vec<T> = if end - start < direct_below {
                (0..=max_lag)
                    .map(|h| {
                        (0..a.len())
                            .filter(|&i| i + h < b.len())
                            .map(|i| a[i] * b[i + h])
                            .collect::<CompensatedSum<T>>()
                            .value()
                    })
                    .collect()
            } else {
                cross_correlation(&a, &b, max_lag)
            };
            r.into_iter()
                .enumerate()
                .map(|(h, v)| v * (ca + cb - beta * from_usize::<T>(h)).exp())
                .collect()
        })
        .collect();
    (0..=max_lag)
        .map(|h| partial.iter().map(|p| p[h]).collect::<CompensatedSum<T>>().value())
        .collect()
}
