//! The transition function C(alpha) of the Jacobi-symbol sum, in both forms.
//!
//! After the substitution t = const * k^2 / y both forms reduce to the
//! oscillatory tails
//!
//!   I(T) = int_T^inf t^{-5/2} e^{it} dt,
//!
//! namely
//!
//!   C = sqrt(a) + pi a^{3/2}/18 + sqrt(2 pi) sum_k k (Im I - Re I)(2 pi k^2 / a)
//!   C = a + a^{3/2} sqrt(pi/2) sum_k k Im I(pi k^2 a / 2).
//!
//! In the first form the non-oscillating part of the integrand has been
//! summed over k in closed form.

use num_complex::Complex;
use serde::Serialize;

use super::query::CfsQuery;
use crate::error::{Error, Result};
use crate::num::{from_usize, lit, CompensatedSum, Real};
use crate::specfun::gauss_legendre;

/// Relative agreement (against max(1, C)) expected between the two forms.
pub const AGREEMENT_TOL: f64 = 1e-6;

/// Beyond this point I(T) comes from its asymptotic expansion.
const ASYMPTOTIC_FROM: f64 = 40.0;
const EXPONENT: f64 = 2.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CAlpha<T> {
    pub alpha: T,
    /// First form.
    pub value: T,
    /// Alternate form.
    pub alternate: T,
    /// Error bound of the first form: quadrature estimate plus truncated k-tail.
    pub error: T,
    pub alternate_error: T,
    /// Number of k-terms used by each form.
    pub terms: (usize, usize),
    pub agree: bool,
}

impl<T: Real> CAlpha<T> {
    pub fn discrepancy(&self) -> T {
        (self.value - self.alternate).abs()
    }
}

/// Evaluates I(T) by composite Gauss-Legendre on [T, 40] and the asymptotic
/// series beyond.
struct OscillatoryTail<T> {
    fine: (Vec<T>, Vec<T>),
    coarse: (Vec<T>, Vec<T>),
}

impl<T: Real> OscillatoryTail<T> {
    fn new() -> Self {
        Self { fine: gauss_legendre(24), coarse: gauss_legendre(16) }
    }

    /// Returns I(T) and an error estimate.
    fn eval(&self, t0: T) -> (Complex<T>, T) {
        let cut = lit::<T>(ASYMPTOTIC_FROM);
        if t0 >= cut {
            return asymptotic(t0);
        }
        let (tail, tail_err) = asymptotic(cut);
        let mut fine = Complex::new(T::zero(), T::zero());
        let mut coarse = fine;
        let mut a = t0;
        while a < cut {
            // Geometric panels tame the t^{-5/2} growth, unit panels the oscillation.
            let b = if a < T::one() { (a + a).min(T::one()) } else { (a + T::one()).min(cut) };
            fine = fine + panel(&self.fine, a, b);
            coarse = coarse + panel(&self.coarse, a, b);
            a = b;
        }
        (fine + tail, (fine - coarse).norm() + tail_err)
    }
}

fn integrand<T: Real>(t: T) -> Complex<T> {
    let amp = t.powf(-lit::<T>(EXPONENT));
    Complex::new(amp * t.cos(), amp * t.sin())
}

fn panel<T: Real>(rule: &(Vec<T>, Vec<T>), a: T, b: T) -> Complex<T> {
    let half = lit::<T>(0.5) * (b - a);
    let mid = lit::<T>(0.5) * (a + b);
    let mut acc = Complex::new(T::zero(), T::zero());
    for (&x, &w) in rule.0.iter().zip(&rule.1) {
        acc = acc + integrand(mid + half * x) * w;
    }
    acc * half
}

/// i e^{iT} T^{-a} sum_j (a)_j (-i/T)^j, truncated at its smallest term.
fn asymptotic<T: Real>(t0: T) -> (Complex<T>, T) {
    let a = lit::<T>(EXPONENT);
    let step = Complex::new(T::zero(), -t0.recip());
    let mut term = Complex::new(T::one(), T::zero());
    let mut sum = term;
    let mut j = 0usize;
    loop {
        let next = term * step * (a + from_usize::<T>(j));
        if next.norm() >= term.norm() || next.norm() <= T::epsilon() * sum.norm() {
            term = next;
            break;
        }
        sum = sum + next;
        term = next;
        j += 1;
    }
    let lead = Complex::new(T::zero(), T::one()) * Complex::new(t0.cos(), t0.sin()) * t0.powf(-a);
    (lead * sum, (lead * term).norm())
}

/// sum_{k > K} k^{-4} <= 1 / (3 K^3).
fn k4_tail<T: Real>(k: usize) -> T {
    (lit::<T>(3.0) * from_usize::<T>(k).powi(3)).recip()
}

/// Smallest K whose tail bound `coeff / (3 K^3)` is within `tol`, capped at kmax.
fn terms_needed<T: Real>(coeff: T, tol: T, kmax: usize) -> usize {
    let k = (coeff / (lit::<T>(3.0) * tol)).cbrt().ceil();
    k.to_usize().unwrap_or(usize::MAX).clamp(1, kmax)
}

struct FormValue<T> {
    value: T,
    error: T,
    terms: usize,
}

fn first_form<T: Real>(alpha: T, q: &CfsQuery<T>, osc: &OscillatoryTail<T>, tol: T) -> Result<FormValue<T>> {
    let two_pi = T::PI() + T::PI();
    let pref = two_pi.sqrt();
    // |Im I - Re I| <= 2 sqrt 2 T^{-5/2}
    let coeff = pref * lit::<T>(2.0 * 2f64.sqrt()) * (alpha / two_pi).powf(lit(EXPONENT));
    let terms = terms_needed(coeff, tol, q.kmax);
    let mut acc = CompensatedSum::new();
    let mut quad_err = T::zero();
    for k in 1..=terms {
        let kk = from_usize::<T>(k);
        let (v, e) = osc.eval(two_pi * kk * kk / alpha);
        acc.add(kk * (v.im - v.re));
        quad_err = quad_err + kk * e;
    }
    let error = pref * quad_err + coeff * k4_tail(terms);
    let closed = alpha.sqrt() + T::PI() * alpha.powf(lit(1.5)) / lit(18.0);
    Ok(FormValue { value: closed + pref * acc.value(), error, terms })
}

fn second_form<T: Real>(alpha: T, q: &CfsQuery<T>, osc: &OscillatoryTail<T>, tol: T) -> Result<FormValue<T>> {
    let half_pi = lit::<T>(0.5) * T::PI();
    let pref = alpha.powf(lit(1.5)) * half_pi.sqrt();
    // |Im I| <= 2 T^{-5/2}
    let coeff = pref * lit::<T>(2.0) * (half_pi * alpha).powf(-lit::<T>(EXPONENT));
    let terms = terms_needed(coeff, tol, q.kmax);
    let mut acc = CompensatedSum::new();
    let mut quad_err = T::zero();
    for k in 1..=terms {
        let kk = from_usize::<T>(k);
        let (v, e) = osc.eval(half_pi * kk * kk * alpha);
        acc.add(kk * v.im);
        quad_err = quad_err + kk * e;
    }
    let error = pref * quad_err + coeff * k4_tail(terms);
    Ok(FormValue { value: alpha + pref * acc.value(), error, terms })
}

/// C(alpha) by both forms. The k-sums are truncated once the tail bound
/// drops below `quad_tol * max(1, alpha)` or at `kmax`; the returned error
/// fields always include the truncation bound actually incurred.
pub fn c_alpha<T: Real>(alpha: T, q: &CfsQuery<T>) -> Result<CAlpha<T>> {
    q.validate()?;
    if !alpha.is_finite() || alpha < T::zero() {
        return Err(Error::Domain(format!("C(alpha) needs alpha >= 0, got {alpha}")));
    }
    if alpha == T::zero() {
        let zero = T::zero();
        return Ok(CAlpha { alpha, value: zero, alternate: zero, error: zero, alternate_error: zero, terms: (0, 0), agree: true });
    }
    let scale = alpha.max(T::one());
    let tol = q.quad_tol * scale;
    let osc = OscillatoryTail::new();
    let first = first_form(alpha, q, &osc, tol)?;
    let second = second_form(alpha, q, &osc, tol)?;
    for (name, form) in [("first", &first), ("alternate", &second)] {
        if !form.value.is_finite() || !form.error.is_finite() {
            return Err(Error::Quadrature(format!(
                "C({alpha}) {name} form: non-finite result after {} terms",
                form.terms
            )));
        }
    }
    let gap = (first.value - second.value).abs();
    let allowed = lit::<T>(AGREEMENT_TOL) * first.value.abs().max(T::one());
    Ok(CAlpha {
        alpha,
        value: first.value,
        alternate: second.value,
        error: first.error,
        alternate_error: second.error,
        terms: (first.terms, second.terms),
        agree: gap <= allowed.max(first.error + second.error),
    })
}

/// Two-term expansion sqrt(a) + (pi/18) a^{3/2} valid as alpha -> 0.
pub fn small_alpha_expansion<T: Real>(alpha: T) -> T {
    alpha.sqrt() + T::PI() * alpha.powf(lit(1.5)) / lit(18.0)
}

/// Central second difference (C(a+h) - 2C(a) + C(a-h)) / h^2. A diagnostic
/// only: nothing is asserted about it.
pub fn second_difference<T: Real>(alpha: T, h: T, q: &CfsQuery<T>) -> Result<T> {
    if !(h > T::zero()) || alpha - h < T::zero() {
        return Err(Error::Domain(format!("second difference needs 0 < h <= alpha, got alpha={alpha}, h={h}")));
    }
    let lo = c_alpha(alpha - h, q)?.value;
    let mid = c_alpha(alpha, q)?.value;
    let hi = c_alpha(alpha + h, q)?.value;
    Ok((hi - mid - mid + lo) / (h * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query() -> CfsQuery<f64> {
        CfsQuery::new(100, 100).unwrap()
    }

    #[test]
    fn oscillatory_tail_matches_incomplete_gamma_values() {
        // mpmath: i^{-3/2} Gamma(-3/2, -iT)
        let refs: [(f64, f64, f64); 4] = [
            (0.05, 58.180991364805119607, 7.2744285870188699871),
            (0.5, 0.91870666778444109094, 1.196415665071717087),
            (3.0, -0.031709953465130932422, -0.036503326431688940628),
            (45.0, -0.00006024016651229247315, 0.000041960061795312296105),
        ];
        let osc = OscillatoryTail::<f64>::new();
        for (t, re, im) in refs {
            let (v, err) = osc.eval(t);
            let scale = re.abs().max(im.abs());
            assert!((v.re - re).abs() < 1e-12 * scale && (v.im - im).abs() < 1e-12 * scale, "T={t}: {v}");
            assert!(err < 1e-10 * scale);
        }
    }

    #[test]
    fn zero_and_domain() {
        let c = c_alpha(0.0, &query()).unwrap();
        assert_eq!((c.value, c.alternate), (0.0, 0.0));
        assert!(c_alpha(-1.0, &query()).is_err());
        assert!(c_alpha(f64::NAN, &query()).is_err());
    }

    #[test]
    fn reference_values() {
        // Both forms summed with mpmath to k = 4000.
        for (alpha, want) in [(1.0, 1.1902654422644), (10.0, 9.9629278952038)] {
            let c = c_alpha(alpha, &query()).unwrap();
            assert!((c.value - want).abs() < 1e-10 * want, "alpha={alpha}: {}", c.value);
            assert!((c.alternate - want).abs() < 1e-10 * want, "alpha={alpha}: {}", c.alternate);
            assert!(c.agree);
        }
    }

    #[test]
    fn small_alpha_example() {
        let alpha = 0.01;
        let c = c_alpha(alpha, &query()).unwrap();
        let r = (c.value - small_alpha_expansion(alpha)) / alpha.powf(2.5);
        assert!(r.abs() < 1.0, "{r}");
    }

    #[test]
    fn large_alpha_correction_is_order_one_over_alpha() {
        let q = query();
        let scaled: Vec<f64> = [50.0, 100.0, 200.0]
            .iter()
            .map(|&a| (c_alpha(a, &q).unwrap().alternate - a) * a)
            .collect();
        for w in scaled.windows(2) {
            assert!(w[1].abs() <= 1.5 * w[0].abs() + 1e-3, "{scaled:?}");
        }
    }

    #[test]
    fn second_difference_is_finite() {
        let d = second_difference(1.0, 1e-2, &query()).unwrap();
        assert!(d.is_finite());
        assert!(second_difference(0.01, 0.02, &query()).is_err());
    }

    #[test]
    fn single_precision() {
        let q = CfsQuery::<f32>::new(10, 10).unwrap().with_quad_tol(1e-5).unwrap();
        let c = c_alpha(1.0f32, &q).unwrap();
        assert!((c.value - 1.1902654).abs() < 1e-4);
    }
}
