//! Complex log-gamma by upward recurrence and the Stirling series.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::num::{lit, to_f64, Real};

/// Stirling is applied once Re(z) reaches this value.
const STIRLING_THRESHOLD: f64 = 10.0;

/// B_{2j} / (2j (2j - 1)) for j = 1..=10.
const STIRLING_COEFFS: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// Principal branch of log Gamma(z): analytic off the non-positive real axis
/// and real for real z > 0.
pub fn ln_gamma<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if z.im == T::zero() && z.re <= T::zero() && z.re == z.re.round() {
        return Err(Error::Pole(to_f64(z.re)));
    }
    let threshold = lit::<T>(STIRLING_THRESHOLD);
    let mut w = z;
    let mut shift = Complex::new(T::zero(), T::zero());
    while w.re < threshold {
        shift = shift + w.ln();
        w = w + T::one();
    }
    Ok(stirling(w) - shift)
}

fn stirling<T: Real>(w: Complex<T>) -> Complex<T> {
    let half = lit::<T>(0.5);
    let half_ln_2pi = lit::<T>(0.918_938_533_204_672_8);
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex::new(T::zero(), T::zero());
    let mut pow = inv;
    for &c in STIRLING_COEFFS.iter() {
        series = series + pow * lit::<T>(c);
        pow = pow * inv2;
    }
    (w - half) * w.ln() - w + half_ln_2pi + series
}

/// log Gamma(x) for real x > 0.
pub fn ln_gamma_real<T: Real>(x: T) -> Result<T> {
    if x <= T::zero() {
        return Err(Error::Domain(format!("ln_gamma_real needs x > 0, got {}", x)));
    }
    Ok(ln_gamma(Complex::new(x, T::zero()))?.re)
}

/// Gamma(z) for complex z away from poles.
pub fn gamma<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    Ok(ln_gamma(z)?.exp())
}

/// Gamma(x) for real x (sign-correct for negative non-integers).
pub fn gamma_real<T: Real>(x: T) -> Result<T> {
    Ok(gamma(Complex::new(x, T::zero()))?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn trivial_values() {
        assert!(ln_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-14);
        assert!((ln_gamma(c(0.5, 0.0)).unwrap().re - PI.sqrt().ln()).abs() < 1e-14);
        assert!((ln_gamma(c(5.0, 0.0)).unwrap().re - 24f64.ln()).abs() < 1e-13);
        assert!(ln_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-14);
    }

    #[test]
    fn poles_are_errors() {
        assert!(matches!(ln_gamma(c(0.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(ln_gamma(c(-3.0, 0.0)), Err(Error::Pole(_))));
        assert!(ln_gamma(c(-3.0, 1e-9)).is_ok());
    }

    #[test]
    fn reflection_formula_holds() {
        // Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        for &(re, im) in &[(0.3, 0.7), (-4.2, 3.0), (12.5, -40.0), (-40.5, 0.0), (0.25, 900.0)] {
            let z = c(re, im);
            let lhs = ln_gamma(z).unwrap() + ln_gamma(c(1.0, 0.0) - z).unwrap();
            // ln sin(pi z) with the e^{pi |Im z|} growth split off
            let w = z * PI;
            let sign = if w.im >= 0.0 { 1.0 } else { -1.0 };
            let reduced = (c(1.0, 0.0) - (c(0.0, 2.0 * sign) * w).exp()) / c(0.0, -2.0 * sign);
            let ln_sin = reduced.ln() + c(0.0, -sign) * w;
            let rhs = c(PI.ln(), 0.0) - ln_sin;
            let mut d = lhs - rhs;
            d.im -= (d.im / (2.0 * PI)).round() * 2.0 * PI;
            let diff = d.exp() - c(1.0, 0.0);
            assert!(diff.norm() < 1e-11, "z = {z}: {diff}");
        }
    }

    #[test]
    fn recurrence_holds_at_large_imaginary_part() {
        for &t in &[1.0, 50.0, 999.0] {
            let z = c(1.5, t);
            let d = ln_gamma(z + 1.0).unwrap() - ln_gamma(z).unwrap() - z.ln();
            // continuous branch: difference is exactly 0 (no 2 pi i jumps)
            assert!(d.norm() < 1e-12 * (1.0 + t.ln() * t), "t = {t}: {d}");
        }
    }

    #[test]
    fn negative_half_integer_sign() {
        // Gamma(-1/2) = -2 sqrt(pi), Gamma(-3/2) = 4 sqrt(pi) / 3
        assert!((gamma_real(-0.5f64).unwrap() + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!((gamma_real(-1.5f64).unwrap() - 4.0 * PI.sqrt() / 3.0).abs() < 1e-13);
    }

    #[test]
    fn works_in_f32() {
        let v = ln_gamma(Complex::new(5.0f32, 0.0)).unwrap();
        assert!((v.re - 24f32.ln()).abs() < 1e-5);
    }
}
