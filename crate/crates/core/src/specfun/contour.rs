//! Trapezoidal quadrature along a vertical line Re(s) = sigma.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::num::{from_usize, lit, to_f64, Real};

/// Vertical line and discretization used for Mellin–Barnes integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSpec<T> {
    pub sigma: T,
    pub step: T,
    pub tmax: T,
}

impl<T: Real> Default for ContourSpec<T> {
    fn default() -> Self {
        Self { sigma: lit(1.5), step: lit(0.05), tmax: lit(60.0) }
    }
}

impl<T: Real> ContourSpec<T> {
    pub fn new(sigma: T, step: T, tmax: T) -> Result<Self> {
        let spec = Self { sigma, step, tmax };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > T::zero()) || !(self.tmax > T::zero()) || !self.sigma.is_finite() {
            return Err(Error::Domain(format!(
                "contour needs step > 0, tmax > 0 and finite sigma; got {self:?}"
            )));
        }
        if self.tmax < self.step {
            return Err(Error::Domain(format!("tmax {} is below the step {}", self.tmax, self.step)));
        }
        Ok(())
    }

    /// Number of nodes on the positive half line, excluding t = 0.
    pub fn half_nodes(&self) -> usize {
        (self.tmax / self.step + lit::<T>(1e-9)).floor().to_usize().unwrap_or(0)
    }

    pub fn with_sigma(self, sigma: T) -> Self {
        Self { sigma, ..self }
    }

    pub fn with_step(self, step: T) -> Self {
        Self { step, ..self }
    }

    pub fn with_tmax(self, tmax: T) -> Self {
        Self { tmax, ..self }
    }
}

/// Quadrature value with its step-halving error estimate.
#[derive(Clone, Copy, Debug)]
pub struct ContourValue<T> {
    pub value: Complex<T>,
    pub error: T,
}

/// Share of |F| mass allowed in the outer tenth of the line.
const TAIL_TOLERANCE: f64 = 1e-6;

/// (1/2 pi i) int_{sigma - i inf}^{sigma + i inf} F(s) ds by the trapezoid rule on
/// [-tmax, tmax]. The error estimate is the change against the rule with
/// twice the step.
pub fn contour_quadrature<T, F>(integrand: F, spec: &ContourSpec<T>) -> Result<ContourValue<T>>
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T> + Sync,
{
    spec.validate()?;
    let m = spec.half_nodes() as i64;
    let values: Vec<Complex<T>> = (-m..=m)
        .into_par_iter()
        .map(|j| {
            let t = spec.step * lit::<T>(j as f64);
            integrand(Complex::new(spec.sigma, t))
        })
        .collect();

    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Quadrature("integrand is not finite on the contour".into()));
    }

    let zero = Complex::new(T::zero(), T::zero());
    let mut fine = zero;
    let mut coarse = zero;
    let mut total_mass = T::zero();
    let mut tail_mass = T::zero();
    let tail_start = lit::<T>(0.9) * spec.tmax;
    for (idx, v) in values.iter().enumerate() {
        let j = idx as i64 - m;
        fine = fine + v;
        if j % 2 == 0 {
            coarse = coarse + v;
        }
        let mass = v.norm();
        total_mass = total_mass + mass;
        if (spec.step * lit::<T>(j as f64)).abs() > tail_start {
            tail_mass = tail_mass + mass;
        }
    }
    if total_mass > T::zero() && tail_mass > lit::<T>(TAIL_TOLERANCE) * total_mass {
        return Err(Error::NonDecaying { ratio: to_f64(tail_mass / total_mass) });
    }

    let scale = spec.step / (lit::<T>(2.0) * T::PI());
    let value = fine * scale;
    let coarse = coarse * (scale * from_usize::<T>(2));
    Ok(ContourValue { value, error: (value - coarse).norm() })
}

/// A Mellin–Barnes integral (1/2 pi i) int_(sigma) G(s) x^{-s} ds with
/// G(conj s) = conj G(s), tabulated once on the trapezoid nodes so that each
/// evaluation is a Horner pass in z = exp(-i h ln x).
#[derive(Clone, Debug)]
pub struct LineKernel<T> {
    spec: ContourSpec<T>,
    /// c_0 = G(sigma), c_j = 2 G(sigma + i j h).
    coeffs: Vec<Complex<T>>,
    /// -s_j c_j, giving x d/dx of the integral.
    dcoeffs: Vec<Complex<T>>,
}

impl<T: Real> LineKernel<T> {
    pub fn new<F>(spec: ContourSpec<T>, gamma_factor: F) -> Result<Self>
    where
        F: Fn(Complex<T>) -> Result<Complex<T>> + Sync,
    {
        spec.validate()?;
        let m = spec.half_nodes();
        let two = lit::<T>(2.0);
        let coeffs = (0..=m)
            .into_par_iter()
            .map(|j| {
                let g = gamma_factor(Complex::new(spec.sigma, spec.step * from_usize::<T>(j)))?;
                if !g.re.is_finite() || !g.im.is_finite() {
                    return Err(Error::Quadrature(format!("gamma factor not finite at node {j}")));
                }
                Ok(if j == 0 { g } else { g * two })
            })
            .collect::<Result<Vec<_>>>()?;
        let tail_start = (m * 9) / 10;
        let total: T = coeffs.iter().map(|c| c.norm()).sum();
        let tail: T = coeffs[tail_start.max(1)..].iter().map(|c| c.norm()).sum();
        if total > T::zero() && tail > lit::<T>(TAIL_TOLERANCE) * total {
            return Err(Error::NonDecaying { ratio: to_f64(tail / total) });
        }
        let dcoeffs = coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| -(Complex::new(spec.sigma, spec.step * from_usize::<T>(j)) * c))
            .collect();
        Ok(Self { spec, coeffs, dcoeffs })
    }

    pub fn spec(&self) -> &ContourSpec<T> {
        &self.spec
    }

    fn horner(coeffs: &[Complex<T>], z: Complex<T>) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for &c in coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    fn prefactor_and_z(&self, x: T) -> (T, Complex<T>) {
        let ln_x = x.ln();
        let pre = self.spec.step / (lit::<T>(2.0) * T::PI()) * (-self.spec.sigma * ln_x).exp();
        let phase = -self.spec.step * ln_x;
        (pre, Complex::new(phase.cos(), phase.sin()))
    }

    /// The integral at x > 0.
    pub fn eval(&self, x: T) -> T {
        let (pre, z) = self.prefactor_and_z(x);
        pre * Self::horner(&self.coeffs, z).re
    }

    /// (value, x * derivative) at x > 0.
    pub fn eval_with_derivative(&self, x: T) -> (T, T) {
        let (pre, z) = self.prefactor_and_z(x);
        (pre * Self::horner(&self.coeffs, z).re, pre * Self::horner(&self.dcoeffs, z).re)
    }
}
