//! Predicted right-hand sides built from c_f and the constant
//! Gamma(k) L(1, sym^2 f) / (2 zeta(2)).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{lit, Real};
use crate::specfun::{gauss_legendre, ln_gamma_real};
use crate::transition::cf::{IntegralEstimate, Transition, TransitionSample};
use crate::transition::kernel::SmoothingKernel;

/// Exponent toward the Ramanujan conjecture used in error yardsticks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theta {
    /// 7/64.
    #[default]
    KimSarnak,
    /// 0, assuming the Ramanujan conjecture for Maass forms.
    Ramanujan,
}

impl Theta {
    pub fn value<T: Real>(self) -> T {
        match self {
            Theta::KimSarnak => lit(7.0 / 64.0),
            Theta::Ramanujan => T::zero(),
        }
    }

    /// Accepts exactly 0 or 7/64.
    pub fn from_f64(theta: f64) -> Result<Self> {
        if theta == 0.0 {
            Ok(Theta::Ramanujan)
        } else if (theta - 7.0 / 64.0).abs() < 1e-12 {
            Ok(Theta::KimSarnak)
        } else {
            Err(Error::Config(format!("theta must be 0 or 7/64 = 0.109375, got {theta}")))
        }
    }
}

/// X^{1/2} Y^{(1+theta)/3}.
pub fn yardstick<T: Real>(x: T, y: T, theta: Theta) -> T {
    x.sqrt() * y.powf((T::one() + theta.value::<T>()) / lit::<T>(3.0))
}

#[derive(Clone, Copy, Debug)]
pub struct Corollary1Prediction<T> {
    /// (c_f(Y^2/X) - C) X
    pub rhs: T,
    pub yardstick: T,
    pub sample: TransitionSample<T>,
}

/// Main term (c_f(Y^2/X) - Gamma(k) L(1, sym^2 f)/(2 zeta(2))) X for 1 <= Y <= X.
pub fn corollary1_rhs<T: Real>(tr: &Transition<T>, x: T, y: T, theta: Theta) -> Result<Corollary1Prediction<T>> {
    if !(y >= T::one()) || !(y <= x) {
        return Err(Error::Hypothesis(format!("corollary1 requires 1 <= Y <= X, got X = {x}, Y = {y}")));
    }
    let sample = tr.c_f(y * y / x)?;
    Ok(Corollary1Prediction { rhs: (sample.value - tr.constant()) * x, yardstick: yardstick(x, y, theta), sample })
}

#[derive(Clone, Copy, Debug)]
pub struct Corollary2Prediction<T> {
    pub rhs: T,
    /// -L(1, sym^2 f) X / (2 zeta(2))
    pub main: T,
    /// (Y^2/Gamma(k-1)) int_{(k-1)Y^2/X}^inf c_f(u)/u^2 du
    pub correction: T,
    pub integral: IntegralEstimate<T>,
    pub error: T,
}

/// Relative accuracy requested from the u-integral, measured against the main term.
const COR2_RELATIVE_TOL: f64 = 1e-10;

pub fn corollary2_rhs<T: Real>(tr: &Transition<T>, x: T, y: T) -> Result<Corollary2Prediction<T>> {
    if !(x >= T::one()) || !(y >= T::one()) {
        return Err(Error::Hypothesis(format!("corollary2 requires X, Y >= 1, got X = {x}, Y = {y}")));
    }
    let km1 = lit::<T>(tr.weight() as f64 - 1.0);
    let main = -tr.sym2().value() * x / (lit::<T>(2.0) * tr.zeta2());
    let scale = y * y / ln_gamma_real(km1)?.exp();
    let tol = lit::<T>(COR2_RELATIVE_TOL) * main.abs() / scale;
    let integral = tr.inverse_square_integral(km1 * y * y / x, tol)?;
    let correction = scale * integral.value;
    Ok(Corollary2Prediction { rhs: main + correction, main, correction, integral, error: scale * integral.error })
}

#[derive(Clone, Copy, Debug)]
pub struct KernelPrediction<T> {
    pub value: T,
    pub error: T,
}

/// (4 pi)^{-k} int_0^inf (c_f(4 pi y Y^2) - C) psi(y) / y^2 dy.
pub fn main_theorem_rhs<T: Real>(tr: &Transition<T>, psi: &SmoothingKernel<T>, y: T) -> Result<KernelPrediction<T>> {
    if !(y >= T::zero()) {
        return Err(Error::Domain(format!("Y must be nonnegative, got {y}")));
    }
    let four_pi = lit::<T>(4.0) * T::PI();
    let norm = (-lit::<T>(tr.weight() as f64) * four_pi.ln()).exp();
    match psi {
        SmoothingKernel::PointMass { y0 } => {
            if !(*y0 > T::zero()) {
                return Err(Error::Domain(format!("point mass must sit at y0 > 0, got {y0}")));
            }
            let s = tr.c_f(four_pi * *y0 * y * y)?;
            let inv = T::one() / (*y0 * *y0);
            Ok(KernelPrediction { value: norm * (s.value - tr.constant()) * inv, error: norm * s.tail_bound * inv })
        }
        SmoothingKernel::GammaCutoff { x } => {
            let p = corollary2_rhs(tr, *x, y)?;
            Ok(KernelPrediction { value: norm * p.rhs, error: norm * p.error })
        }
        SmoothingKernel::Sampled { ys, psi } => {
            if psi.iter().all(|p| *p == T::zero()) {
                return Ok(KernelPrediction { value: T::zero(), error: T::zero() });
            }
            if !(ys[0] > T::zero()) {
                return Err(Error::Domain("kernel support reaches y = 0 where psi/y^2 is not integrable".into()));
            }
            if y == T::zero() {
                return Err(Error::Domain("c_f(0) is undefined; use Y > 0 with sampled kernels".into()));
            }
            let lo = four_pi * ys[0] * y * y;
            let hi = four_pi * ys[ys.len() - 1] * y * y;
            let curve = tr.curve(lo, hi)?;
            let c = tr.constant();
            let integrate = |nodes: usize| -> Result<T> {
                let (gx, gw) = gauss_legendre::<T>(nodes);
                let mut acc = T::zero();
                for (w, p) in ys.windows(2).zip(psi.windows(2)) {
                    let half = lit::<T>(0.5) * (w[1] - w[0]);
                    let mid = lit::<T>(0.5) * (w[1] + w[0]);
                    for (&t, &wt) in gx.iter().zip(gw.iter()) {
                        let yy = mid + half * t;
                        let frac = (yy - w[0]) / (w[1] - w[0]);
                        let pv = p[0] + (p[1] - p[0]) * frac;
                        let cf = curve.interpolate(four_pi * yy * y * y)?;
                        acc = acc + wt * half * (cf - c) * pv / (yy * yy);
                    }
                }
                Ok(acc)
            };
            let fine = integrate(12)?;
            let coarse = integrate(6)?;
            let interp = curve.samples().iter().map(|s| s.tail_bound).fold(T::zero(), |a, b| a.max(b));
            let mass: T = ys
                .windows(2)
                .zip(psi.windows(2))
                .map(|(w, p)| lit::<T>(0.5) * (w[1] - w[0]) * (p[0].abs() + p[1].abs()) / (w[0] * w[0]))
                .sum();
            Ok(KernelPrediction { value: norm * fine, error: norm * ((fine - coarse).abs() + interp * mass) })
        }
    }
}

/// Error scale Y^{(1+theta)/3} int_0^inf |psi(y)| y^{-3/2} dy of the kernel form.
pub fn kernel_yardstick<T: Real>(weight: u32, psi: &SmoothingKernel<T>, y: T, theta: Theta) -> Result<T> {
    let y_part = y.powf((T::one() + theta.value::<T>()) / lit::<T>(3.0));
    let moment = match psi {
        SmoothingKernel::PointMass { y0 } => y0.powf(lit(-1.5)),
        SmoothingKernel::GammaCutoff { x } => {
            let km1 = lit::<T>(weight as f64 - 1.0);
            let four_pi = lit::<T>(4.0) * T::PI();
            let y1 = km1 / (four_pi * *x);
            lit::<T>(2.0) * y1.powf(lit(-0.5)) / (four_pi * ln_gamma_real(km1)?.exp())
        }
        SmoothingKernel::Sampled { ys, psi } => {
            let (gx, gw) = gauss_legendre::<T>(8);
            let mut acc = T::zero();
            for (w, p) in ys.windows(2).zip(psi.windows(2)) {
                let half = lit::<T>(0.5) * (w[1] - w[0]);
                let mid = lit::<T>(0.5) * (w[1] + w[0]);
                for (&t, &wt) in gx.iter().zip(gw.iter()) {
                    let yy = mid + half * t;
                    let frac = (yy - w[0]) / (w[1] - w[0]);
                    let v = p[0] + (p[1] - p[0]) * frac;
                    acc = acc + wt * half * v.abs() * yy.powf(lit(-1.5));
                }
            }
            acc
        }
    };
    Ok(y_part * moment)
}
