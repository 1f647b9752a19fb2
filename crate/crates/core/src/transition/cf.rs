//! c_f(alpha) = (pi^{3/2}/2) alpha sum_n lambda(n)^2 W_k(pi^2 n alpha).

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use crate::eigenforms::Eigenform;
use crate::error::{Error, Result};
use crate::num::{from_usize, lit, to_f64, CompensatedSum, Real};
use crate::specfun::{gauss_legendre, ln_gamma_real, zeta_real, ContourSpec, WkKernel};
use crate::transition::sym2::{sym2_l1_cross_checked, Sym2CrossCheck};

/// Target for tail_bound relative to max(1, |value|); half the invariant.
const TAIL_TARGET: f64 = 5e-9;
/// Terms summed between tail checks.
const BLOCK: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransitionSample<T> {
    pub alpha: T,
    pub value: T,
    pub nterms: usize,
    pub tail_bound: T,
}

/// Everything needed to evaluate c_f and the predicted main terms for one
/// eigenform: the W_k kernel, a mean-square bound for tail certification, and
/// the constant Gamma(k) L(1, sym^2 f) / (2 zeta(2)).
pub struct Transition<'a, T: Real> {
    f: &'a Eigenform<T>,
    kernel: WkKernel<T>,
    lambda2: Vec<T>,
    mean_bound: T,
    sym2: Sym2CrossCheck<T>,
    constant: T,
    zeta2: T,
    curve: Mutex<BTreeMap<i64, CurveNode<T>>>,
}

#[derive(Clone, Copy, Debug)]
struct CurveNode<T> {
    /// c_f(e^v)
    value: T,
    /// d c_f(e^v) / dv
    slope: T,
    tail_bound: T,
    nterms: usize,
}

/// Nodes per unit of ln(alpha) in the cached curve.
pub const CURVE_DENSITY: i64 = 32;

impl<'a, T: Real> Transition<'a, T> {
    pub fn new(f: &'a Eigenform<T>, spec: ContourSpec<T>) -> Result<Self> {
        let sym2 = sym2_l1_cross_checked(f)?;
        Self::with_sym2(f, spec, sym2)
    }

    pub fn with_sym2(f: &'a Eigenform<T>, spec: ContourSpec<T>, sym2: Sym2CrossCheck<T>) -> Result<Self> {
        let kernel = WkKernel::new(f.weight(), spec)?;
        let lambda2: Vec<T> = f.lambdas().iter().map(|&l| l * l).collect();
        // Twice the largest running mean of lambda^2; the running mean settles
        // to L(1, sym^2 f)/zeta(2) from above.
        let mut running = T::zero();
        let mut sup = T::zero();
        for (n, &l) in lambda2.iter().enumerate().skip(1) {
            running = running + l;
            sup = sup.max(running / from_usize::<T>(n));
        }
        let zeta2 = zeta_real(lit::<T>(2.0))?;
        let kf = lit::<T>(f.weight() as f64);
        let constant = ln_gamma_real(kf)?.exp() * sym2.value() / (lit::<T>(2.0) * zeta2);
        Ok(Self {
            f,
            kernel,
            lambda2,
            mean_bound: lit::<T>(2.0) * sup,
            sym2,
            constant,
            zeta2,
            curve: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn eigenform(&self) -> &Eigenform<T> {
        self.f
    }

    pub fn weight(&self) -> u32 {
        self.f.weight()
    }

    pub fn kernel(&self) -> &WkKernel<T> {
        &self.kernel
    }

    pub fn sym2(&self) -> &Sym2CrossCheck<T> {
        &self.sym2
    }

    /// Gamma(k) L(1, sym^2 f) / (2 zeta(2)), the alpha -> 0 limit of c_f.
    pub fn constant(&self) -> T {
        self.constant
    }

    pub fn zeta2(&self) -> T {
        self.zeta2
    }

    fn prefactor(alpha: T) -> T {
        T::PI().powf(lit(1.5)) * lit::<T>(0.5) * alpha
    }

    /// Bound on sum_{n > n0} lambda(n)^2 |W_k(pi^2 n alpha)|, times the prefactor.
    /// Uses S(t) = sum_{n<=t} lambda^2 <= mu t and partial summation:
    /// sum_{n>n0} lambda^2 n^{-A} <= A mu n0^{1-A} / (A - 1).
    pub fn tail_bound(&self, alpha: T, n0: usize) -> T {
        let n0 = from_usize::<T>(n0.max(1));
        let ln_x = (T::PI() * T::PI() * alpha).ln();
        let ln_n0 = n0.ln();
        let mut best = T::infinity();
        for &(a, ln_m) in self.kernel.moment_bounds() {
            if a <= T::one() {
                continue;
            }
            let v = ln_m - a * ln_x + (T::one() - a) * ln_n0 + (a * self.mean_bound / (a - T::one())).ln();
            best = best.min(v);
        }
        Self::prefactor(alpha) * best.exp()
    }

    /// Smallest n0 with tail_bound(alpha, n0) <= tol.
    pub fn required_terms(&self, alpha: T, tol: T) -> usize {
        let mut hi = 1usize;
        while self.tail_bound(alpha, hi) > tol {
            hi = hi.saturating_mul(2);
            if hi > 1 << 40 {
                return usize::MAX;
            }
        }
        let mut lo = hi / 2;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.tail_bound(alpha, mid) > tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    fn check_alpha(alpha: T) -> Result<()> {
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(Error::Domain(format!("c_f needs alpha > 0, got {alpha}")));
        }
        Ok(())
    }

    /// c_f(alpha) and alpha c_f'(alpha), summed in increasing n until the
    /// certified tail is below the target.
    fn evaluate(&self, alpha: T, with_slope: bool) -> Result<(TransitionSample<T>, T)> {
        Self::check_alpha(alpha)?;
        let x_step = T::PI() * T::PI() * alpha;
        let pre = Self::prefactor(alpha);
        let available = self.f.len();
        let mut value = CompensatedSum::new();
        let mut slope = CompensatedSum::new();
        let mut n = 0usize;
        loop {
            let end = (n + BLOCK).min(available);
            for m in n + 1..=end {
                let x = x_step * from_usize::<T>(m);
                if with_slope {
                    let (w, xw) = self.kernel.eval_with_derivative(x);
                    value.add(self.lambda2[m] * w);
                    slope.add(self.lambda2[m] * (w + xw));
                } else {
                    value.add(self.lambda2[m] * self.kernel.eval(x));
                }
            }
            n = end;
            let current = pre * value.value();
            let tol = lit::<T>(TAIL_TARGET) * current.abs().max(T::one());
            let tail = self.tail_bound(alpha, n);
            if tail <= tol {
                let sample = TransitionSample { alpha, value: current, nterms: n, tail_bound: tail };
                return Ok((sample, pre * slope.value()));
            }
            if n == available {
                let need = self.required_terms(alpha, tol);
                return Err(Error::InsufficientCoefficients { have: available, need });
            }
        }
    }

    pub fn c_f(&self, alpha: T) -> Result<TransitionSample<T>> {
        Ok(self.evaluate(alpha, false)?.0)
    }

    /// c_f(alpha) together with alpha c_f'(alpha).
    pub fn c_f_with_slope(&self, alpha: T) -> Result<(TransitionSample<T>, T)> {
        self.evaluate(alpha, true)
    }

    /// c_f on many points, in parallel; output order matches input order.
    pub fn c_f_many(&self, alphas: &[T]) -> Result<Vec<TransitionSample<T>>> {
        alphas.par_iter().map(|&a| self.c_f(a)).collect()
    }

    /// Envelope |c_f(u)| <= E(u) valid for all u > 0, from
    /// sum_n lambda^2 n^{-A} <= 1 + A mu / (A - 1).
    pub fn envelope(&self, u: T) -> T {
        let ln_x = (T::PI() * T::PI() * u).ln();
        let mut best = T::infinity();
        for &(a, ln_m) in self.kernel.moment_bounds() {
            if a <= T::one() {
                continue;
            }
            let b = T::one() + a * self.mean_bound / (a - T::one());
            best = best.min(ln_m - a * ln_x + b.ln());
        }
        Self::prefactor(u) * best.exp()
    }

    /// Bound on int_{u0}^inf |c_f(u)| / u^2 du.
    pub fn integral_tail_bound(&self, u0: T) -> T {
        let ln_u0 = u0.ln();
        let ln_pi2 = (T::PI() * T::PI()).ln();
        let pre = T::PI().powf(lit(1.5)) * lit::<T>(0.5);
        let mut best = T::infinity();
        for &(a, ln_m) in self.kernel.moment_bounds() {
            if a <= T::one() {
                continue;
            }
            let b = T::one() + a * self.mean_bound / (a - T::one());
            best = best.min(ln_m - a * ln_pi2 + b.ln() - a * ln_u0 - a.ln());
        }
        pre * best.exp()
    }

    fn ensure_nodes(&self, lo: i64, hi: i64) -> Result<()> {
        let missing: Vec<i64> = {
            let cache = self.curve.lock().expect("curve cache poisoned");
            (lo..=hi).filter(|i| !cache.contains_key(i)).collect()
        };
        if missing.is_empty() {
            return Ok(());
        }
        let density = lit::<T>(CURVE_DENSITY as f64);
        let nodes: Vec<(i64, CurveNode<T>)> = missing
            .par_iter()
            .map(|&i| {
                let alpha = (lit::<T>(i as f64) / density).exp();
                let (s, slope) = self.c_f_with_slope(alpha)?;
                Ok((i, CurveNode { value: s.value, slope, tail_bound: s.tail_bound, nterms: s.nterms }))
            })
            .collect::<Result<_>>()?;
        let mut cache = self.curve.lock().expect("curve cache poisoned");
        cache.extend(nodes);
        Ok(())
    }

    fn node_range(lo: T, hi: T) -> (i64, i64) {
        let density = lit::<T>(CURVE_DENSITY as f64);
        let a = (lo.ln() * density).floor().to_i64().unwrap_or(i64::MIN);
        let b = (hi.ln() * density).ceil().to_i64().unwrap_or(i64::MAX);
        (a, b.max(a + 1))
    }

    /// Cached samples of c_f on the aligned geometric grid covering [lo, hi].
    pub fn curve(&self, lo: T, hi: T) -> Result<TransitionCurve<T>> {
        Self::check_alpha(lo)?;
        if !(hi > lo) {
            return Err(Error::Domain(format!("curve needs lo < hi, got [{lo}, {hi}]")));
        }
        let (a, b) = Self::node_range(lo, hi);
        self.ensure_nodes(a, b)?;
        let cache = self.curve.lock().expect("curve cache poisoned");
        let nodes = (a..=b).map(|i| cache[&i]).collect();
        Ok(TransitionCurve { first: a, nodes })
    }

    /// int_{u0}^inf c_f(u) / u^2 du with an error estimate, from the cached
    /// curve up to the point where the envelope makes the remainder negligible.
    pub fn inverse_square_integral(&self, u0: T, tol: T) -> Result<IntegralEstimate<T>> {
        Self::check_alpha(u0)?;
        let mut upper = u0 * lit::<T>(2.0);
        while self.integral_tail_bound(upper) > tol {
            upper = upper * lit::<T>(1.25);
            if upper > lit::<T>(1e12) {
                return Err(Error::Quadrature("c_f envelope does not settle".into()));
            }
        }
        let curve = self.curve(u0, upper)?;
        let fine = curve.integrate_inverse_square(u0, upper, 1);
        let coarse = curve.integrate_inverse_square(u0, upper, 2);
        let tail = self.integral_tail_bound(upper);
        Ok(IntegralEstimate {
            value: fine,
            // Hermite interpolation error scales like h^4.
            error: (fine - coarse).abs() / lit::<T>(15.0) + tail + curve.tail_mass(u0, upper),
            upper,
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IntegralEstimate<T> {
    pub value: T,
    pub error: T,
    /// Where the quadrature stops and the envelope bound takes over.
    pub upper: T,
}

/// Samples of c_f at alpha = exp(i / CURVE_DENSITY) for consecutive i, with
/// exact slopes, interpolated by cubic Hermite polynomials in ln(alpha).
#[derive(Clone, Debug)]
pub struct TransitionCurve<T> {
    first: i64,
    nodes: Vec<CurveNode<T>>,
}

impl<T: Real> TransitionCurve<T> {
    fn h() -> T {
        T::one() / lit::<T>(CURVE_DENSITY as f64)
    }

    fn v_of(&self, i: usize) -> T {
        lit::<T>((self.first + i as i64) as f64) * Self::h()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn samples(&self) -> Vec<TransitionSample<T>> {
        (0..self.nodes.len())
            .map(|i| {
                let n = self.nodes[i];
                TransitionSample { alpha: self.v_of(i).exp(), value: n.value, nterms: n.nterms, tail_bound: n.tail_bound }
            })
            .collect()
    }

    /// Hermite interpolant between nodes i and i + stride at v.
    fn hermite(&self, i: usize, stride: usize, v: T) -> T {
        let h = Self::h() * from_usize::<T>(stride);
        let t = (v - self.v_of(i)) / h;
        let a = self.nodes[i];
        let b = self.nodes[i + stride];
        let t2 = t * t;
        let t3 = t2 * t;
        let two = lit::<T>(2.0);
        let three = lit::<T>(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = -two * t3 + three * t2;
        let h11 = t3 - t2;
        h00 * a.value + h10 * h * a.slope + h01 * b.value + h11 * h * b.slope
    }

    /// Interpolated c_f(alpha) for alpha inside the sampled range.
    pub fn interpolate(&self, alpha: T) -> Result<T> {
        let v = alpha.ln();
        let last = self.nodes.len() - 1;
        let pos = (v / Self::h()).floor().to_i64().unwrap_or(i64::MIN) - self.first;
        if pos < 0 || pos as usize > last {
            return Err(Error::Domain(format!("alpha {alpha} outside the sampled curve")));
        }
        let i = (pos as usize).min(last - 1);
        Ok(self.hermite(i, 1, v))
    }

    /// int_{lo}^{hi} c_f(u) / u^2 du = int c_f(e^v) e^{-v} dv, Gauss–Legendre
    /// on each interpolation cell; `stride` = 2 uses every other node.
    fn integrate_inverse_square(&self, lo: T, hi: T, stride: usize) -> T {
        let rule = gauss_legendre::<T>(8);
        let (vlo, vhi) = (lo.ln(), hi.ln());
        let mut acc = CompensatedSum::new();
        let mut i = 0usize;
        while i + stride < self.nodes.len() {
            let (a, b) = (self.v_of(i).max(vlo), self.v_of(i + stride).min(vhi));
            if b > a {
                let half = lit::<T>(0.5) * (b - a);
                let mid = lit::<T>(0.5) * (a + b);
                for (&x, &w) in rule.0.iter().zip(rule.1.iter()) {
                    let v = mid + half * x;
                    acc.add(w * half * self.hermite(i, stride, v) * (-v).exp());
                }
            }
            i += stride;
        }
        acc.value()
    }

    /// Sum of certified c_f tails weighted like the integrand.
    fn tail_mass(&self, lo: T, hi: T) -> T {
        let h = Self::h();
        let mut acc = T::zero();
        for (i, n) in self.nodes.iter().enumerate() {
            let v = self.v_of(i);
            if v.exp() >= lo && v.exp() <= hi * lit::<T>(1.1) {
                acc = acc + n.tail_bound * (-v).exp() * h;
            }
        }
        acc
    }

    /// CSV with header `alpha,c_f,tail_bound,nterms`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_samples_csv(out, &self.samples())
    }
}

/// CSV with header `alpha,c_f,tail_bound,nterms`.
pub fn write_samples_csv<T: Real, W: Write>(out: W, samples: &[TransitionSample<T>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "c_f", "tail_bound", "nterms"])?;
    for s in samples {
        w.write_record([
            format!("{:e}", to_f64(s.alpha)),
            format!("{:e}", to_f64(s.value)),
            format!("{:e}", to_f64(s.tail_bound)),
            s.nterms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
