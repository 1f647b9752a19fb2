use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::{from_usize, lit, Real};

/// Weight function psi(y) on y > 0 smoothing the n-sum.
#[derive(Clone, Debug, PartialEq)]
pub enum SmoothingKernel<T> {
    /// Dirac mass at y0.
    PointMass { y0: T },
    /// psi(y) = 1_{y > (k-1)/(4 pi X)} / (4 pi Gamma(k-1)); its weights are
    /// regularized incomplete gamma values.
    GammaCutoff { x: T },
    /// Piecewise-linear interpolation of samples, zero outside [ys[0], ys[last]].
    Sampled { ys: Vec<T>, psi: Vec<T> },
}

impl<T: Real> SmoothingKernel<T> {
    /// Point mass at y = 1/(4 pi X).
    pub fn point_mass_for(x: T) -> Result<Self> {
        if !(x > T::zero()) {
            return Err(Error::Domain(format!("point mass needs X > 0, got {x}")));
        }
        Ok(Self::PointMass { y0: T::one() / (lit::<T>(4.0) * T::PI() * x) })
    }

    pub fn gamma_cutoff(x: T) -> Result<Self> {
        if !(x >= T::one()) {
            return Err(Error::Domain(format!("gamma cutoff needs X >= 1, got {x}")));
        }
        Ok(Self::GammaCutoff { x })
    }

    pub fn sampled(ys: Vec<T>, psi: Vec<T>) -> Result<Self> {
        if ys.len() != psi.len() || ys.len() < 2 {
            return Err(Error::Length(format!(
                "sampled kernel needs at least two (y, psi) pairs of equal length, got {} and {}",
                ys.len(),
                psi.len()
            )));
        }
        if !(ys[0] > T::zero()) {
            return Err(Error::Domain(format!(
                "sampled kernel support starts at y = {}; psi(y)/y^2 is not integrable there",
                ys[0]
            )));
        }
        if ys.windows(2).any(|w| !(w[1] > w[0])) || ys.iter().chain(psi.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("sampled kernel abscissae must be finite and strictly increasing".into()));
        }
        Ok(Self::Sampled { ys, psi })
    }

    /// Unit-mass bump (1/w) phi((y - y0)/w) with phi(t) proportional to
    /// exp(-1/(1 - t^2)) on (-1, 1), sampled on `points` equispaced nodes
    /// and normalized so the piecewise-linear interpolant has mass one.
    pub fn bump(y0: T, half_width: T, points: usize) -> Result<Self> {
        if !(half_width > T::zero()) || !(half_width < y0) || points < 3 {
            return Err(Error::Domain(format!(
                "bump needs 0 < half_width < y0 and at least 3 points; got y0={y0}, w={half_width}, points={points}"
            )));
        }
        let last = from_usize::<T>(points - 1);
        let ys: Vec<T> = (0..points)
            .map(|i| y0 - half_width + lit::<T>(2.0) * half_width * from_usize::<T>(i) / last)
            .collect();
        let mut psi: Vec<T> = ys
            .iter()
            .map(|&y| {
                let t = (y - y0) / half_width;
                let r = T::one() - t * t;
                if r > T::zero() { (-T::one() / r).exp() } else { T::zero() }
            })
            .collect();
        let h = lit::<T>(2.0) * half_width / last;
        let mass: T = psi.iter().copied().sum::<T>() * h;
        for p in psi.iter_mut() {
            *p = *p / mass;
        }
        Self::sampled(ys, psi)
    }

    /// psi identically zero on [lo, hi].
    pub fn zero(lo: T, hi: T) -> Result<Self> {
        Self::sampled(vec![lo, hi], vec![T::zero(), T::zero()])
    }

    pub fn kind(&self) -> KernelKind {
        match self {
            Self::PointMass { .. } => KernelKind::PointMass,
            Self::GammaCutoff { .. } => KernelKind::GammaCutoff,
            Self::Sampled { .. } => KernelKind::Sampled,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Sampled { psi, .. } if psi.iter().all(|p| *p == T::zero()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    PointMass,
    GammaCutoff,
    Sampled,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_has_unit_mass_and_compact_support() {
        let k = SmoothingKernel::<f64>::bump(1.0, 0.1, 41).unwrap();
        if let SmoothingKernel::Sampled { ys, psi } = &k {
            let h = ys[1] - ys[0];
            assert!((psi.iter().sum::<f64>() * h - 1.0).abs() < 1e-14);
            assert_eq!(psi[0], 0.0);
            assert_eq!(*psi.last().unwrap(), 0.0);
            assert!((ys[0] - 0.9).abs() < 1e-15);
        } else {
            panic!("bump must be sampled");
        }
    }

    #[test]
    fn invalid_kernels() {
        assert!(SmoothingKernel::<f64>::sampled(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(SmoothingKernel::<f64>::sampled(vec![1.0, 0.5], vec![1.0, 1.0]).is_err());
        assert!(SmoothingKernel::<f64>::sampled(vec![1.0], vec![1.0]).is_err());
        assert!(SmoothingKernel::<f64>::bump(1.0, 2.0, 9).is_err());
        assert!(SmoothingKernel::<f64>::point_mass_for(0.0).is_err());
    }

    #[test]
    fn zero_kernel_is_recognized() {
        assert!(SmoothingKernel::<f64>::zero(1.0, 2.0).unwrap().is_zero());
        assert!(!SmoothingKernel::<f64>::bump(1.0, 0.5, 5).unwrap().is_zero());
    }
}
