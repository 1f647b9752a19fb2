//! Numerical verification of averaged shifted convolution sums of level-1
//! holomorphic Hecke eigenforms, and of the companion Jacobi-symbol
//! transition theorem.
//!
//! The floating-point machinery is generic over [`num::Real`]; the aliases
//! at the crate root fix the scalar to `f64`.

pub mod cfs;
pub mod eigenforms;
pub mod error;
pub mod harness;
pub mod num;
pub mod specfun;
pub mod scs;
pub mod transition;

pub use error::{Error, Result};

pub type Eigenform = eigenforms::Eigenform<f64>;
pub type ContourSpec = specfun::ContourSpec<f64>;
pub type WkKernel = specfun::WkKernel<f64>;
pub type Transition<'a> = transition::Transition<'a, f64>;
pub type TransitionSample = transition::TransitionSample<f64>;
pub type SmoothingKernel = transition::SmoothingKernel<f64>;
pub type SCSQuery = scs::SCSQuery<f64>;
pub type CfsQuery = cfs::CfsQuery<f64>;
pub type CAlpha = cfs::CAlpha<f64>;
