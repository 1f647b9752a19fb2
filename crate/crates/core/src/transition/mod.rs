//! The transition function c_f, the symmetric-square constant, and the
//! predicted right-hand sides.

pub mod sym2;

pub use sym2::{rankin_selberg_residue, sym2_l1, sym2_l1_cross_checked, Sym2CrossCheck, Sym2Estimate, Sym2Method};

pub mod cf;

pub use cf::{write_samples_csv, IntegralEstimate, Transition, TransitionCurve, TransitionSample, CURVE_DENSITY};
pub mod kernel;
pub mod rhs;

pub use kernel::{KernelKind, SmoothingKernel};
pub use rhs::{
    corollary1_rhs, corollary2_rhs, main_theorem_rhs, yardstick, Corollary1Prediction, Corollary2Prediction,
    KernelPrediction, Theta, kernel_yardstick,
};
