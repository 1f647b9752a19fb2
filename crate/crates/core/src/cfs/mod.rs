//! The Jacobi-symbol double sum and its transition function C(alpha).

pub mod calpha;
pub mod jacobi;
pub mod query;
pub mod sum;

pub use calpha::{c_alpha, second_difference, small_alpha_expansion, CAlpha, AGREEMENT_TOL};
pub use jacobi::jacobi;
pub use query::{CfsQuery, DEFAULT_KMAX, DEFAULT_QUAD_TOL};
pub use sum::{cfs_sum, cfs_verify, cfs_yardstick};
