//! Left-hand sides: shifted-convolution double sums, direct and by FFT.

pub mod correlate;
pub mod query;
pub mod sums;

pub use query::{n_trunc_exponential, n_trunc_incomplete_gamma, HWindow, SCSQuery, DEFAULT_EPS_TRUNC};
pub use sums::{corollary1_n_trunc, corollary2_lhs, scs_direct, scs_direct_ordered, scs_fast, scs_weighted, SumOrder};
