//! Special functions and vertical-line quadrature.

pub mod contour;
pub mod gamma;
pub mod incgamma;
pub mod quad;
pub mod wk;
pub mod zeta;

pub use contour::{contour_quadrature, ContourSpec, ContourValue, LineKernel};
pub use gamma::{gamma, gamma_real, ln_gamma, ln_gamma_real};
pub use incgamma::{
    gamma_p, gamma_q, ln_lower_incomplete_gamma, ln_upper_incomplete_gamma, lower_incomplete_gamma,
    upper_incomplete_gamma,
};
pub use quad::{gauss_legendre, integrate_rule};
pub use wk::{ln_gamma_ratio, w_k, w_k_residue_series, ResidueSeries, WkKernel, WkValue};
pub use zeta::zeta_real;
