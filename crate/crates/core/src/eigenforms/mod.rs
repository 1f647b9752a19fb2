//! Exact q-expansions and normalized Hecke eigenvalues for the
//! one-dimensional level-1 cusp-form spaces.

mod cache;
mod eigenform;
mod hecke;
pub mod ntt;
mod series;

pub use cache::{
    cache_file_name, coefficient_id, default_cache_dir, read_coefficients, write_coefficients, CoefficientCache, CACHE_DIR_ENV,
};
pub use eigenform::{build_eigenform, cusp_form_series, Eigenform, SUPPORTED_WEIGHTS};
pub use hecke::{check_hecke_relations, divisor_counts, primes_up_to, HeckeReport, DELIGNE_SLACK};
pub use series::{delta_series, divisor_power_sums, eisenstein_series, series_multiply, IntegerSeries};
