use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported weight {weight}: cusp-form space must be one-dimensional, supported weights are {supported:?}")]
    UnsupportedWeight { weight: u32, supported: &'static [u32] },

    #[error("unsupported Eisenstein weight {0}: expected 4 or 6")]
    EisensteinWeight(u32),

    #[error("insufficient coefficients: have N = {have}, need N >= {need}")]
    InsufficientCoefficients { have: usize, need: usize },

    #[error("CRT modulus capacity exceeded: product needs {needed_bits} bits but the {available} built-in primes give {capacity_bits}; add more NTT primes")]
    CrtCapacity { needed_bits: u64, capacity_bits: u64, available: usize },

    #[error("inexact division by {divisor} at coefficient {index}: series arithmetic is inconsistent")]
    InexactDivision { divisor: i64, index: usize },

    #[error("length mismatch: {0}")]
    Length(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("pole of the gamma function at z = {0}")]
    Pole(f64),

    #[error("integrand does not decay along the contour: tail/total ratio {ratio:e}")]
    NonDecaying { ratio: f64 },

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("coefficient cache {path}: {reason}")]
    Cache { path: PathBuf, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
