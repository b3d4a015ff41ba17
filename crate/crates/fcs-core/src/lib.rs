//! Reconstruction of bounded, even probability densities and distribution
//! functions from their even moments via truncated Fourier cosine series.
//!
//! The library covers two concrete statistics:
//!
//! - the centered sum of `n` independent uniforms on `[-1/2, 1/2]`
//!   (the centered Irwin-Hall distribution), and
//! - the sample skewness `sqrt(b1)` of a normal sample of size `n`.
//!
//! Both have even densities on a bounded support `[-A_n, A_n]`, so the
//! density admits a cosine series whose coefficients are alternating series
//! in the even moments. Coefficient accumulation is exact-rational
//! ([`numerics::PiPolynomial`]); floating point enters only at the final
//! multiplication by powers of pi and by `1/A_n`.
//!
//! Module map:
//!
//! - [`numerics`]: exact rationals, arbitrary-precision floats, pi polynomials
//! - [`moments`]: even-moment sequences for both statistic families
//! - [`series`]: cosine models with pdf/cdf/percentile evaluation
//! - [`exact_dists`]: closed-form oracles (Irwin-Hall, exact coefficients,
//!   skewness support, Geary consistency operator)
//! - [`montecarlo`]: seeded sampling, histograms, KS validation
//! - [`tables`]: embedded reference tables and the comparison engine

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod exact_dists;
pub mod moments;
pub mod montecarlo;
pub mod numerics;
pub mod quadrature;
pub mod series;
pub mod tables;

use core::fmt;

/// Errors produced by model construction and evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on an argument was violated.
    InvalidArgument(&'static str),
    /// A coefficient series was requested beyond the available moments.
    InsufficientMoments { required: usize, available: usize },
    /// Panel doubling stopped before reaching the requested tolerance.
    QuadratureDidNotConverge { best: f64, error_bound: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::InsufficientMoments {
                required,
                available,
            } => write!(
                f,
                "insufficient moments: series truncation needs {required} even moments, \
                 sequence holds {available}"
            ),
            Error::QuadratureDidNotConverge { best, error_bound } => write!(
                f,
                "quadrature did not converge: best estimate {best:e}, \
                 error bound {error_bound:e}"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
