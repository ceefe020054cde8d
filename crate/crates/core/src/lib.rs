//! # coopifc
//!
//! Numerical outer bounds for the cooperative Gaussian interference channel.
//!
//! A network of `2K` full-duplex nodes: nodes `1..=K` are sources, node `i + K`
//! is the intended destination of source `i`. Every node may transmit and
//! receive in-band (through the complex gain matrix `H`) and may in addition
//! receive an out-of-band signal of bounded entropy `C_ℓ` bits per channel use.
//!
//! The crate provides:
//!
//! - [`model`]: channel description, the SNR-exponent parameterization and the
//!   cooperation-mode presets.
//! - [`gaussinfo`]: conditional entropies and mutual informations of jointly
//!   Gaussian vectors, computed from square-root factors of the joint
//!   covariance.
//! - [`bounds`]: cut-set and sum-rate outer bounds, their maximization over the
//!   Gaussian input covariance, and the fully-cooperative MIMO limit.
//! - [`gdof`]: closed-form generalized degrees of freedom, the W- and V-curves
//!   and per-mode symmetric curves.
//! - [`ksum`]: generation and numerical evaluation of partial-sum-rate term
//!   chains for any number of user pairs.
//! - [`cli`]: the `coopifc` command-line front end.
//!
//! Node identifiers in the public API (variables `X3`, `Y4`, cut sets, user
//! subsets) are 1-based. Matrix fields are 0-based as usual.
//!
//! All rates are in bits per channel use, using the proper-complex convention
//! `h(V) = log2 det(πe Σ_V)`.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

#![forbid(unsafe_code)]
// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod gaussinfo;
pub mod gdof;
pub mod ksum;
mod linalg;
pub mod model;
pub mod optimize;
pub mod svg;

pub use error::{Error, Result};

/// Complex scalar used for gains and covariances.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// `log2(1 + snr)`, the normalization of generalized degrees of freedom.
pub fn log2_1p(snr: f64) -> f64 {
    snr.ln_1p() / std::f64::consts::LN_2
}
