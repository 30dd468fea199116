//! Exact symbolic toolkit for formal inverses of degree-linear polynomial maps.
//!
//! A degree d-linear map sends x_i to x_i - (a_{i,1} x_1 + ... + a_{i,n} x_n)^d
//! over the rational coefficient ring in the n^2 symbols a_{i,j}. This crate
//! constructs the formal inverse of such a map as a sum over d-regular rooted
//! plane trees, builds the ideal generated by the nonconstant coefficients of
//! the Jacobian determinant, and certifies two families of exact identities:
//! a Cayley-Hamilton style membership identity for fern-shaped trees, and a
//! purely combinatorial proof of the Cayley-Hamilton theorem itself via a
//! sign-reversing involution on labeled diagonals.
//!
//! All arithmetic is exact (arbitrary-precision rationals); nothing is ever
//! evaluated in floating point.

pub mod chproof;
pub mod cli;
pub mod groebner;
pub mod jacobian;
pub mod polymatrix;
pub mod polyring;
pub mod trees;

use thiserror::Error;

/// Crate-wide error type. The CLI maps these onto process exit codes:
/// invalid input and parse failures exit 1, exceeded time or size budgets
/// exit 2; verification checks that run to completion but answer "false"
/// are not errors — they are reported, and verification commands exit 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("computation exceeded time budget of {0} seconds")]
    Timeout(u64),
    #[error("computation exceeded resource limit: {0}")]
    Limit(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
