//! Krein-space toolkit for the covariant Heisenberg-Weyl group H_R(1,3).
//!
//! Units have ℏ = 2 and the metric is η = diag(−1, 1, 1, 1). Phase-space
//! coordinates are always the normalized ones produced by
//! [`minkowski::normalize_representation`].

pub mod contraction;
pub mod error;
pub mod fock;
pub mod minkowski;
pub mod operators;
pub mod quadrature;
pub mod symbol;

pub use error::{Error, Result};

/// Crate version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
