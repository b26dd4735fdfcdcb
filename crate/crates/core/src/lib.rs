//! Multistationarity of small mass-action networks: exact steady-state
//! counting, classification of one- and two-species families, and the
//! parameter regions where two or more positive steady states exist.

pub mod analysis;
pub mod classify;
pub mod connectivity;
pub mod linalg;
pub mod massaction;
pub mod multipoly;
pub mod network;
pub mod regions;
pub mod scalar;
pub mod serde_util;
pub mod unipoly;

pub use scalar::Scalar;

/// Exact rationals; the default scalar throughout.
pub type Rational = num_rational::BigRational;

pub type RatPoly = unipoly::UniPoly<Rational>;
pub type F64Poly = unipoly::UniPoly<f64>;
pub type F32Poly = unipoly::UniPoly<f32>;
