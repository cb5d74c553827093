//! Truncated-matrix laboratory for Hardy-space operators: Blaschke products,
//! Toeplitz and Hankel sections, model-space projections, polydisc defect
//! operators and singular-value probes.
//!
//! Everything is generic over the real scalar `T: Real` (`f32` or `f64`);
//! the aliases below fix `T = f64`.

// `!(x < y)` style guards are there to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blaschke;
pub mod error;
pub mod fourier;
pub mod operators;
pub mod polydisc;
pub mod report;
pub mod scalar;
pub mod spectral;

pub use error::{HplError, Result};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type DiskPoint64 = blaschke::DiskPoint<f64>;
pub type ZeroSequence64 = blaschke::ZeroSequence<f64>;
pub type BlaschkeProduct64 = blaschke::BlaschkeProduct<f64>;
pub type FourierSymbol64 = fourier::FourierSymbol<f64>;
pub type TruncatedOperator64 = operators::TruncatedOperator<f64>;
pub type CMatrix64 = operators::CMatrix<f64>;
pub type ModelSpaceBasis64 = operators::ModelSpaceBasis<f64>;
pub type SeparatedSymbolPair64 = polydisc::SeparatedSymbolPair<f64>;

/// Version string embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
