//! Estimation of antenna impedance and channel statistics for a multi-antenna
//! transmitter and a single receive antenna whose load can be switched.
//!
//! The numeric core is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix the precision for typical use. The experiment harness
//! works in `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod estimators;
pub mod fading;
pub mod frontend;
pub mod harness;
pub mod numerics;
pub mod scalar;
pub mod signalpath;

use num_complex::Complex;

pub use estimators::{EstimateError, EstimateReport, Method};
pub use scalar::Real;

pub type Cplx = Complex<f64>;
pub type Mat = numerics::ComplexMat<f64>;
pub type ChannelSpecF64 = fading::ChannelSpec<f64>;
pub type StatsF64 = signalpath::SufficientStats<f64>;
pub type ReportF64 = EstimateReport<f64>;

pub type Cplx32 = Complex<f32>;
pub type Mat32 = numerics::ComplexMat<f32>;
pub type ChannelSpecF32 = fading::ChannelSpec<f32>;
pub type StatsF32 = signalpath::SufficientStats<f32>;
pub type ReportF32 = EstimateReport<f32>;
