//! Selective strong structural co-design for regular descriptor systems.
//!
//! Given selective structural patterns over {0, x, *} for a pencil
//! A - lambda*E plus actuation/sensing/communication cost matrices, this
//! crate computes minimum-cost k-resilient actuator, sensor, and
//! communication-pattern designs whose controllability, observability, and
//! freedom from fixed modes hold for every realization in the pattern
//! class, and verifies designs with a numeric oracle over sampled
//! realizations.
//!
//! Numeric components are generic over the real scalar through
//! [`nalgebra::RealField`]; the `*64` aliases below pin the common `f64`
//! instantiations.

pub mod codesign;
pub mod cost;
mod error;
pub mod oracle;
pub mod pattern;
pub mod placement;
pub mod sample;
pub mod scalar;
pub mod stair;

pub use error::{OracleError, PatternError, SampleError, SolveError};
pub use pattern::{lambda_pattern, PatternEntry, PencilPattern, SelectivePattern};
pub use scalar::Scalar;

/// `f64` instantiations of the scalar-generic types.
pub type SampleConfig64 = sample::SampleConfig<f64>;
pub type Realization64 = sample::Realization<f64>;
pub type CostMatrix64 = cost::CostMatrix<f64>;
pub type CostSpec64 = cost::CostSpec<f64>;
pub type DedicatedSolution64 = placement::DedicatedSolution<f64>;
pub type CodesignResult64 = codesign::CodesignResult<f64>;
pub type IndexMate64 = codesign::IndexMate<f64>;
pub type OracleConfig64 = oracle::OracleConfig<f64>;
pub type OracleVerdict64 = oracle::OracleVerdict<f64>;
pub type Counterexample64 = oracle::Counterexample<f64>;

/// `f32` instantiations, for quick low-precision sweeps.
pub type SampleConfig32 = sample::SampleConfig<f32>;
pub type OracleConfig32 = oracle::OracleConfig<f32>;
