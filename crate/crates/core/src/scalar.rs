//! Floating-point scalar abstraction: f32 or f64.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar the numeric layers are generic over.
pub trait Scalar: RealField + Copy + FromPrimitive + ToPrimitive {}

impl<T: RealField + Copy + FromPrimitive + ToPrimitive> Scalar for T {}

/// Lifts an `f64` literal into the working scalar.
pub fn s<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("scalar conversion from f64")
}

/// Lowers a scalar to `f64` for reporting.
pub fn to_f64<S: Scalar>(x: S) -> f64 {
    x.to_f64().expect("scalar conversion to f64")
}
