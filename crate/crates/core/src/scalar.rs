use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::Float;

/// Coordinate type for vertex positions.
pub trait Scalar: Float + FromStr + Display + Debug + Default + Send + Sync + 'static {
    /// Converts an `f64` literal; used by the generators.
    fn lit(value: f64) -> Self {
        <Self as num_traits::NumCast>::from(value).expect("f64 literal representable")
    }
}

impl<T> Scalar for T where T: Float + FromStr + Display + Debug + Default + Send + Sync + 'static {}
