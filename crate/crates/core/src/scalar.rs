use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real number type the whole library is generic over.
///
/// Implemented for `f32` and `f64`. Prelec weighting needs `exp`/`ln`, so
/// only floating-point types qualify.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts a literal. Panics only if the type cannot represent finite `f64`s,
    /// which never happens for the provided implementations.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("scalar conversion from f64")
    }

    #[inline]
    fn ratio(num: i64, den: i64) -> Self {
        Self::lit(num as f64) / Self::lit(den as f64)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `requested`, floored at a small multiple of machine epsilon so that
    /// tolerances stay meaningful for `f32`.
    #[inline]
    fn tol(requested: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(64.0);
        Self::lit(requested).max(floor)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Numerical tolerances shared by every check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<T> {
    /// Allowed drift of a probability vector's total from 1.
    pub dist_sum: T,
    /// Probabilities at or below this are outside the support.
    pub support: T,
    /// A deviation is a violation only if its gain exceeds this.
    pub compare: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        Tolerances {
            dist_sum: T::tol(1e-9),
            support: T::tol(1e-12),
            compare: T::tol(1e-9),
        }
    }
}

impl<T: Scalar> Tolerances<T> {
    pub fn with_compare(mut self, compare: T) -> Self {
        self.compare = compare;
        self
    }
}
