//! Scalar abstractions.
//!
//! Two levels are used throughout the crate. [`Field`] is enough for the
//! rational-valued quantities (kernel values, permutation sums, squared
//! Menger curvature) and is implemented by both floats and
//! [`BigRational`](num_rational::BigRational), which lets the same code run
//! exactly. [`Scalar`] adds everything the numerical machinery needs
//! (square roots, comparisons with tolerances, parallel reductions).

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::Neg;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// An ordered field. Floats and exact rationals both qualify.
pub trait Field: Clone + PartialOrd + Num + Neg<Output = Self> + Debug {}

impl<T> Field for T where T: Clone + PartialOrd + Num + Neg<Output = T> + Debug {}

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Field + Float + FromPrimitive + ToPrimitive + Sum + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal. Every literal used in the crate is
    /// representable (possibly rounded) in both `f32` and `f64`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// A tolerance that never drops below a few ulps of the type.
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(64.0))
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite float converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `base^exp` by repeated squaring; works for exact types.
pub fn powu<T: Field>(base: &T, mut exp: u32) -> T {
    let mut acc = T::one();
    let mut b = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b.clone();
        }
        exp >>= 1;
        if exp > 0 {
            b = b.clone() * b;
        }
    }
    acc
}
