//! Numerical laboratory for capacities of odd Calderón-Zygmund kernels.
//!
//! The crate is generic over the scalar type. Rational-valued quantities
//! (kernel values, permutation sums, squared curvature) only need
//! [`Field`] and run on [`Rational`] as well as floats; everything else
//! needs a float [`Scalar`]. Concrete `f64` aliases are exported below.

pub mod capacity;
pub mod error;
pub mod fraction;
pub mod geom;
pub mod kernels;
pub mod lp;
pub mod meascurv;
pub mod measure;
pub mod rng;
pub mod scalar;
pub mod symbols;
pub mod symmetry;

pub use error::{Error, Result};
pub use fraction::Fraction;
pub use scalar::{Field, Scalar};

pub type Rational = num_rational::BigRational;

pub type Point = geom::Point<f64>;
pub type SetDescriptor = geom::SetDescriptor<f64>;
pub type Discretization = geom::Discretization<f64>;
pub type KernelSpec = kernels::KernelSpec<f64>;
pub type Triple = symmetry::Triple<f64>;
pub type DiscreteMeasure = measure::DiscreteMeasure<f64>;
pub type LpProblem = lp::LpProblem<f64>;
pub type LpResult = lp::LpResult<f64>;
pub type CapacityProblem = capacity::CapacityProblem<f64>;
pub type CapacityEstimate = capacity::CapacityEstimate<f64>;

pub type Point32 = geom::Point<f32>;
pub type KernelSpec32 = kernels::KernelSpec<f32>;
pub type DiscreteMeasure32 = measure::DiscreteMeasure<f32>;
pub type ExactPoint = geom::Point<Rational>;
pub type ExactKernelSpec = kernels::KernelSpec<Rational>;
pub type ExactTriple = symmetry::Triple<Rational>;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
