//! Odd kernels of homogeneity -1, hard truncations, and discrete transforms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geom::Point;
use crate::measure::DiscreteMeasure;
use crate::scalar::{powu, Field, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `x_i^(2n-1) / |x|^(2n)` in the plane.
    OddPowerCoordinate,
    /// `x_i / |x|^2` in d-space.
    RieszCoordinate,
    /// A coordinate of the Cauchy kernel `1/z`, i.e. the planar Riesz kernel.
    CauchyCoordinate,
    /// `x_1 x_2^2 / |x|^4`.
    Huovinen,
}

/// JSON: `{"family","i","n","d","delta"}`; `i` is 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec<T = f64> {
    pub family: Family,
    pub i: usize,
    #[serde(default = "one")]
    pub n: u32,
    pub d: usize,
    pub delta: T,
}

fn one() -> u32 {
    1
}

impl<T: Field> KernelSpec<T> {
    pub fn odd_power(i: usize, n: u32) -> Self {
        KernelSpec {
            family: Family::OddPowerCoordinate,
            i,
            n,
            d: 2,
            delta: T::zero(),
        }
    }

    pub fn riesz(i: usize, d: usize) -> Self {
        KernelSpec {
            family: Family::RieszCoordinate,
            i,
            n: 1,
            d,
            delta: T::zero(),
        }
    }

    pub fn cauchy(i: usize) -> Self {
        KernelSpec {
            family: Family::CauchyCoordinate,
            i,
            n: 1,
            d: 2,
            delta: T::zero(),
        }
    }

    pub fn huovinen() -> Self {
        KernelSpec {
            family: Family::Huovinen,
            i: 1,
            n: 1,
            d: 2,
            delta: T::zero(),
        }
    }

    pub fn truncated(mut self, delta: T) -> Self {
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta >= T::zero()) {
            return invalid("truncation radius must be nonnegative");
        }
        match self.family {
            Family::OddPowerCoordinate => {
                if self.d != 2 || self.n == 0 || !(1..=2).contains(&self.i) {
                    return invalid("odd-power kernels need d = 2, n >= 1, i in {1, 2}");
                }
            }
            Family::RieszCoordinate => {
                if self.d == 0 || !(1..=self.d).contains(&self.i) {
                    return invalid("riesz kernels need 1 <= i <= d");
                }
            }
            Family::CauchyCoordinate => {
                if self.d != 2 || !(1..=2).contains(&self.i) {
                    return invalid("cauchy coordinate kernels need d = 2, i in {1, 2}");
                }
            }
            Family::Huovinen => {
                if self.d != 2 {
                    return invalid("the Huovinen kernel is planar");
                }
            }
        }
        Ok(())
    }

    /// Untruncated value at `x` given `|x|^2`. Only field operations are
    /// used, so exact types evaluate exactly.
    fn raw(&self, x: &[T], r2: T) -> T {
        match self.family {
            Family::OddPowerCoordinate => {
                powu(&x[self.i - 1], 2 * self.n - 1) / powu(&r2, self.n)
            }
            Family::RieszCoordinate | Family::CauchyCoordinate => x[self.i - 1].clone() / r2,
            Family::Huovinen => {
                x[0].clone() * x[1].clone() * x[1].clone() / (r2.clone() * r2)
            }
        }
    }

    /// Kernel value at `x`, zero when `|x| <= delta`.
    pub fn eval(&self, x: &Point<T>) -> Result<T> {
        if x.dim() != self.d {
            return invalid(format!("point of dimension {} for a kernel on R^{}", x.dim(), self.d));
        }
        let r2 = x.norm2();
        if r2 == T::zero() && self.delta == T::zero() {
            return Err(Error::Domain("kernel evaluated at the origin without truncation".into()));
        }
        if r2 <= self.delta.clone() * self.delta.clone() {
            return Ok(T::zero());
        }
        Ok(self.raw(x.coords(), r2))
    }

    /// `K_delta(x - y)`, zero inside the truncation radius (and at `x = y`).
    pub fn eval_diff(&self, x: &[T], y: &[T]) -> T {
        let diff: Vec<T> = x.iter().zip(y).map(|(a, b)| a.clone() - b.clone()).collect();
        let r2 = diff
            .iter()
            .fold(T::zero(), |acc, c| acc + c.clone() * c.clone());
        if r2 == T::zero() || r2 <= self.delta.clone() * self.delta.clone() {
            return T::zero();
        }
        self.raw(&diff, r2)
    }
}

impl<T: Scalar> KernelSpec<T> {
    /// Same as [`eval_diff`](Self::eval_diff) without allocation, for the
    /// float hot paths (matrix assembly, potentials).
    #[inline]
    pub fn eval_diff_fast(&self, x: &[T], y: &[T]) -> T {
        let mut buf = [T::zero(); 3];
        let mut r2 = T::zero();
        if x.len() <= 3 {
            for k in 0..x.len() {
                buf[k] = x[k] - y[k];
                r2 = r2 + buf[k] * buf[k];
            }
            if r2 == T::zero() || r2 <= self.delta * self.delta {
                return T::zero();
            }
            return self.raw(&buf[..x.len()], r2);
        }
        self.eval_diff(x, y)
    }
}

/// `sum over atoms y with |x - y| > eps of K(x - y) w(y)`.
pub fn truncated_transform<T: Scalar>(
    spec: &KernelSpec<T>,
    mu: &DiscreteMeasure<T>,
    eps: T,
    x: &Point<T>,
) -> T {
    let eps2 = eps * eps;
    mu.points()
        .iter()
        .zip(mu.weights())
        .fold(T::zero(), |acc, (y, w)| {
            if x.dist2(y) > eps2 {
                acc + spec.eval_diff_fast(x.coords(), y.coords()) * *w
            } else {
                acc
            }
        })
}

/// Largest `|T_eps mu|` over the evaluation points: the grid surrogate of
/// the sup norm of the potential.
pub fn potential_sup<T: Scalar>(
    spec: &KernelSpec<T>,
    mu: &DiscreteMeasure<T>,
    eval_points: &[Point<T>],
    eps: T,
) -> Result<T> {
    if eval_points.is_empty() {
        return invalid("potential_sup needs at least one evaluation point");
    }
    if !(eps > T::zero()) {
        return invalid("eps must be positive");
    }
    Ok(eval_points
        .par_iter()
        .map(|x| truncated_transform(spec, mu, eps, x).abs())
        .reduce(T::zero, T::max))
}
