//! Exact fractions without normalization.
//!
//! [`Fraction`] stores `num / den` with `den > 0` and never divides out
//! common factors. Equality and ordering use cross-multiplication. Short
//! chains of field operations (a kernel product, a closed polynomial form)
//! stay exact and skip the gcd that [`BigRational`] runs after every
//! operation. Long chains grow without bound; convert with
//! [`Fraction::to_rational`] when that matters.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub struct Fraction {
    num: BigInt,
    den: BigInt,
}

impl Fraction {
    /// Panics when `den` is zero, like [`BigRational::new`].
    pub fn new(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "fraction with zero denominator");
        if den.is_negative() {
            Fraction { num: -num, den: -den }
        } else {
            Fraction { num, den }
        }
    }

    pub fn from_integer(num: BigInt) -> Self {
        Fraction { num, den: BigInt::one() }
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), self.den.clone())
    }

    fn trunc_int(&self) -> BigInt {
        &self.num / &self.den
    }
}

impl From<BigRational> for Fraction {
    fn from(r: BigRational) -> Self {
        let (num, den) = r.into();
        Fraction { num, den }
    }
}

impl From<i64> for Fraction {
    fn from(v: i64) -> Self {
        Fraction::from_integer(v.into())
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl PartialEq for Fraction {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        (&self.num * &other.den).partial_cmp(&(&other.num * &self.den))
    }
}

impl Add for Fraction {
    type Output = Fraction;
    fn add(self, rhs: Fraction) -> Fraction {
        if self.den == rhs.den {
            return Fraction { num: self.num + rhs.num, den: self.den };
        }
        Fraction {
            num: self.num * &rhs.den + rhs.num * &self.den,
            den: self.den * rhs.den,
        }
    }
}

impl Sub for Fraction {
    type Output = Fraction;
    fn sub(self, rhs: Fraction) -> Fraction {
        self + (-rhs)
    }
}

impl Mul for Fraction {
    type Output = Fraction;
    fn mul(self, rhs: Fraction) -> Fraction {
        Fraction { num: self.num * rhs.num, den: self.den * rhs.den }
    }
}

impl Div for Fraction {
    type Output = Fraction;
    fn div(self, rhs: Fraction) -> Fraction {
        Fraction::new(self.num * rhs.den, self.den * rhs.num)
    }
}

impl Rem for Fraction {
    type Output = Fraction;
    /// `self - rhs * trunc(self / rhs)`, matching [`BigRational`].
    fn rem(self, rhs: Fraction) -> Fraction {
        let q = Fraction::from_integer((self.clone() / rhs.clone()).trunc_int());
        self - rhs * q
    }
}

impl Neg for Fraction {
    type Output = Fraction;
    fn neg(self) -> Fraction {
        Fraction { num: -self.num, den: self.den }
    }
}

impl Zero for Fraction {
    fn zero() -> Self {
        Fraction::from_integer(BigInt::zero())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for Fraction {
    fn one() -> Self {
        Fraction::from_integer(BigInt::one())
    }
}

impl Num for Fraction {
    type FromStrRadixErr = <BigRational as Num>::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        BigRational::from_str_radix(s, radix).map(Fraction::from)
    }
}

impl FromPrimitive for Fraction {
    fn from_i64(n: i64) -> Option<Self> {
        Some(n.into())
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(Fraction::from_integer(n.into()))
    }
    fn from_u128(n: u128) -> Option<Self> {
        Some(Fraction::from_integer(n.into()))
    }
    fn from_f64(n: f64) -> Option<Self> {
        BigRational::from_float(n).map(Fraction::from)
    }
}

impl ToPrimitive for Fraction {
    fn to_i64(&self) -> Option<i64> {
        self.trunc_int().to_i64()
    }
    fn to_u64(&self) -> Option<u64> {
        self.trunc_int().to_u64()
    }
    /// Keeps the top 80 bits of each part, so the result is correctly
    /// rounded up to a couple of ulps.
    fn to_f64(&self) -> Option<f64> {
        if self.num.is_zero() {
            return Some(0.0);
        }
        const KEEP: u64 = 80;
        let top = |v: &BigInt| {
            let shift = v.bits().saturating_sub(KEEP);
            ((v.magnitude() >> shift).to_f64().unwrap_or(f64::INFINITY), shift as i64)
        };
        let (n, en) = top(&self.num);
        let (d, ed) = top(&self.den);
        let mut v = n / d;
        let mut e = en - ed;
        while e != 0 {
            let step = e.clamp(-1000, 1000);
            v *= 2f64.powi(step as i32);
            e -= step;
        }
        Some(if self.num.sign() == Sign::Minus { -v } else { v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn frac(n: i64, d: i64) -> Fraction {
        Fraction::new(n.into(), d.into())
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn equality_ignores_common_factors() {
        assert_eq!(frac(2, 4), frac(-1, -2));
        assert!(frac(1, 3) < frac(1, 2));
        assert!(frac(-1, 2) < frac(1, -3));
    }

    #[test]
    fn large_parts_convert_to_float() {
        let big = BigInt::from(3) << 2000usize;
        let f = Fraction::new(big.clone(), big * 2);
        assert_eq!(f.to_f64(), Some(0.5));
        let tiny = Fraction::new(1.into(), BigInt::from(1) << 1100usize);
        assert_eq!(tiny.to_f64(), Some(0.0));
    }

    #[test]
    #[should_panic]
    fn zero_denominator_panics() {
        let _ = frac(1, 1) / frac(0, 5);
    }

    proptest! {
        #[test]
        fn agrees_with_big_rational(
            a in -1000i64..1000, b in 1i64..1000,
            c in -1000i64..1000, d in 1i64..1000,
        ) {
            let (x, y) = (frac(a, b), frac(c, d));
            let (p, q) = (rat(a, b), rat(c, d));
            prop_assert_eq!((x.clone() + y.clone()).to_rational(), p.clone() + q.clone());
            prop_assert_eq!((x.clone() - y.clone()).to_rational(), p.clone() - q.clone());
            prop_assert_eq!((x.clone() * y.clone()).to_rational(), p.clone() * q.clone());
            prop_assert_eq!(x.partial_cmp(&y), p.partial_cmp(&q));
            if c != 0 {
                prop_assert_eq!((x.clone() / y.clone()).to_rational(), p.clone() / q.clone());
                prop_assert_eq!((x.clone() % y.clone()).to_rational(), p.clone() % q.clone());
            }
            let f = x.to_f64().unwrap();
            let g = p.to_f64().unwrap();
            prop_assert!((f - g).abs() <= 4.0 * f64::EPSILON * g.abs());
        }
    }
}
