//! Exact verification of the Fourier-symbol combinatorics.
//!
//! The symbol of `x_1^(2n-1)/|x|^(2n)` is, up to a positive constant,
//! `x_1 / |x|^(2n)` times a homogeneous even polynomial
//!
//! ```text
//! p(x) = sum_{nu=0}^{n-1} a_nu x_1^(2(n-nu-1)) (x_1^2 + x_2^2)^nu
//!      = sum_{m=0}^{n-1} b_{2m} x_1^(2m) x_2^(2(n-1-m))
//! ```
//!
//! and the point is that every `b_{2m}` is positive. This module computes
//! both sides in exact rational arithmetic: the direct binomial expansion and
//! the closed form obtained through the alternating-sum identity. The two
//! routes agree up to one global positive factor, which is reported rather
//! than normalized away.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::Rational;

pub const MAX_M: u32 = 200;
pub const MAX_N: u32 = 64;

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn int(x: BigInt) -> Rational {
    Rational::from_integer(x)
}

/// `p/q` with the sign on `p`, always with an explicit denominator.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let (p, q) = s.split_once('/')?;
    let p: BigInt = p.trim().parse().ok()?;
    let q: BigInt = q.trim().parse().ok()?;
    (!q.is_zero()).then(|| Rational::new(p, q))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinomialCheck {
    pub m: u32,
    pub lhs: Rational,
    pub rhs: Rational,
    pub equal: bool,
}

/// `sum_{k=0}^{m} (-1)^k 4^k k! / ((2k+1)! (m-k)!)` against `1/((2m+1) m!)`.
pub fn binomial_identity_check(m: u32) -> Result<BinomialCheck> {
    if m > MAX_M {
        return invalid(format!("m = {m} exceeds {MAX_M}"));
    }
    let lhs = alternating_sum(m);
    let rhs = Rational::new(
        BigInt::one(),
        BigInt::from(2 * m + 1) * factorial(m),
    );
    let equal = lhs == rhs;
    Ok(BinomialCheck { m, lhs, rhs, equal })
}

fn alternating_sum(m: u32) -> Rational {
    (0..=m).fold(Rational::zero(), |acc, k| {
        let num = BigInt::from(4u32).pow(k) * factorial(k);
        let den = factorial(2 * k + 1) * factorial(m - k);
        let term = Rational::new(num, den);
        if k % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    })
}

/// `a_nu = (2nu)! / (4^nu nu!) * C(2n-1, 2nu) * (-1)^(n-nu-1) * (n-1-nu)!`.
pub fn a_coeffs(n: u32) -> Result<Vec<Rational>> {
    check_n(n)?;
    Ok((0..n)
        .map(|nu| {
            let mag = Rational::new(
                factorial(2 * nu) * binomial(2 * n - 1, 2 * nu) * factorial(n - 1 - nu),
                BigInt::from(4u32).pow(nu) * factorial(nu),
            );
            if (n - nu - 1) % 2 == 0 {
                mag
            } else {
                -mag
            }
        })
        .collect())
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 || n > MAX_N {
        return invalid(format!("n = {n} must lie in 1..={MAX_N}"));
    }
    Ok(())
}

/// Homogeneous even polynomial of degree `2n - 2`; `coeffs[m]` multiplies
/// `x_1^(2m) x_2^(2(n-1-m))`.
#[derive(Clone, Debug, PartialEq)]
pub struct EvenPoly {
    pub n: u32,
    pub coeffs: Vec<Rational>,
}

impl EvenPoly {
    pub fn all_positive(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_positive())
    }

    /// Exact value at `(x1, x2)`.
    pub fn eval(&self, x1: &Rational, x2: &Rational) -> Rational {
        let (s1, s2) = (x1 * x1, x2 * x2);
        let top = self.n - 1;
        self.coeffs
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (m, c)| {
                let m = m as u32;
                acc + c * crate::scalar::powu(&s1, m) * crate::scalar::powu(&s2, top - m)
            })
    }
}

/// Direct expansion of `sum_nu a_nu x_1^(2(n-nu-1)) (x_1^2 + x_2^2)^nu`.
pub fn expand_p(n: u32) -> Result<EvenPoly> {
    let a = a_coeffs(n)?;
    let mut coeffs = vec![Rational::zero(); n as usize];
    for (nu, a_nu) in a.iter().enumerate() {
        let nu = nu as u32;
        for k in 0..=nu {
            // x_1^(2(n-nu+k-1)) x_2^(2(nu-k))
            let m = (n - nu + k - 1) as usize;
            coeffs[m] += a_nu * int(binomial(nu, k));
        }
    }
    Ok(EvenPoly { n, coeffs })
}

/// `b_{2m} = sum_{k=1}^{m+1} a_{n-k} C(n-k, m+1-k)`: the same coefficient
/// read off by collecting powers, kept as an independent route.
pub fn b_collected(n: u32, m: u32) -> Result<Rational> {
    check_n(n)?;
    if m >= n {
        return invalid(format!("index m = {m} out of range for n = {n}"));
    }
    let a = a_coeffs(n)?;
    Ok((1..=m + 1).fold(Rational::zero(), |acc, k| {
        acc + &a[(n - k) as usize] * int(binomial(n - k, m + 1 - k))
    }))
}

/// `b_{2m} = (2n-1)! / (4^n (n-m-1)!) * 1 / ((2m+1) m!)`.
pub fn b_closed_form(n: u32, m: u32) -> Result<Rational> {
    check_n(n)?;
    if m >= n {
        return invalid(format!("index m = {m} out of range for n = {n}"));
    }
    Ok(Rational::new(
        factorial(2 * n - 1),
        BigInt::from(4u32).pow(n) * factorial(n - m - 1) * BigInt::from(2 * m + 1) * factorial(m),
    ))
}

/// JSON: `{"n", "ratios": ["p/q", ...], "constant": bool}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub n: u32,
    pub ratios: Vec<String>,
    pub constant: bool,
}

impl ConsistencyReport {
    pub fn ratio_values(&self) -> Vec<Rational> {
        self.ratios.iter().filter_map(|s| parse_rational(s)).collect()
    }
}

/// Ratios `expand_p(n).coeffs[m] / b_closed_form(n, m)` for every `m`.
pub fn consistency_report(n: u32) -> Result<ConsistencyReport> {
    let p = expand_p(n)?;
    let mut ratios = Vec::with_capacity(n as usize);
    for m in 0..n {
        let b = b_closed_form(n, m)?;
        if b.is_zero() {
            return invalid(format!("closed form vanishes at n = {n}, m = {m}"));
        }
        ratios.push(&p.coeffs[m as usize] / b);
    }
    let constant = ratios.windows(2).all(|w| w[0] == w[1]) && ratios.iter().all(|r| r.is_positive());
    Ok(ConsistencyReport {
        n,
        ratios: ratios.iter().map(fmt_rational).collect(),
        constant,
    })
}

/// Result of the whole exact suite up to the given limits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentitySuite {
    pub max_m: u32,
    pub max_n: u32,
    pub binomial_identity: bool,
    pub coefficients_positive: bool,
    pub a_signs_alternate: bool,
    pub collected_matches_expansion: bool,
    pub ratios_constant: bool,
    /// The shared ratio between expansion and closed form, when constant
    /// across every `n`.
    pub common_ratio: Option<String>,
    pub reports: Vec<ConsistencyReport>,
}

impl IdentitySuite {
    pub fn all_pass(&self) -> bool {
        self.binomial_identity
            && self.coefficients_positive
            && self.a_signs_alternate
            && self.collected_matches_expansion
            && self.ratios_constant
    }
}

pub fn identity_suite(max_m: u32, max_n: u32) -> Result<IdentitySuite> {
    let mut binomial_identity = true;
    for m in 0..=max_m {
        binomial_identity &= binomial_identity_check(m)?.equal;
    }
    let mut coefficients_positive = true;
    let mut a_signs_alternate = true;
    let mut collected_matches_expansion = true;
    let mut ratios_constant = true;
    let mut reports = Vec::new();
    for n in 1..=max_n {
        let p = expand_p(n)?;
        coefficients_positive &= p.all_positive();
        let a = a_coeffs(n)?;
        a_signs_alternate &= a.iter().enumerate().all(|(nu, c)| {
            if (n as usize - nu - 1) % 2 == 0 {
                c.is_positive()
            } else {
                c.is_negative()
            }
        });
        for m in 0..n {
            collected_matches_expansion &= b_collected(n, m)? == p.coeffs[m as usize];
        }
        let report = consistency_report(n)?;
        ratios_constant &= report.constant;
        reports.push(report);
    }
    let firsts: Vec<&String> = reports.iter().filter_map(|r| r.ratios.first()).collect();
    let common_ratio = (ratios_constant && firsts.windows(2).all(|w| w[0] == w[1]))
        .then(|| firsts.first().map(|s| s.to_string()))
        .flatten();
    Ok(IdentitySuite {
        max_m,
        max_n,
        binomial_identity,
        coefficients_positive,
        a_signs_alternate,
        collected_matches_expansion,
        ratios_constant,
        common_ratio,
        reports,
    })
}

/// `gcd(|num|, den) = 1` and `den > 0`; always true for values built here.
pub fn is_canonical(r: &Rational) -> bool {
    r.denom().is_positive() && r.numer().gcd(r.denom()).is_one()
}
