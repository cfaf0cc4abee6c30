//! Triple-wise quantities: Menger curvature and kernel permutation sums.
//!
//! For the planar odd-power kernels `K_i = x_i^(2n-1)/|x|^(2n)` the
//! three-term symmetrization
//!
//! ```text
//! p_i(z1, z2, z3) = K_i(z1-z2) K_i(z1-z3) + K_i(z2-z1) K_i(z2-z3) + K_i(z3-z1) K_i(z3-z2)
//! ```
//!
//! is nonnegative, vanishes exactly on collinear triples, and is comparable
//! to `c^2`. For `n = 1` it is an exact multiple: `p_1 = p_2 = c^2 / 4`, so
//! `p_1 + p_2 = c^2 / 2` (with this three-term normalization).

use num_traits::{FromPrimitive, ToPrimitive};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geom::{Point, Square};
use crate::kernels::KernelSpec;
use crate::rng;
use crate::scalar::{powu, Field, Scalar};
use crate::Rational;

/// Relative size below which the smallest side counts as coincident.
pub const DEGENERACY_RATIO: f64 = 1e-12;

/// Exact value of `p_i / c^2` for `n = 1` (three-term sum).
pub const KAPPA_ONE: f64 = 0.25;

/// Uniform-scan triples whose area cancels by more than this factor are
/// re-evaluated exactly.
const ILL_CONDITIONED: f64 = 100.0;

/// Three pairwise distinct points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triple<T> {
    pub z: [Point<T>; 3],
}

impl<T: Field> Triple<T> {
    /// Accepts any pairwise distinct points; for exact types.
    pub fn exact(z1: Point<T>, z2: Point<T>, z3: Point<T>) -> Result<Self> {
        let t = Triple { z: [z1, z2, z3] };
        t.check_dims()?;
        let [a, b, c] = t.sides2();
        if a == T::zero() || b == T::zero() || c == T::zero() {
            return Err(Error::Domain("triple has coincident points".into()));
        }
        Ok(t)
    }

    fn check_dims(&self) -> Result<()> {
        let d = self.z[0].dim();
        if d < 2 || self.z.iter().any(|p| p.dim() != d) {
            return invalid("triple points must share a dimension >= 2");
        }
        Ok(())
    }

    /// Squared side lengths `|z1-z2|^2, |z1-z3|^2, |z2-z3|^2`.
    pub fn sides2(&self) -> [T; 3] {
        [
            self.z[0].dist2(&self.z[1]),
            self.z[0].dist2(&self.z[2]),
            self.z[1].dist2(&self.z[2]),
        ]
    }

    /// `(2 * area)^2`: the squared shoelace determinant in the plane, the
    /// Lagrange identity `|u|^2 |v|^2 - (u.v)^2` in higher dimension.
    pub fn twice_area_sq(&self) -> T {
        let u = self.z[1].sub(&self.z[0]);
        let v = self.z[2].sub(&self.z[0]);
        if u.dim() == 2 {
            let (u, v) = (u.coords(), v.coords());
            let cross = u[0].clone() * v[1].clone() - u[1].clone() * v[0].clone();
            return cross.clone() * cross;
        }
        let dot = u
            .coords()
            .iter()
            .zip(v.coords())
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
        let g = u.norm2() * v.norm2() - dot.clone() * dot;
        if g < T::zero() {
            T::zero()
        } else {
            g
        }
    }

    pub fn translate(&self, by: &Point<T>) -> Self {
        let shift = |p: &Point<T>| {
            Point::from_vec(
                p.coords()
                    .iter()
                    .zip(by.coords())
                    .map(|(a, b)| a.clone() + b.clone())
                    .collect(),
            )
        };
        Triple {
            z: [shift(&self.z[0]), shift(&self.z[1]), shift(&self.z[2])],
        }
    }
}

impl<T: Scalar> Triple<T> {
    /// Rejects triples whose smallest side is below `1e-12` times the largest.
    pub fn new(z1: Point<T>, z2: Point<T>, z3: Point<T>) -> Result<Self> {
        let t = Triple { z: [z1, z2, z3] };
        t.check_dims()?;
        if t.z.iter().any(|p| p.coords().iter().any(|c| !c.is_finite())) {
            return invalid("triple coordinates must be finite");
        }
        if t.is_degenerate() {
            return Err(Error::Domain("degenerate triple".into()));
        }
        Ok(t)
    }

    pub fn is_degenerate(&self) -> bool {
        let s = self.sides2();
        let min = s[0].min(s[1]).min(s[2]);
        let max = s[0].max(s[1]).max(s[2]);
        let r = T::lit(DEGENERACY_RATIO);
        !(min > T::zero()) || min < r * r * max
    }

    /// Smallest pairwise distance.
    pub fn scale(&self) -> T {
        let s = self.sides2();
        s[0].min(s[1]).min(s[2]).sqrt()
    }

    pub fn flat(&self) -> Vec<T> {
        self.z.iter().flat_map(|p| p.coords().to_vec()).collect()
    }
}

/// Squared Menger curvature `16 A^2 / (a^2 b^2 c^2)`. Exact for rationals.
pub fn menger_sq<T: Field>(t: &Triple<T>) -> T {
    let [a, b, c] = t.sides2();
    let four = T::one() + T::one() + T::one() + T::one();
    four * t.twice_area_sq() / (a * b * c)
}

/// Menger curvature `c = 4 A / (a b c)`, zero on collinear triples.
pub fn menger<T: Scalar>(t: &Triple<T>) -> T {
    let [a, b, c] = t.sides2();
    T::lit(2.0) * t.twice_area_sq().sqrt() / (a * b * c).sqrt()
}

/// The three-term permutation sum of `spec` over the triple.
pub fn perm<T: Field>(spec: &KernelSpec<T>, t: &Triple<T>) -> Result<T> {
    if spec.delta != T::zero() {
        return invalid("permutation sums use the untruncated kernel");
    }
    spec.validate()?;
    if t.z[0].dim() != spec.d {
        return invalid("triple dimension differs from kernel dimension");
    }
    Ok(perm_unchecked(spec, &t.z[0], &t.z[1], &t.z[2]))
}

/// Permutation sum without validation; the caller guarantees distinct
/// points and an untruncated, valid kernel.
pub fn perm_unchecked<T: Field>(spec: &KernelSpec<T>, a: &Point<T>, b: &Point<T>, c: &Point<T>) -> T {
    // Every family is odd, so K(y - x) = -K(x - y).
    let k = |x: &Point<T>, y: &Point<T>| spec.eval_diff(x.coords(), y.coords());
    let (ab, ac, bc) = (k(a, b), k(a, c), k(b, c));
    ab.clone() * ac.clone() - ab * bc.clone() + ac * bc
}

/// `p_1(0, z, w)` for the odd-power kernel of power `n`, evaluated through
/// the closed polynomial form
///
/// ```text
/// A(z, w) = sum_{k=1}^{n} C(n, k) x^(2(n-k)) a^(2(n-k)) (x-a)^(2(n-k)) F_k(z, w)
/// F_k     = x^(2k-1) a^(2k-1) (y-b)^(2k) + x^(2k-1) (x-a)^(2k-1) b^(2k)
///           - a^(2k-1) (x-a)^(2k-1) y^(2k)
/// ```
///
/// divided by `|z|^(2n) |w|^(2n) |z-w|^(2n)`, with `z = (x, y)`, `w = (a, b)`.
pub fn perm_via_identity<T: Field + FromPrimitive>(n: u32, z: &Point<T>, w: &Point<T>) -> Result<T> {
    if n == 0 {
        return invalid("power must be positive");
    }
    if z.dim() != 2 || w.dim() != 2 {
        return invalid("the identity is planar");
    }
    let (x, y) = (z.coords()[0].clone(), z.coords()[1].clone());
    let (a, b) = (w.coords()[0].clone(), w.coords()[1].clone());
    let (zz, ww, zw) = (z.norm2(), w.norm2(), z.dist2(w));
    if zz == T::zero() || ww == T::zero() || zw == T::zero() {
        return Err(Error::Domain("0, z, w must be pairwise distinct".into()));
    }
    let xa = x.clone() - a.clone();
    let yb = y.clone() - b.clone();
    let sq = |t: &T| t.clone() * t.clone();
    let (x2, a2, xa2) = (sq(&x), sq(&a), sq(&xa));
    let (yb2, b2, y2) = (sq(&yb), sq(&b), sq(&y));
    let q = x2.clone() * a2.clone() * xa2.clone();
    let mut rest = vec![T::one()];
    for _ in 1..n {
        let last = rest.last().cloned().unwrap_or_else(T::one);
        rest.push(last * q.clone());
    }
    let (mut xo, mut ao, mut xao) = (x, a, xa);
    let (mut ybe, mut be, mut ye) = (yb2.clone(), b2.clone(), y2.clone());
    let mut acc = T::zero();
    let mut binom: u128 = 1;
    for k in 1..=n {
        binom = binom * u128::from(n - k + 1) / u128::from(k);
        if k > 1 {
            xo = xo * x2.clone();
            ao = ao * a2.clone();
            xao = xao * xa2.clone();
            ybe = ybe * yb2.clone();
            be = be * b2.clone();
            ye = ye * y2.clone();
        }
        let f_k = xo.clone() * (ao.clone() * ybe.clone() + xao.clone() * be.clone())
            - ao.clone() * xao.clone() * ye.clone();
        let c = T::from_u128(binom)
            .ok_or_else(|| Error::Internal("binomial not representable".into()))?;
        acc = acc + c * rest[(n - k) as usize].clone() * f_k;
    }
    Ok(acc / powu(&(zz * ww * zw), n))
}

/// How scan triples are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum ScanMode {
    /// Three independent uniform points in the box.
    Uniform,
    /// Three points on a random line through the box.
    Collinear,
    /// A collinear triple whose middle point is pushed off the line by
    /// `offset` times the smallest side.
    NearCollinear { offset: f64 },
}

/// Extremes of `(p_1 + p_2) / c^2` and sign information over a scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioScanReport {
    pub n: u32,
    pub mode: ScanMode,
    /// Triples drawn (including skipped degenerate ones).
    pub samples: usize,
    pub skipped: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub argmin: Vec<f64>,
    pub argmax: Vec<f64>,
    /// Extremes of `p_1 / c^2`.
    pub min_p1_ratio: f64,
    pub max_p1_ratio: f64,
    /// Triples with `p_1 + p_2 < -1e-12 / scale^2`.
    pub negative_count: usize,
    /// Smallest `min(p_1, p_2) * scale^2`.
    pub min_scaled_p: f64,
    /// Largest `max(|p_1|, |p_2|) * scale^2`; the vanishing check on lines.
    pub max_scaled_abs_p: f64,
}

impl RatioScanReport {
    pub const CSV_HEADER: &'static str = "n,mode,samples,min_ratio,max_ratio,min_p1_ratio,max_p1_ratio,negative_count,min_scaled_p,max_scaled_abs_p,argmin_x1,argmin_y1,argmin_x2,argmin_y2,argmin_x3,argmin_y3,argmax_x1,argmax_y1,argmax_x2,argmax_y2,argmax_x3,argmax_y3";

    pub fn csv_row(&self) -> String {
        let mode = match self.mode {
            ScanMode::Uniform => "uniform".to_string(),
            ScanMode::Collinear => "collinear".to_string(),
            ScanMode::NearCollinear { offset } => format!("near-collinear:{offset:e}"),
        };
        let mut fields = vec![
            self.n.to_string(),
            mode,
            self.samples.to_string(),
            format!("{:e}", self.min_ratio),
            format!("{:e}", self.max_ratio),
            format!("{:e}", self.min_p1_ratio),
            format!("{:e}", self.max_p1_ratio),
            self.negative_count.to_string(),
            format!("{:e}", self.min_scaled_p),
            format!("{:e}", self.max_scaled_abs_p),
        ];
        let pad = |v: &[f64]| {
            let mut out: Vec<String> = v.iter().map(|c| format!("{c:e}")).collect();
            out.resize(6, String::new());
            out
        };
        fields.extend(pad(&self.argmin));
        fields.extend(pad(&self.argmax));
        fields.join(",")
    }
}

#[derive(Clone)]
struct Partial {
    min: (f64, usize),
    max: (f64, usize),
    p1_min: f64,
    p1_max: f64,
    negative: usize,
    skipped: usize,
    min_scaled: f64,
    max_scaled_abs: f64,
}

impl Partial {
    fn empty() -> Self {
        Partial {
            min: (f64::INFINITY, usize::MAX),
            max: (f64::NEG_INFINITY, usize::MAX),
            p1_min: f64::INFINITY,
            p1_max: f64::NEG_INFINITY,
            negative: 0,
            skipped: 0,
            min_scaled: f64::INFINITY,
            max_scaled_abs: 0.0,
        }
    }

    // Ties resolve to the lower sample index, so merging is associative and
    // commutative and the report does not depend on the thread count.
    fn merge(a: Self, b: Self) -> Self {
        let lt = |x: (f64, usize), y: (f64, usize)| x.0 < y.0 || (x.0 == y.0 && x.1 < y.1);
        let gt = |x: (f64, usize), y: (f64, usize)| x.0 > y.0 || (x.0 == y.0 && x.1 < y.1);
        Partial {
            min: if lt(b.min, a.min) { b.min } else { a.min },
            max: if gt(b.max, a.max) { b.max } else { a.max },
            p1_min: a.p1_min.min(b.p1_min),
            p1_max: a.p1_max.max(b.p1_max),
            negative: a.negative + b.negative,
            skipped: a.skipped + b.skipped,
            min_scaled: a.min_scaled.min(b.min_scaled),
            max_scaled_abs: a.max_scaled_abs.max(b.max_scaled_abs),
        }
    }
}

fn draw_triples<T: Scalar>(samples: usize, seed: u64, bx: &Square<T>, mode: ScanMode) -> Vec<[T; 6]> {
    let mut stream = rng::stream(seed);
    let (x0, y0, s) = (bx.corner[0], bx.corner[1], bx.side);
    let mut u = move || T::lit(stream.gen::<f64>());
    (0..samples)
        .map(|_| match mode {
            ScanMode::Uniform => [
                x0 + u() * s,
                y0 + u() * s,
                x0 + u() * s,
                y0 + u() * s,
                x0 + u() * s,
                y0 + u() * s,
            ],
            ScanMode::Collinear | ScanMode::NearCollinear { .. } => {
                let (px, py) = (x0 + u() * s, y0 + u() * s);
                let (qx, qy) = (x0 + u() * s, y0 + u() * s);
                let mut ts = [u(), u(), u()];
                ts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
                let at = |t: T| (px + t * (qx - px), py + t * (qy - py));
                let (a, b, c) = (at(ts[0]), at(ts[1]), at(ts[2]));
                let (mut bx_, mut by_) = b;
                if let ScanMode::NearCollinear { offset } = mode {
                    let (dx, dy) = (qx - px, qy - py);
                    let len = (dx * dx + dy * dy).sqrt();
                    let gap = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2))
                        .min((c.0 - b.0).powi(2) + (c.1 - b.1).powi(2))
                        .sqrt();
                    if len > T::zero() {
                        let o = T::lit(offset) * gap / len;
                        bx_ = bx_ - dy * o;
                        by_ = by_ + dx * o;
                    }
                }
                [a.0, a.1, bx_, by_, c.0, c.1]
            }
        })
        .collect()
}

/// `(p_1, p_2, c^2)` computed in exact rational arithmetic from float
/// coordinates, rounded once at the end. Ratios are taken exactly, so the
/// returned `p_i` are rescaled to `c^2 = 1` when `c^2 > 0`.
fn exact_p_and_c2<T: Scalar>(n: u32, c: &[T; 6]) -> (f64, f64, f64) {
    let r = |v: T| Rational::from_float(v.as_f64()).expect("finite coordinate");
    let pt = |i: usize| Point::from_vec(vec![r(c[2 * i]), r(c[2 * i + 1])]);
    let (a, b, d) = (pt(0), pt(1), pt(2));
    let p1 = perm_unchecked(&KernelSpec::odd_power(1, n), &a, &b, &d);
    let p2 = perm_unchecked(&KernelSpec::odd_power(2, n), &a, &b, &d);
    let t = Triple { z: [a, b, d] };
    let c2 = menger_sq(&t);
    let f = |x: &Rational| x.to_f64().unwrap_or(f64::NAN);
    if c2 == Rational::from_integer(0.into()) {
        return (f(&p1), f(&p2), 0.0);
    }
    (f(&(p1 / c2.clone())), f(&(p2 / c2)), 1.0)
}

/// Scans random triples in `bx` for the odd-power kernels of power `n`.
pub fn scan<T: Scalar>(n: u32, samples: usize, seed: u64, bx: &Square<T>, mode: ScanMode) -> Result<RatioScanReport> {
    if samples == 0 {
        return invalid("scan needs at least one sample");
    }
    if n == 0 || bx.corner.len() != 2 || !(bx.side > T::zero()) {
        return invalid("scan needs n >= 1 and a planar box of positive side");
    }
    let k1 = KernelSpec::<T>::odd_power(1, n);
    let k2 = KernelSpec::<T>::odd_power(2, n);
    let triples = draw_triples(samples, seed, bx, mode);
    let tiny = 1e-12;
    let part = triples
        .par_iter()
        .enumerate()
        .map(|(idx, c)| {
            let mut part = Partial::empty();
            let t = Triple {
                z: [
                    Point::xy(c[0], c[1]),
                    Point::xy(c[2], c[3]),
                    Point::xy(c[4], c[5]),
                ],
            };
            if t.is_degenerate() {
                part.skipped = 1;
                return part;
            }
            // Near the zero set both sides cancel catastrophically in floating
            // point; such triples are evaluated exactly instead.
            let (ux, uy, vx, vy) = (c[2] - c[0], c[3] - c[1], c[4] - c[0], c[5] - c[1]);
            let cross = (ux * vy - uy * vx).abs();
            let ill = cross * T::lit(ILL_CONDITIONED) < (ux * vy).abs() + (uy * vx).abs();
            let near = matches!(mode, ScanMode::NearCollinear { .. });
            let (p1, p2, c2) = if near || (mode == ScanMode::Uniform && ill) {
                exact_p_and_c2(n, c)
            } else {
                (
                    perm_unchecked(&k1, &t.z[0], &t.z[1], &t.z[2]).as_f64(),
                    perm_unchecked(&k2, &t.z[0], &t.z[1], &t.z[2]).as_f64(),
                    menger_sq(&t).as_f64(),
                )
            };
            let scale2 = t.scale().as_f64().powi(2);
            part.min_scaled = p1.min(p2) * scale2;
            part.max_scaled_abs = p1.abs().max(p2.abs()) * scale2;
            if (p1 + p2) * scale2 < -tiny {
                part.negative = 1;
            }
            if mode != ScanMode::Collinear && c2 > 0.0 {
                let r = (p1 + p2) / c2;
                part.min = (r, idx);
                part.max = (r, idx);
                part.p1_min = p1 / c2;
                part.p1_max = p1 / c2;
            }
            part
        })
        .reduce(Partial::empty, Partial::merge);
    let coords = |i: usize| -> Vec<f64> {
        triples
            .get(i)
            .map(|c| c.iter().map(|v| v.as_f64()).collect())
            .unwrap_or_default()
    };
    Ok(RatioScanReport {
        n,
        mode,
        samples,
        skipped: part.skipped,
        min_ratio: part.min.0,
        max_ratio: part.max.0,
        argmin: coords(part.min.1),
        argmax: coords(part.max.1),
        min_p1_ratio: part.p1_min,
        max_p1_ratio: part.p1_max,
        negative_count: part.negative,
        min_scaled_p: part.min_scaled,
        max_scaled_abs_p: part.max_scaled_abs,
    })
}

/// Uniform scan: the empirical comparability constants of `p_1 + p_2`
/// against `c^2`.
pub fn ratio_scan<T: Scalar>(n: u32, samples: usize, seed: u64, bx: &Square<T>) -> Result<RatioScanReport> {
    scan(n, samples, seed, bx, ScanMode::Uniform)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn ep(x: i64, y: i64) -> Point<Rational> {
        Point::from_vec(vec![q(x), q(y)])
    }

    fn fp(x: f64, y: f64) -> Point<f64> {
        Point::xy(x, y)
    }

    fn frac(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn menger_values() {
        let t = Triple::new(fp(0.0, 0.0), fp(1.0, 0.0), fp(2.0, 0.0)).unwrap();
        assert_eq!(menger(&t), 0.0);
        let t = Triple::new(fp(0.0, 0.0), fp(1.0, 0.0), fp(0.0, 1.0)).unwrap();
        assert!((menger(&t) - 2f64.sqrt()).abs() < 1e-15);
        let t = Triple::new(fp(0.0, 0.0), fp(1.0, 0.0), fp(2.0, 1.0)).unwrap();
        assert!((menger(&t) - (0.4f64).sqrt()).abs() < 1e-15);

        let e = Triple::exact(ep(0, 0), ep(1, 0), ep(2, 1)).unwrap();
        assert_eq!(menger_sq(&e), frac(2, 5));
        let e = Triple::exact(ep(0, 0), ep(1, 0), ep(0, 1)).unwrap();
        assert_eq!(menger_sq(&e), q(2));
    }

    #[test]
    fn degenerate_triples_rejected() {
        assert!(Triple::new(fp(0.0, 0.0), fp(0.0, 0.0), fp(1.0, 0.0)).is_err());
        assert!(Triple::new(fp(0.0, 0.0), fp(1e-13, 0.0), fp(1.0, 0.0)).is_err());
        assert!(Triple::exact(ep(0, 0), ep(0, 0), ep(1, 1)).is_err());
    }

    #[test]
    fn permutation_sums_exact() {
        let t = Triple::exact(ep(0, 0), ep(1, 0), ep(2, 1)).unwrap();
        assert_eq!(perm(&KernelSpec::odd_power(1, 1), &t).unwrap(), frac(1, 10));
        assert_eq!(perm(&KernelSpec::odd_power(2, 1), &t).unwrap(), frac(1, 10));
        let h = Triple::exact(ep(-1, 0), ep(1, 0), ep(0, 1)).unwrap();
        assert_eq!(perm(&KernelSpec::huovinen(), &h).unwrap(), frac(-1, 16));
        assert_eq!(menger_sq(&h), q(1));
        let line = Triple::exact(ep(0, 0), ep(1, 1), ep(3, 3)).unwrap();
        for n in 1..=4 {
            assert_eq!(perm(&KernelSpec::odd_power(1, n), &line).unwrap(), q(0));
            assert_eq!(perm(&KernelSpec::odd_power(2, n), &line).unwrap(), q(0));
        }
        assert!(perm(&KernelSpec::odd_power(1, 1).truncated(q(1)), &t).is_err());
    }

    #[test]
    fn kappa_one_is_a_quarter_exactly() {
        let pts = [(0, 0), (1, 0), (2, 1), (-3, 5), (7, -2), (4, 4), (0, 9)];
        for a in 0..pts.len() {
            for b in a + 1..pts.len() {
                for c in b + 1..pts.len() {
                    let t = Triple::exact(
                        ep(pts[a].0, pts[a].1),
                        ep(pts[b].0, pts[b].1),
                        ep(pts[c].0, pts[c].1),
                    )
                    .unwrap();
                    let c2 = menger_sq(&t);
                    for i in 1..=2 {
                        let p = perm(&KernelSpec::odd_power(i, 1), &t).unwrap();
                        assert_eq!(p, c2.clone() * frac(1, 4));
                    }
                }
            }
        }
    }

    #[test]
    fn identity_examples() {
        assert_eq!(perm_via_identity(1, &ep(1, 0), &ep(2, 1)).unwrap(), frac(1, 10));
        assert_eq!(perm_via_identity(1, &ep(1, 0), &ep(0, 1)).unwrap(), frac(1, 2));
        assert!(perm_via_identity(1, &ep(0, 0), &ep(0, 1)).is_err());
        for n in 1..=5 {
            for (z, w) in [((1, 2), (3, -1)), ((-2, 5), (4, 4)), ((0, 3), (5, 0))] {
                let z = ep(z.0, z.1);
                let w = ep(w.0, w.1);
                let t = Triple::exact(ep(0, 0), z.clone(), w.clone()).unwrap();
                assert_eq!(
                    perm_via_identity(n, &z, &w).unwrap(),
                    perm(&KernelSpec::odd_power(1, n), &t).unwrap()
                );
            }
        }
    }

    #[test]
    fn scan_n1_is_constant() {
        let bx = Square { corner: vec![-1.0, -1.0], side: 2.0 };
        let r = ratio_scan(1, 2000, 5, &bx).unwrap();
        assert!((r.min_ratio - 0.5).abs() < 1e-9 && (r.max_ratio - 0.5).abs() < 1e-9);
        assert!((r.min_p1_ratio - KAPPA_ONE).abs() < 1e-9);
        assert!((r.max_p1_ratio - KAPPA_ONE).abs() < 1e-9);
        assert_eq!(r.negative_count, 0);
        assert_eq!(r.argmin.len(), 6);
        assert_eq!(r.csv_row().split(',').count(), RatioScanReport::CSV_HEADER.split(',').count());
    }

    #[test]
    fn scan_is_thread_count_independent() {
        let bx = Square { corner: vec![0.0, 0.0], side: 1.0 };
        let a = ratio_scan(3, 3000, 9, &bx).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| ratio_scan(3, 3000, 9, &bx).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn collinear_and_near_collinear() {
        let bx = Square { corner: vec![0.0, 0.0], side: 1.0 };
        for n in 1..=4 {
            let c = scan(n, 500, 1, &bx, ScanMode::Collinear).unwrap();
            assert!(c.max_scaled_abs_p <= 1e-12, "n={n}: {}", c.max_scaled_abs_p);
        }
        let near = scan(1, 500, 2, &bx, ScanMode::NearCollinear { offset: 1e-6 }).unwrap();
        assert!((near.min_ratio - 0.5).abs() < 1e-6 && (near.max_ratio - 0.5).abs() < 1e-6);
    }

    #[test]
    fn zero_samples_rejected() {
        let bx = Square { corner: vec![0.0, 0.0], side: 1.0 };
        assert!(ratio_scan::<f64>(1, 0, 0, &bx).is_err());
    }
}
