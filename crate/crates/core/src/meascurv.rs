//! Functionals of discrete measures: curvature and permutation energies, the
//! L2 symmetrization residual, truncated-transform operator norms, linear
//! growth, and the mass of non-Ahlfors balls.
//!
//! Triple sums are direct `O(N^3)`. They run in parallel over the outer
//! index, each outer index summing its inner terms in a fixed order, and the
//! per-index partials are then added sequentially, so results are bitwise
//! independent of the thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geom::Point;
use crate::kernels::{truncated_transform, KernelSpec};
use crate::measure::DiscreteMeasure;
use crate::rng;
use crate::scalar::Scalar;
use crate::symmetry::{menger_sq, Triple};

/// Default cap on the number of atoms in triple sums.
pub const MAX_ATOMS: usize = 500;

fn check_eps<T: Scalar>(eps: T) -> Result<()> {
    if !(eps > T::zero()) || !eps.is_finite() {
        return invalid("eps must be positive and finite");
    }
    Ok(())
}

fn check_size<T: Scalar>(mu: &DiscreteMeasure<T>) -> Result<()> {
    if mu.len() > MAX_ATOMS {
        return invalid(format!("{} atoms exceed the triple-sum cap of {MAX_ATOMS}", mu.len()));
    }
    Ok(())
}

/// Sums `f(i, j, k) w_i w_j w_k` over unordered triples `i < j < k` with all
/// gaps above `eps`, times 6 (the number of orderings). `f` must be
/// symmetric in its arguments.
fn triple_sum<T, F>(mu: &DiscreteMeasure<T>, eps: T, f: F) -> T
where
    T: Scalar,
    F: Fn(&Point<T>, &Point<T>, &Point<T>) -> T + Sync,
{
    let pts = mu.points();
    let w = mu.weights();
    let n = pts.len();
    let eps2 = eps * eps;
    let partials: Vec<T> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = T::zero();
            for j in i + 1..n {
                if pts[i].dist2(&pts[j]) <= eps2 {
                    continue;
                }
                let wij = w[i] * w[j];
                for k in j + 1..n {
                    if pts[i].dist2(&pts[k]) <= eps2 || pts[j].dist2(&pts[k]) <= eps2 {
                        continue;
                    }
                    acc = acc + f(&pts[i], &pts[j], &pts[k]) * wij * w[k];
                }
            }
            acc
        })
        .collect();
    T::lit(6.0) * partials.into_iter().fold(T::zero(), |a, b| a + b)
}

fn perm_fast<T: Scalar>(spec: &KernelSpec<T>, a: &Point<T>, b: &Point<T>, c: &Point<T>) -> T {
    let k = |x: &Point<T>, y: &Point<T>| spec.eval_diff_fast(x.coords(), y.coords());
    k(a, b) * k(a, c) + k(b, a) * k(b, c) + k(c, a) * k(c, b)
}

/// `c^2_eps(mu)`: the sum of `c(x,y,z)^2 w_x w_y w_z` over ordered triples of
/// distinct atoms whose pairwise gaps all exceed `eps`.
pub fn curvature_energy<T: Scalar>(mu: &DiscreteMeasure<T>, eps: T) -> Result<T> {
    check_eps(eps)?;
    check_size(mu)?;
    Ok(triple_sum(mu, eps, |a, b, c| {
        menger_sq(&Triple {
            z: [a.clone(), b.clone(), c.clone()],
        })
    }))
}

/// Sum over `specs` of the eps-restricted permutation energy. With both
/// planar odd-power coordinates this is `p_1,eps + p_2,eps`; with `d - 1`
/// Riesz coordinates in d-space it is the energy over the chosen subset.
pub fn perm_energy<T: Scalar>(specs: &[KernelSpec<T>], mu: &DiscreteMeasure<T>, eps: T) -> Result<T> {
    check_eps(eps)?;
    check_size(mu)?;
    check_specs(specs, mu)?;
    let untruncated: Vec<KernelSpec<T>> = specs.iter().cloned().map(|s| s.truncated(T::zero())).collect();
    Ok(triple_sum(mu, eps, |a, b, c| {
        untruncated
            .iter()
            .fold(T::zero(), |acc, s| acc + perm_fast(s, a, b, c))
    }))
}

fn check_specs<T: Scalar>(specs: &[KernelSpec<T>], mu: &DiscreteMeasure<T>) -> Result<()> {
    if specs.is_empty() {
        return invalid("at least one kernel is required");
    }
    for s in specs {
        s.validate()?;
        if s.d != mu.dim() {
            return invalid("kernel dimension differs from the measure dimension");
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport<T = f64> {
    /// `sum_j w_j |T_eps mu(x_j)|^2`.
    pub lhs: T,
    pub p_eps: T,
    /// `|lhs - p_eps / 3|`.
    pub residual: T,
    pub growth_constant: T,
    pub mass: T,
    pub eps: T,
}

impl<T: Scalar> EnergyReport<T> {
    /// `residual / (growth_constant * mass)`, the empirical comparison
    /// constant (zero when the residual vanishes).
    pub fn normalized_residual(&self) -> T {
        let denom = self.growth_constant * self.mass;
        if self.residual == T::zero() {
            T::zero()
        } else {
            self.residual / denom
        }
    }
}

/// L2 symmetrization report for one kernel.
///
/// Expanding `|T_eps mu(x)|^2` and integrating against `mu` gives the
/// triple sum over pairwise-separated triples (which is `p_eps / 3`) plus
/// the terms with `|y - z| <= eps`, including the diagonal `y = z`. The
/// residual is the size of those extra terms.
pub fn l2_identity_report_for<T: Scalar>(spec: &KernelSpec<T>, mu: &DiscreteMeasure<T>, eps: T) -> Result<EnergyReport<T>> {
    check_eps(eps)?;
    let spec = spec.clone().truncated(T::zero());
    let terms: Vec<T> = mu
        .points()
        .par_iter()
        .zip(mu.weights().par_iter())
        .map(|(x, w)| {
            let t = truncated_transform(&spec, mu, eps, x);
            *w * t * t
        })
        .collect();
    let lhs = terms.into_iter().fold(T::zero(), |a, b| a + b);
    let p_eps = perm_energy(std::slice::from_ref(&spec), mu, eps)?;
    Ok(EnergyReport {
        lhs,
        residual: (lhs - p_eps / T::lit(3.0)).abs(),
        p_eps,
        growth_constant: growth_constant(mu),
        mass: mu.mass(),
        eps,
    })
}

/// L2 report for the planar odd-power kernel `K_i` of power `n`.
pub fn l2_identity_report<T: Scalar>(i: usize, n: u32, mu: &DiscreteMeasure<T>, eps: T) -> Result<EnergyReport<T>> {
    l2_identity_report_for(&KernelSpec::odd_power(i, n), mu, eps)
}

/// Operator norm on `L2(mu)` of `f -> (T_s f)_s`, where `T_s f(x_j) =
/// sum_k K_s(x_j - x_k) 1{|x_j - x_k| > eps} f(x_k) w_k`, by power iteration
/// on the symmetrized weighted matrices. The start vector is derived from
/// the seed and the atom coordinates, so relabeling atoms does not change it.
pub fn transform_norm<T: Scalar>(
    specs: &[KernelSpec<T>],
    mu: &DiscreteMeasure<T>,
    eps: T,
    iters: usize,
    seed: u64,
) -> Result<T> {
    check_eps(eps)?;
    check_specs(specs, mu)?;
    if iters == 0 {
        return invalid("power iteration needs at least one step");
    }
    let n = mu.len();
    if n < 2 {
        return Ok(T::zero());
    }
    let pts = mu.points();
    let sw: Vec<T> = mu.weights().iter().map(|w| w.sqrt()).collect();
    let eps2 = eps * eps;
    let mats: Vec<Vec<T>> = specs
        .iter()
        .map(|s| {
            let s = s.clone().truncated(T::zero());
            (0..n * n)
                .into_par_iter()
                .map(|idx| {
                    let (j, k) = (idx / n, idx % n);
                    if j == k || pts[j].dist2(&pts[k]) <= eps2 {
                        T::zero()
                    } else {
                        sw[j] * s.eval_diff_fast(pts[j].coords(), pts[k].coords()) * sw[k]
                    }
                })
                .collect()
        })
        .collect();
    let mut v: Vec<T> = pts
        .iter()
        .map(|p| {
            let h = p
                .coords()
                .iter()
                .fold(seed, |acc, c| rng::mix64(acc ^ c.as_f64().to_bits()));
            T::one() + T::lit(0.5 * rng::unit_from_bits(rng::mix64(h)))
        })
        .collect();
    let normalize = |v: &mut Vec<T>| -> T {
        let norm = v.iter().fold(T::zero(), |a, x| a + *x * *x).sqrt();
        if norm > T::zero() {
            v.iter_mut().for_each(|x| *x = *x / norm);
        }
        norm
    };
    let apply = |m: &[T], v: &[T]| -> Vec<T> {
        (0..n)
            .into_par_iter()
            .map(|j| m[j * n..(j + 1) * n].iter().zip(v).fold(T::zero(), |a, (x, y)| a + *x * *y))
            .collect()
    };
    let apply_t = |m: &[T], u: &[T]| -> Vec<T> {
        (0..n)
            .into_par_iter()
            .map(|k| (0..n).fold(T::zero(), |a, j| a + m[j * n + k] * u[j]))
            .collect()
    };
    normalize(&mut v);
    let mut lambda = T::zero();
    for _ in 0..iters {
        let mut next = vec![T::zero(); n];
        lambda = T::zero();
        for m in &mats {
            let u = apply(m, &v);
            lambda = lambda + u.iter().fold(T::zero(), |a, x| a + *x * *x);
            for (acc, x) in next.iter_mut().zip(apply_t(m, &u)) {
                *acc = *acc + x;
            }
        }
        if normalize(&mut next) == T::zero() {
            return Ok(T::zero());
        }
        v = next;
    }
    // Rayleigh quotient at the final iterate.
    let mut last = T::zero();
    for m in &mats {
        let u = apply(m, &v);
        last = last + u.iter().fold(T::zero(), |a, x| a + *x * *x);
    }
    Ok(last.max(lambda).sqrt())
}

/// For each atom, the distinct distances to the other atoms paired with the
/// mass of the closed ball of that radius.
fn ball_profile<T: Scalar>(mu: &DiscreteMeasure<T>, i: usize) -> Vec<(T, T)> {
    let pts = mu.points();
    let w = mu.weights();
    let mut by_dist: Vec<(T, T)> = pts
        .iter()
        .zip(w)
        .map(|(p, wk)| (pts[i].dist(p), *wk))
        .collect();
    by_dist.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    let mut out: Vec<(T, T)> = Vec::new();
    let mut cum = T::zero();
    for (idx, (r, wk)) in by_dist.iter().enumerate() {
        cum = cum + *wk;
        let last_of_tie = by_dist.get(idx + 1).map_or(true, |next| next.0 != *r);
        if *r > T::zero() && last_of_tie {
            out.push((*r, cum));
        }
    }
    out
}

/// `max mu(B(x, r)) / r` over atoms `x` and radii `r` among the distances
/// from `x` to the other atoms (closed balls). These are the only radii at
/// which the ratio can peak. Zero for a single atom.
pub fn growth_constant<T: Scalar>(mu: &DiscreteMeasure<T>) -> T {
    (0..mu.len())
        .into_par_iter()
        .map(|i| {
            ball_profile(mu, i)
                .into_iter()
                .fold(T::zero(), |m, (r, mass)| m.max(mass / r))
        })
        .reduce(T::zero, T::max)
}

/// Every probed density `mu(B(x, r)) / r`, in atom-then-radius order.
pub fn theta_values<T: Scalar>(mu: &DiscreteMeasure<T>) -> Vec<T> {
    (0..mu.len())
        .flat_map(|i| ball_profile(mu, i).into_iter().map(|(r, m)| m / r))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallStat<T = f64> {
    pub center: Point<T>,
    pub radius: T,
    pub mass: T,
    pub theta: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport<T = f64> {
    pub covered_mass: T,
    pub balls: Vec<BallStat<T>>,
}

/// Mass of the balls with density above `threshold`, through a greedy
/// disjoint-doubles selection.
///
/// Candidates are `B(x, r)` with `x` an atom, `r >= min_radius` a distance
/// from `x` to another atom, and `mu(B) / r > threshold`. They are visited by
/// decreasing radius (ties by atom index) and kept when `2B` misses every
/// `2B_j` kept so far. Any candidate then lies in some `10 B_j`, and the
/// returned mass is `sum_j mu(10 B_j)`, capped at the total mass.
pub fn non_ahlfors_mass<T: Scalar>(mu: &DiscreteMeasure<T>, threshold: T, min_radius: T) -> Result<CoveringReport<T>> {
    if !(threshold > T::zero()) || !(min_radius > T::zero()) {
        return invalid("density threshold and minimum radius must be positive");
    }
    let mut candidates: Vec<(T, usize, T)> = (0..mu.len())
        .flat_map(|i| {
            ball_profile(mu, i)
                .into_iter()
                .filter(|(r, m)| *r >= min_radius && *m / *r > threshold)
                .map(move |(r, m)| (r, i, m))
        })
        .collect();
    candidates.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("finite")
            .then(a.1.cmp(&b.1))
    });
    let pts = mu.points();
    let mut balls: Vec<BallStat<T>> = Vec::new();
    for (r, i, m) in candidates {
        let two = T::lit(2.0);
        let free = balls
            .iter()
            .all(|b| pts[i].dist(&b.center) > two * r + two * b.radius);
        if free {
            balls.push(BallStat {
                center: pts[i].clone(),
                radius: r,
                mass: m,
                theta: m / r,
            });
        }
    }
    let total = mu.mass();
    let covered = balls
        .iter()
        .fold(T::zero(), |acc, b| acc + ball_mass(mu, &b.center, T::lit(10.0) * b.radius));
    Ok(CoveringReport {
        covered_mass: covered.min(total),
        balls,
    })
}

/// `mu` of the closed ball.
pub fn ball_mass<T: Scalar>(mu: &DiscreteMeasure<T>, center: &Point<T>, radius: T) -> T {
    let r2 = radius * radius;
    mu.points()
        .iter()
        .zip(mu.weights())
        .filter(|(p, _)| p.dist2(center) <= r2)
        .fold(T::zero(), |acc, (_, w)| acc + *w)
}

pub fn ball_stat<T: Scalar>(mu: &DiscreteMeasure<T>, center: Point<T>, radius: T) -> Result<BallStat<T>> {
    if !(radius > T::zero()) {
        return invalid("radius must be positive");
    }
    let mass = ball_mass(mu, &center, radius);
    Ok(BallStat {
        center,
        radius,
        mass,
        theta: mass / radius,
    })
}

/// `((mu(B) / R)^2, c^2_eps(mu|B) / mu(B))`, report only.
pub fn density_bound_check<T: Scalar>(mu: &DiscreteMeasure<T>, ball: &BallStat<T>, eps: T) -> Result<(T, T)> {
    check_eps(eps)?;
    let r2 = ball.radius * ball.radius;
    let inside = mu.restrict(|p| p.dist2(&ball.center) <= r2);
    let Some(local) = inside.filter(|m| m.len() >= 3) else {
        return invalid("the ball must contain at least three atoms with positive total mass");
    };
    let mass = local.mass();
    let lhs = (mass / ball.radius).powi(2);
    let rhs = curvature_energy(&local, eps)? / mass;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::xy(x, y)
    }

    fn corner_triple() -> DiscreteMeasure<f64> {
        DiscreteMeasure::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)], vec![1.0; 3]).unwrap()
    }

    fn segment(n: usize, mass: f64) -> DiscreteMeasure<f64> {
        let pts = (0..n).map(|k| p((k as f64 + 0.5) / n as f64, 0.0)).collect();
        DiscreteMeasure::uniform(pts, mass).unwrap()
    }

    fn random_measure(seed: u64, n: usize) -> DiscreteMeasure<f64> {
        use rand::Rng;
        let mut r = rng::stream(seed);
        let pts = (0..n).map(|_| p(r.gen(), r.gen())).collect();
        let w = (0..n).map(|_| r.gen_range(0.1..1.0)).collect();
        DiscreteMeasure::new(pts, w).unwrap()
    }

    fn both(n: u32) -> Vec<KernelSpec<f64>> {
        vec![KernelSpec::odd_power(1, n), KernelSpec::odd_power(2, n)]
    }

    #[test]
    fn curvature_energy_examples() {
        let line = DiscreteMeasure::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)], vec![1.0; 3]).unwrap();
        assert_eq!(curvature_energy(&line, 0.1).unwrap(), 0.0);
        assert!((curvature_energy(&corner_triple(), 0.1).unwrap() - 12.0).abs() < 1e-12);
        assert_eq!(curvature_energy(&corner_triple(), 2.0).unwrap(), 0.0);
        assert!(curvature_energy(&corner_triple(), 0.0).is_err());
    }

    #[test]
    fn perm_energy_examples() {
        assert!((perm_energy(&both(1), &corner_triple(), 0.1).unwrap() - 6.0).abs() < 1e-12);
        let line = segment(7, 1.0);
        for n in 1..=3 {
            assert!(perm_energy(&both(n), &line, 0.01).unwrap().abs() < 1e-12);
        }
        let atom = DiscreteMeasure::new(vec![p(0.0, 0.0)], vec![1.0]).unwrap();
        assert_eq!(perm_energy(&both(2), &atom, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn l2_report_examples() {
        let atom = DiscreteMeasure::new(vec![p(0.3, 0.0)], vec![1.0]).unwrap();
        let r = l2_identity_report(1, 1, &atom, 0.1).unwrap();
        assert_eq!((r.lhs, r.p_eps, r.residual), (0.0, 0.0, 0.0));

        let mu = segment(100, 1.0);
        let r = l2_identity_report(1, 1, &mu, 0.02).unwrap();
        assert!(r.residual <= 10.0 * r.growth_constant * r.mass);

        let m2 = mu.scale_mass(2.0);
        let r2 = l2_identity_report(1, 1, &m2, 0.02).unwrap();
        assert_eq!(r2.lhs, 8.0 * r.lhs);
        assert_eq!(r2.p_eps, 8.0 * r.p_eps);
    }

    #[test]
    fn l2_residual_is_the_excluded_terms() {
        // With eps below every gap the residual is the diagonal sum
        // sum_x w_x sum_{y != x} K(x - y)^2 w_y^2.
        let mu = random_measure(4, 25);
        let eps = mu.default_eps();
        let spec = KernelSpec::odd_power(2, 2);
        let r = l2_identity_report_for(&spec, &mu, eps).unwrap();
        let mut diag = 0.0;
        for (x, wx) in mu.points().iter().zip(mu.weights()) {
            for (y, wy) in mu.points().iter().zip(mu.weights()) {
                if x != y {
                    let k = spec.eval_diff(x.coords(), y.coords());
                    diag += wx * k * k * wy * wy;
                }
            }
        }
        assert!((r.residual - diag).abs() <= 1e-9 * diag);
    }

    #[test]
    fn operator_norm_examples() {
        let atom = DiscreteMeasure::new(vec![p(0.0, 0.0)], vec![1.0]).unwrap();
        let riesz = [KernelSpec::riesz(1, 2)];
        assert_eq!(transform_norm(&riesz, &atom, 0.5, 10, 0).unwrap(), 0.0);
        let pair = DiscreteMeasure::new(vec![p(0.0, 0.0), p(1.0, 0.0)], vec![1.0, 1.0]).unwrap();
        assert!((transform_norm(&riesz, &pair, 0.5, 10, 0).unwrap() - 1.0).abs() < 1e-12);

        let mu = random_measure(8, 30);
        let a = transform_norm(&both(1), &mu, 0.01, 300, 5).unwrap();
        let rev: Vec<usize> = (0..30).rev().collect();
        let b = transform_norm(&both(1), &mu.permuted(&rev), 0.01, 300, 5).unwrap();
        assert!((a - b).abs() <= 1e-9 * a);
        let c = transform_norm(&both(1), &mu.scale_mass(3.0), 0.01, 300, 5).unwrap();
        assert!((c - 3.0 * a).abs() <= 1e-9 * c);
    }

    #[test]
    fn growth_examples() {
        // Closed balls at radius = spacing hold three atoms: 3 (1/n) / (1/n).
        for n in [10, 50, 200] {
            let g = growth_constant(&segment(n, 1.0));
            assert!((g - 3.0).abs() < 1e-9, "n={n}: {g}");
        }
        let atom = DiscreteMeasure::new(vec![p(0.0, 0.0)], vec![1.0]).unwrap();
        assert_eq!(growth_constant(&atom), 0.0);
        let mu = random_measure(2, 20);
        assert_eq!(growth_constant(&mu.scale_mass(2.0)), 2.0 * growth_constant(&mu));
    }

    #[test]
    fn covering_examples() {
        let mu = segment(100, 1.0);
        let g = growth_constant(&mu);
        let none = non_ahlfors_mass(&mu, 10.0 * g, 1e-3).unwrap();
        assert_eq!(none.covered_mass, 0.0);
        assert!(none.balls.is_empty());

        let mut pts: Vec<Point<f64>> = (0..50).map(|k| p(k as f64 / 50.0, 0.3)).collect();
        let mut w = vec![0.01; 50];
        pts.push(p(0.5, 0.5));
        w.push(1.0);
        pts.push(p(0.5, 0.5 + 1e-4));
        w.push(0.01);
        let heavy = DiscreteMeasure::new(pts, w).unwrap();
        let cov = non_ahlfors_mass(&heavy, 5.0, 1e-5).unwrap();
        assert!(cov.covered_mass >= 1.0);
    }

    #[test]
    fn selected_doubles_are_disjoint_and_mass_monotone() {
        for seed in 0..10 {
            let mu = random_measure(seed, 60);
            let thetas = theta_values(&mu);
            let mut sorted = thetas.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let med = sorted[sorted.len() / 2];
            let mut last = f64::INFINITY;
            for factor in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
                let cov = non_ahlfors_mass(&mu, factor * med, 1e-3).unwrap();
                for (i, a) in cov.balls.iter().enumerate() {
                    for b in &cov.balls[i + 1..] {
                        assert!(a.center.dist(&b.center) > 2.0 * (a.radius + b.radius));
                    }
                }
                assert!(cov.covered_mass <= last + 1e-12, "seed {seed}");
                last = cov.covered_mass;
            }
        }
    }

    #[test]
    fn density_check_examples() {
        let line = DiscreteMeasure::new(vec![p(0.0, 0.0), p(0.5, 0.0), p(1.0, 0.0)], vec![1.0; 3]).unwrap();
        let ball = ball_stat(&line, p(0.5, 0.0), 1.0).unwrap();
        let (lhs, rhs) = density_bound_check(&line, &ball, 0.1).unwrap();
        assert_eq!(rhs, 0.0);
        assert_eq!(lhs, 9.0);

        let circle: Vec<_> = (0..200)
            .map(|k| {
                let t = k as f64 * std::f64::consts::TAU / 200.0;
                p(t.cos(), t.sin())
            })
            .collect();
        let mu = DiscreteMeasure::uniform(circle, 1.0).unwrap();
        let ball = ball_stat(&mu, p(0.0, 0.0), 1.0 + 1e-9).unwrap();
        let (lhs, rhs) = density_bound_check(&mu, &ball, mu.default_eps()).unwrap();
        assert!((lhs - 1.0 / (1.0 + 1e-9f64).powi(2)).abs() < 1e-12);
        // c = 1 on the unit circle, so c^2(mu) ~ (ordered triples) = mass^3.
        assert!((rhs - 1.0).abs() < 0.05, "{rhs}");
        let (l2, r2) = density_bound_check(&mu.scale_mass(3.0), &ball, mu.default_eps()).unwrap();
        assert!((l2 - 9.0 * lhs).abs() < 1e-12 && (r2 - 9.0 * rhs).abs() < 1e-12);
        assert!(density_bound_check(&line, &ball_stat(&line, p(0.0, 0.0), 0.1).unwrap(), 0.1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn energies_symmetric_homogeneous_and_related(seed in 0u64..1000, lam in 0.1f64..10.0) {
            let mu = random_measure(seed, 18);
            let eps = mu.default_eps();
            let c2 = curvature_energy(&mu, eps).unwrap();
            let pe = perm_energy(&both(1), &mu, eps).unwrap();
            prop_assert!((pe - c2 / 2.0).abs() <= 1e-9 * c2);

            let rev: Vec<usize> = (0..mu.len()).rev().collect();
            let c2r = curvature_energy(&mu.permuted(&rev), eps).unwrap();
            prop_assert!((c2r - c2).abs() <= 1e-10 * c2);

            let dil = mu.dilate(lam);
            let c2d = curvature_energy(&dil, eps * lam).unwrap();
            prop_assert!((c2d * lam * lam - c2).abs() <= 1e-10 * c2);
            let pe2 = perm_energy(&both(2), &mu, eps).unwrap();
            let pe2d = perm_energy(&both(2), &dil, eps * lam).unwrap();
            prop_assert!((pe2d * lam * lam - pe2).abs() <= 1e-10 * pe2.abs());

            let heavy = mu.scale_mass(2.0);
            let c2h = curvature_energy(&heavy, eps).unwrap();
            prop_assert!((c2h - 8.0 * c2).abs() <= 1e-12 * c2h);
        }
    }
}
