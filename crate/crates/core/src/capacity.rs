//! Grid-constrained capacity estimators.
//!
//! Each estimator maximizes the total mass of a positive measure on the
//! support grid subject to `|sum_j w_j K_delta(y - x_j)| <= bound` for every
//! kernel in a list and every halo point `y`. The program is a linear
//! program with `2 * kernels * halo` rows, far too many for a dense
//! tableau, so it is solved by row generation: a working subset of rows is
//! solved exactly, the solution is checked against every halo row, the most
//! violated rows are added, and the loop repeats until no row is violated.
//! The final optimum is the optimum of the full program; the working-set
//! duals extended by zero are a dual certificate for it.
//!
//! Every kernel satisfies `|K(x)| <= 1 / |x|`, so a halo point at distance
//! `r` from the support carries a potential of at most `mass / r`. Points
//! where that bound is already below `bound` are never evaluated.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geom::{generate, Discretization, Point, SetDescriptor};
use crate::kernels::{Family, KernelSpec};
use crate::lp::{self, LpProblem, LpStatus};
use crate::measure::DiscreteMeasure;
use crate::scalar::Scalar;

/// Relative slack under which a halo row counts as satisfied.
const VIOLATION_REL: f64 = 1e-9;
const MAX_ROUNDS: usize = 500;
/// Refinement factor and margin (in coarse cells) of the leakage grid.
const LEAK_FACTOR: usize = 3;
const LEAK_MARGIN: i64 = 2;

/// A discretized capacity program.
#[derive(Clone, Debug)]
pub struct CapacityProblem<T = f64> {
    pub disc: Discretization<T>,
    /// Constrained potentials; their own truncation radius is replaced by
    /// `delta`.
    pub specs: Vec<KernelSpec<T>>,
    pub delta: T,
    pub bound: T,
}

impl<T: Scalar> CapacityProblem<T> {
    /// Program with the default truncation `h / 2` and bound 1.
    pub fn new(disc: Discretization<T>, specs: Vec<KernelSpec<T>>) -> Self {
        let delta = disc.h / T::lit(2.0);
        CapacityProblem {
            disc,
            specs,
            delta,
            bound: T::one(),
        }
    }

    pub fn with_delta(mut self, delta: T) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_bound(mut self, bound: T) -> Self {
        self.bound = bound;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.specs.is_empty() {
            return invalid("a capacity program needs at least one kernel");
        }
        let d = self.disc.dim();
        for s in &self.specs {
            s.validate()?;
            if s.d != d {
                return invalid(format!("kernel on R^{} for a set in R^{d}", s.d));
            }
        }
        if !(self.delta > T::zero()) || !self.delta.is_finite() {
            return invalid("delta must be positive");
        }
        if !(self.bound >= T::zero()) || !self.bound.is_finite() {
            return invalid("bound must be nonnegative");
        }
        if self.disc.support.is_empty() || self.disc.halo.is_empty() {
            return Err(Error::DegenerateDiscretization("empty support or halo".into()));
        }
        Ok(())
    }

    fn truncated_specs(&self) -> Vec<KernelSpec<T>> {
        self.specs.iter().cloned().map(|s| s.truncated(self.delta)).collect()
    }
}

/// Solved capacity program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Serialize",
    deserialize = "T: Deserialize<'de>"
))]
pub struct CapacityEstimate<T = f64> {
    /// Optimal total mass.
    pub value: T,
    /// Optimal measure, atoms of zero weight dropped. Absent when the value
    /// is zero or when omitted on output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<DiscreteMeasure<T>>,
    pub h: T,
    pub delta: T,
    pub bound: T,
    /// The constrained kernels, with truncation applied.
    pub kernels: Vec<KernelSpec<T>>,
    pub support_size: usize,
    pub halo_size: usize,
    /// Rows of the final working program.
    pub active_rows: usize,
    pub rounds: usize,
    pub lp_iterations: usize,
    pub duality_gap: T,
    /// Largest `|potential| - bound` over all halo rows, floored at zero.
    pub max_violation: T,
    /// Largest `|potential| / bound` on a grid three times finer around the
    /// support.
    pub leakage: T,
}

type RowKey = (usize, usize, bool);

fn nearest_support_dist<T: Scalar>(disc: &Discretization<T>) -> Vec<T> {
    disc.halo
        .par_iter()
        .map(|y| {
            disc.support
                .iter()
                .fold(T::infinity(), |m, x| m.min(y.dist2(x)))
                .sqrt()
        })
        .collect()
}

fn potential<T: Scalar>(spec: &KernelSpec<T>, y: &Point<T>, support: &[Point<T>], w: &[T]) -> T {
    support
        .iter()
        .zip(w)
        .fold(T::zero(), |acc, (x, wj)| {
            if *wj == T::zero() {
                acc
            } else {
                acc + spec.eval_diff_fast(y.coords(), x.coords()) * *wj
            }
        })
}

fn build_lp<T: Scalar>(
    rows: &BTreeSet<RowKey>,
    specs: &[KernelSpec<T>],
    disc: &Discretization<T>,
    bound: T,
) -> Result<LpProblem<T>> {
    let n = disc.support.len();
    let keys: Vec<RowKey> = rows.iter().copied().collect();
    let matrix: Vec<T> = keys
        .par_iter()
        .flat_map_iter(|&(y, s, neg)| {
            let y = &disc.halo[y];
            let spec = &specs[s];
            disc.support.iter().map(move |x| {
                let k = spec.eval_diff_fast(y.coords(), x.coords());
                if neg {
                    -k
                } else {
                    k
                }
            })
        })
        .collect();
    LpProblem::from_dense(vec![T::one(); n], matrix, vec![bound; keys.len()], keys.len())
}

/// Halo rows violated by `w`, most violated first, with the largest excess.
fn violations<T: Scalar>(
    specs: &[KernelSpec<T>],
    disc: &Discretization<T>,
    near: &[T],
    w: &[T],
    bound: T,
) -> (Vec<(T, RowKey)>, T) {
    let mass = w.iter().fold(T::zero(), |a, b| a + *b);
    let slack = T::lit(1.0 + 1e-9);
    let tol = T::lit(VIOLATION_REL) * bound;
    let found: Vec<(Vec<(T, RowKey)>, T)> = disc
        .halo
        .par_iter()
        .enumerate()
        .map(|(yi, y)| {
            let mut out = Vec::new();
            let mut worst = T::zero();
            if mass * slack < bound * near[yi] {
                return (out, worst);
            }
            for (s, spec) in specs.iter().enumerate() {
                let v = potential(spec, y, &disc.support, w);
                let excess = v.abs() - bound;
                worst = worst.max(excess);
                if excess > tol {
                    out.push((excess, (yi, s, v < T::zero())));
                }
            }
            (out, worst)
        })
        .collect();
    let mut worst = T::zero();
    let mut all = Vec::new();
    for (v, m) in found {
        worst = worst.max(m);
        all.extend(v);
    }
    all.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite").then(a.1.cmp(&b.1)));
    (all, worst)
}

fn leakage<T: Scalar>(specs: &[KernelSpec<T>], disc: &Discretization<T>, w: &[T], bound: T) -> T {
    if bound == T::zero() {
        return T::zero();
    }
    disc.refined_points(LEAK_FACTOR, LEAK_MARGIN)
        .par_iter()
        .map(|y| {
            specs
                .iter()
                .fold(T::zero(), |m, s| m.max(potential(s, y, &disc.support, w).abs()))
        })
        .reduce(T::zero, T::max)
        / bound
}

/// Solves the capacity program by row generation.
pub fn estimate<T: Scalar>(p: &CapacityProblem<T>) -> Result<CapacityEstimate<T>> {
    p.validate()?;
    let specs = p.truncated_specs();
    let disc = &p.disc;
    let n = disc.support.len();
    let mut out = CapacityEstimate {
        value: T::zero(),
        witness: None,
        h: disc.h,
        delta: p.delta,
        bound: p.bound,
        kernels: specs.clone(),
        support_size: n,
        halo_size: disc.halo.len(),
        active_rows: 0,
        rounds: 0,
        lp_iterations: 0,
        duality_gap: T::zero(),
        max_violation: T::zero(),
        leakage: T::zero(),
    };
    if p.bound == T::zero() {
        return Ok(out);
    }

    let near = nearest_support_dist(disc);
    let per_round = n.max(32);
    // Seed rows live at halo points within `radius` of the support; the
    // radius grows whenever the working program is unbounded.
    let mut radius = T::zero();
    let mut rows = BTreeSet::new();
    let seed_rows = |radius: T, rows: &mut BTreeSet<RowKey>| {
        for (yi, r) in near.iter().enumerate() {
            if *r <= radius {
                for s in 0..specs.len() {
                    rows.insert((yi, s, false));
                    rows.insert((yi, s, true));
                }
            }
        }
    };
    seed_rows(radius, &mut rows);

    loop {
        out.rounds += 1;
        if out.rounds > MAX_ROUNDS {
            return Err(Error::Internal(format!(
                "row generation did not converge in {MAX_ROUNDS} rounds"
            )));
        }
        let lp = build_lp(&rows, &specs, disc, p.bound)?;
        let res = lp::solve(&lp)?;
        out.lp_iterations += res.iterations;
        match res.status {
            LpStatus::Optimal => {}
            LpStatus::Unbounded => {
                let all = near.iter().fold(T::zero(), |m, r| m.max(*r));
                if radius >= all {
                    return Err(Error::Internal("capacity program is unbounded".into()));
                }
                radius = if radius == T::zero() { disc.h } else { radius * T::lit(2.0) };
                seed_rows(radius, &mut rows);
                continue;
            }
            LpStatus::Infeasible => {
                return Err(Error::Internal("capacity program reported infeasible".into()));
            }
        }
        let (viol, worst) = violations(&specs, disc, &near, &res.weights, p.bound);
        let fresh: Vec<RowKey> = viol
            .iter()
            .map(|(_, k)| *k)
            .filter(|k| !rows.contains(k))
            .take(per_round)
            .collect();
        if fresh.is_empty() {
            out.value = res.objective;
            out.duality_gap = res.duality_gap;
            out.max_violation = worst;
            out.active_rows = rows.len();
            out.leakage = leakage(&specs, disc, &res.weights, p.bound);
            let (pts, ws): (Vec<_>, Vec<_>) = disc
                .support
                .iter()
                .zip(&res.weights)
                .filter(|(_, w)| **w > T::zero())
                .map(|(x, w)| (x.clone(), *w))
                .unzip();
            if !pts.is_empty() {
                out.witness = Some(DiscreteMeasure::new(pts, ws)?);
            }
            return Ok(out);
        }
        rows.extend(fresh);
    }
}

/// Named kernel lists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "estimator", rename_all = "kebab-case")]
pub enum Estimator {
    /// Both planar Cauchy coordinates.
    Plus,
    /// Both planar odd-power coordinates of power `n`.
    NPlus { n: u32 },
    /// `K_1` at power `n` and `K_2` at power `m`.
    NmPlus { n: u32, m: u32 },
    /// The single kernel `K_i` at power `n`.
    Single { n: u32, i: usize },
    /// All `d` Riesz coordinates.
    RieszPlus,
    /// The Riesz coordinates other than `k`, in `R^3`.
    HatKPlus { k: usize },
}

impl Estimator {
    pub fn kernels<T: Scalar>(&self, d: usize) -> Result<Vec<KernelSpec<T>>> {
        let planar = |v: Vec<KernelSpec<T>>| {
            if d == 2 {
                Ok(v)
            } else {
                invalid(format!("{} is defined for planar sets", self.label()))
            }
        };
        match *self {
            Estimator::Plus => planar(vec![KernelSpec::cauchy(1), KernelSpec::cauchy(2)]),
            Estimator::NPlus { n } => planar(vec![KernelSpec::odd_power(1, n), KernelSpec::odd_power(2, n)]),
            Estimator::NmPlus { n, m } => planar(vec![KernelSpec::odd_power(1, n), KernelSpec::odd_power(2, m)]),
            Estimator::Single { n, i } => planar(vec![KernelSpec::odd_power(i, n)]),
            Estimator::RieszPlus => Ok((1..=d).map(|i| KernelSpec::riesz(i, d)).collect()),
            Estimator::HatKPlus { k } => {
                if d != 3 {
                    return invalid("the hat-k estimator is defined for sets in R^3");
                }
                if !(1..=3).contains(&k) {
                    return invalid(format!("k = {k} is not a coordinate of R^3"));
                }
                Ok((1..=3).filter(|&i| i != k).map(|i| KernelSpec::riesz(i, 3)).collect())
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Estimator::Plus => "gamma_plus".into(),
            Estimator::NPlus { n } => format!("gamma_{n}_plus"),
            Estimator::NmPlus { n, m } => format!("gamma_{n}{m}_plus"),
            Estimator::Single { n, i } => format!("gamma_{n}^{i}"),
            Estimator::RieszPlus => "Gamma_plus".into(),
            Estimator::HatKPlus { k } => format!("Gamma_hat{k}_plus"),
        }
    }

    /// Runs the estimator on an existing discretization.
    pub fn on<T: Scalar>(&self, disc: &Discretization<T>) -> Result<CapacityEstimate<T>> {
        estimate(&CapacityProblem::new(disc.clone(), self.kernels(disc.dim())?))
    }

    pub fn run<T: Scalar>(&self, desc: &SetDescriptor<T>, h: T) -> Result<CapacityEstimate<T>> {
        self.on(&generate(desc, h)?)
    }
}

pub fn gamma_plus<T: Scalar>(desc: &SetDescriptor<T>, h: T) -> Result<CapacityEstimate<T>> {
    Estimator::Plus.run(desc, h)
}

pub fn gamma_n_plus<T: Scalar>(desc: &SetDescriptor<T>, h: T, n: u32) -> Result<CapacityEstimate<T>> {
    Estimator::NPlus { n }.run(desc, h)
}

pub fn gamma_nm_plus<T: Scalar>(desc: &SetDescriptor<T>, h: T, n: u32, m: u32) -> Result<CapacityEstimate<T>> {
    Estimator::NmPlus { n, m }.run(desc, h)
}

/// Positive-measure surrogate of the single-potential capacity; it bounds
/// the distributional capacity from below.
pub fn gamma_single<T: Scalar>(desc: &SetDescriptor<T>, h: T, n: u32, i: usize) -> Result<CapacityEstimate<T>> {
    Estimator::Single { n, i }.run(desc, h)
}

/// Capacity with all `d` Riesz coordinates bounded.
pub fn big_gamma_plus<T: Scalar>(desc: &SetDescriptor<T>, h: T) -> Result<CapacityEstimate<T>> {
    Estimator::RieszPlus.run(desc, h)
}

pub fn gamma_hat_k_plus<T: Scalar>(desc: &SetDescriptor<T>, h: T, k: usize) -> Result<CapacityEstimate<T>> {
    Estimator::HatKPlus { k }.run(desc, h)
}

/// Capacity run descriptor as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Serialize",
    deserialize = "T: Deserialize<'de>"
))]
pub struct CapacityRun<T = f64> {
    pub set: SetDescriptor<T>,
    pub h: T,
    pub kernels: Vec<KernelSpec<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<T>,
}

impl<T: Scalar + Serialize + for<'de> Deserialize<'de>> CapacityRun<T> {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn problem(&self) -> Result<CapacityProblem<T>> {
        let disc = generate(&self.set, self.h)?;
        let mut p = CapacityProblem::new(disc, self.kernels.clone());
        if let Some(b) = self.bound {
            p = p.with_bound(b);
        }
        if let Some(d) = self.delta {
            p = p.with_delta(d);
        }
        p.validate()?;
        Ok(p)
    }
}

/// Short description of a kernel list, e.g. `cauchy1+cauchy2`.
pub fn kernel_set_name<T>(specs: &[KernelSpec<T>]) -> String {
    specs
        .iter()
        .map(|s| match s.family {
            Family::OddPowerCoordinate => format!("K{}^{}", s.i, s.n),
            Family::RieszCoordinate => format!("R{}", s.i),
            Family::CauchyCoordinate => format!("C{}", s.i),
            Family::Huovinen => "H".to_string(),
        })
        .collect::<Vec<_>>()
        .join("+")
}
