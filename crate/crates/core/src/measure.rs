use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geom::Point;
use crate::scalar::Scalar;

/// Finitely many atoms with nonnegative weights and positive total mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure<T = f64> {
    points: Vec<Point<T>>,
    weights: Vec<T>,
}

impl<T: Scalar> DiscreteMeasure<T> {
    pub fn new(points: Vec<Point<T>>, weights: Vec<T>) -> Result<Self> {
        if points.len() != weights.len() {
            return invalid("points and weights differ in length");
        }
        if points.is_empty() {
            return invalid("measure needs at least one atom");
        }
        let d = points[0].dim();
        if points.iter().any(|p| p.dim() != d || p.coords().iter().any(|c| !c.is_finite())) {
            return invalid("atoms must share a dimension and have finite coordinates");
        }
        if weights.iter().any(|w| !(*w >= T::zero()) || !w.is_finite()) {
            return invalid("weights must be finite and nonnegative");
        }
        let mass: T = weights.iter().copied().sum();
        if !(mass > T::zero()) {
            return invalid("total mass must be positive");
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        let key = |i: usize| points[i].coords();
        order.sort_by(|&a, &b| {
            key(a)
                .iter()
                .zip(key(b))
                .map(|(x, y)| x.partial_cmp(y).expect("finite"))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        if order.windows(2).any(|w| points[w[0]] == points[w[1]]) {
            return invalid("atoms must be pairwise distinct");
        }
        Ok(DiscreteMeasure { points, weights })
    }

    /// Equal weights `mass / n` on the given points.
    pub fn uniform(points: Vec<Point<T>>, mass: T) -> Result<Self> {
        let n = T::lit(points.len().max(1) as f64);
        let weights = vec![mass / n; points.len()];
        Self::new(points, weights)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn mass(&self) -> T {
        self.weights.iter().copied().sum()
    }

    pub fn scale_mass(&self, factor: T) -> Self {
        DiscreteMeasure {
            points: self.points.clone(),
            weights: self.weights.iter().map(|w| *w * factor).collect(),
        }
    }

    /// Push-forward under `x -> factor * x`.
    pub fn dilate(&self, factor: T) -> Self {
        DiscreteMeasure {
            points: self.points.iter().map(|p| p.scaled(&factor)).collect(),
            weights: self.weights.clone(),
        }
    }

    /// Atoms reordered by `perm` (atom `k` of the result is atom `perm[k]`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        DiscreteMeasure {
            points: perm.iter().map(|&i| self.points[i].clone()).collect(),
            weights: perm.iter().map(|&i| self.weights[i]).collect(),
        }
    }

    /// Restriction to the atoms selected by `keep`; `None` if no mass is left.
    pub fn restrict(&self, keep: impl Fn(&Point<T>) -> bool) -> Option<Self> {
        let (points, weights): (Vec<_>, Vec<_>) = self
            .points
            .iter()
            .zip(&self.weights)
            .filter(|(p, _)| keep(p))
            .map(|(p, w)| (p.clone(), *w))
            .unzip();
        let mass: T = weights.iter().copied().sum();
        (mass > T::zero()).then_some(DiscreteMeasure { points, weights })
    }

    /// Smallest distance between two distinct atoms (infinite for one atom).
    pub fn min_separation(&self) -> T {
        let mut best = T::infinity();
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                best = best.min(p.dist2(q));
            }
        }
        best.sqrt()
    }

    /// Default truncation level: half the minimum atom separation.
    pub fn default_eps(&self) -> T {
        let sep = self.min_separation();
        if sep.is_finite() {
            sep / T::lit(2.0)
        } else {
            T::one()
        }
    }

    pub fn to_f64(&self) -> DiscreteMeasure<f64> {
        DiscreteMeasure {
            points: self
                .points
                .iter()
                .map(|p| Point::from_vec(p.coords().iter().map(|c| c.as_f64()).collect()))
                .collect(),
            weights: self.weights.iter().map(|w| w.as_f64()).collect(),
        }
    }
}
