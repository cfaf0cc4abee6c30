//! Test sets and their grid discretizations.
//!
//! Every set is discretized on an axis-aligned grid of side `h` anchored at
//! the lower-left corner of the set's bounding box. Anchoring at the box
//! (rather than the origin) means a dilation of the descriptor together with
//! `h` dilates every emitted point, which is exact for power-of-two factors.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng;
use crate::scalar::{Field, Scalar};

/// A point of the plane or of d-space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point<T> {
    coords: Vec<T>,
}

impl<T: Field> Point<T> {
    /// Builds a point without validating coordinates. Exact types have no
    /// notion of finiteness, so this is the constructor they use.
    pub fn from_vec(coords: Vec<T>) -> Self {
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn sub(&self, other: &Self) -> Self {
        Point {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn dist2(&self, other: &Self) -> T {
        self.coords
            .iter()
            .zip(&other.coords)
            .fold(T::zero(), |acc, (a, b)| {
                let d = a.clone() - b.clone();
                acc + d.clone() * d
            })
    }

    pub fn norm2(&self) -> T {
        self.coords
            .iter()
            .fold(T::zero(), |acc, a| acc + a.clone() * a.clone())
    }

    pub fn scaled(&self, factor: &T) -> Self {
        Point {
            coords: self
                .coords
                .iter()
                .map(|a| a.clone() * factor.clone())
                .collect(),
        }
    }
}

impl<T: Scalar> Point<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return invalid("point with no coordinates");
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return invalid("point coordinates must be finite");
        }
        Ok(Point { coords })
    }

    pub fn xy(x: T, y: T) -> Self {
        Point { coords: vec![x, y] }
    }

    pub fn dist(&self, other: &Self) -> T {
        self.dist2(other).sqrt()
    }

    pub fn norm(&self) -> T {
        self.norm2().sqrt()
    }
}

/// A closed axis-aligned square (or cube) given by its lower corner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Square<T> {
    pub corner: Vec<T>,
    pub side: T,
}

/// Shape parameters of a test set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
#[serde(bound(
    serialize = "T: Serialize",
    deserialize = "T: Deserialize<'de>"
))]
pub enum Shape<T> {
    Segment {
        a: Vec<T>,
        b: Vec<T>,
    },
    /// Planar circle.
    Circle {
        center: Vec<T>,
        radius: T,
    },
    /// Planar closed disk.
    Disk {
        center: Vec<T>,
        radius: T,
    },
    /// Closed square spanning the listed axes (1-based, default: all). With
    /// fewer axes than the dimension this is a flat face, e.g. one face of a
    /// cube in 3-space.
    Square {
        corner: Vec<T>,
        side: T,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        axes: Option<Vec<usize>>,
    },
    FourCornerCantor {
        depth: u32,
        corner: Vec<T>,
        side: T,
    },
    /// `count` uniform points in the box `[lo, hi]`, drawn from the
    /// descriptor seed.
    RandomCloud {
        count: usize,
        lo: Vec<T>,
        hi: Vec<T>,
    },
    Union {
        parts: Vec<SetDescriptor<T>>,
    },
}

/// On-disk experiment input: `{"kind", "params", "seed"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Serialize",
    deserialize = "T: Deserialize<'de>"
))]
pub struct SetDescriptor<T = f64> {
    #[serde(flatten)]
    pub shape: Shape<T>,
    #[serde(default)]
    pub seed: u64,
}

pub const MAX_CANTOR_DEPTH: u32 = 10;

impl<T: Scalar> SetDescriptor<T> {
    pub fn new(shape: Shape<T>) -> Self {
        SetDescriptor { shape, seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn segment(a: Vec<T>, b: Vec<T>) -> Self {
        Self::new(Shape::Segment { a, b })
    }

    pub fn circle(center: Vec<T>, radius: T) -> Self {
        Self::new(Shape::Circle { center, radius })
    }

    pub fn disk(center: Vec<T>, radius: T) -> Self {
        Self::new(Shape::Disk { center, radius })
    }

    pub fn square(corner: Vec<T>, side: T) -> Self {
        Self::new(Shape::Square {
            corner,
            side,
            axes: None,
        })
    }

    pub fn face(corner: Vec<T>, side: T, axes: Vec<usize>) -> Self {
        Self::new(Shape::Square {
            corner,
            side,
            axes: Some(axes),
        })
    }

    pub fn cantor(depth: u32, corner: Vec<T>, side: T) -> Self {
        Self::new(Shape::FourCornerCantor {
            depth,
            corner,
            side,
        })
    }

    pub fn cloud(count: usize, lo: Vec<T>, hi: Vec<T>, seed: u64) -> Self {
        Self::new(Shape::RandomCloud { count, lo, hi }).with_seed(seed)
    }

    pub fn union(parts: Vec<SetDescriptor<T>>) -> Self {
        Self::new(Shape::Union { parts })
    }

    pub fn from_json(text: &str) -> Result<Self>
    where
        T: for<'de> Deserialize<'de>,
    {
        let desc: Self = serde_json::from_str(text)?;
        desc.validate()?;
        Ok(desc)
    }

    pub fn to_json(&self) -> Result<String>
    where
        T: Serialize,
    {
        Ok(serde_json::to_string(self)?)
    }

    /// Checks the parameter invariants and returns the ambient dimension.
    pub fn validate(&self) -> Result<usize> {
        fn finite<T: Scalar>(v: &[T], what: &str) -> Result<()> {
            if v.is_empty() || v.iter().any(|c| !c.is_finite()) {
                return invalid(format!("{what}: coordinates must be finite and non-empty"));
            }
            Ok(())
        }
        fn positive<T: Scalar>(x: T, what: &str) -> Result<()> {
            if !(x > T::zero()) || !x.is_finite() {
                return invalid(format!("{what} must be positive and finite"));
            }
            Ok(())
        }
        match &self.shape {
            Shape::Segment { a, b } => {
                finite(a, "segment endpoint")?;
                finite(b, "segment endpoint")?;
                if a.len() != b.len() {
                    return invalid("segment endpoints differ in dimension");
                }
                positive(Point::from_vec(a.clone()).dist2(&Point::from_vec(b.clone())), "segment length")?;
                Ok(a.len())
            }
            Shape::Circle { center, radius } | Shape::Disk { center, radius } => {
                finite(center, "center")?;
                if center.len() != 2 {
                    return invalid("circles and disks are planar");
                }
                positive(*radius, "radius")?;
                Ok(2)
            }
            Shape::Square { corner, side, axes } => {
                finite(corner, "square corner")?;
                positive(*side, "square side")?;
                if let Some(axes) = axes {
                    if axes.is_empty() {
                        return invalid("square must span at least one axis");
                    }
                    let set: BTreeSet<_> = axes.iter().collect();
                    if set.len() != axes.len() || axes.iter().any(|&a| a == 0 || a > corner.len()) {
                        return invalid("square axes must be distinct 1-based coordinate indices");
                    }
                }
                Ok(corner.len())
            }
            Shape::FourCornerCantor {
                depth,
                corner,
                side,
            } => {
                finite(corner, "cantor corner")?;
                if corner.len() != 2 {
                    return invalid("four-corner Cantor set is planar");
                }
                if *depth > MAX_CANTOR_DEPTH {
                    return invalid(format!("cantor depth {depth} exceeds {MAX_CANTOR_DEPTH}"));
                }
                positive(*side, "cantor side")?;
                Ok(2)
            }
            Shape::RandomCloud { count, lo, hi } => {
                finite(lo, "cloud box")?;
                finite(hi, "cloud box")?;
                if lo.len() != hi.len() {
                    return invalid("cloud box corners differ in dimension");
                }
                if lo.iter().zip(hi).any(|(l, h)| !(h > l)) {
                    return invalid("cloud box must have positive extent");
                }
                if *count == 0 {
                    return invalid("cloud count must be positive");
                }
                Ok(lo.len())
            }
            Shape::Union { parts } => {
                let mut dims = parts.iter().map(|p| p.validate());
                let first = match dims.next() {
                    Some(d) => d?,
                    None => return invalid("union must have at least one part"),
                };
                for d in dims {
                    if d? != first {
                        return invalid("union parts differ in dimension");
                    }
                }
                Ok(first)
            }
        }
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Segment { a, .. } => a.len(),
            Shape::Circle { .. } | Shape::Disk { .. } | Shape::FourCornerCantor { .. } => 2,
            Shape::Square { corner, .. } => corner.len(),
            Shape::RandomCloud { lo, .. } => lo.len(),
            Shape::Union { parts } => parts.first().map_or(0, |p| p.dim()),
        }
    }

    /// The sample points of a random cloud, reproducible from the seed.
    pub fn cloud_points(&self) -> Option<Vec<Point<T>>> {
        let Shape::RandomCloud { count, lo, hi } = &self.shape else {
            return None;
        };
        let mut stream = rng::stream(self.seed);
        let pts = (0..*count)
            .map(|_| {
                let coords = lo
                    .iter()
                    .zip(hi)
                    .map(|(&l, &h)| {
                        let u: f64 = stream.gen();
                        l + T::lit(u) * (h - l)
                    })
                    .collect();
                Point::from_vec(coords)
            })
            .collect();
        Some(pts)
    }

    /// Componentwise bounding box `(lo, hi)`.
    pub fn bbox(&self) -> (Vec<T>, Vec<T>) {
        match &self.shape {
            Shape::Segment { a, b } => (
                a.iter().zip(b).map(|(x, y)| x.min(*y)).collect(),
                a.iter().zip(b).map(|(x, y)| x.max(*y)).collect(),
            ),
            Shape::Circle { center, radius } | Shape::Disk { center, radius } => (
                center.iter().map(|c| *c - *radius).collect(),
                center.iter().map(|c| *c + *radius).collect(),
            ),
            Shape::Square { corner, side, axes } => {
                let spans = spanned_axes(corner.len(), axes.as_deref());
                (
                    corner.clone(),
                    corner
                        .iter()
                        .enumerate()
                        .map(|(k, c)| if spans[k] { *c + *side } else { *c })
                        .collect(),
                )
            }
            Shape::FourCornerCantor { corner, side, .. } => {
                (corner.clone(), corner.iter().map(|c| *c + *side).collect())
            }
            Shape::RandomCloud { .. } => {
                let pts = self.cloud_points().unwrap_or_default();
                let d = self.dim();
                let mut lo = vec![T::infinity(); d];
                let mut hi = vec![T::neg_infinity(); d];
                for p in &pts {
                    for k in 0..d {
                        lo[k] = lo[k].min(p.coords[k]);
                        hi[k] = hi[k].max(p.coords[k]);
                    }
                }
                (lo, hi)
            }
            Shape::Union { parts } => {
                let mut boxes = parts.iter().map(|p| p.bbox());
                let (mut lo, mut hi) = boxes.next().unwrap_or_default();
                for (l, h) in boxes {
                    for k in 0..lo.len() {
                        lo[k] = lo[k].min(l[k]);
                        hi[k] = hi[k].max(h[k]);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Diameter of the set. Exact for every kind except unions, where the
    /// diagonal of the bounding box is used.
    pub fn diameter(&self) -> T {
        match &self.shape {
            Shape::Segment { a, b } => {
                Point::from_vec(a.clone()).dist(&Point::from_vec(b.clone()))
            }
            Shape::Circle { radius, .. } | Shape::Disk { radius, .. } => T::lit(2.0) * *radius,
            Shape::Square { corner, side, axes } => {
                let k = spanned_axes(corner.len(), axes.as_deref())
                    .iter()
                    .filter(|s| **s)
                    .count();
                *side * T::lit(k as f64).sqrt()
            }
            Shape::FourCornerCantor { side, .. } => *side * T::lit(2.0).sqrt(),
            Shape::RandomCloud { .. } => {
                let pts = self.cloud_points().unwrap_or_default();
                let mut best = T::zero();
                for (i, p) in pts.iter().enumerate() {
                    for q in &pts[i + 1..] {
                        best = best.max(p.dist2(q));
                    }
                }
                best.sqrt()
            }
            Shape::Union { .. } => {
                let (lo, hi) = self.bbox();
                Point::from_vec(lo).dist(&Point::from_vec(hi))
            }
        }
    }

    /// Dilation by `factor` about the origin.
    pub fn scaled(&self, factor: T) -> Self {
        let s = |v: &Vec<T>| v.iter().map(|c| *c * factor).collect::<Vec<T>>();
        let shape = match &self.shape {
            Shape::Segment { a, b } => Shape::Segment { a: s(a), b: s(b) },
            Shape::Circle { center, radius } => Shape::Circle {
                center: s(center),
                radius: *radius * factor,
            },
            Shape::Disk { center, radius } => Shape::Disk {
                center: s(center),
                radius: *radius * factor,
            },
            Shape::Square { corner, side, axes } => Shape::Square {
                corner: s(corner),
                side: *side * factor,
                axes: axes.clone(),
            },
            Shape::FourCornerCantor {
                depth,
                corner,
                side,
            } => Shape::FourCornerCantor {
                depth: *depth,
                corner: s(corner),
                side: *side * factor,
            },
            Shape::RandomCloud { count, lo, hi } => Shape::RandomCloud {
                count: *count,
                lo: s(lo),
                hi: s(hi),
            },
            Shape::Union { parts } => Shape::Union {
                parts: parts.iter().map(|p| p.scaled(factor)).collect(),
            },
        };
        SetDescriptor {
            shape,
            seed: self.seed,
        }
    }

    fn mark_cells(&self, grid: &Grid<T>, out: &mut BTreeSet<Vec<i64>>) {
        match &self.shape {
            Shape::Segment { a, b } => mark_segment(grid, a, b, out),
            Shape::Circle { center, radius } => mark_round(grid, center, *radius, true, out),
            Shape::Disk { center, radius } => mark_round(grid, center, *radius, false, out),
            Shape::Square { corner, side, axes } => {
                let spans = spanned_axes(corner.len(), axes.as_deref());
                mark_box(grid, corner, *side, &spans, out);
            }
            Shape::FourCornerCantor {
                depth,
                corner,
                side,
            } => {
                let base = Square {
                    corner: corner.clone(),
                    side: *side,
                };
                let spans = [true, true];
                for sq in cantor_squares(*depth, &base).unwrap_or_default() {
                    mark_box(grid, &sq.corner, sq.side, &spans, out);
                }
            }
            Shape::RandomCloud { .. } => {
                for p in self.cloud_points().unwrap_or_default() {
                    out.insert(grid.cell_of(p.coords()));
                }
            }
            Shape::Union { parts } => {
                for p in parts {
                    p.mark_cells(grid, out);
                }
            }
        }
    }
}

fn spanned_axes(dim: usize, axes: Option<&[usize]>) -> Vec<bool> {
    match axes {
        None => vec![true; dim],
        Some(list) => (1..=dim).map(|k| list.contains(&k)).collect(),
    }
}

/// The h-grid anchored at a bounding box corner.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    pub anchor: Vec<T>,
    pub h: T,
    /// Number of cells per axis needed to cover the bounding box.
    pub counts: Vec<i64>,
}

impl<T: Scalar> Grid<T> {
    pub fn covering(lo: &[T], hi: &[T], h: T) -> Self {
        let counts = lo
            .iter()
            .zip(hi)
            .map(|(l, u)| {
                let q = (*u - *l) / h;
                let r = q.round();
                let c = if (q - r).abs() <= T::tol(1e-9) * r.max(T::one()) {
                    r
                } else {
                    q.ceil()
                };
                c.to_i64().unwrap_or(1).max(1)
            })
            .collect();
        Grid {
            anchor: lo.to_vec(),
            h,
            counts,
        }
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    pub fn center(&self, idx: &[i64]) -> Point<T> {
        Point::from_vec(
            idx.iter()
                .zip(&self.anchor)
                .map(|(&i, &a)| a + (T::lit(i as f64) + T::lit(0.5)) * self.h)
                .collect(),
        )
    }

    /// Unclamped index of the half-open cell containing coordinate `x`.
    fn raw_index(&self, axis: usize, x: T) -> i64 {
        let q = (x - self.anchor[axis]) / self.h + T::tol(1e-9);
        q.floor().to_i64().unwrap_or(0)
    }

    /// Half-open cell containing `p`, clamped to the covering range so
    /// that points on the far faces of the box land in the last cell.
    pub fn cell_of(&self, p: &[T]) -> Vec<i64> {
        p.iter()
            .enumerate()
            .map(|(k, &x)| self.raw_index(k, x).clamp(0, self.counts[k] - 1))
            .collect()
    }

    fn cell_bounds(&self, axis: usize, i: i64) -> (T, T) {
        let lo = self.anchor[axis] + T::lit(i as f64) * self.h;
        (lo, lo + self.h)
    }
}

fn mark_segment<T: Scalar>(grid: &Grid<T>, a: &[T], b: &[T], out: &mut BTreeSet<Vec<i64>>) {
    let mut ts = vec![T::zero(), T::one()];
    for k in 0..grid.dim() {
        let (lo, hi) = (a[k].min(b[k]), a[k].max(b[k]));
        if hi == lo {
            continue;
        }
        let first = grid.raw_index(k, lo);
        let last = grid.raw_index(k, hi) + 1;
        for j in first..=last {
            let x = grid.anchor[k] + T::lit(j as f64) * grid.h;
            let t = (x - a[k]) / (b[k] - a[k]);
            if t > T::zero() && t < T::one() {
                ts.push(t);
            }
        }
    }
    ts.sort_by(|x, y| x.partial_cmp(y).expect("finite parameters"));
    ts.dedup();
    let at = |t: T| -> Vec<T> { a.iter().zip(b).map(|(&x, &y)| x + t * (y - x)).collect() };
    for w in ts.windows(2) {
        out.insert(grid.cell_of(&at((w[0] + w[1]) / T::lit(2.0))));
    }
    for &t in &ts {
        out.insert(grid.cell_of(&at(t)));
    }
}

/// Circle (`boundary_only`) or disk: a cell meets the set iff its closed
/// square meets it, i.e. its center is within h/2 in sup-norm.
fn mark_round<T: Scalar>(
    grid: &Grid<T>,
    center: &[T],
    radius: T,
    boundary_only: bool,
    out: &mut BTreeSet<Vec<i64>>,
) {
    let ranges: Vec<(i64, i64)> = (0..2)
        .map(|k| {
            (
                grid.raw_index(k, center[k] - radius).clamp(0, grid.counts[k] - 1),
                grid.raw_index(k, center[k] + radius).clamp(0, grid.counts[k] - 1),
            )
        })
        .collect();
    for i in ranges[0].0..=ranges[0].1 {
        for j in ranges[1].0..=ranges[1].1 {
            let (mut near, mut far) = (T::zero(), T::zero());
            for (k, idx) in [(0, i), (1, j)] {
                let (lo, hi) = grid.cell_bounds(k, idx);
                let c = center[k];
                let dn = (lo - c).max(c - hi).max(T::zero());
                let df = (c - lo).abs().max((hi - c).abs());
                near = near + dn * dn;
                far = far + df * df;
            }
            let r2 = radius * radius;
            let meets = if boundary_only {
                near <= r2 && r2 <= far
            } else {
                near <= r2
            };
            if meets {
                out.insert(vec![i, j]);
            }
        }
    }
}

/// Axis-aligned box. Spanned axes need an overlap of positive length with
/// the open cell; flat axes use half-open cell membership.
fn mark_box<T: Scalar>(
    grid: &Grid<T>,
    corner: &[T],
    side: T,
    spans: &[bool],
    out: &mut BTreeSet<Vec<i64>>,
) {
    let per_axis: Vec<Vec<i64>> = (0..grid.dim())
        .map(|k| {
            let lo = corner[k];
            if !spans[k] {
                return vec![grid.cell_of_axis(k, lo)];
            }
            let hi = lo + side;
            let first = grid.raw_index(k, lo).max(0) - 1;
            let last = (grid.raw_index(k, hi) + 1).min(grid.counts[k] - 1);
            (first.max(0)..=last)
                .filter(|&i| {
                    let (cl, ch) = grid.cell_bounds(k, i);
                    hi.min(ch) - lo.max(cl) > T::tol(1e-9) * grid.h
                })
                .collect()
        })
        .collect();
    for idx in cartesian(&per_axis) {
        out.insert(idx);
    }
}

impl<T: Scalar> Grid<T> {
    fn cell_of_axis(&self, axis: usize, x: T) -> i64 {
        self.raw_index(axis, x).clamp(0, self.counts[axis] - 1)
    }
}

fn cartesian(lists: &[Vec<i64>]) -> Vec<Vec<i64>> {
    lists.iter().fold(vec![Vec::new()], |acc, list| {
        acc.iter()
            .flat_map(|prefix| {
                list.iter().map(move |&i| {
                    let mut v = prefix.clone();
                    v.push(i);
                    v
                })
            })
            .collect()
    })
}

/// The four-corner Cantor construction: each square is replaced by its four
/// corner squares of a quarter of the side.
pub fn cantor_squares<T: Scalar>(depth: u32, base: &Square<T>) -> Result<Vec<Square<T>>> {
    if depth > MAX_CANTOR_DEPTH {
        return invalid(format!("cantor depth {depth} exceeds {MAX_CANTOR_DEPTH}"));
    }
    if base.corner.len() != 2 {
        return invalid("cantor base must be a planar square");
    }
    let mut squares = vec![base.clone()];
    for _ in 0..depth {
        squares = squares
            .iter()
            .flat_map(|sq| {
                let child = sq.side / T::lit(4.0);
                let off = sq.side - child;
                [(0, 0), (1, 0), (0, 1), (1, 1)].into_iter().map(move |(a, b)| Square {
                    corner: vec![
                        sq.corner[0] + if a == 1 { off } else { T::zero() },
                        sq.corner[1] + if b == 1 { off } else { T::zero() },
                    ],
                    side: child,
                })
            })
            .collect();
    }
    Ok(squares)
}

/// Support grid and halo grid of a test set.
#[derive(Clone, Debug)]
pub struct Discretization<T> {
    pub support: Vec<Point<T>>,
    pub h: T,
    pub halo: Vec<Point<T>>,
    pub grid: Grid<T>,
    pub diameter: T,
}

impl<T: Scalar> Discretization<T> {
    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Keeps the support points selected by `keep`; the halo is unchanged.
    pub fn restrict_support(&self, keep: impl Fn(usize, &Point<T>) -> bool) -> Self {
        Discretization {
            support: self
                .support
                .iter()
                .enumerate()
                .filter(|(i, p)| keep(*i, p))
                .map(|(_, p)| p.clone())
                .collect(),
            ..self.clone()
        }
    }

    /// Cell centers of the grid refined `factor` times, over the bounding
    /// box of the support widened by `margin` coarse cells.
    pub fn refined_points(&self, factor: usize, margin: i64) -> Vec<Point<T>> {
        let d = self.dim();
        let mut lo = vec![T::infinity(); d];
        let mut hi = vec![T::neg_infinity(); d];
        for p in &self.support {
            for k in 0..d {
                lo[k] = lo[k].min(p.coords[k]);
                hi[k] = hi[k].max(p.coords[k]);
            }
        }
        let fine = Grid {
            anchor: self.grid.anchor.clone(),
            h: self.h / T::lit(factor as f64),
            counts: self.grid.counts.clone(),
        };
        let f = factor as i64;
        let ranges: Vec<Vec<i64>> = (0..d)
            .map(|k| {
                let a = self.grid.raw_index(k, lo[k]) - margin;
                let b = self.grid.raw_index(k, hi[k]) + margin;
                (a * f..(b + 1) * f).collect()
            })
            .collect();
        cartesian(&ranges).iter().map(|idx| fine.center(idx)).collect()
    }
}

/// Discretizes `desc` at resolution `h`.
///
/// The support is the set of centers of grid cells meeting the set, in
/// lexicographic cell order. The halo is every grid center within Euclidean
/// distance `2 * diameter` of the bounding box, also in lexicographic order;
/// support centers are halo points bit for bit.
pub fn generate<T: Scalar>(desc: &SetDescriptor<T>, h: T) -> Result<Discretization<T>> {
    desc.validate()?;
    if !(h > T::zero()) || !h.is_finite() {
        return invalid("cell size must be positive");
    }
    let diameter = desc.diameter();
    if h > diameter {
        return invalid(format!(
            "cell size {h} exceeds the set diameter {diameter}"
        ));
    }
    let (lo, hi) = desc.bbox();
    let grid = Grid::covering(&lo, &hi, h);
    let mut cells = BTreeSet::new();
    desc.mark_cells(&grid, &mut cells);
    if cells.is_empty() {
        return Err(Error::DegenerateDiscretization(
            "no grid cell meets the set".into(),
        ));
    }
    let support = cells.iter().map(|c| grid.center(c)).collect();

    let reach = T::lit(2.0) * diameter;
    let extra = (reach / h).ceil().to_i64().unwrap_or(0) + 1;
    let ranges: Vec<Vec<i64>> = grid
        .counts
        .iter()
        .map(|&c| (-extra..c + extra).collect())
        .collect();
    let reach2 = reach * reach;
    let halo = cartesian(&ranges)
        .into_iter()
        .map(|idx| grid.center(&idx))
        .filter(|p| {
            let d2 = p
                .coords
                .iter()
                .zip(lo.iter().zip(&hi))
                .fold(T::zero(), |acc, (x, (l, u))| {
                    let e = (*l - *x).max(*x - *u).max(T::zero());
                    acc + e * e
                });
            d2 <= reach2
        })
        .collect();
    Ok(Discretization {
        support,
        h,
        halo,
        grid,
        diameter,
    })
}
