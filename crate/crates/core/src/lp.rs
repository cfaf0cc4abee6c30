//! Dense simplex for `max c.w  s.t.  A w <= b, w >= 0`.
//!
//! A condensed (Tucker) tableau stores only the nonbasic columns, so a pivot
//! costs `rows * cols`. The entering column is the one with the largest
//! reduced cost; after a run of degenerate pivots the solver switches to
//! Bland's smallest-index rule until the objective improves, which rules
//! out cycling. Every tie is broken by index, so the pivot sequence is a
//! function of the input alone. A negative right-hand side triggers a phase
//! one with a single artificial variable.
//!
//! Every optimum is certified against the original data: primal and dual
//! feasibility are re-checked and the duality gap `b.y - c.w` reported.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Entries below this fraction of the column scale are treated as zero.
const ZERO_REL: f64 = 1e-10;
/// A selected pivot smaller than this fraction of its column scale is a
/// numerical breakdown.
const PIVOT_REL: f64 = 1e-12;
/// Ratios within this relative distance of the minimum count as ties.
const TIE_REL: f64 = 1e-12;
/// Tied pivots at least this large (relative to the column) are preferred.
const STRONG_REL: f64 = 1e-9;
/// Consecutive degenerate pivots before switching to Bland's rule.
const BLAND_AFTER: usize = 50;
const FEAS_TOL: f64 = 1e-9;
const GAP_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem<T = f64> {
    pub objective: Vec<T>,
    /// Row-major `rows x cols`.
    pub matrix: Vec<T>,
    pub rhs: Vec<T>,
    pub rows: usize,
    pub cols: usize,
}

impl<T: Scalar> LpProblem<T> {
    pub fn new(objective: Vec<T>, rows: Vec<Vec<T>>, rhs: Vec<T>) -> Result<Self> {
        let cols = objective.len();
        if rows.len() != rhs.len() {
            return invalid("constraint rows and right-hand side differ in length");
        }
        if rows.iter().any(|r| r.len() != cols) {
            return invalid("constraint row length differs from the objective length");
        }
        let n_rows = rows.len();
        Self::from_dense(objective, rows.concat(), rhs, n_rows)
    }

    pub fn from_dense(objective: Vec<T>, matrix: Vec<T>, rhs: Vec<T>, rows: usize) -> Result<Self> {
        let cols = objective.len();
        if rows == 0 || cols == 0 {
            return invalid("linear program needs at least one row and one column");
        }
        if matrix.len() != rows * cols || rhs.len() != rows {
            return invalid("inconsistent linear program dimensions");
        }
        let finite = |v: &[T]| v.iter().all(|x| x.is_finite());
        if !finite(&objective) || !finite(&matrix) || !finite(&rhs) {
            return invalid("linear program entries must be finite");
        }
        Ok(LpProblem {
            objective,
            matrix,
            rhs,
            rows,
            cols,
        })
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.matrix[i * self.cols..(i + 1) * self.cols]
    }

    /// Plain-text interchange: an `objective` line, then one `row` line per
    /// constraint with the right-hand side after `<=`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let join = |v: &[T]| {
            v.iter()
                .map(|x| format!("{:e}", x.as_f64()))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(out, "objective {}", join(&self.objective));
        for i in 0..self.rows {
            let _ = writeln!(out, "row {} <= {:e}", join(self.row(i)), self.rhs[i].as_f64());
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let num = |s: &str| -> Result<T> {
            s.parse::<f64>()
                .map(T::lit)
                .map_err(|_| Error::InvalidParameter(format!("bad number {s:?}")))
        };
        let mut objective = None;
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(rest) = line.strip_prefix("objective") {
                objective = Some(rest.split_whitespace().map(num).collect::<Result<Vec<_>>>()?);
            } else if let Some(rest) = line.strip_prefix("row") {
                let (lhs, b) = rest
                    .split_once("<=")
                    .ok_or_else(|| Error::InvalidParameter("row without <=".into()))?;
                rows.push(lhs.split_whitespace().map(num).collect::<Result<Vec<_>>>()?);
                rhs.push(num(b.trim())?);
            } else {
                return invalid(format!("unrecognized line {line:?}"));
            }
        }
        let objective = objective.ok_or_else(|| Error::InvalidParameter("missing objective".into()))?;
        Self::new(objective, rows, rhs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpResult<T = f64> {
    pub status: LpStatus,
    pub weights: Vec<T>,
    pub objective: T,
    pub dual: Vec<T>,
    pub duality_gap: T,
    pub iterations: usize,
}

struct Tableau<T> {
    rows: usize,
    cols: usize,
    /// Row-major coefficients of the nonbasic variables.
    a: Vec<T>,
    rhs: Vec<T>,
    /// Reduced objective coefficients; the objective increases along
    /// column `j` when `d[j] > 0`.
    d: Vec<T>,
    value: T,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    iterations: usize,
    trace: Vec<(usize, usize)>,
}

enum Step {
    Optimal,
    Unbounded,
}

impl<T: Scalar> Tableau<T> {
    fn at(&self, r: usize, c: usize) -> T {
        self.a[r * self.cols + c]
    }

    fn trace_string(&self) -> String {
        let tail = self.trace.len().saturating_sub(20);
        self.trace[tail..]
            .iter()
            .map(|(e, l)| format!("{e}<-{l}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let cols = self.cols;
        let p = self.at(r, c);
        let inv = T::one() / p;
        {
            let row = &mut self.a[r * cols..(r + 1) * cols];
            for (j, x) in row.iter_mut().enumerate() {
                *x = if j == c { inv } else { *x * inv };
            }
        }
        self.rhs[r] = self.rhs[r] * inv;
        let pivot_row: Vec<T> = self.a[r * cols..(r + 1) * cols].to_vec();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.a[i * cols + c];
            if f == T::zero() {
                continue;
            }
            let row = &mut self.a[i * cols..(i + 1) * cols];
            for (j, x) in row.iter_mut().enumerate() {
                *x = if j == c { -f * inv } else { *x - f * pivot_row[j] };
            }
            self.rhs[i] = self.rhs[i] - f * pivot_rhs;
        }
        let f = self.d[c];
        for j in 0..cols {
            self.d[j] = if j == c { -f * inv } else { self.d[j] - f * pivot_row[j] };
        }
        self.value = self.value + f * pivot_rhs;
        self.trace.push((self.nonbasic[c], self.basic[r]));
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[c]);
        self.iterations += 1;
    }

    fn column_scale(&self, c: usize) -> T {
        (0..self.rows).fold(T::zero(), |m, r| m.max(self.at(r, c).abs()))
    }

    /// Pivots until optimal or unbounded. Entering columns follow the
    /// largest reduced cost until `BLAND_AFTER` consecutive degenerate
    /// pivots, then Bland's rule until the objective moves again.
    fn run(&mut self, limit: usize) -> Result<Step> {
        let d_scale = self.d.iter().fold(T::one(), |m, x| m.max(x.abs()));
        let opt_tol = T::tol(1e-11) * d_scale;
        let mut stalled = 0usize;
        loop {
            if self.iterations > limit {
                return Err(Error::Certification(format!(
                    "iteration limit {limit} reached; trace: {}",
                    self.trace_string()
                )));
            }
            let eligible = (0..self.cols).filter(|&j| self.d[j] > opt_tol);
            let entering = if stalled < BLAND_AFTER {
                eligible.reduce(|a, b| {
                    let (da, db) = (self.d[a], self.d[b]);
                    if db > da || (db == da && self.nonbasic[b] < self.nonbasic[a]) {
                        b
                    } else {
                        a
                    }
                })
            } else {
                eligible.min_by_key(|&j| self.nonbasic[j])
            };
            let Some(c) = entering else {
                return Ok(Step::Optimal);
            };
            let scale = self.column_scale(c);
            let zero = T::tol(ZERO_REL) * scale;
            let ratios: Vec<(T, usize, usize)> = (0..self.rows)
                .filter(|&r| self.at(r, c) > zero)
                .map(|r| (self.rhs[r].max(T::zero()) / self.at(r, c), self.basic[r], r))
                .collect();
            let Some(min) = ratios.iter().map(|x| x.0).reduce(T::min) else {
                return Ok(Step::Unbounded);
            };
            // Rows tied at the minimum ratio; among them, rows with a sound
            // pivot take precedence, then the smallest label.
            let reach = min + T::tol(TIE_REL) * min;
            let strong = T::tol(STRONG_REL) * scale;
            let (_, _, r) = ratios
                .iter()
                .filter(|x| x.0 <= reach)
                .min_by_key(|x| (self.at(x.2, c) < strong, x.1))
                .copied()
                .expect("minimum exists");
            let p = self.at(r, c);
            if p < T::tol(PIVOT_REL) * scale {
                return Err(Error::DegeneratePivot {
                    iteration: self.iterations,
                    row: r,
                    col: c,
                    pivot: p.as_f64(),
                    trace: self.trace_string(),
                });
            }
            if self.rhs[r] > T::zero() {
                stalled = 0;
            } else {
                stalled += 1;
            }
            self.pivot(r, c);
        }
    }

    /// Recomputes the reduced costs for objective `c` over labels
    /// `0..c.len()` (other labels have zero cost).
    fn set_objective(&mut self, c: &[T]) {
        let cost = |label: usize| c.get(label).copied().unwrap_or(T::zero());
        self.value = (0..self.rows).fold(T::zero(), |acc, r| acc + cost(self.basic[r]) * self.rhs[r]);
        for j in 0..self.cols {
            let mut v = cost(self.nonbasic[j]);
            for r in 0..self.rows {
                v = v - cost(self.basic[r]) * self.at(r, j);
            }
            self.d[j] = v;
        }
    }

    fn drop_column(&mut self, c: usize) {
        let cols = self.cols;
        let mut a = Vec::with_capacity(self.rows * (cols - 1));
        for r in 0..self.rows {
            for j in 0..cols {
                if j != c {
                    a.push(self.a[r * cols + j]);
                }
            }
        }
        self.a = a;
        self.d.remove(c);
        self.nonbasic.remove(c);
        self.cols -= 1;
    }
}

/// Solves the program and certifies the optimum.
pub fn solve<T: Scalar>(p: &LpProblem<T>) -> Result<LpResult<T>> {
    let (m, n) = (p.rows, p.cols);
    if m == 0 || n == 0 {
        return invalid("linear program needs at least one row and one column");
    }
    let limit = 50 * (m + n) + 1000;
    let needs_phase_one = p.rhs.iter().any(|b| *b < T::zero());
    let artificial = n + m;
    let extra = usize::from(needs_phase_one);
    let cols = n + extra;
    let mut a = Vec::with_capacity(m * cols);
    for i in 0..m {
        a.extend_from_slice(p.row(i));
        if needs_phase_one {
            a.push(-T::one());
        }
    }
    let mut nonbasic: Vec<usize> = (0..n).collect();
    if needs_phase_one {
        nonbasic.push(artificial);
    }
    let mut t = Tableau {
        rows: m,
        cols,
        a,
        rhs: p.rhs.clone(),
        d: vec![T::zero(); cols],
        value: T::zero(),
        basic: (n..n + m).collect(),
        nonbasic,
        iterations: 0,
        trace: Vec::new(),
    };

    if needs_phase_one {
        let mut aux = vec![T::zero(); artificial + 1];
        aux[artificial] = -T::one();
        t.set_objective(&aux);
        let r = (0..m)
            .min_by(|&i, &j| {
                p.rhs[i]
                    .partial_cmp(&p.rhs[j])
                    .expect("finite")
                    .then(i.cmp(&j))
            })
            .expect("non-empty");
        t.pivot(r, n);
        match t.run(limit)? {
            Step::Optimal => {}
            Step::Unbounded => return Err(Error::Internal("phase one cannot be unbounded".into())),
        }
        let b_scale = p.rhs.iter().fold(T::one(), |m, b| m.max(b.abs()));
        if t.value < -T::tol(FEAS_TOL) * b_scale {
            return Ok(LpResult {
                status: LpStatus::Infeasible,
                weights: vec![T::zero(); n],
                objective: T::zero(),
                dual: vec![T::zero(); m],
                duality_gap: T::zero(),
                iterations: t.iterations,
            });
        }
        if let Some(r) = t.basic.iter().position(|&l| l == artificial) {
            let c = (0..t.cols)
                .filter(|&j| t.at(r, j) != T::zero())
                .max_by(|&i, &j| {
                    t.at(r, i)
                        .abs()
                        .partial_cmp(&t.at(r, j).abs())
                        .expect("finite")
                        .then(j.cmp(&i))
                })
                .ok_or_else(|| Error::Internal("artificial row is empty".into()))?;
            t.pivot(r, c);
        }
        let c = t
            .nonbasic
            .iter()
            .position(|&l| l == artificial)
            .expect("artificial variable is nonbasic");
        t.drop_column(c);
    }

    t.set_objective(&p.objective);
    let status = match t.run(limit)? {
        Step::Optimal => LpStatus::Optimal,
        Step::Unbounded => LpStatus::Unbounded,
    };
    let mut weights = vec![T::zero(); n];
    for (r, &label) in t.basic.iter().enumerate() {
        if label < n {
            weights[label] = t.rhs[r].max(T::zero());
        }
    }
    let mut dual = vec![T::zero(); m];
    for (j, &label) in t.nonbasic.iter().enumerate() {
        if (n..n + m).contains(&label) {
            dual[label - n] = (-t.d[j]).max(T::zero());
        }
    }
    if status == LpStatus::Optimal {
        polish(p, &t, &mut weights, &mut dual);
        restore(p, &mut weights);
    }
    if status == LpStatus::Unbounded {
        return Ok(LpResult {
            status,
            weights,
            objective: T::infinity(),
            dual: vec![T::zero(); m],
            duality_gap: T::zero(),
            iterations: t.iterations,
        });
    }
    let objective = p
        .objective
        .iter()
        .zip(&weights)
        .fold(T::zero(), |acc, (c, w)| acc + *c * *w);
    let result = LpResult {
        status,
        objective,
        duality_gap: T::zero(),
        weights,
        dual,
        iterations: t.iterations,
    };
    certify(p, result, &t.trace_string())
}

/// Recomputes the optimal vertex from the original data. The basic
/// structural variables and the tight rows (those with a nonbasic slack)
/// form a square system; solving it directly removes the roundoff the
/// tableau accumulated over many pivots. The result is kept only if both
/// solves succeed.
fn polish<T: Scalar>(p: &LpProblem<T>, t: &Tableau<T>, weights: &mut [T], dual: &mut [T]) {
    let n = p.cols;
    let mut basic: Vec<usize> = t.basic.iter().copied().filter(|&l| l < n).collect();
    let mut tight: Vec<usize> = t
        .nonbasic
        .iter()
        .filter(|&&l| l >= n && l < n + p.rows)
        .map(|&l| l - n)
        .collect();
    basic.sort_unstable();
    tight.sort_unstable();
    let k = basic.len();
    if k != tight.len() {
        return;
    }
    if k == 0 {
        weights.iter_mut().for_each(|w| *w = T::zero());
        dual.iter_mut().for_each(|y| *y = T::zero());
        return;
    }
    let entry = |r: usize, c: usize| p.matrix[tight[r] * n + basic[c]];
    let a: Vec<T> = (0..k * k).map(|idx| entry(idx / k, idx % k)).collect();
    let at: Vec<T> = (0..k * k).map(|idx| entry(idx % k, idx / k)).collect();
    let b: Vec<T> = tight.iter().map(|&r| p.rhs[r]).collect();
    let c: Vec<T> = basic.iter().map(|&j| p.objective[j]).collect();
    if let Some(w) = gauss(a, b, k) {
        let mut cand = vec![T::zero(); n];
        for (j, v) in basic.iter().zip(w) {
            cand[*j] = v.max(T::zero());
        }
        if primal_excess(p, &cand) <= primal_excess(p, weights) {
            weights.copy_from_slice(&cand);
        }
    }
    if let Some(y) = gauss(at, c, k) {
        let mut cand = vec![T::zero(); p.rows];
        for (r, v) in tight.iter().zip(y) {
            cand[*r] = v.max(T::zero());
        }
        if dual_excess(p, &cand) <= dual_excess(p, dual) {
            dual.copy_from_slice(&cand);
        }
    }
}

/// Shrinks `w` towards the origin, which is feasible when `b >= 0`, until
/// no row is violated; the relative cost equals the removed violation.
fn restore<T: Scalar>(p: &LpProblem<T>, weights: &mut [T]) {
    if p.rhs.iter().all(|b| *b >= T::zero()) {
        let mut rho = T::one();
        for i in 0..p.rows {
            let ax = dot(p.row(i), weights);
            if p.rhs[i] > T::zero() {
                rho = rho.max(ax / p.rhs[i]);
            }
        }
        if rho > T::one() {
            weights.iter_mut().for_each(|w| *w = *w / rho);
        }
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}

/// Largest relative violation of `A w <= b`.
fn primal_excess<T: Scalar>(p: &LpProblem<T>, w: &[T]) -> T {
    (0..p.rows).fold(T::zero(), |m, i| {
        m.max((dot(p.row(i), w) - p.rhs[i]) / (T::one() + p.rhs[i].abs()))
    })
}

/// Largest relative violation of `A^T y >= c`.
fn dual_excess<T: Scalar>(p: &LpProblem<T>, y: &[T]) -> T {
    (0..p.cols).fold(T::zero(), |m, j| {
        let aty = (0..p.rows).fold(T::zero(), |acc, i| acc + p.matrix[i * p.cols + j] * y[i]);
        m.max((p.objective[j] - aty) / (T::one() + p.objective[j].abs()))
    })
}

/// Solves the `k x k` row-major system `a x = b` by Gaussian elimination
/// with partial pivoting; `None` if it is numerically singular.
fn gauss<T: Scalar>(mut a: Vec<T>, mut b: Vec<T>, k: usize) -> Option<Vec<T>> {
    let scale = a.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    for col in 0..k {
        let piv = (col..k).fold(col, |best, r| {
            if a[r * k + col].abs() > a[best * k + col].abs() {
                r
            } else {
                best
            }
        });
        if !(a[piv * k + col].abs() > T::tol(PIVOT_REL) * scale) {
            return None;
        }
        if piv != col {
            for j in 0..k {
                a.swap(piv * k + j, col * k + j);
            }
            b.swap(piv, col);
        }
        let inv = T::one() / a[col * k + col];
        for r in col + 1..k {
            let f = a[r * k + col] * inv;
            if f == T::zero() {
                continue;
            }
            for j in col..k {
                a[r * k + j] = a[r * k + j] - f * a[col * k + j];
            }
            b[r] = b[r] - f * b[col];
        }
    }
    let mut x = vec![T::zero(); k];
    for r in (0..k).rev() {
        let s = (r + 1..k).fold(b[r], |acc, j| acc - a[r * k + j] * x[j]);
        x[r] = s / a[r * k + r];
    }
    Some(x)
}

fn certify<T: Scalar>(p: &LpProblem<T>, mut res: LpResult<T>, trace: &str) -> Result<LpResult<T>> {
    let feas = T::tol(FEAS_TOL);
    for i in 0..p.rows {
        let ax = p
            .row(i)
            .iter()
            .zip(&res.weights)
            .fold(T::zero(), |acc, (a, w)| acc + *a * *w);
        if ax > p.rhs[i] + feas * (T::one() + p.rhs[i].abs()) {
            return Err(Error::Certification(format!(
                "row {i} violated: {} > {}; trace: {trace}",
                ax.as_f64(),
                p.rhs[i].as_f64()
            )));
        }
    }
    for j in 0..p.cols {
        let aty = (0..p.rows).fold(T::zero(), |acc, i| acc + p.matrix[i * p.cols + j] * res.dual[i]);
        if aty < p.objective[j] - feas * (T::one() + p.objective[j].abs()) {
            return Err(Error::Certification(format!(
                "dual row {j} violated: {} < {}; trace: {trace}",
                aty.as_f64(),
                p.objective[j].as_f64()
            )));
        }
    }
    let by = p
        .rhs
        .iter()
        .zip(&res.dual)
        .fold(T::zero(), |acc, (b, y)| acc + *b * *y);
    let gap = (by - res.objective).abs();
    if gap > T::tol(GAP_TOL) * (T::one() + res.objective.abs()) {
        return Err(Error::Certification(format!(
            "duality gap {} too large; trace: {trace}",
            gap.as_f64()
        )));
    }
    res.duality_gap = gap;
    Ok(res)
}
