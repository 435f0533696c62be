//! Dense two-phase primal simplex.
//!
//! Free and bounded variables are mapped onto non-negative columns before the
//! tableau is built; finite upper bounds become extra `<=` rows. Rows and then
//! columns are scaled by their largest coefficient, and the tableau is
//! refactored from the original rows every hundred pivots and before
//! optimality is declared. Pricing is Dantzig's rule and falls back
//! to Bland's rule permanently after a run of degenerate pivots, which rules
//! out cycling.

use alloc::vec;
use alloc::vec::Vec;

use super::{Matrix, NumericsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimize {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

/// `optimize objective·x` subject to `constraints·x (sense) rhs` and
/// `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub direction: Optimize,
    pub objective: Vec<f64>,
    pub constraints: Matrix,
    pub rhs: Vec<f64>,
    pub senses: Vec<RowSense>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    /// Problem with the default bounds `0 <= x < inf`.
    pub fn new(
        direction: Optimize,
        objective: Vec<f64>,
        constraints: Matrix,
        rhs: Vec<f64>,
        senses: Vec<RowSense>,
    ) -> Result<Self, NumericsError> {
        let n = objective.len();
        let p = Self {
            direction,
            objective,
            constraints,
            rhs,
            senses,
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_bounds(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, NumericsError> {
        self.lower = lower;
        self.upper = upper;
        self.validate()?;
        Ok(self)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        let n = self.objective.len();
        let m = self.constraints.rows();
        let check = |what, expected, found| {
            if expected == found {
                Ok(())
            } else {
                Err(NumericsError::DimensionMismatch {
                    what,
                    expected,
                    found,
                })
            }
        };
        if m > 0 {
            check("constraint columns", n, self.constraints.cols())?;
        }
        check("constraint rhs", m, self.rhs.len())?;
        check("constraint senses", m, self.senses.len())?;
        check("lower bounds", n, self.lower.len())?;
        check("upper bounds", n, self.upper.len())?;
        for (j, (&l, &u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(NumericsError::InvalidBounds { index: j });
            }
        }
        Ok(())
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.constraints.rows() {
            let lhs: f64 = self.constraints.row(i).iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match self.senses[i] {
                RowSense::Le => lhs - self.rhs[i],
                RowSense::Ge => self.rhs[i] - lhs,
                RowSense::Eq => (lhs - self.rhs[i]).abs(),
            };
            worst = worst.max(v);
        }
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        worst
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Meaningful only when `status` is `Optimal`.
    pub values: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// x = offset + y
    Shift { col: usize, offset: f64 },
    /// x = offset - y
    Mirror { col: usize, offset: f64 },
    /// x = y+ - y-
    Split { pos: usize, neg: usize },
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;
const DEGENERATE_RUN: usize = 50;
const HARRIS_SLACK: f64 = 1e-10;
const REFACTOR_EVERY: usize = 100;
const FEAS_TOL: f64 = 1e-9;
const PERTURBATION: f64 = 1e-7;

pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution, NumericsError> {
    problem.validate()?;
    let n = problem.num_vars();

    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (l, u) = (problem.lower[j], problem.upper[j]);
        if l.is_finite() {
            maps.push(VarMap::Shift {
                col: ncols,
                offset: l,
            });
            if u.is_finite() {
                bound_rows.push((ncols, u - l));
            }
            ncols += 1;
        } else if u.is_finite() {
            maps.push(VarMap::Mirror {
                col: ncols,
                offset: u,
            });
            ncols += 1;
        } else {
            maps.push(VarMap::Split {
                pos: ncols,
                neg: ncols + 1,
            });
            ncols += 2;
        }
    }

    // rows over the structural columns
    let mut rows: Vec<(Vec<f64>, RowSense, f64)> = Vec::new();
    for i in 0..problem.constraints.rows() {
        let mut coeffs = vec![0.0; ncols];
        let mut rhs = problem.rhs[i];
        for (j, &a) in problem.constraints.row(i).iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Shift { col, offset } => {
                    coeffs[col] += a;
                    rhs -= a * offset;
                }
                VarMap::Mirror { col, offset } => {
                    coeffs[col] -= a;
                    rhs -= a * offset;
                }
                VarMap::Split { pos, neg } => {
                    coeffs[pos] += a;
                    coeffs[neg] -= a;
                }
            }
        }
        rows.push((coeffs, problem.senses[i], rhs));
    }
    for &(col, width) in &bound_rows {
        let mut coeffs = vec![0.0; ncols];
        coeffs[col] = 1.0;
        rows.push((coeffs, RowSense::Le, width));
    }

    let mut cost = vec![0.0; ncols];
    let sign = match problem.direction {
        Optimize::Minimize => 1.0,
        Optimize::Maximize => -1.0,
    };
    for (j, &c) in problem.objective.iter().enumerate() {
        let c = sign * c;
        match maps[j] {
            VarMap::Shift { col, .. } => cost[col] += c,
            VarMap::Mirror { col, .. } => cost[col] -= c,
            VarMap::Split { pos, neg } => {
                cost[pos] += c;
                cost[neg] -= c;
            }
        }
    }
    // column scaling against the row-normalized coefficients
    let mut col_scale = vec![0.0f64; ncols];
    for (coeffs, _, _) in &rows {
        let rmax = coeffs.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        if rmax > 0.0 {
            for (cs, a) in col_scale.iter_mut().zip(coeffs) {
                *cs = cs.max(a.abs() / rmax);
            }
        }
    }
    for cs in col_scale.iter_mut() {
        *cs = if *cs > 0.0 { 1.0 / *cs } else { 1.0 };
    }
    for (coeffs, _, _) in rows.iter_mut() {
        for (a, cs) in coeffs.iter_mut().zip(&col_scale) {
            *a *= cs;
        }
    }
    for (c, cs) in cost.iter_mut().zip(&col_scale) {
        *c *= cs;
    }
    let y = match Tableau::build(&rows, ncols).solve(&cost)? {
        Outcome::Optimal(y) => y,
        Outcome::Infeasible => {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                values: Vec::new(),
                objective: f64::NAN,
            })
        }
        Outcome::Unbounded => {
            let objective = match problem.direction {
                Optimize::Minimize => f64::NEG_INFINITY,
                Optimize::Maximize => f64::INFINITY,
            };
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                values: Vec::new(),
                objective,
            });
        }
    };

    let y: Vec<f64> = y.iter().zip(&col_scale).map(|(v, cs)| v * cs).collect();
    let mut values: Vec<f64> = maps
        .iter()
        .map(|m| match *m {
            VarMap::Shift { col, offset } => offset + y[col],
            VarMap::Mirror { col, offset } => offset - y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    for (j, v) in values.iter_mut().enumerate() {
        *v = v.clamp(problem.lower[j], problem.upper[j]);
    }
    let objective = problem.objective_at(&values);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        values,
        objective,
    })
}

enum Ratio {
    Leave(usize, f64),
    Unbounded,
    /// only rows with negligible entries bound the step
    Unsafe,
}

enum Outcome {
    Optimal(Vec<f64>),
    Infeasible,
    Unbounded,
}

/// Row-major tableau `[A | b]` plus a reduced-cost row.
struct Tableau {
    m: usize,
    /// structural + slack + artificial columns
    width: usize,
    structural: usize,
    artificial_start: usize,
    a: Vec<f64>,
    /// the tableau as built, for refactorization
    original: Vec<f64>,
    /// right-hand side used when refactoring; differs from the original
    /// while the problem is perturbed
    work_rhs: Vec<f64>,
    perturbed: bool,
    basis: Vec<usize>,
    bland: bool,
    degenerate_run: usize,
    pivots: usize,
    since_refactor: usize,
}

impl Tableau {
    fn build(rows: &[(Vec<f64>, RowSense, f64)], structural: usize) -> Self {
        // scale each row and make its rhs non-negative
        let normalized: Vec<(Vec<f64>, RowSense, f64)> = rows
            .iter()
            .map(|(coeffs, sense, rhs)| {
                let scale = coeffs.iter().fold(0.0f64, |s, v| s.max(v.abs()));
                let mut f = if scale > 0.0 { 1.0 / scale } else { 1.0 };
                let mut sense = *sense;
                if *rhs < 0.0 {
                    f = -f;
                    sense = match sense {
                        RowSense::Le => RowSense::Ge,
                        RowSense::Ge => RowSense::Le,
                        RowSense::Eq => RowSense::Eq,
                    };
                }
                (coeffs.iter().map(|c| c * f).collect(), sense, rhs * f)
            })
            .collect();
        let m = rows.len();
        let slacks = normalized.iter().filter(|r| r.1 != RowSense::Eq).count();
        let arts = normalized.iter().filter(|r| r.1 != RowSense::Le).count();
        let width = structural + slacks + arts;
        let stride = width + 1;
        let mut a = vec![0.0; m * stride];
        let mut basis = vec![0; m];
        let (mut next_slack, mut next_art) = (structural, structural + slacks);
        for (i, (coeffs, sense, rhs)) in normalized.into_iter().enumerate() {
            let row = &mut a[i * stride..(i + 1) * stride];
            row[..structural].copy_from_slice(&coeffs);
            row[width] = rhs;
            match sense {
                RowSense::Le => {
                    row[next_slack] = 1.0;
                    basis[i] = next_slack;
                    next_slack += 1;
                }
                RowSense::Ge => {
                    row[next_slack] = -1.0;
                    next_slack += 1;
                    row[next_art] = 1.0;
                    basis[i] = next_art;
                    next_art += 1;
                }
                RowSense::Eq => {
                    row[next_art] = 1.0;
                    basis[i] = next_art;
                    next_art += 1;
                }
            }
        }
        Self {
            m,
            width,
            structural,
            artificial_start: structural + slacks,
            original: a.clone(),
            work_rhs: (0..m).map(|i| a[i * stride + width]).collect(),
            perturbed: false,
            a,
            basis,
            bland: false,
            degenerate_run: 0,
            pivots: 0,
            since_refactor: 0,
        }
    }

    #[inline]
    fn stride(&self) -> usize {
        self.width + 1
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.stride() + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.a[i * self.stride() + self.width]
    }

    fn solve(mut self, cost: &[f64]) -> Result<Outcome, NumericsError> {
        let limit = 50_000 + 200 * (self.m + self.width);

        // phase 1
        if self.artificial_start < self.width {
            let mut c1 = vec![0.0; self.width];
            for c in c1.iter_mut().skip(self.artificial_start) {
                *c = 1.0;
            }
            let mut z = self.reduced_costs(&c1);
            self.iterate(&c1, &mut z, self.width, true, limit)?;
            let scale = 1.0 + (0..self.m).fold(0.0f64, |s, i| s.max(self.rhs(i)));
            let infeas: f64 = (0..self.m)
                .filter(|&i| self.basis[i] >= self.artificial_start)
                .map(|i| self.rhs(i))
                .sum();
            if infeas > 1e-9 * scale {
                return Ok(Outcome::Infeasible);
            }
            self.drive_out_artificials();
        }

        // phase 2
        let cmax = cost.iter().fold(0.0f64, |s, c| s.max(c.abs()));
        let cscale = if cmax > 0.0 { 1.0 / cmax } else { 1.0 };
        let mut c2 = vec![0.0; self.width];
        for (j, &c) in cost.iter().enumerate() {
            c2[j] = c * cscale;
        }
        let mut z = self.reduced_costs(&c2);
        if !self.iterate(&c2, &mut z, self.artificial_start, false, limit)? {
            return Ok(Outcome::Unbounded);
        }

        if self.perturbed {
            self.remove_perturbation(&c2, limit)?;
        }
        let scale = 1.0 + (0..self.m).fold(0.0f64, |s, i| s.max(self.rhs(i).abs()));
        let worst = (0..self.m).fold(0.0f64, |w, i| w.min(self.rhs(i)));
        if worst < -1e-7 * scale {
            return Err(NumericsError::Unstable { violation: -worst });
        }
        let mut y = vec![0.0; self.structural];
        for i in 0..self.m {
            let b = self.basis[i];
            if b < self.structural {
                y[b] = self.rhs(i).max(0.0);
            }
        }
        Ok(Outcome::Optimal(y))
    }

    fn reduced_costs(&self, c: &[f64]) -> Vec<f64> {
        let mut z = c.to_vec();
        for i in 0..self.m {
            let cb = c[self.basis[i]];
            if cb != 0.0 {
                for (j, zj) in z.iter_mut().enumerate() {
                    *zj -= cb * self.at(i, j);
                }
            }
        }
        z
    }

    /// Runs simplex pivots with entering columns restricted to `< allowed`.
    /// Returns `false` if unbounded.
    fn iterate(
        &mut self,
        c: &[f64],
        z: &mut [f64],
        allowed: usize,
        phase_one: bool,
        limit: usize,
    ) -> Result<bool, NumericsError> {
        // columns that looked improving but had no safe pivot row; in phase
        // one an unbounded column can only arise from rounding
        let mut blocked = vec![false; allowed];
        loop {
            if self.pivots > limit {
                return Err(NumericsError::IterationLimit {
                    iterations: self.pivots,
                });
            }
            let entering = if self.bland {
                (0..allowed).find(|&j| z[j] < -COST_TOL && !blocked[j])
            } else {
                let mut best = None;
                let mut best_val = -COST_TOL;
                for (j, &zj) in z.iter().enumerate().take(allowed) {
                    if zj < best_val && !blocked[j] {
                        best_val = zj;
                        best = Some(j);
                    }
                }
                best
            };
            let Some(e) = entering else {
                // confirm optimality on a freshly factored tableau
                if self.since_refactor > 0 && self.refactor() {
                    z.copy_from_slice(&self.reduced_costs(c));
                    continue;
                }
                return Ok(true);
            };

            let (r, ratio) = match self.ratio_test(e) {
                Ratio::Leave(r, ratio) => (r, ratio),
                Ratio::Unsafe => {
                    blocked[e] = true;
                    continue;
                }
                Ratio::Unbounded => {
                    if phase_one {
                        blocked[e] = true;
                        continue;
                    }
                    return Ok(false);
                }
            };
            blocked.iter_mut().for_each(|b| *b = false);
            if ratio <= 1e-12 {
                self.degenerate_run += 1;
                if self.degenerate_run > DEGENERATE_RUN {
                    if self.perturbed {
                        self.bland = true;
                    } else {
                        self.perturb();
                        self.degenerate_run = 0;
                    }
                }
            } else {
                self.degenerate_run = 0;
            }
            self.pivot(r, e, z);
            if self.since_refactor >= REFACTOR_EVERY && self.refactor() {
                z.copy_from_slice(&self.reduced_costs(c));
            }
        }
    }

    /// Lifts every non-artificial basic value by a small distinct amount,
    /// which breaks the ties behind degenerate pivots. The right-hand side
    /// is moved to match, `b' = b + B d`, so the current basis stays feasible
    /// and any point feasible for `b` stays feasible (shifted) for `b'`.
    fn perturb(&mut self) {
        let stride = self.stride();
        let mut delta = vec![0.0; self.m];
        for (i, d) in delta.iter_mut().enumerate() {
            if self.basis[i] < self.artificial_start {
                let spread = 1.0 + ((i as f64 * 0.618_033_988_749_895) % 1.0);
                *d = PERTURBATION * (1.0 + self.rhs(i).abs()) * spread;
                self.a[i * stride + self.width] += *d;
            }
        }
        for (r, b) in self.work_rhs.iter_mut().enumerate() {
            *b += (0..self.m)
                .map(|i| self.original[r * stride + self.basis[i]] * delta[i])
                .sum::<f64>();
        }
        self.perturbed = true;
    }

    /// Restores the true right-hand side at an optimal basis and repairs the
    /// small primal infeasibility this leaves with dual simplex pivots.
    fn remove_perturbation(&mut self, c: &[f64], limit: usize) -> Result<(), NumericsError> {
        let stride = self.stride();
        for (r, b) in self.work_rhs.iter_mut().enumerate() {
            *b = self.original[r * stride + self.width];
        }
        self.perturbed = false;
        if !self.refactor() {
            return Err(NumericsError::Unstable { violation: f64::INFINITY });
        }
        let mut z = self.reduced_costs(c);
        let allowed = self.artificial_start;
        loop {
            if self.pivots > limit {
                return Err(NumericsError::IterationLimit {
                    iterations: self.pivots,
                });
            }
            let scale = 1.0 + (0..self.m).fold(0.0f64, |s, i| s.max(self.rhs(i).abs()));
            let leave = (0..self.m)
                .filter(|&i| self.rhs(i) < -FEAS_TOL * scale)
                .min_by(|&a, &b| self.rhs(a).total_cmp(&self.rhs(b)));
            let Some(r) = leave else {
                return Ok(());
            };
            let row_max = (0..allowed).fold(0.0f64, |s, j| s.max(self.at(r, j).abs()));
            let tol = (1e-9 * row_max).max(PIVOT_TOL);
            let entering = (0..allowed)
                .filter(|&j| self.at(r, j) < -tol)
                .min_by(|&a, &b| {
                    let ra = z[a].max(0.0) / -self.at(r, a);
                    let rb = z[b].max(0.0) / -self.at(r, b);
                    ra.total_cmp(&rb).then(self.at(r, a).total_cmp(&self.at(r, b)))
                });
            let Some(e) = entering else {
                // no column can repair the row
                return Err(NumericsError::Unstable {
                    violation: -self.rhs(r),
                });
            };
            self.pivot(r, e, &mut z);
            if self.since_refactor >= REFACTOR_EVERY && self.refactor() {
                z = self.reduced_costs(c);
            }
        }
    }

    /// Recomputes the tableau from the original rows and the current basis
    /// by Gaussian elimination with partial pivoting, discarding the rounding
    /// accumulated over pivots. Returns `false` and leaves the tableau alone
    /// if the basis matrix is numerically singular.
    fn refactor(&mut self) -> bool {
        let (m, stride) = (self.m, self.stride());
        let w = m + stride;
        let mut aug = vec![0.0; m * w];
        for i in 0..m {
            for (k, &b) in self.basis.iter().enumerate() {
                aug[i * w + k] = self.original[i * stride + b];
            }
            aug[i * w + m..(i + 1) * w].copy_from_slice(&self.original[i * stride..(i + 1) * stride]);
            aug[(i + 1) * w - 1] = self.work_rhs[i];
        }
        for k in 0..m {
            let (p, pmax) = (k..m).fold((k, 0.0f64), |(bi, bv), i| {
                let v = aug[i * w + k].abs();
                if v > bv {
                    (i, v)
                } else {
                    (bi, bv)
                }
            });
            if pmax < 1e-13 {
                self.since_refactor = 0;
                return false;
            }
            if p != k {
                for j in 0..w {
                    aug.swap(k * w + j, p * w + j);
                }
            }
            let d = aug[k * w + k];
            for j in k..w {
                aug[k * w + j] /= d;
            }
            for i in 0..m {
                if i == k {
                    continue;
                }
                let f = aug[i * w + k];
                if f != 0.0 {
                    for j in k..w {
                        aug[i * w + j] -= f * aug[k * w + j];
                    }
                }
            }
        }
        for i in 0..m {
            self.a[i * stride..(i + 1) * stride].copy_from_slice(&aug[i * w + m..(i + 1) * w]);
            self.a[i * stride + self.basis[i]] = 1.0;
        }
        self.since_refactor = 0;
        true
    }

    /// Leaving row for entering column `e`. Entries below a tolerance
    /// relative to the column's largest are never pivots. Outside Bland mode
    /// a two-pass (Harris) test picks the largest pivot among rows whose
    /// ratio is within a small feasibility slack of the minimum; in Bland
    /// mode ties go to the lowest basic index.
    fn ratio_test(&self, e: usize) -> Ratio {
        let col_max = (0..self.m).fold(0.0f64, |s, i| s.max(self.at(i, e).abs()));
        let tol = (1e-9 * col_max).max(PIVOT_TOL);
        if self.bland {
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let aie = self.at(i, e);
                if aie > tol {
                    let ratio = self.rhs(i).max(0.0) / aie;
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            let tie = (ratio - lr).abs() <= 1e-12 * ratio.max(lr);
                            if ratio < lr && !tie || tie && self.basis[i] < self.basis[li] {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            return self.checked(e, tol, leave);
        }
        let mut bound = f64::INFINITY;
        for i in 0..self.m {
            let aie = self.at(i, e);
            if aie > tol {
                bound = bound.min((self.rhs(i).max(0.0) + HARRIS_SLACK) / aie);
            }
        }
        if bound == f64::INFINITY {
            return self.checked(e, tol, None);
        }
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let aie = self.at(i, e);
            if aie > tol {
                let ratio = self.rhs(i).max(0.0) / aie;
                if ratio <= bound && leave.is_none_or(|(li, _)| aie > self.at(li, e)) {
                    leave = Some((i, ratio));
                }
            }
        }
        self.checked(e, tol, leave)
    }

    /// Rejects a step that would drive a row whose entry fell below the pivot
    /// tolerance measurably negative.
    fn checked(&self, e: usize, tol: f64, leave: Option<(usize, f64)>) -> Ratio {
        let step = leave.map_or(f64::INFINITY, |(_, t)| t);
        for i in 0..self.m {
            let aie = self.at(i, e);
            if aie > 0.0 && aie <= tol && self.rhs(i) - aie * step < -FEAS_TOL {
                return Ratio::Unsafe;
            }
        }
        match leave {
            Some((r, t)) => Ratio::Leave(r, t),
            None => Ratio::Unbounded,
        }
    }

    fn pivot(&mut self, r: usize, e: usize, z: &mut [f64]) {
        let stride = self.stride();
        let p = self.at(r, e);
        {
            let row = &mut self.a[r * stride..(r + 1) * stride];
            for v in row.iter_mut() {
                *v /= p;
            }
            row[e] = 1.0;
        }
        let pivot_row: Vec<f64> = self.a[r * stride..(r + 1) * stride].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.a[i * stride + e];
            if f != 0.0 {
                let row = &mut self.a[i * stride..(i + 1) * stride];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[e] = 0.0;
            }
        }
        let f = z[e];
        if f != 0.0 {
            for (zj, pv) in z.iter_mut().zip(&pivot_row[..self.width]) {
                *zj -= f * pv;
            }
            z[e] = 0.0;
        }
        self.basis[r] = e;
        self.pivots += 1;
        self.since_refactor += 1;
    }

    fn drive_out_artificials(&mut self) {
        let mut dummy = vec![0.0; self.width];
        for i in 0..self.m {
            if self.basis[i] < self.artificial_start {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.artificial_start {
                let v = self.at(i, j).abs();
                if v > 1e-9 && best.is_none_or(|(_, b)| v > b) {
                    best = Some((j, v));
                }
            }
            if let Some((j, _)) = best {
                self.pivot(i, j, &mut dummy);
            }
            // otherwise the row is redundant: its artificial stays basic at
            // zero and can never move because the row has no eligible entries
        }
    }
}
