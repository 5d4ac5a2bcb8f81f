use std::collections::BTreeMap;

use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, Variable};

use super::SolverError;
use crate::formulation::Sense;

pub const FEAS_TOL: f64 = 1e-7;
const OPT_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 64;
const DEGENERATE_BEFORE_BLAND: usize = 40;

#[derive(Clone, Debug, PartialEq)]
pub struct LpRow {
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `min cost·x` over rows with finite variable bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem {
    pub cost: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub rows: Vec<LpRow>,
}

impl LpProblem {
    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    /// Rows divided by their largest coefficient magnitude.
    pub fn equilibrated(&self) -> LpProblem {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let s = r.terms.iter().fold(0.0f64, |m, (_, a)| m.max(a.abs()));
                if s > 0.0 {
                    LpRow {
                        terms: r.terms.iter().map(|(j, a)| (*j, a / s)).collect(),
                        sense: r.sense,
                        rhs: r.rhs / s,
                    }
                } else {
                    r.clone()
                }
            })
            .collect();
        LpProblem {
            rows,
            ..self.clone()
        }
    }

    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for r in &self.rows {
            let scale = r.terms.iter().fold(1.0f64, |m, (_, a)| m.max(a.abs()));
            let lhs: f64 = r.terms.iter().map(|(j, a)| a * x[*j]).sum();
            let v = match r.sense {
                Sense::Le => lhs - r.rhs,
                Sense::Ge => r.rhs - lhs,
                Sense::Eq => (lhs - r.rhs).abs(),
            };
            worst = worst.max(v / scale);
        }
        for j in 0..x.len() {
            worst = worst.max(self.lo[j] - x[j]).max(x[j] - self.hi[j]);
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    pub objective: f64,
    pub x: Vec<f64>,
}

impl LpResult {
    fn infeasible() -> Self {
        LpResult {
            status: LpStatus::Infeasible,
            objective: f64::INFINITY,
            x: Vec::new(),
        }
    }
}

/// Dense bounded-variable revised simplex with an explicit basis inverse.
///
/// Row `i` is `a_i·x + s_i = b_i`; the slack bounds encode the sense. Phase 1
/// minimises the sum of bound infeasibilities of the basic variables.
#[derive(Clone, Debug)]
pub struct DenseSimplex {
    m: usize,
    n: usize,
    /// Column-major structural matrix.
    a: Vec<f64>,
    b: Vec<f64>,
    cost: Vec<f64>,
    cost_scale: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    at_upper: Vec<bool>,
    x: Vec<f64>,
    binv: Vec<f64>,
    pivots: usize,
    pub iterations: usize,
}

impl DenseSimplex {
    pub fn new(problem: &LpProblem) -> Self {
        let p = problem.equilibrated();
        let m = p.rows.len();
        let n = p.num_vars();
        let mut a = vec![0.0; m * n];
        let mut b = vec![0.0; m];
        let mut lo = p.lo.clone();
        let mut hi = p.hi.clone();
        for (i, r) in p.rows.iter().enumerate() {
            for (j, v) in &r.terms {
                a[j * m + i] += v;
            }
            b[i] = r.rhs;
            let (sl, sh) = match r.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lo.push(sl);
            hi.push(sh);
        }
        let cost_scale = p.cost.iter().fold(0.0f64, |s, c| s.max(c.abs()));
        let cost_scale = if cost_scale > 0.0 { cost_scale } else { 1.0 };
        let mut cost: Vec<f64> = p.cost.iter().map(|c| c / cost_scale).collect();
        cost.resize(n + m, 0.0);
        let mut s = DenseSimplex {
            m,
            n,
            a,
            b,
            cost,
            cost_scale,
            lo,
            hi,
            basis: Vec::new(),
            in_basis: Vec::new(),
            at_upper: Vec::new(),
            x: vec![0.0; n + m],
            binv: Vec::new(),
            pivots: 0,
            iterations: 0,
        };
        s.slack_basis();
        s
    }

    fn slack_basis(&mut self) {
        let (m, n) = (self.m, self.n);
        self.basis = (n..n + m).collect();
        self.in_basis = (0..n + m).map(|j| j >= n).collect();
        self.at_upper = (0..n + m).map(|j| self.lo[j] == f64::NEG_INFINITY).collect();
        self.binv = vec![0.0; m * m];
        for i in 0..m {
            self.binv[i * m + i] = 1.0;
        }
        self.pivots = 0;
        self.place_nonbasic();
        self.compute_basic();
    }

    fn place_nonbasic(&mut self) {
        for j in 0..self.n + self.m {
            if !self.in_basis[j] {
                self.x[j] = if self.at_upper[j] { self.hi[j] } else { self.lo[j] };
            }
        }
    }

    fn column(&self, j: usize, out: &mut [f64]) {
        if j < self.n {
            out.copy_from_slice(&self.a[j * self.m..(j + 1) * self.m]);
        } else {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[j - self.n] = 1.0;
        }
    }

    fn col_dot(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            self.a[j * self.m..(j + 1) * self.m]
                .iter()
                .zip(y)
                .map(|(a, y)| a * y)
                .sum()
        } else {
            y[j - self.n]
        }
    }

    /// x_B = B⁻¹ (b − N x_N).
    fn compute_basic(&mut self) {
        let m = self.m;
        let mut rhs = self.b.clone();
        for j in 0..self.n {
            if !self.in_basis[j] && self.x[j] != 0.0 {
                let xj = self.x[j];
                for i in 0..m {
                    rhs[i] -= self.a[j * m + i] * xj;
                }
            }
        }
        for j in self.n..self.n + m {
            if !self.in_basis[j] {
                rhs[j - self.n] -= self.x[j];
            }
        }
        for i in 0..m {
            let v: f64 = (0..m).map(|k| self.binv[i * m + k] * rhs[k]).sum();
            self.x[self.basis[i]] = v;
        }
    }

    /// Gauss-Jordan inversion of the basis; falls back to the slack basis
    /// when the basis matrix is singular.
    fn refactor(&mut self) {
        let m = self.m;
        let mut bm = vec![0.0; m * m];
        let mut col = vec![0.0; m];
        for (k, &j) in self.basis.iter().enumerate() {
            self.column(j, &mut col);
            for i in 0..m {
                bm[i * m + k] = col[i];
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for k in 0..m {
            let (mut piv, mut best) = (k, bm[k * m + k].abs());
            for i in k + 1..m {
                if bm[i * m + k].abs() > best {
                    best = bm[i * m + k].abs();
                    piv = i;
                }
            }
            if best < 1e-12 {
                self.slack_basis();
                return;
            }
            if piv != k {
                for c in 0..m {
                    bm.swap(k * m + c, piv * m + c);
                    inv.swap(k * m + c, piv * m + c);
                }
            }
            let d = bm[k * m + k];
            for c in 0..m {
                bm[k * m + c] /= d;
                inv[k * m + c] /= d;
            }
            for i in 0..m {
                if i != k {
                    let f = bm[i * m + k];
                    if f != 0.0 {
                        for c in 0..m {
                            bm[i * m + c] -= f * bm[k * m + c];
                            inv[i * m + c] -= f * inv[k * m + c];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        self.pivots = 0;
        self.compute_basic();
    }

    /// Changes the bounds of structural variable `j`; the next `solve`
    /// restarts from the current basis.
    pub fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        self.lo[j] = lo;
        self.hi[j] = hi;
        if !self.in_basis[j] {
            self.at_upper[j] = (self.at_upper[j] && hi.is_finite()) || !lo.is_finite();
            self.x[j] = if self.at_upper[j] { hi } else { lo };
            self.compute_basic();
        }
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lo[j], self.hi[j])
    }

    fn infeasibility(&self, k: usize) -> f64 {
        if self.x[k] < self.lo[k] - FEAS_TOL {
            -1.0
        } else if self.x[k] > self.hi[k] + FEAS_TOL {
            1.0
        } else {
            0.0
        }
    }

    pub fn solve(&mut self) -> Result<LpResult, SolverError> {
        let (m, n) = (self.m, self.n);
        if self.lo.iter().zip(&self.hi).any(|(l, h)| l > h) {
            return Ok(LpResult::infeasible());
        }
        let max_iter = 50 * (m + n) + 1_000;
        let mut y = vec![0.0; m];
        let mut w = vec![0.0; m];
        let mut col = vec![0.0; m];
        let mut degenerate = 0usize;
        let mut retried = false;
        loop {
            self.iterations += 1;
            if self.iterations > max_iter {
                return Err(SolverError::Numerical(format!(
                    "dense simplex exceeded {max_iter} iterations ({m} rows, {n} columns)"
                )));
            }
            let d_b: Vec<f64> = self.basis.iter().map(|&k| self.infeasibility(k)).collect();
            let phase1 = d_b.iter().any(|v| *v != 0.0);
            let d_b: Vec<f64> = if phase1 {
                d_b
            } else {
                self.basis.iter().map(|&k| self.cost[k]).collect()
            };
            for c in 0..m {
                y[c] = (0..m).map(|i| d_b[i] * self.binv[i * m + c]).sum();
            }

            let bland = degenerate >= DEGENERATE_BEFORE_BLAND;
            let mut entering: Option<(usize, f64, f64)> = None;
            for j in 0..n + m {
                if self.in_basis[j] || self.lo[j] == self.hi[j] {
                    continue;
                }
                let cj = if phase1 { 0.0 } else { self.cost[j] };
                let d = cj - self.col_dot(j, &y);
                let dir = if !self.at_upper[j] && d < -OPT_TOL && self.hi[j] > self.x[j] {
                    1.0
                } else if self.at_upper[j] && d > OPT_TOL && self.lo[j] < self.x[j] {
                    -1.0
                } else {
                    continue;
                };
                let better = match entering {
                    None => true,
                    Some((_, _, best)) => !bland && d.abs() > best,
                };
                if better {
                    entering = Some((j, dir, d.abs()));
                }
            }
            let Some((q, dir, _)) = entering else {
                if phase1 {
                    if !retried {
                        retried = true;
                        self.refactor();
                        continue;
                    }
                    return Ok(LpResult::infeasible());
                }
                return self.finish();
            };

            self.column(q, &mut col);
            for i in 0..m {
                w[i] = (0..m).map(|k| self.binv[i * m + k] * col[k]).sum();
            }

            // Harris two-pass ratio test; each limit records the bound it hits.
            let flip = self.hi[q] - self.lo[q];
            let limit = |i: usize, relax: f64| -> (f64, bool) {
                let k = self.basis[i];
                let rate = -dir * w[i];
                if rate.abs() <= PIVOT_TOL {
                    return (f64::INFINITY, false);
                }
                let xk = self.x[k];
                if rate < 0.0 {
                    if xk < self.lo[k] - FEAS_TOL {
                        (f64::INFINITY, false)
                    } else if xk > self.hi[k] + FEAS_TOL {
                        ((xk - self.hi[k] + relax) / -rate, true)
                    } else {
                        ((xk - self.lo[k] + relax) / -rate, false)
                    }
                } else if xk > self.hi[k] + FEAS_TOL {
                    (f64::INFINITY, false)
                } else if xk < self.lo[k] - FEAS_TOL {
                    ((self.lo[k] - xk + relax) / rate, false)
                } else {
                    ((self.hi[k] - xk + relax) / rate, true)
                }
            };
            let mut t_relaxed = flip;
            for i in 0..m {
                t_relaxed = t_relaxed.min(limit(i, FEAS_TOL).0);
            }
            let mut leave: Option<(usize, bool)> = None;
            let mut t = flip;
            if t_relaxed < flip {
                let mut best_w = 0.0;
                for i in 0..m {
                    let (ti, up) = limit(i, 0.0);
                    if ti <= t_relaxed && w[i].abs() > best_w {
                        best_w = w[i].abs();
                        leave = Some((i, up));
                        t = ti.max(0.0);
                    }
                }
            }
            if t.is_infinite() {
                if phase1 {
                    return Err(SolverError::Numerical("unbounded ray during phase 1".into()));
                }
                return Ok(LpResult {
                    status: LpStatus::Unbounded,
                    objective: f64::NEG_INFINITY,
                    x: self.x[..n].to_vec(),
                });
            }
            degenerate = if t < 1e-12 { degenerate + 1 } else { 0 };

            self.x[q] += dir * t;
            for i in 0..m {
                self.x[self.basis[i]] -= dir * t * w[i];
            }
            match leave {
                None => {
                    self.at_upper[q] = dir > 0.0;
                    self.x[q] = if self.at_upper[q] { self.hi[q] } else { self.lo[q] };
                }
                Some((r, to_upper)) => {
                    let k = self.basis[r];
                    self.in_basis[k] = false;
                    self.at_upper[k] = to_upper;
                    self.x[k] = if to_upper { self.hi[k] } else { self.lo[k] };
                    self.in_basis[q] = true;
                    self.basis[r] = q;
                    let p = w[r];
                    for c in 0..m {
                        self.binv[r * m + c] /= p;
                    }
                    for i in 0..m {
                        if i != r && w[i] != 0.0 {
                            let f = w[i];
                            for c in 0..m {
                                self.binv[i * m + c] -= f * self.binv[r * m + c];
                            }
                        }
                    }
                    self.pivots += 1;
                    if self.pivots >= REFACTOR_EVERY {
                        self.refactor();
                    }
                }
            }
        }
    }

    fn finish(&mut self) -> Result<LpResult, SolverError> {
        self.refactor();
        let infeasible = self.basis.iter().any(|&k| self.infeasibility(k) != 0.0);
        if infeasible {
            // Drift exposed by the fresh factorization; continue from here.
            return self.solve();
        }
        let x: Vec<f64> = (0..self.n).map(|j| self.x[j].clamp(self.lo[j], self.hi[j])).collect();
        let objective = self.cost_scale * (0..self.n).map(|j| self.cost[j] * x[j]).sum::<f64>();
        Ok(LpResult {
            status: LpStatus::Optimal,
            objective,
            x,
        })
    }
}

/// Sparse engine backed by `microlp`, re-solved from a parent state by fixing
/// variables.
#[derive(Clone)]
pub struct SparseLp {
    vars: Vec<Variable>,
    cost: Vec<f64>,
    base_lo: Vec<f64>,
    base_hi: Vec<f64>,
    state: Option<microlp::Solution>,
    fixed: BTreeMap<usize, f64>,
}

fn microlp_error(e: microlp::Error) -> Result<Option<microlp::Solution>, SolverError> {
    match e {
        microlp::Error::Infeasible => Ok(None),
        microlp::Error::Unbounded => Err(SolverError::Numerical("sparse LP reported an unbounded relaxation".into())),
        other => Err(SolverError::Numerical(format!("sparse LP failure: {other:?}"))),
    }
}

impl SparseLp {
    pub fn new(problem: &LpProblem) -> Result<(Self, LpResult), SolverError> {
        let p = problem.equilibrated();
        let mut lp = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<Variable> = (0..p.num_vars())
            .map(|j| lp.add_var(p.cost[j], (p.lo[j], p.hi[j])))
            .collect();
        for r in &p.rows {
            let mut e = LinearExpr::empty();
            for (j, a) in &r.terms {
                e.add(vars[*j], *a);
            }
            let op = match r.sense {
                Sense::Le => ComparisonOp::Le,
                Sense::Ge => ComparisonOp::Ge,
                Sense::Eq => ComparisonOp::Eq,
            };
            lp.add_constraint(e, op, r.rhs);
        }
        let state = match lp.solve() {
            Ok(outcome) => Some(outcome.into_solution().map_err(|_| SolverError::Numerical("sparse LP interrupted".into()))?),
            Err(e) => microlp_error(e)?,
        };
        let engine = SparseLp {
            vars,
            cost: p.cost.clone(),
            base_lo: p.lo.clone(),
            base_hi: p.hi.clone(),
            state,
            fixed: BTreeMap::new(),
        };
        let result = engine.result();
        Ok((engine, result))
    }

    pub fn result(&self) -> LpResult {
        match &self.state {
            None => LpResult::infeasible(),
            Some(sol) => {
                let x: Vec<f64> = self
                    .vars
                    .iter()
                    .enumerate()
                    .map(|(j, v)| sol.var_value_raw(*v).clamp(self.base_lo[j], self.base_hi[j]))
                    .collect();
                let objective = self.cost.iter().zip(&x).map(|(c, x)| c * x).sum();
                LpResult {
                    status: LpStatus::Optimal,
                    objective,
                    x,
                }
            }
        }
    }

    /// Fixes `j` to `value` and re-solves with the dual simplex.
    pub fn fix(&mut self, j: usize, value: f64) -> Result<LpResult, SolverError> {
        self.fixed.insert(j, value);
        let Some(sol) = self.state.take() else {
            return Ok(LpResult::infeasible());
        };
        self.state = match sol.fix_var(self.vars[j], value) {
            Ok(outcome) => Some(outcome.into_solution().map_err(|_| SolverError::Numerical("sparse LP interrupted".into()))?),
            Err(e) => microlp_error(e)?,
        };
        Ok(self.result())
    }

    pub fn fixed(&self) -> &BTreeMap<usize, f64> {
        &self.fixed
    }
}
