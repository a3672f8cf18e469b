//! Dense two-phase primal simplex with Bland's rule.
//!
//! Generic over [`Field`]; with [`Rational`](crate::Rational) every pivot
//! is exact, so optimal values, dual multipliers and Farkas certificates
//! are exact too. Problems are stated as
//!
//! ```text
//! maximize  c . x
//! subject to  row_i . x (= | <= | >=) rhs_i
//!             x_j >= 0  (or free)
//! ```

use crate::error::{Error, Result};
use crate::scalar::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

#[derive(Clone, Debug)]
struct Constraint<T> {
    coeffs: Vec<T>,
    rel: Relation,
    rhs: T,
}

#[derive(Clone, Debug)]
pub struct LinearProgram<T> {
    n_vars: usize,
    free: Vec<bool>,
    constraints: Vec<Constraint<T>>,
    objective: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub value: T,
    /// One multiplier per constraint, in insertion order: `c - y^T A` is
    /// nonpositive on every nonnegative variable.
    pub duals: Vec<T>,
}

#[derive(Clone, Debug)]
pub enum LpOutcome<T> {
    Optimal(LpSolution<T>),
    /// No feasible point. `farkas` has one entry per constraint and
    /// satisfies `y^T A <= 0` on nonnegative variables, `= 0` on free ones,
    /// sign-compatible with each inequality, and `y . rhs > 0`.
    Infeasible { farkas: Vec<T> },
    Unbounded,
}

impl<T: Field> LinearProgram<T> {
    pub fn new(n_vars: usize) -> Self {
        LinearProgram {
            n_vars,
            free: vec![false; n_vars],
            constraints: Vec::new(),
            objective: vec![T::zero(); n_vars],
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn set_free(&mut self, var: usize) {
        self.free[var] = true;
    }

    pub fn add(&mut self, coeffs: Vec<T>, rel: Relation, rhs: T) {
        assert_eq!(coeffs.len(), self.n_vars, "constraint width");
        self.constraints.push(Constraint { coeffs, rel, rhs });
    }

    pub fn add_sparse(&mut self, terms: &[(usize, T)], rel: Relation, rhs: T) {
        let mut coeffs = vec![T::zero(); self.n_vars];
        for (j, c) in terms {
            coeffs[*j] = coeffs[*j].clone() + c.clone();
        }
        self.add(coeffs, rel, rhs);
    }

    pub fn set_objective(&mut self, c: Vec<T>) {
        assert_eq!(c.len(), self.n_vars, "objective width");
        self.objective = c;
    }

    /// Feasibility only: the objective is ignored.
    pub fn feasibility(&self) -> Result<LpOutcome<T>> {
        let mut lp = self.clone();
        lp.objective = vec![T::zero(); self.n_vars];
        lp.solve()
    }

    pub fn solve(&self) -> Result<LpOutcome<T>> {
        // column layout: user vars (free ones split into +/-), then one
        // slack per inequality
        let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(self.n_vars);
        let mut n_cols = 0;
        for j in 0..self.n_vars {
            if self.free[j] {
                col_of.push((n_cols, Some(n_cols + 1)));
                n_cols += 2;
            } else {
                col_of.push((n_cols, None));
                n_cols += 1;
            }
        }
        let mut slack_of = vec![None; self.constraints.len()];
        for (i, c) in self.constraints.iter().enumerate() {
            if c.rel != Relation::Eq {
                slack_of[i] = Some(n_cols);
                n_cols += 1;
            }
        }
        let m = self.constraints.len();
        let mut a = vec![vec![T::zero(); n_cols]; m];
        let mut b = vec![T::zero(); m];
        for (i, c) in self.constraints.iter().enumerate() {
            for (j, v) in c.coeffs.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let (p, n) = col_of[j];
                a[i][p] = v.clone();
                if let Some(n) = n {
                    a[i][n] = -v.clone();
                }
            }
            match (c.rel, slack_of[i]) {
                (Relation::Le, Some(s)) => a[i][s] = T::one(),
                (Relation::Ge, Some(s)) => a[i][s] = -T::one(),
                _ => {}
            }
            b[i] = c.rhs.clone();
        }
        let mut cost = vec![T::zero(); n_cols];
        for (j, v) in self.objective.iter().enumerate() {
            let (p, n) = col_of[j];
            cost[p] = v.clone();
            if let Some(n) = n {
                cost[n] = -v.clone();
            }
        }
        let raw = solve_standard(a, b, &cost)?;
        Ok(match raw {
            Standard::Optimal { x, value, y } => {
                let xs = col_of
                    .iter()
                    .map(|&(p, n)| match n {
                        Some(n) => x[p].clone() - x[n].clone(),
                        None => x[p].clone(),
                    })
                    .collect();
                LpOutcome::Optimal(LpSolution { x: xs, value, duals: y })
            }
            Standard::Infeasible { y } => LpOutcome::Infeasible { farkas: y },
            Standard::Unbounded => LpOutcome::Unbounded,
        })
    }
}

enum Standard<T> {
    Optimal { x: Vec<T>, value: T, y: Vec<T> },
    Infeasible { y: Vec<T> },
    Unbounded,
}

struct Tableau<T> {
    m: usize,
    n: usize,
    // m rows of n original + m artificial + 1 rhs columns
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    // reduced costs d_j = c_j - c_B B^-1 A_j over the same columns
    reduced: Vec<T>,
}

impl<T: Field> Tableau<T> {
    fn rhs(&self) -> usize {
        self.n + self.m
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let width = self.n + self.m + 1;
        let piv = self.rows[r][s].clone();
        if !piv.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v = v.clone() / piv.clone();
                }
            }
        }
        let nz: Vec<usize> = (0..width).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let prow: Vec<T> = nz.iter().map(|&j| self.rows[r][j].clone()).collect();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.rows[i][s].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            for (&j, pv) in nz.iter().zip(&prow) {
                row[j] = row[j].clone() - f.clone() * pv.clone();
            }
            if !T::EXACT {
                row[s] = T::zero();
            }
        }
        let f = self.reduced[s].clone();
        if !f.is_zero() {
            for (&j, pv) in nz.iter().zip(&prow) {
                self.reduced[j] = self.reduced[j].clone() - f.clone() * pv.clone();
            }
            if !T::EXACT {
                self.reduced[s] = T::zero();
            }
        }
        self.basis[r] = s;
    }

    fn set_costs(&mut self, cost: &[T]) {
        let width = self.n + self.m + 1;
        let mut d: Vec<T> = (0..width).map(|j| if j < cost.len() { cost[j].clone() } else { T::zero() }).collect();
        for i in 0..self.m {
            let cb = if self.basis[i] < cost.len() { cost[self.basis[i]].clone() } else { T::zero() };
            if cb.is_zero() {
                continue;
            }
            for (j, dj) in d.iter_mut().enumerate() {
                let v = &self.rows[i][j];
                if !v.is_zero() {
                    *dj = dj.clone() - cb.clone() * v.clone();
                }
            }
        }
        self.reduced = d;
    }

    /// Run Bland's rule over columns `0..limit`. Returns `false` when the
    /// objective is unbounded.
    fn optimize(&mut self, limit: usize) -> bool {
        let rhs = self.rhs();
        loop {
            let Some(s) = (0..limit).find(|&j| self.reduced[j].is_strictly_positive()) else {
                return true;
            };
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.m {
                let a = &self.rows[i][s];
                if !a.is_strictly_positive() {
                    continue;
                }
                let ratio = self.rows[i][rhs].clone() / a.clone();
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br || (ratio == br && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, s),
            }
        }
    }
}

fn solve_standard<T: Field>(mut a: Vec<Vec<T>>, mut b: Vec<T>, cost: &[T]) -> Result<Standard<T>> {
    let m = a.len();
    let n = cost.len();
    let mut flipped = vec![false; m];
    for i in 0..m {
        if b[i].is_negative() {
            flipped[i] = true;
            b[i] = -b[i].clone();
            for v in a[i].iter_mut() {
                if !v.is_zero() {
                    *v = -v.clone();
                }
            }
        }
    }
    let mut rows = Vec::with_capacity(m);
    for (i, (mut r, bi)) in a.into_iter().zip(b).enumerate() {
        r.resize(n + m + 1, T::zero());
        r[n + i] = T::one();
        r[n + m] = bi;
        rows.push(r);
    }
    let mut t = Tableau { m, n, rows, basis: (n..n + m).collect(), reduced: Vec::new() };

    // phase 1: maximize -sum(artificials)
    let mut phase1 = vec![T::zero(); n + m];
    for c in phase1.iter_mut().skip(n) {
        *c = -T::one();
    }
    t.set_costs(&phase1);
    if !t.optimize(n + m) {
        return Err(Error::Internal("phase-1 simplex reported unbounded".into()));
    }
    let rhs = t.rhs();
    let infeas = (0..m)
        .filter(|&i| t.basis[i] >= n)
        .fold(T::zero(), |s, i| s + t.rows[i][rhs].clone());
    if infeas.is_strictly_positive() {
        // y = -pi with pi_i = -1 - d_{art_i}
        let y = (0..m)
            .map(|i| {
                let yi = T::one() + t.reduced[n + i].clone();
                if flipped[i] {
                    -yi
                } else {
                    yi
                }
            })
            .collect();
        return Ok(Standard::Infeasible { y });
    }
    // drive zero-level artificials out where possible
    for r in 0..m {
        if t.basis[r] < n {
            continue;
        }
        if let Some(s) = (0..n).find(|&j| !t.rows[r][j].is_negligible()) {
            t.pivot(r, s);
        }
    }

    // phase 2
    let mut full = cost.to_vec();
    full.resize(n + m, T::zero());
    t.set_costs(&full);
    if !t.optimize(n) {
        return Ok(Standard::Unbounded);
    }
    let mut x = vec![T::zero(); n];
    let mut value = T::zero();
    for i in 0..m {
        let j = t.basis[i];
        if j < n {
            x[j] = t.rows[i][rhs].clone();
            value = value + cost[j].clone() * x[j].clone();
        }
    }
    let y = (0..m)
        .map(|i| {
            let yi = -t.reduced[n + i].clone();
            if flipped[i] {
                -yi
            } else {
                yi
            }
        })
        .collect();
    Ok(Standard::Optimal { x, value, y })
}
