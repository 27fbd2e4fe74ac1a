//! Exact two-phase revised simplex over the rationals.
//!
//! Problems are in standard equality form: maximize `c·x` subject to
//! `A x = b`, `x ≥ 0`. Columns are stored sparsely and the basis inverse is
//! kept as a dense rational matrix, which suits the coupling programs: few
//! rows, exponentially many columns.
//!
//! Pivoting rule: the entering column is the one with the largest reduced
//! cost (ties to the smallest index) as long as pivots strictly improve the
//! objective. After a degenerate pivot the solver switches to Bland's rule
//! (smallest improving index) until the next nondegenerate pivot. Ratio-test
//! ties always leave on the smallest basic variable index. A cycle can only
//! consist of degenerate pivots, all of which would then be Bland pivots, and
//! Bland's rule never cycles; so every solve terminates.
//!
//! Infeasibility is reported with a Farkas vector `z` such that `zᵀA ≤ 0`
//! column-wise and `zᵀb > 0`. For any `x ≥ 0` that gives
//! `zᵀb = zᵀA x ≤ 0`, a contradiction.

#![allow(clippy::needless_range_loop)]

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;
use crate::scalar::Q;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearProgram {
    columns: Vec<Vec<(usize, Rational)>>,
    rhs: Vec<Rational>,
    objective: Vec<Rational>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            columns: vec![Vec::new(); num_vars],
            rhs: Vec::new(),
            objective: vec![Rational::zero(); num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.columns.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rhs.len()
    }

    /// Appends `Σ coef·x_var = rhs` and returns its row index. Repeated
    /// variables are summed.
    pub fn add_equality<I>(&mut self, terms: I, rhs: Rational) -> usize
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let row = self.rhs.len();
        let mut merged: BTreeMap<usize, Rational> = BTreeMap::new();
        for (var, coef) in terms {
            assert!(var < self.num_vars(), "variable {var} out of range");
            *merged.entry(var).or_insert_with(Rational::zero) += coef;
        }
        for (var, coef) in merged {
            if !coef.is_zero() {
                self.columns[var].push((row, coef));
            }
        }
        self.rhs.push(rhs);
        row
    }

    /// Appends `Σ x_var = rhs` over distinct `vars`.
    pub fn add_indicator_row<I>(&mut self, vars: I, rhs: Rational) -> usize
    where
        I: IntoIterator<Item = usize>,
    {
        let row = self.rhs.len();
        for var in vars {
            self.columns[var].push((row, Rational::one()));
        }
        self.rhs.push(rhs);
        row
    }

    pub fn set_objective(&mut self, var: usize, coef: Rational) {
        self.objective[var] = coef;
    }

    /// Nonzero entries of column `var` as `(row, coefficient)`.
    pub fn column(&self, var: usize) -> &[(usize, Rational)] {
        &self.columns[var]
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).filter(|(c, _)| !c.is_zero()).map(|(c, v)| c * v).sum()
    }

    /// `A x` row by row.
    pub fn row_activity(&self, x: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.num_constraints()];
        for (col, v) in self.columns.iter().zip(x) {
            if v.is_zero() {
                continue;
            }
            for (row, a) in col {
                out[*row] += a * v;
            }
        }
        out
    }

    /// Exact check of `x ≥ 0` and `A x = b`.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars() && x.iter().all(|v| !v.is_negative()) && self.row_activity(x) == self.rhs
    }

    pub fn solve(&self) -> LpSolution {
        Solver::new(self).run()
    }
}

/// Multipliers on the equality rows proving that no `x ≥ 0` satisfies `A x = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rational>,
}

impl FarkasCertificate {
    /// `zᵀb`, positive for a genuine certificate.
    pub fn bound(&self, lp: &LinearProgram) -> Rational {
        self.multipliers.iter().zip(lp.rhs()).map(|(z, b)| z * b).sum()
    }

    /// Re-checks the certificate against `lp` in exact arithmetic.
    pub fn verify(&self, lp: &LinearProgram) -> bool {
        if self.multipliers.len() != lp.num_constraints() || !self.bound(lp).is_positive() {
            return false;
        }
        (0..lp.num_vars()).all(|j| {
            let combined: Rational = lp.column(j).iter().map(|(r, a)| &self.multipliers[*r] * a).sum();
            !combined.is_positive()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpSolution {
    Optimal { value: Rational, primal: Vec<Rational> },
    Infeasible(FarkasCertificate),
    Unbounded,
}

impl LpSolution {
    pub fn optimum(&self) -> Option<&Rational> {
        match self {
            LpSolution::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

struct Unbounded;

struct Solver<'a> {
    lp: &'a LinearProgram,
    /// Rows with negative right-hand side are negated so the artificial basis is feasible.
    negated: Vec<bool>,
    /// Structural columns with the row negation applied.
    columns: Vec<Vec<(usize, Q)>>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<Vec<Q>>,
    values: Vec<Q>,
}

impl<'a> Solver<'a> {
    fn new(lp: &'a LinearProgram) -> Self {
        let m = lp.num_constraints();
        let n = lp.num_vars();
        let negated: Vec<bool> = lp.rhs.iter().map(|b| b.is_negative()).collect();
        let columns = lp
            .columns
            .iter()
            .map(|col| {
                col.iter()
                    .map(|(r, a)| {
                        let a = Q::from_big(a);
                        (*r, if negated[*r] { a.neg() } else { a })
                    })
                    .collect()
            })
            .collect();
        let binv = (0..m).map(|r| (0..m).map(|k| if k == r { Q::ONE } else { Q::ZERO }).collect()).collect();
        let mut is_basic = vec![false; n + m];
        is_basic[n..].iter_mut().for_each(|b| *b = true);
        Solver {
            lp,
            values: lp.rhs.iter().map(|b| Q::from_big(&b.abs())).collect(),
            negated,
            columns,
            basis: (n..n + m).collect(),
            is_basic,
            binv,
        }
    }

    fn n(&self) -> usize {
        self.columns.len()
    }

    fn m(&self) -> usize {
        self.binv.len()
    }

    /// `row · A_j` for a structural column.
    fn dot(&self, row: &[Q], var: usize) -> Q {
        let mut acc = Q::ZERO;
        for (i, a) in &self.columns[var] {
            let v = &row[*i];
            if v.is_zero() {
                continue;
            }
            acc = if a.is_one() { acc.add(v) } else { acc.add(&v.mul(a)) };
        }
        acc
    }

    /// `B⁻¹ A_j` for a structural column.
    fn ftran(&self, var: usize) -> Vec<Q> {
        self.binv.iter().map(|row| self.dot(row, var)).collect()
    }

    /// Simplex multipliers `c_Bᵀ B⁻¹`.
    fn duals(&self, cost: &[Q]) -> Vec<Q> {
        let mut y = vec![Q::ZERO; self.m()];
        for (r, &var) in self.basis.iter().enumerate() {
            let c = &cost[var];
            if c.is_zero() {
                continue;
            }
            for (yi, b) in y.iter_mut().zip(&self.binv[r]) {
                if !b.is_zero() {
                    *yi = yi.add(&c.mul(b));
                }
            }
        }
        y
    }

    fn pivot(&mut self, leave: usize, enter: usize, alpha: &[Q]) {
        let pivot = alpha[leave].clone();
        if !pivot.is_one() {
            for v in self.binv[leave].iter_mut() {
                if !v.is_zero() {
                    *v = v.div(&pivot);
                }
            }
            self.values[leave] = self.values[leave].div(&pivot);
        }
        let pivot_row = self.binv[leave].clone();
        let pivot_value = self.values[leave].clone();
        for r in 0..self.m() {
            if r == leave || alpha[r].is_zero() {
                continue;
            }
            let f = &alpha[r];
            for (v, p) in self.binv[r].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v = v.sub(&f.mul(p));
                }
            }
            if !pivot_value.is_zero() {
                self.values[r] = self.values[r].sub(&f.mul(&pivot_value));
            }
        }
        self.is_basic[self.basis[leave]] = false;
        self.is_basic[enter] = true;
        self.basis[leave] = enter;
    }

    fn optimize(&mut self, cost: &[Q]) -> Result<(), Unbounded> {
        let mut bland = false;
        loop {
            let y = self.duals(cost);
            let mut entering: Option<(usize, Q)> = None;
            for j in 0..self.n() {
                if self.is_basic[j] {
                    continue;
                }
                let d = cost[j].sub(&self.dot(&y, j));
                if !d.is_positive() {
                    continue;
                }
                if bland {
                    entering = Some((j, d));
                    break;
                }
                if entering.as_ref().is_none_or(|(_, best)| d > *best) {
                    entering = Some((j, d));
                }
            }
            let Some((enter, _)) = entering else {
                return Ok(());
            };
            let alpha = self.ftran(enter);
            let mut leaving: Option<(usize, Q)> = None;
            for r in 0..self.m() {
                if !alpha[r].is_positive() {
                    continue;
                }
                let ratio = self.values[r].div(&alpha[r]);
                let better = match &leaving {
                    None => true,
                    Some((p, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*p]),
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
            let Some((leave, step)) = leaving else {
                return Err(Unbounded);
            };
            self.pivot(leave, enter, &alpha);
            bland = step.is_zero();
        }
    }

    /// Replaces zero-valued artificial basics by structural columns where possible.
    /// Rows where no structural column has a nonzero entry are redundant; their
    /// artificial stays basic at zero and never moves again.
    fn drive_out_artificials(&mut self) {
        let n = self.n();
        for p in 0..self.m() {
            if self.basis[p] < n {
                continue;
            }
            let row = self.binv[p].clone();
            let candidate = (0..n).find(|&j| !self.is_basic[j] && !self.dot(&row, j).is_zero());
            if let Some(j) = candidate {
                let alpha = self.ftran(j);
                self.pivot(p, j, &alpha);
            }
        }
    }

    fn run(mut self) -> LpSolution {
        let n = self.n();
        let m = self.m();
        // Phase one maximizes minus the artificial total; it is bounded above by zero.
        let mut phase_one = vec![Q::ZERO; n];
        phase_one.extend(std::iter::repeat_n(Q::ONE.neg(), m));
        let _ = self.optimize(&phase_one);
        let infeasible = self.basis.iter().zip(&self.values).any(|(v, x)| *v >= n && !x.is_zero());
        if infeasible {
            let y = self.duals(&phase_one);
            let multipliers = y
                .into_iter()
                .zip(&self.negated)
                .map(|(yi, &neg)| if neg { yi.to_big() } else { -yi.to_big() })
                .collect();
            return LpSolution::Infeasible(FarkasCertificate { multipliers });
        }
        self.drive_out_artificials();

        let mut phase_two: Vec<Q> = self.lp.objective.iter().map(Q::from_big).collect();
        phase_two.extend(std::iter::repeat_n(Q::ZERO, m));
        if self.optimize(&phase_two).is_err() {
            return LpSolution::Unbounded;
        }
        let mut primal = vec![Rational::zero(); n];
        for (var, value) in self.basis.iter().zip(&self.values) {
            if *var < n {
                primal[*var] = value.to_big();
            }
        }
        LpSolution::Optimal { value: self.lp.objective_value(&primal), primal }
    }
}
