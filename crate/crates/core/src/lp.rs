//! Dense two-phase simplex over the rationals with Bland's rule.
//!
//! Entering column is the lowest index with negative reduced cost; the leaving row is the
//! minimum ratio with ties broken by the smallest basic column index. Results are therefore
//! reproducible for a fixed input.

use num_traits::{One, Signed, Zero};

use crate::exact::{QVector, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
struct Row {
    coeffs: QVector,
    rel: Relation,
    rhs: Rational,
}

/// `maximize cᵀx` subject to linear rows. Variables are free unless marked nonnegative.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    nvars: usize,
    nonneg: Vec<bool>,
    rows: Vec<Row>,
    objective: QVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { point: QVector, value: Rational },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn point(&self) -> Option<&QVector> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(nvars: usize) -> Self {
        LinearProgram {
            nvars,
            nonneg: vec![false; nvars],
            rows: Vec::new(),
            objective: vec![Rational::zero(); nvars],
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn set_nonneg(&mut self, j: usize) {
        self.nonneg[j] = true;
    }

    pub fn add(&mut self, coeffs: QVector, rel: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.nvars, "constraint width");
        self.rows.push(Row { coeffs, rel, rhs });
    }

    pub fn le(&mut self, coeffs: QVector, rhs: Rational) {
        self.add(coeffs, Relation::Le, rhs);
    }

    pub fn eq(&mut self, coeffs: QVector, rhs: Rational) {
        self.add(coeffs, Relation::Eq, rhs);
    }

    pub fn ge(&mut self, coeffs: QVector, rhs: Rational) {
        self.add(coeffs, Relation::Ge, rhs);
    }

    pub fn maximize(&mut self, c: QVector) {
        assert_eq!(c.len(), self.nvars, "objective width");
        self.objective = c;
    }

    pub fn minimize(&mut self, c: QVector) {
        self.maximize(c.into_iter().map(|x| -x).collect());
    }

    /// Checks a candidate point against every row exactly.
    pub fn satisfies(&self, x: &[Rational]) -> bool {
        if x.len() != self.nvars {
            return false;
        }
        if (0..self.nvars).any(|j| self.nonneg[j] && x[j].is_negative()) {
            return false;
        }
        self.rows.iter().all(|r| {
            let lhs = crate::exact::dot(&r.coeffs, x);
            match r.rel {
                Relation::Le => lhs <= r.rhs,
                Relation::Eq => lhs == r.rhs,
                Relation::Ge => lhs >= r.rhs,
            }
        })
    }

    pub fn solve(&self) -> LpOutcome {
        // Column layout: one column per nonnegative variable, two (p, q) per free variable,
        // then one slack/surplus per inequality row, then one artificial per row.
        let mut pos = Vec::with_capacity(self.nvars);
        let mut negc = Vec::with_capacity(self.nvars);
        let mut ncol = 0;
        for j in 0..self.nvars {
            pos.push(ncol);
            ncol += 1;
            if self.nonneg[j] {
                negc.push(None);
            } else {
                negc.push(Some(ncol));
                ncol += 1;
            }
        }
        let mut slack_of = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            if r.rel == Relation::Eq {
                slack_of.push(None);
            } else {
                slack_of.push(Some(ncol));
                ncol += 1;
            }
        }
        let nstruct = ncol;
        let m = self.rows.len();
        let width = nstruct + m + 1;
        let rhs_col = width - 1;

        let mut t: Vec<QVector> = Vec::with_capacity(m);
        for (i, r) in self.rows.iter().enumerate() {
            let mut row = vec![Rational::zero(); width];
            for (j, a) in r.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                row[pos[j]] = a.clone();
                if let Some(nc) = negc[j] {
                    row[nc] = -a;
                }
            }
            if let Some(s) = slack_of[i] {
                row[s] = match r.rel {
                    Relation::Le => Rational::one(),
                    _ => -Rational::one(),
                };
            }
            row[rhs_col] = r.rhs.clone();
            if r.rhs.is_negative() {
                for x in row.iter_mut() {
                    *x = -&*x;
                }
            }
            row[nstruct + i] = Rational::one();
            t.push(row);
        }
        let mut tab = Tableau {
            t,
            basis: (0..m).map(|i| nstruct + i).collect(),
            d: vec![Rational::zero(); width],
            rhs_col,
        };

        // Phase 1: minimize the sum of artificials.
        for row in &tab.t {
            for (j, x) in row.iter().enumerate().take(nstruct) {
                if !x.is_zero() {
                    tab.d[j] -= x;
                }
            }
            tab.d[rhs_col] -= &row[rhs_col];
        }
        if tab.run(width - 1).is_err() {
            unreachable!("phase one objective is bounded below by zero");
        }
        if !tab.d[rhs_col].is_zero() {
            return LpOutcome::Infeasible;
        }

        // Drive remaining artificials out of the basis; rows that cannot pivot are redundant.
        let mut i = 0;
        while i < tab.t.len() {
            if tab.basis[i] >= nstruct {
                if let Some(k) = (0..nstruct).find(|&k| !tab.t[i][k].is_zero()) {
                    tab.pivot(i, k);
                    i += 1;
                } else {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                }
            } else {
                i += 1;
            }
        }

        // Phase 2 with costs for minimizing -c.
        let mut cost = vec![Rational::zero(); nstruct];
        for j in 0..self.nvars {
            let c = &self.objective[j];
            if c.is_zero() {
                continue;
            }
            cost[pos[j]] = -c;
            if let Some(nc) = negc[j] {
                cost[nc] = c.clone();
            }
        }
        let feasible_only = cost.iter().all(Zero::is_zero);
        if !feasible_only {
            let mut d = vec![Rational::zero(); width];
            d[..nstruct].clone_from_slice(&cost);
            for (row, &b) in tab.t.iter().zip(&tab.basis) {
                let cb = &cost[b];
                if cb.is_zero() {
                    continue;
                }
                for (j, x) in row.iter().enumerate() {
                    if (j < nstruct || j == rhs_col)
                        && !x.is_zero() {
                            d[j] -= cb * x;
                        }
                }
            }
            tab.d = d;
            if tab.run(nstruct).is_err() {
                return LpOutcome::Unbounded;
            }
        }

        let mut col_val = vec![Rational::zero(); nstruct];
        for (row, &b) in tab.t.iter().zip(&tab.basis) {
            if b < nstruct {
                col_val[b] = row[rhs_col].clone();
            }
        }
        let point: QVector = (0..self.nvars)
            .map(|j| match negc[j] {
                Some(nc) => &col_val[pos[j]] - &col_val[nc],
                None => col_val[pos[j]].clone(),
            })
            .collect();
        let value = crate::exact::dot(&self.objective, &point);
        LpOutcome::Optimal { point, value }
    }

    /// Feasibility only; returns a point or `None`.
    pub fn feasible_point(&self) -> Option<QVector> {
        let mut lp = self.clone();
        lp.objective = vec![Rational::zero(); self.nvars];
        match lp.solve() {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

struct Tableau {
    t: Vec<QVector>,
    basis: Vec<usize>,
    /// Reduced costs; the entry at `rhs_col` holds minus the current objective value.
    d: QVector,
    rhs_col: usize,
}

struct UnboundedColumn;

impl Tableau {
    fn pivot(&mut self, r: usize, e: usize) {
        let inv = self.t[r][e].recip();
        if !inv.is_one() {
            for x in self.t[r].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
        }
        let pr = std::mem::take(&mut self.t[r]);
        let nz: Vec<usize> = (0..pr.len()).filter(|&k| !pr[k].is_zero()).collect();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[e].is_zero() {
                continue;
            }
            let f = row[e].clone();
            for &k in &nz {
                row[k] -= &f * &pr[k];
            }
        }
        if !self.d[e].is_zero() {
            let f = self.d[e].clone();
            for &k in &nz {
                self.d[k] -= &f * &pr[k];
            }
        }
        self.t[r] = pr;
        self.basis[r] = e;
    }

    /// Runs simplex iterations allowing entering columns `< limit`.
    fn run(&mut self, limit: usize) -> Result<(), UnboundedColumn> {
        loop {
            let Some(e) = (0..limit).find(|&j| self.d[j].is_negative()) else {
                return Ok(());
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.t[i][self.rhs_col] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, e),
                None => return Err(UnboundedColumn),
            }
        }
    }
}
