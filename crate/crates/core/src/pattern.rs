//! Branching enumeration of realizable tight/slack patterns.
//!
//! The system is a list of rows `g·y <= h` (the items) plus fixed equalities. A pattern
//! marks every item either tight (`g·y = h`) or slack (`g·y < h`). A pattern is realizable
//! when some `y` attains it exactly; strictness is certified by maximizing a common margin
//! `s <= 1` and requiring `s > 0`. Items are decided in index order, and an LP witness of
//! the parent node decides one of the two children for free.

use num_traits::{Signed, Zero};

use crate::budget::Budget;
use crate::error::Result;
use crate::exact::{dot, QVector, Rational};
use crate::lp::{LinearProgram, LpOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Mark {
    Tight,
    Slack,
}

#[derive(Clone, Debug)]
pub(crate) struct Realized {
    pub tight: Vec<usize>,
    pub witness: QVector,
}

#[derive(Clone, Debug)]
pub(crate) struct PatternSystem {
    pub nvars: usize,
    pub equalities: Vec<(QVector, Rational)>,
    pub items: Vec<(QVector, Rational)>,
}

impl PatternSystem {
    /// LP for a decided prefix; undecided items only need to hold weakly.
    fn program(&self, marks: &[Mark]) -> LinearProgram {
        let n = self.nvars;
        let mut lp = LinearProgram::new(n + 1);
        let widen = |g: &QVector, s: Rational| {
            let mut v = g.clone();
            v.push(s);
            v
        };
        for (a, b) in &self.equalities {
            lp.eq(widen(a, Rational::zero()), b.clone());
        }
        for (k, (g, h)) in self.items.iter().enumerate() {
            match marks.get(k) {
                Some(Mark::Tight) => lp.eq(widen(g, Rational::zero()), h.clone()),
                Some(Mark::Slack) => lp.le(widen(g, crate::exact::q(1)), h.clone()),
                None => lp.le(widen(g, Rational::zero()), h.clone()),
            }
        }
        let mut cap = vec![Rational::zero(); n + 1];
        cap[n] = crate::exact::q(1);
        lp.le(cap.clone(), crate::exact::q(1));
        lp.maximize(cap);
        lp
    }

    /// A point realizing the decided prefix, if one exists.
    pub fn realize(&self, marks: &[Mark]) -> Option<QVector> {
        match self.program(marks).solve() {
            LpOutcome::Optimal { mut point, value } if value.is_positive() => {
                point.truncate(self.nvars);
                Some(point)
            }
            _ => None,
        }
    }

    /// All realizable full patterns not cut off by `prune`. `prune` sees every decided
    /// prefix right after a new decision and returns true to discard the whole subtree.
    pub fn enumerate<P>(&self, mut prune: P, limit: usize, resource: &'static str) -> Result<Vec<Realized>>
    where
        P: FnMut(&[Mark]) -> bool,
    {
        let mut out = Vec::new();
        let Some(root) = self.realize(&[]) else {
            return Ok(out);
        };
        let mut marks = Vec::with_capacity(self.items.len());
        self.visit(&mut marks, root, &mut prune, &mut out, limit, resource)?;
        Ok(out)
    }

    fn visit<P>(
        &self,
        marks: &mut Vec<Mark>,
        w: QVector,
        prune: &mut P,
        out: &mut Vec<Realized>,
        limit: usize,
        resource: &'static str,
    ) -> Result<()>
    where
        P: FnMut(&[Mark]) -> bool,
    {
        let k = marks.len();
        if k == self.items.len() {
            let tight = (0..k).filter(|&i| marks[i] == Mark::Tight).collect();
            out.push(Realized { tight, witness: w });
            return Budget::check(resource, limit, out.len());
        }
        let (g, h) = &self.items[k];
        let slack = h - dot(g, &w);
        for mark in [Mark::Tight, Mark::Slack] {
            marks.push(mark);
            if !prune(marks) {
                let reuse = match mark {
                    Mark::Tight => slack.is_zero(),
                    Mark::Slack => slack.is_positive(),
                };
                let child = if reuse {
                    Some(w.clone())
                } else {
                    self.realize(marks)
                };
                if let Some(cw) = child {
                    self.visit(marks, cw, prune, out, limit, resource)?;
                }
            }
            marks.pop();
        }
        Ok(())
    }
}
