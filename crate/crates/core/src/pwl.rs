//! Convex piecewise linear functions and their primal/dual complexes.
//!
//! A function is stored as a sum of max-affine terms plus the indicator of a polyhedral
//! domain. The flat max-affine form is the sum expanded over all piece combinations, which
//! grows multiplicatively; keeping the terms separate lets activity patterns be decided one
//! term at a time.

use std::fmt;

use num_traits::{One, Zero};

use crate::budget::Budget;
use crate::error::{check_len, Error, Result};
use crate::exact::{
    add, dot, format_rational, format_vector, neg, scale, sub, zeros, Matrix, QVector,
    Rational, Subspace,
};
use crate::lp::{LinearProgram, LpOutcome};
use crate::pattern::{Mark, PatternSystem};
use crate::polyhedra::{Constraint, HPolyhedron, VPolyhedron};

/// `slope·x + offset`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AffinePiece {
    pub slope: QVector,
    pub offset: Rational,
}

impl AffinePiece {
    pub fn new(slope: QVector, offset: Rational) -> Self {
        AffinePiece { slope, offset }
    }

    pub fn value(&self, x: &[Rational]) -> Rational {
        dot(&self.slope, x) + &self.offset
    }
}

/// `max_i (v_i·x + w_i)` over a nonempty list of pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxAffine {
    pub pieces: Vec<AffinePiece>,
}

impl MaxAffine {
    /// A single piece that is identically zero.
    pub fn is_zero(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0].offset.is_zero() && self.pieces[0].slope.iter().all(Zero::is_zero)
    }

    /// Maximum value and the indices attaining it.
    pub fn argmax(&self, x: &[Rational]) -> (Rational, Vec<usize>) {
        let vals: Vec<Rational> = self.pieces.iter().map(|p| p.value(x)).collect();
        let best = vals.iter().max().expect("nonempty term").clone();
        let idx = (0..vals.len()).filter(|&i| vals[i] == best).collect();
        (best, idx)
    }
}

/// A value in `R ∪ {+∞}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extended {
    Finite(Rational),
    PosInfinity,
}

impl Extended {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Extended::Finite(r) => Some(r),
            Extended::PosInfinity => None,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(r) => write!(f, "{}", format_rational(r)),
            Extended::PosInfinity => write!(f, "+inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpwlFunction {
    dim: usize,
    terms: Vec<MaxAffine>,
    domain: HPolyhedron,
    domain_dim: usize,
}

/// Activity pattern of a point: argmax pieces per term and tight domain inequalities.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellPattern {
    pub active_pieces: Vec<Vec<usize>>,
    pub active_domain_constraints: Vec<usize>,
}

impl fmt::Display for CellPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        let terms: Vec<String> = self.active_pieces.iter().map(|t| join(t)).collect();
        write!(
            f,
            "pieces [{}] domain [{}]",
            terms.join(" | "),
            join(&self.active_domain_constraints)
        )
    }
}

/// `Σ_τ conv(term_generators[τ]) + cone(normals)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdifferential {
    dim: usize,
    term_generators: Vec<Vec<QVector>>,
    normals: Vec<QVector>,
}

impl Subdifferential {
    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn term_generators(&self) -> &[Vec<QVector>] {
        &self.term_generators
    }

    pub fn normals(&self) -> &[QVector] {
        &self.normals
    }

    /// Sum of the first generator of every term; a point of the set.
    pub fn anchor(&self) -> QVector {
        self.term_generators
            .iter()
            .fold(zeros(self.dim), |acc, g| add(&acc, &g[0]))
    }

    pub fn direction_space(&self) -> Subspace {
        let mut gens = Vec::new();
        for g in &self.term_generators {
            gens.extend(g[1..].iter().map(|v| sub(v, &g[0])));
        }
        gens.extend(self.normals.iter().cloned());
        Subspace::span(self.dim, &gens)
    }

    pub fn dimension(&self) -> usize {
        self.direction_space().dim()
    }

    /// Variables: one weight per term generator (simplex per term), one per normal.
    fn weight_program(&self, extra: usize) -> (LinearProgram, usize) {
        let nw: usize = self.term_generators.iter().map(Vec::len).sum::<usize>() + self.normals.len();
        let mut lp = LinearProgram::new(extra + nw);
        for j in extra..extra + nw {
            lp.set_nonneg(j);
        }
        let mut off = extra;
        for g in &self.term_generators {
            let mut row = vec![Rational::zero(); extra + nw];
            for r in row.iter_mut().skip(off).take(g.len()) {
                *r = Rational::one();
            }
            lp.eq(row, Rational::one());
            off += g.len();
        }
        (lp, nw)
    }

    /// Generator vectors in weight order.
    fn weight_columns(&self) -> Vec<&QVector> {
        self.term_generators
            .iter()
            .flatten()
            .chain(self.normals.iter())
            .collect()
    }

    pub fn contains(&self, y: &[Rational]) -> bool {
        if y.len() != self.dim {
            return false;
        }
        if self.dimension() == 0 {
            return self.anchor() == y;
        }
        let (mut lp, nw) = self.weight_program(0);
        let cols = self.weight_columns();
        for (k, yk) in y.iter().enumerate() {
            let row: QVector = cols.iter().map(|c| c[k].clone()).collect();
            debug_assert_eq!(row.len(), nw);
            lp.eq(row, yk.clone());
        }
        lp.feasible_point().is_some()
    }

    /// Some `z` with `Aᵀz` in the set, or `None` when the set misses the row space of `A`.
    pub fn meet_row_space(&self, a: &Matrix) -> Result<Option<QVector>> {
        check_len(self.dim, a.ncols())?;
        let m = a.nrows();
        if self.dimension() == 0 {
            return a.transpose().solve(&self.anchor());
        }
        let (mut lp, _) = self.weight_program(m);
        let cols = self.weight_columns();
        for k in 0..self.dim {
            let mut row: QVector = (0..m).map(|i| a.get(i, k).clone()).collect();
            row.extend(cols.iter().map(|c| -c[k].clone()));
            lp.eq(row, Rational::zero());
        }
        Ok(lp.feasible_point().map(|mut p| {
            p.truncate(m);
            p
        }))
    }

    /// Explicit generators (Minkowski sum of the term hulls plus the normal cone).
    pub fn to_vpolyhedron(&self, budget: &Budget) -> Result<VPolyhedron> {
        let mut acc = VPolyhedron::cone(self.dim, self.normals.clone())?;
        for g in &self.term_generators {
            let term = VPolyhedron::new(self.dim, g.clone(), vec![])?;
            acc = acc.minkowski_sum(&term, budget)?;
        }
        Ok(acc)
    }
}

/// One cell of the primal complex together with its constant subdifferential.
#[derive(Clone, Debug)]
pub struct DualFace {
    pub pattern: CellPattern,
    pub subdiff: Subdifferential,
    pub cell: HPolyhedron,
    pub dim_cell: usize,
    pub dim_subdiff: usize,
    /// A point in the relative interior of the cell.
    pub relint: QVector,
}

impl CpwlFunction {
    /// `Σ terms + χ_domain`. An empty term list stands for the zero function.
    pub fn new(dim: usize, mut terms: Vec<MaxAffine>, domain: HPolyhedron) -> Result<Self> {
        check_len(dim, domain.ambient_dim())?;
        for t in &terms {
            if t.pieces.is_empty() {
                return Err(Error::Precondition("a max-affine term needs at least one piece".into()));
            }
            for p in &t.pieces {
                check_len(dim, p.slope.len())?;
            }
        }
        if terms.is_empty() {
            terms.push(MaxAffine {
                pieces: vec![AffinePiece::new(zeros(dim), Rational::zero())],
            });
        }
        let domain_dim = domain.dimension()?;
        Ok(CpwlFunction {
            dim,
            terms,
            domain,
            domain_dim,
        })
    }

    pub fn max_affine(dim: usize, pieces: Vec<AffinePiece>) -> Result<Self> {
        Self::new(dim, vec![MaxAffine { pieces }], HPolyhedron::whole_space(dim))
    }

    /// `γ ‖L x‖₁`, one term `max(γ l·x, -γ l·x)` per row `l`.
    pub fn l1(l: &Matrix, gamma: &Rational) -> Result<Self> {
        if *gamma <= Rational::zero() {
            return Err(Error::Precondition("gamma must be positive".into()));
        }
        let n = l.ncols();
        // Zero rows contribute nothing and are skipped.
        let terms = (0..l.nrows())
            .map(|i| scale(l.row(i), gamma))
            .filter(|row| !row.iter().all(Zero::is_zero))
            .map(|row| MaxAffine {
                pieces: vec![
                    AffinePiece::new(row.clone(), Rational::zero()),
                    AffinePiece::new(neg(&row), Rational::zero()),
                ],
            })
            .collect();
        Self::new(n, terms, HPolyhedron::whole_space(n))
    }

    pub fn l1_norm(n: usize) -> Self {
        Self::l1(&Matrix::identity(n), &Rational::one()).expect("identity l1")
    }

    pub fn indicator(domain: HPolyhedron) -> Result<Self> {
        Self::new(domain.ambient_dim(), vec![], domain)
    }

    pub fn linf_ball_indicator(n: usize) -> Self {
        Self::indicator(HPolyhedron::cube(n, Rational::one())).expect("cube is nonempty")
    }

    pub fn nonneg_indicator(n: usize) -> Self {
        Self::indicator(HPolyhedron::nonneg_orthant(n)).expect("orthant is nonempty")
    }

    /// `x ↦ c·x` as a single-piece term.
    pub fn linear(c: QVector) -> Self {
        let n = c.len();
        Self::max_affine(n, vec![AffinePiece::new(c, Rational::zero())]).expect("linear")
    }

    pub fn sum(&self, other: &CpwlFunction) -> Result<Self> {
        check_len(self.dim, other.dim)?;
        // Placeholder zero terms of indicators are dropped; `new` restores one if needed.
        let terms = self
            .terms
            .iter()
            .chain(&other.terms)
            .filter(|t| !t.is_zero())
            .cloned()
            .collect();
        Self::new(self.dim, terms, self.domain.intersect(&other.domain)?)
    }

    pub fn scaled(&self, gamma: &Rational) -> Result<Self> {
        if *gamma <= Rational::zero() {
            return Err(Error::Precondition("gamma must be positive".into()));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| MaxAffine {
                pieces: t
                    .pieces
                    .iter()
                    .map(|p| AffinePiece::new(scale(&p.slope, gamma), &p.offset * gamma))
                    .collect(),
            })
            .collect();
        Self::new(self.dim, terms, self.domain.clone())
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[MaxAffine] {
        &self.terms
    }

    pub fn domain(&self) -> &HPolyhedron {
        &self.domain
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.domain_dim == self.dim
    }

    /// The flat max-affine form: one piece per combination of term pieces, duplicates removed.
    pub fn expanded_pieces(&self, budget: &Budget) -> Result<Vec<AffinePiece>> {
        let mut acc = vec![AffinePiece::new(zeros(self.dim), Rational::zero())];
        for t in &self.terms {
            let count = acc.len().saturating_mul(t.pieces.len());
            Budget::check("pieces", budget.pieces, count)?;
            let mut next = Vec::with_capacity(count);
            for a in &acc {
                for p in &t.pieces {
                    next.push(AffinePiece::new(add(&a.slope, &p.slope), &a.offset + &p.offset));
                }
            }
            next.sort();
            next.dedup();
            acc = next;
        }
        Ok(acc)
    }

    pub fn evaluate(&self, x: &[Rational]) -> Result<Extended> {
        check_len(self.dim, x.len())?;
        if !self.domain.contains(x) {
            return Ok(Extended::PosInfinity);
        }
        let mut total = Rational::zero();
        for t in &self.terms {
            total += t.argmax(x).0;
        }
        Ok(Extended::Finite(total))
    }

    pub fn pattern_at(&self, x: &[Rational]) -> Result<CellPattern> {
        check_len(self.dim, x.len())?;
        if !self.domain.contains(x) {
            return Err(Error::NotInSet);
        }
        Ok(CellPattern {
            active_pieces: self.terms.iter().map(|t| t.argmax(x).1).collect(),
            active_domain_constraints: self.domain.tight_at(x),
        })
    }

    pub(crate) fn subdiff_of(&self, pat: &CellPattern) -> Subdifferential {
        let term_generators = self
            .terms
            .iter()
            .zip(&pat.active_pieces)
            .map(|(t, act)| act.iter().map(|&i| t.pieces[i].slope.clone()).collect())
            .collect();
        let mut normals: Vec<QVector> = pat
            .active_domain_constraints
            .iter()
            .map(|&j| self.domain.inequalities()[j].normal.clone())
            .collect();
        for c in self.domain.equalities() {
            normals.push(c.normal.clone());
            normals.push(neg(&c.normal));
        }
        Subdifferential {
            dim: self.dim,
            term_generators,
            normals,
        }
    }

    /// Closed region where the pattern's pieces are maximal and its domain rows tight.
    pub fn cell_of(&self, pat: &CellPattern) -> Result<HPolyhedron> {
        let mut ineqs = Vec::new();
        let mut eqs: Vec<Constraint> = self.domain.equalities().to_vec();
        for (t, act) in self.terms.iter().zip(&pat.active_pieces) {
            let i0 = *act.first().ok_or_else(|| Error::Precondition("empty active set".into()))?;
            let p0 = &t.pieces[i0];
            for (i, p) in t.pieces.iter().enumerate() {
                if i == i0 {
                    continue;
                }
                let c = Constraint::new(sub(&p.slope, &p0.slope), &p0.offset - &p.offset);
                if act.contains(&i) {
                    eqs.push(c);
                } else {
                    ineqs.push(c);
                }
            }
        }
        for (j, c) in self.domain.inequalities().iter().enumerate() {
            if pat.active_domain_constraints.contains(&j) {
                eqs.push(c.clone());
            } else {
                ineqs.push(c.clone());
            }
        }
        HPolyhedron::new(self.dim, ineqs, eqs)
    }

    pub fn subdifferential(&self, x: &[Rational]) -> Result<Subdifferential> {
        let pat = self.pattern_at(x)?;
        Ok(self.subdiff_of(&pat))
    }

    /// Items of the pattern system: every piece of every term (in order), then the domain
    /// inequalities. Variables are `(x, t)` with one epigraph variable per term.
    fn pattern_system(&self) -> PatternSystem {
        let n = self.dim;
        let nt = self.terms.len();
        let mut items = Vec::new();
        for (tau, t) in self.terms.iter().enumerate() {
            for p in &t.pieces {
                let mut g = p.slope.clone();
                g.extend(zeros(nt));
                g[n + tau] = -Rational::one();
                items.push((g, -p.offset.clone()));
            }
        }
        let widen = |c: &Constraint| {
            let mut g = c.normal.clone();
            g.extend(zeros(nt));
            (g, c.rhs.clone())
        };
        items.extend(self.domain.inequalities().iter().map(widen));
        PatternSystem {
            nvars: n + nt,
            equalities: self.domain.equalities().iter().map(widen).collect(),
            items,
        }
    }

    fn decode(&self, tight: &[usize]) -> CellPattern {
        let mut active_pieces = Vec::with_capacity(self.terms.len());
        let mut off = 0;
        for t in &self.terms {
            let k = t.pieces.len();
            active_pieces.push(
                tight
                    .iter()
                    .filter(|&&i| i >= off && i < off + k)
                    .map(|&i| i - off)
                    .collect(),
            );
            off += k;
        }
        let active_domain_constraints = tight.iter().filter(|&&i| i >= off).map(|&i| i - off).collect();
        CellPattern {
            active_pieces,
            active_domain_constraints,
        }
    }

    /// Every cell of the primal complex with its dual face, sorted by pattern.
    pub fn enumerate_complexes(&self, budget: &Budget) -> Result<Vec<DualFace>> {
        self.enumerate_faces_upto(None, budget)
    }

    /// Like [`Self::enumerate_complexes`] but skipping dual faces of dimension above
    /// `max_subdiff_dim`. Subdifferential dimension can only grow as more rows become
    /// tight, so whole subtrees are cut.
    pub fn enumerate_faces_upto(&self, max_subdiff_dim: Option<usize>, budget: &Budget) -> Result<Vec<DualFace>> {
        let sys = self.pattern_system();
        let n = self.dim;
        let mut owner: Vec<(Option<usize>, usize)> = Vec::new();
        for (tau, t) in self.terms.iter().enumerate() {
            for i in 0..t.pieces.len() {
                owner.push((Some(tau), i));
            }
        }
        for j in 0..self.domain.inequalities().len() {
            owner.push((None, j));
        }
        let eq_normals: Vec<QVector> = self.domain.equalities().iter().map(|c| c.normal.clone()).collect();
        let prune = |marks: &[Mark]| {
            let k = marks.len() - 1;
            let (term, piece) = owner[k];
            if let Some(tau) = term {
                if piece + 1 == self.terms[tau].pieces.len() {
                    let start = k - piece;
                    if !marks[start..=k].contains(&Mark::Tight) {
                        return true;
                    }
                }
            }
            let Some(cap) = max_subdiff_dim else {
                return false;
            };
            if marks[k] != Mark::Tight {
                return false;
            }
            let mut gens = eq_normals.clone();
            let mut first: Vec<Option<&QVector>> = vec![None; self.terms.len()];
            for (i, m) in marks.iter().enumerate() {
                if *m != Mark::Tight {
                    continue;
                }
                match owner[i] {
                    (Some(tau), p) => {
                        let v = &self.terms[tau].pieces[p].slope;
                        match first[tau] {
                            None => first[tau] = Some(v),
                            Some(v0) => gens.push(sub(v, v0)),
                        }
                    }
                    (None, j) => gens.push(self.domain.inequalities()[j].normal.clone()),
                }
            }
            Subspace::span(n, &gens).dim() > cap
        };
        let found = sys.enumerate(prune, budget.faces, "faces")?;
        let mut faces = Vec::with_capacity(found.len());
        for r in found {
            let pattern = self.decode(&r.tight);
            let subdiff = self.subdiff_of(&pattern);
            let dim_subdiff = subdiff.dimension();
            let cell = self.cell_of(&pattern)?;
            let mut relint = r.witness;
            relint.truncate(n);
            faces.push(DualFace {
                dim_cell: n - dim_subdiff,
                dim_subdiff,
                cell,
                subdiff,
                relint,
                pattern,
            });
        }
        faces.sort_by(|a, b| a.pattern.cmp(&b.pattern));
        Ok(faces)
    }

    /// `sup_x y·x - f(x)` by LP over `(x, t)`.
    pub fn conjugate_value(&self, y: &[Rational]) -> Result<Extended> {
        check_len(self.dim, y.len())?;
        let n = self.dim;
        let nt = self.terms.len();
        let mut lp = LinearProgram::new(n + nt);
        for (tau, t) in self.terms.iter().enumerate() {
            for p in &t.pieces {
                let mut g = p.slope.clone();
                g.extend(zeros(nt));
                g[n + tau] = -Rational::one();
                lp.le(g, -p.offset.clone());
            }
        }
        for c in self.domain.inequalities() {
            let mut g = c.normal.clone();
            g.extend(zeros(nt));
            lp.le(g, c.rhs.clone());
        }
        for c in self.domain.equalities() {
            let mut g = c.normal.clone();
            g.extend(zeros(nt));
            lp.eq(g, c.rhs.clone());
        }
        let mut obj = y.to_vec();
        obj.extend(vec![-Rational::one(); nt]);
        lp.maximize(obj);
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => Ok(Extended::Finite(value)),
            LpOutcome::Unbounded => Ok(Extended::PosInfinity),
            LpOutcome::Infeasible => Err(Error::EmptySet),
        }
    }

    /// `f(x) + f*(y) = y·x`, which holds exactly when `y ∈ ∂f(x)`.
    pub fn fenchel_young_check(&self, x: &[Rational], y: &[Rational]) -> Result<bool> {
        let fx = match self.evaluate(x)? {
            Extended::Finite(v) => v,
            Extended::PosInfinity => return Err(Error::NotInSet),
        };
        let fy = match self.conjugate_value(y)? {
            Extended::Finite(v) => v,
            Extended::PosInfinity => {
                return Err(Error::Precondition("conjugate is infinite at y".into()))
            }
        };
        Ok(fx + fy == dot(x, y))
    }

    /// Short human-readable description used in reports.
    pub fn describe(&self) -> String {
        let pieces: Vec<String> = self.terms.iter().map(|t| t.pieces.len().to_string()).collect();
        format!(
            "{} terms (pieces {}), {} domain inequalities, {} domain equalities, dim dom = {}",
            self.terms.len(),
            pieces.join("+"),
            self.domain.inequalities().len(),
            self.domain.equalities().len(),
            self.domain_dim
        )
    }
}

/// Formats a generator list as `{(..), (..)}`.
pub fn format_generators(gens: &[QVector]) -> String {
    let parts: Vec<String> = gens.iter().map(|g| format_vector(g)).collect();
    format!("{{{}}}", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qf, qvec, unit};

    fn b() -> Budget {
        Budget::default()
    }

    fn abs_diff_nonneg() -> CpwlFunction {
        let d = Matrix::from_i64(&[&[1, -1]]);
        CpwlFunction::l1(&d, &q(1))
            .unwrap()
            .sum(&CpwlFunction::nonneg_indicator(2))
            .unwrap()
    }

    fn max_one_linf() -> CpwlFunction {
        let mut pieces = vec![AffinePiece::new(zeros(2), q(1))];
        for i in 0..2 {
            pieces.push(AffinePiece::new(unit(2, i), q(0)));
            pieces.push(AffinePiece::new(neg(&unit(2, i)), q(0)));
        }
        CpwlFunction::max_affine(2, pieces).unwrap()
    }

    /// Independent oracle: collect distinct activity patterns on a fine rational grid.
    fn grid_patterns(f: &CpwlFunction, lo: i64, hi: i64, den: i64) -> Vec<CellPattern> {
        let mut seen = Vec::new();
        for a in lo * den..=hi * den {
            for c in lo * den..=hi * den {
                let x = vec![qf(a, den), qf(c, den)];
                if let Ok(p) = f.pattern_at(&x) {
                    if !seen.contains(&p) {
                        seen.push(p);
                    }
                }
            }
        }
        seen.sort();
        seen
    }

    #[test]
    fn evaluation() {
        let l1 = CpwlFunction::l1_norm(2);
        assert_eq!(l1.evaluate(&qvec(&[3, -2])).unwrap(), Extended::Finite(q(5)));
        let nn = CpwlFunction::nonneg_indicator(2);
        assert_eq!(nn.evaluate(&qvec(&[-1, 0])).unwrap(), Extended::PosInfinity);
        assert_eq!(max_one_linf().evaluate(&qvec(&[0, 0])).unwrap(), Extended::Finite(q(1)));
        // the expanded form agrees with the term form
        let pieces = l1.expanded_pieces(&b()).unwrap();
        assert_eq!(pieces.len(), 4);
        let flat = CpwlFunction::max_affine(2, pieces).unwrap();
        for x in [qvec(&[3, -2]), vec![qf(1, 2), qf(-7, 3)]] {
            assert_eq!(flat.evaluate(&x).unwrap(), l1.evaluate(&x).unwrap());
        }
    }

    #[test]
    fn subdifferentials() {
        let l1 = CpwlFunction::l1_norm(2);
        let sq = VPolyhedron::new(
            2,
            vec![qvec(&[1, 1]), qvec(&[-1, 1]), qvec(&[1, -1]), qvec(&[-1, -1])],
            vec![],
        )
        .unwrap();
        let at0 = l1.subdifferential(&qvec(&[0, 0])).unwrap();
        assert!(at0.to_vpolyhedron(&b()).unwrap().same_set(&sq));
        let edge = VPolyhedron::new(2, vec![qvec(&[1, 1]), qvec(&[1, -1])], vec![]).unwrap();
        let at10 = l1.subdifferential(&qvec(&[1, 0])).unwrap();
        assert!(at10.to_vpolyhedron(&b()).unwrap().same_set(&edge));
        let f = abs_diff_nonneg();
        let want = VPolyhedron::new(
            2,
            vec![qvec(&[1, -1]), qvec(&[-1, 1])],
            vec![qvec(&[-1, 0]), qvec(&[0, -1])],
        )
        .unwrap();
        let got = f.subdifferential(&qvec(&[0, 0])).unwrap();
        assert!(got.to_vpolyhedron(&b()).unwrap().same_set(&want));
        assert!(got.contains(&qvec(&[-3, 0])));
        assert!(!got.contains(&qvec(&[2, -1])));
        assert_eq!(f.subdifferential(&qvec(&[-1, 0])), Err(Error::NotInSet));
    }

    #[test]
    fn complex_sizes() {
        let l1 = CpwlFunction::l1_norm(2);
        let faces = l1.enumerate_complexes(&b()).unwrap();
        assert_eq!(faces.len(), 9);
        assert_eq!(faces.iter().map(|f| f.pattern.clone()).collect::<Vec<_>>(), grid_patterns(&l1, -2, 2, 2));
        let mut by_dim = [0usize; 3];
        for f in &faces {
            by_dim[f.dim_cell] += 1;
        }
        assert_eq!(by_dim, [1, 4, 4]);

        let single = CpwlFunction::max_affine(2, vec![AffinePiece::new(qvec(&[1, 2]), q(3))]).unwrap();
        let faces = single.enumerate_complexes(&b()).unwrap();
        assert_eq!(faces.len(), 1);
        assert_eq!((faces[0].dim_cell, faces[0].dim_subdiff), (2, 0));

        let m = max_one_linf();
        let faces = m.enumerate_complexes(&b()).unwrap();
        assert_eq!(faces.len(), 17);
        assert_eq!(faces.iter().map(|f| f.pattern.clone()).collect::<Vec<_>>(), grid_patterns(&m, -2, 2, 2));

        let f = abs_diff_nonneg();
        let faces = f.enumerate_complexes(&b()).unwrap();
        assert_eq!(faces.len(), 6);
        assert_eq!(faces.iter().map(|f| f.pattern.clone()).collect::<Vec<_>>(), grid_patterns(&f, -1, 2, 2));
    }

    #[test]
    fn dimension_cap_prunes() {
        let l1 = CpwlFunction::l1_norm(3);
        let all = l1.enumerate_complexes(&b()).unwrap();
        assert_eq!(all.len(), 27);
        let low = l1.enumerate_faces_upto(Some(1), &b()).unwrap();
        let expect: Vec<&DualFace> = all.iter().filter(|f| f.dim_subdiff <= 1).collect();
        assert_eq!(low.len(), expect.len());
        for (a, e) in low.iter().zip(expect) {
            assert_eq!(a.pattern, e.pattern);
        }
    }

    #[test]
    fn conjugates() {
        let l1 = CpwlFunction::l1_norm(2);
        assert_eq!(l1.conjugate_value(&[qf(1, 2), q(0)]).unwrap(), Extended::Finite(q(0)));
        assert_eq!(l1.conjugate_value(&qvec(&[2, 0])).unwrap(), Extended::PosInfinity);
        let pts = vec![qvec(&[1, 2]), qvec(&[-3, 0]), qvec(&[0, -1]), qvec(&[2, -2])];
        let hull = VPolyhedron::new(2, pts.clone(), vec![]).unwrap().to_h(&b()).unwrap();
        let chi = CpwlFunction::indicator(hull).unwrap();
        for y in [qvec(&[1, 0]), qvec(&[-2, 5]), vec![qf(1, 3), qf(-1, 2)]] {
            let support = pts.iter().map(|v| dot(v, &y)).max().unwrap();
            assert_eq!(chi.conjugate_value(&y).unwrap(), Extended::Finite(support));
        }
    }

    #[test]
    fn fenchel_young() {
        let l1 = CpwlFunction::l1_norm(2);
        assert!(l1.fenchel_young_check(&qvec(&[0, 0]), &[qf(1, 2), qf(1, 2)]).unwrap());
        assert!(!l1.fenchel_young_check(&qvec(&[1, 0]), &qvec(&[-1, 0])).unwrap());
        assert!(l1.fenchel_young_check(&qvec(&[1, 0]), &[q(1), qf(1, 3)]).unwrap());
        assert!(l1.fenchel_young_check(&qvec(&[1, 0]), &qvec(&[2, 0])).is_err());
    }

    #[test]
    fn accessibility_lp() {
        let abs1 = CpwlFunction::l1(&Matrix::from_i64(&[&[1, 0]]), &q(1)).unwrap();
        let vertex = abs1.subdifferential(&qvec(&[1, 0])).unwrap();
        let a = Matrix::from_i64(&[&[1, 0]]);
        assert_eq!(vertex.meet_row_space(&a).unwrap(), Some(qvec(&[1])));
        let a2 = Matrix::from_i64(&[&[1, 1]]);
        assert_eq!(vertex.meet_row_space(&a2).unwrap(), None);
        let l1 = CpwlFunction::l1_norm(2);
        let edge = l1.subdifferential(&qvec(&[1, 0])).unwrap();
        let z = edge.meet_row_space(&a).unwrap().unwrap();
        assert!(edge.contains(&a.tmul_vec(&z).unwrap()));
    }

    /// Properties checked on the fixed acceptance family plus `‖·‖₁` in R³.
    fn family() -> Vec<CpwlFunction> {
        vec![CpwlFunction::l1_norm(2), CpwlFunction::l1_norm(3), abs_diff_nonneg(), max_one_linf()]
    }

    #[test]
    fn duality_of_complexes() {
        for f in family() {
            let faces = f.enumerate_complexes(&b()).unwrap();
            for face in &faces {
                // dimensions through independent routes
                let dc = face.cell.dimension().unwrap();
                let ds = face.subdiff.to_vpolyhedron(&b()).unwrap().dimension().unwrap();
                assert_eq!(dc + ds, f.ambient_dim(), "{}", face.pattern);
                assert_eq!((dc, ds), (face.dim_cell, face.dim_subdiff));
                // orthogonality on generator differences
                let cell_v = face.cell.to_v(&b()).unwrap();
                let sub_v = face.subdiff.to_vpolyhedron(&b()).unwrap();
                let mut cdirs: Vec<QVector> = cell_v.points().iter().map(|p| sub(p, &cell_v.points()[0])).collect();
                cdirs.extend(cell_v.rays().iter().cloned());
                let mut sdirs: Vec<QVector> = sub_v.points().iter().map(|p| sub(p, &sub_v.points()[0])).collect();
                sdirs.extend(sub_v.rays().iter().cloned());
                for c in &cdirs {
                    for s in &sdirs {
                        assert!(dot(c, s).is_zero(), "{}", face.pattern);
                    }
                }
                // subdifferential is constant on the relative interior
                assert_eq!(f.pattern_at(&face.relint).unwrap(), face.pattern);
            }
            // order reversal: F ⊆ H iff ∂f_H ⊆ ∂f_F
            let vs: Vec<VPolyhedron> = faces.iter().map(|x| x.subdiff.to_vpolyhedron(&b()).unwrap()).collect();
            let cs: Vec<VPolyhedron> = faces.iter().map(|x| x.cell.to_v(&b()).unwrap()).collect();
            for i in 0..faces.len() {
                for j in 0..faces.len() {
                    let cell_in = cs[i].is_subset_of(&cs[j]);
                    let sub_in = vs[j].is_subset_of(&vs[i]);
                    assert_eq!(cell_in, sub_in, "{} vs {}", faces[i].pattern, faces[j].pattern);
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rational() -> impl Strategy<Value = Rational> {
            (-6i64..=6, prop::sample::select(vec![1i64, 2, 3])).prop_map(|(n, d)| qf(n, d))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn pointwise_conjugacy(which in 0usize..4, x in prop::collection::vec(rational(), 3), y in prop::collection::vec(rational(), 3)) {
                let f = &family()[which];
                let n = f.ambient_dim();
                let (x, y) = (&x[..n], &y[..n]);
                prop_assume!(f.evaluate(x).unwrap() != Extended::PosInfinity);
                prop_assume!(f.conjugate_value(y).unwrap() != Extended::PosInfinity);
                let fy = f.fenchel_young_check(x, y).unwrap();
                let member = f.subdifferential(x).unwrap().contains(y);
                prop_assert_eq!(fy, member);
            }

            #[test]
            fn constant_subdifferential(which in 0usize..4, t in prop::collection::vec(0i64..=4, 4)) {
                let f = &family()[which];
                for face in f.enumerate_complexes(&Budget::default()).unwrap() {
                    // move from the relint point toward cell generators by small steps
                    let v = face.cell.to_v(&Budget::default()).unwrap();
                    let mut x = face.relint.clone();
                    for (k, p) in v.points().iter().chain(v.rays()).enumerate() {
                        let w = qf(t[k % t.len()], 50);
                        let dir = if k < v.points().len() { sub(p, &face.relint) } else { p.clone() };
                        x = add(&x, &scale(&dir, &w));
                    }
                    if face.cell.contains(&x) && f.pattern_at(&x).unwrap() == face.pattern {
                        let a = f.subdifferential(&x).unwrap().to_vpolyhedron(&Budget::default()).unwrap();
                        let b = face.subdiff.to_vpolyhedron(&Budget::default()).unwrap();
                        prop_assert!(a.same_set(&b));
                    }
                }
            }
        }
    }
}
