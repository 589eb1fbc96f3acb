//! Well-posedness verdicts, non-uniqueness certificates and the exact solver for
//! `min_x ½‖Ax − b‖²_Σ + f(x)`.
//!
//! A dual face `∂f_F` is *accessible* when it meets the row space of `A`, i.e. some `z`
//! has `Aᵀz ∈ ∂f_F`. Note that `z = 0` always lies in the row space, so every face whose
//! subdifferential contains the origin is accessible.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::budget::Budget;
use crate::error::{check_len, Error, Result};
use crate::exact::{add, dot, is_zero_vec, primitive, q, qf, scale, sub, Matrix, QVector, Rational};
use crate::lp::{LinearProgram, LpOutcome};
use crate::numeric::{solve_numeric, NumericSolution};
use crate::pwl::{AffinePiece, CellPattern, CpwlFunction, DualFace, Extended, Subdifferential};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemInstance {
    a: Matrix,
    f: CpwlFunction,
    sigma: Matrix,
}

impl ProblemInstance {
    pub fn new(a: Matrix, f: CpwlFunction) -> Result<Self> {
        let m = a.nrows();
        Self::with_sigma(a, f, Matrix::identity(m))
    }

    pub fn with_sigma(a: Matrix, f: CpwlFunction, sigma: Matrix) -> Result<Self> {
        check_len(f.ambient_dim(), a.ncols())?;
        check_len(a.nrows(), sigma.nrows())?;
        check_len(a.nrows(), sigma.ncols())?;
        if !sigma.is_positive_definite() {
            return Err(Error::Precondition("sigma must be symmetric positive definite".into()));
        }
        Ok(ProblemInstance { a, f, sigma })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn f(&self) -> &CpwlFunction {
        &self.f
    }

    pub fn sigma(&self) -> &Matrix {
        &self.sigma
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn rank_a(&self) -> usize {
        self.a.rank()
    }

    pub fn nullity_a(&self) -> usize {
        self.n() - self.rank_a()
    }

    /// `AᵀΣ(b − Ax)`
    pub fn residual_gradient(&self, b: &[Rational], x: &[Rational]) -> Result<QVector> {
        let r = sub(b, &self.a.mul_vec(x)?);
        self.a.tmul_vec(&self.sigma.mul_vec(&r)?)
    }

    /// `½(Ax − b)ᵀΣ(Ax − b) + f(x)`
    pub fn objective(&self, b: &[Rational], x: &[Rational]) -> Result<Extended> {
        check_len(self.m(), b.len())?;
        let fx = match self.f.evaluate(x)? {
            Extended::Finite(v) => v,
            Extended::PosInfinity => return Ok(Extended::PosInfinity),
        };
        let r = sub(&self.a.mul_vec(x)?, b);
        let quad = dot(&r, &self.sigma.mul_vec(&r)?) * qf(1, 2);
        Ok(Extended::Finite(quad + fx))
    }

    /// Fermat's rule `AᵀΣ(b − Ax) ∈ ∂f(x)`, checked exactly with a freshly computed
    /// subdifferential.
    pub fn fermat_holds(&self, b: &[Rational], x: &[Rational]) -> Result<bool> {
        check_len(self.m(), b.len())?;
        check_len(self.n(), x.len())?;
        if !self.f.domain().contains(x) {
            return Ok(false);
        }
        let g = self.residual_gradient(b, x)?;
        Ok(self.f.subdifferential(x)?.contains(&g))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    WellPosed,
    IllPosed,
    HypothesisViolated,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::WellPosed => "well-posed",
            Status::IllPosed => "ill-posed",
            Status::HypothesisViolated => "hypothesis-violated",
        }
    }
}

#[derive(Clone, Debug)]
pub struct WellPosednessVerdict {
    pub status: Status,
    pub offending_face: Option<DualFace>,
    pub row_space_witness: Option<QVector>,
    pub rank_a: usize,
    pub nullity_a: usize,
    /// Dual faces with subdifferential dimension below the nullity that were checked.
    pub faces_scanned: usize,
    /// False when no dual face is accessible, so no `b` has a minimizer.
    pub solutions_exist: bool,
}

/// Some `z` with `Aᵀz ∈ ∂f_F`, or `None` when the face is inaccessible.
pub fn accessibility(inst: &ProblemInstance, face: &DualFace) -> Result<Option<QVector>> {
    let z = face.subdiff.meet_row_space(inst.a())?;
    if let Some(z) = &z {
        let y = inst.a().tmul_vec(z)?;
        if !face.subdiff.contains(&y) {
            return Err(Error::Construction("row space witness failed membership".into()));
        }
    }
    Ok(z)
}

/// The union of all subdifferentials is the domain of the conjugate, which is
/// `Σ_τ conv(all pieces of τ) + cone(all domain normals)`.
fn conjugate_domain(f: &CpwlFunction) -> Subdifferential {
    let all = CellPattern {
        active_pieces: f.terms().iter().map(|t| (0..t.pieces.len()).collect()).collect(),
        active_domain_constraints: (0..f.domain().inequalities().len()).collect(),
    };
    f.subdiff_of(&all)
}

/// Sort key for the face scan: subdifferential dimension, then pattern.
fn scan_order(faces: &mut [DualFace]) {
    faces.sort_by(|a, b| (a.dim_subdiff, &a.pattern).cmp(&(b.dim_subdiff, &b.pattern)));
}

pub fn well_posedness(inst: &ProblemInstance, budget: &Budget) -> Result<WellPosednessVerdict> {
    let rank_a = inst.rank_a();
    let nullity_a = inst.n() - rank_a;
    let mut verdict = WellPosednessVerdict {
        status: Status::WellPosed,
        offending_face: None,
        row_space_witness: None,
        rank_a,
        nullity_a,
        faces_scanned: 0,
        solutions_exist: true,
    };
    if !inst.f().is_full_dimensional() {
        verdict.status = Status::HypothesisViolated;
        return Ok(verdict);
    }
    if conjugate_domain(inst.f()).meet_row_space(inst.a())?.is_none() {
        verdict.status = Status::IllPosed;
        verdict.solutions_exist = false;
        return Ok(verdict);
    }
    if nullity_a == 0 {
        return Ok(verdict);
    }
    let mut faces = inst.f().enumerate_faces_upto(Some(nullity_a - 1), budget)?;
    scan_order(&mut faces);
    for face in faces {
        verdict.faces_scanned += 1;
        if let Some(z) = accessibility(inst, &face)? {
            verdict.status = Status::IllPosed;
            verdict.row_space_witness = Some(z);
            verdict.offending_face = Some(face);
            break;
        }
    }
    Ok(verdict)
}

#[derive(Clone, Debug)]
pub struct IllPosednessReport {
    /// Minimum subdifferential dimension over accessible faces; `None` when no face is
    /// accessible (the number is infinite).
    pub number: Option<usize>,
    pub face: Option<DualFace>,
    pub witness: Option<QVector>,
    pub rank_a: usize,
    pub nullity_a: usize,
}

pub fn ill_posedness_number(inst: &ProblemInstance, budget: &Budget) -> Result<IllPosednessReport> {
    let mut faces = inst.f().enumerate_complexes(budget)?;
    scan_order(&mut faces);
    let mut report = IllPosednessReport {
        number: None,
        face: None,
        witness: None,
        rank_a: inst.rank_a(),
        nullity_a: inst.nullity_a(),
    };
    for face in faces {
        if let Some(z) = accessibility(inst, &face)? {
            report.number = Some(face.dim_subdiff);
            report.witness = Some(z);
            report.face = Some(face);
            break;
        }
    }
    Ok(report)
}

/// Cross-check for [`ill_posedness_number`]: visits every face in enumeration order and
/// takes the minimum, without relying on the sorted scan.
pub fn ill_posedness_number_exhaustive(inst: &ProblemInstance, budget: &Budget) -> Result<Option<usize>> {
    let mut best: Option<usize> = None;
    for face in inst.f().enumerate_complexes(budget)? {
        if accessibility(inst, &face)?.is_some() {
            best = Some(best.map_or(face.dim_subdiff, |b| b.min(face.dim_subdiff)));
        }
    }
    Ok(best)
}

/// Two distinct exact minimizers for the same data `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonUniquenessCertificate {
    pub b: QVector,
    pub x: QVector,
    pub y: QVector,
    /// `y − x`
    pub direction: QVector,
}

impl NonUniquenessCertificate {
    /// Re-checks every claim from scratch.
    pub fn verify(&self, inst: &ProblemInstance) -> Result<bool> {
        if self.x == self.y || add(&self.x, &self.direction) != self.y {
            return Ok(false);
        }
        if !is_zero_vec(&inst.a().mul_vec(&self.direction)?) {
            return Ok(false);
        }
        if inst.f().evaluate(&self.x)? != inst.f().evaluate(&self.y)? {
            return Ok(false);
        }
        Ok(inst.fermat_holds(&self.b, &self.x)? && inst.fermat_holds(&self.b, &self.y)?)
    }
}

/// Two minimizers moving inside the cell of `face` along `null(A) ∩ (∂f_F)⊥`.
pub fn non_uniqueness_witness(
    inst: &ProblemInstance,
    face: &DualFace,
    z: &[Rational],
) -> Result<NonUniquenessCertificate> {
    check_len(inst.m(), z.len())?;
    let atz = inst.a().tmul_vec(z)?;
    if !face.subdiff.contains(&atz) {
        return Err(Error::Precondition("Aᵀz is not in the face's subdifferential".into()));
    }
    let nullity = inst.nullity_a();
    if face.dim_subdiff >= nullity {
        return Err(Error::Precondition(format!(
            "subdifferential dimension {} is not below the nullity {}",
            face.dim_subdiff, nullity
        )));
    }
    let x = face.cell.relative_interior_point()?;
    let perp = face.subdiff.direction_space().orthogonal_complement();
    let null_a = inst.a().nullspace();
    let common = null_a.intersection(&perp)?;
    let d = common
        .basis()
        .first()
        .map(|v| primitive(v))
        .ok_or_else(|| Error::Construction("null(A) meets the orthogonal complement trivially".into()))?;
    for c in face.cell.equalities() {
        if !dot(&c.normal, &d).is_zero() {
            return Err(Error::Construction("direction leaves the cell's affine hull".into()));
        }
    }
    let mut step: Option<Rational> = None;
    for c in face.cell.inequalities() {
        let rate = dot(&c.normal, &d);
        if rate.is_positive() {
            let s = c.slack(&x) / rate;
            step = Some(match step {
                Some(t) if t <= s => t,
                _ => s,
            });
        }
    }
    let eps = match step {
        None => Rational::one(),
        Some(s) if s.is_positive() => s * qf(1, 2),
        Some(_) => {
            return Err(Error::Construction(
                "zero-width cell along the witness direction".into(),
            ))
        }
    };
    let direction = scale(&d, &eps);
    let y = add(&x, &direction);
    let sigma_inv = inst
        .sigma()
        .inverse()
        .expect("positive definite sigma is invertible");
    let b = add(&inst.a().mul_vec(&x)?, &sigma_inv.mul_vec(z)?);
    let cert = NonUniquenessCertificate { b, x, y, direction };
    if !cert.verify(inst)? {
        return Err(Error::Construction("certificate failed self-verification".into()));
    }
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub minimizer: QVector,
    pub pattern: CellPattern,
    pub objective: Rational,
    /// Fermat's rule re-checked exactly at the minimizer.
    pub fermat_verified: bool,
    /// Nonzero `d` with `minimizer + d` also optimal, when the minimizer is not unique.
    pub flat_direction: Option<QVector>,
}

/// Exact solver holding the (lazily enumerated) complex of `f`.
pub struct ExactSolver<'a> {
    inst: &'a ProblemInstance,
    budget: Budget,
    faces: Option<Vec<DualFace>>,
    /// `AᵀΣA` and `AᵀΣ`
    ata: Matrix,
    at_sigma: Matrix,
}

impl<'a> ExactSolver<'a> {
    pub fn new(inst: &'a ProblemInstance, budget: &Budget) -> Result<Self> {
        let at_sigma = inst.a().transpose().mul(inst.sigma())?;
        let ata = at_sigma.mul(inst.a())?;
        Ok(ExactSolver {
            inst,
            budget: *budget,
            faces: None,
            ata,
            at_sigma,
        })
    }

    fn faces(&mut self) -> Result<&[DualFace]> {
        if self.faces.is_none() {
            self.faces = Some(self.inst.f().enumerate_complexes(&self.budget)?);
        }
        Ok(self.faces.as_deref().unwrap())
    }

    /// LP over `(x, λ, μ)`: `AᵀΣA x + Σλv + Σμa = AᵀΣb`, `x` in the closed cell.
    fn try_cell(&self, face: &DualFace, rhs: &[Rational]) -> Option<QVector> {
        let n = self.inst.n();
        let gens: Vec<&QVector> = face
            .subdiff
            .term_generators()
            .iter()
            .flatten()
            .chain(face.subdiff.normals())
            .collect();
        let nw = gens.len();
        let mut lp = LinearProgram::new(n + nw);
        for j in n..n + nw {
            lp.set_nonneg(j);
        }
        let mut off = n;
        for g in face.subdiff.term_generators() {
            let mut row = vec![Rational::zero(); n + nw];
            for r in row.iter_mut().skip(off).take(g.len()) {
                *r = Rational::one();
            }
            lp.eq(row, Rational::one());
            off += g.len();
        }
        for k in 0..n {
            let mut row: QVector = self.ata.row(k).to_vec();
            row.extend(gens.iter().map(|g| g[k].clone()));
            lp.eq(row, rhs[k].clone());
        }
        let pad = |c: &crate::polyhedra::Constraint| {
            let mut v = c.normal.clone();
            v.extend(std::iter::repeat_n(Rational::zero(), nw));
            v
        };
        for c in face.cell.inequalities() {
            lp.le(pad(c), c.rhs.clone());
        }
        for c in face.cell.equalities() {
            lp.eq(pad(c), c.rhs.clone());
        }
        lp.feasible_point().map(|mut p| {
            p.truncate(n);
            p
        })
    }

    /// Activity pattern read off a float point with a tolerance.
    fn approximate_pattern(&self, x: &[f64]) -> CellPattern {
        let f = self.inst.f();
        let tol = 1e-6;
        let val = |p: &AffinePiece| {
            p.slope
                .iter()
                .zip(x)
                .map(|(a, b)| crate::exact::to_f64(a) * b)
                .sum::<f64>()
                + crate::exact::to_f64(&p.offset)
        };
        let active_pieces = f
            .terms()
            .iter()
            .map(|t| {
                let vals: Vec<f64> = t.pieces.iter().map(val).collect();
                let best = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                (0..vals.len()).filter(|&i| vals[i] >= best - tol).collect()
            })
            .collect();
        let active_domain_constraints = f
            .domain()
            .inequalities()
            .iter()
            .enumerate()
            .filter(|(_, c)| {
                let lhs: f64 = c.normal.iter().zip(x).map(|(a, b)| crate::exact::to_f64(a) * b).sum();
                (crate::exact::to_f64(&c.rhs) - lhs).abs() <= tol
            })
            .map(|(j, _)| j)
            .collect();
        CellPattern {
            active_pieces,
            active_domain_constraints,
        }
    }

    pub fn solve(&mut self, b: &[Rational]) -> Result<SolveResult> {
        check_len(self.inst.m(), b.len())?;
        let rhs = self.at_sigma.mul_vec(b)?;
        let hint = {
            let bf: Vec<f64> = b.iter().map(crate::exact::to_f64).collect();
            solve_numeric(self.inst, &bf, 1e-9, 5_000)
                .ok()
                .map(|s| self.approximate_pattern(&s.x))
        };
        self.faces()?;
        let faces = self.faces.as_ref().unwrap();
        let mut order: Vec<usize> = (0..faces.len()).collect();
        if let Some(h) = &hint {
            if let Some(pos) = faces.iter().position(|f| &f.pattern == h) {
                order.remove(pos);
                order.insert(0, pos);
            }
        }
        for &i in &order {
            let face = &faces[i];
            let Some(x) = self.try_cell(face, &rhs) else {
                continue;
            };
            if !self.inst.fermat_holds(b, &x)? {
                return Err(Error::Construction("cell solution failed Fermat's rule".into()));
            }
            let objective = match self.inst.objective(b, &x)? {
                Extended::Finite(v) => v,
                Extended::PosInfinity => unreachable!("minimizer lies in the domain"),
            };
            let flat_direction = self.flat_direction(b, &x)?;
            return Ok(SolveResult {
                pattern: self.inst.f().pattern_at(&x)?,
                minimizer: x,
                objective,
                fermat_verified: true,
                flat_direction,
            });
        }
        Err(Error::Unbounded("no cell admits a point satisfying Fermat's rule".into()))
    }

    /// All minimizers share `Ax` and `f(x)`, so the solution set is
    /// `{x : Ax = Ax*, f(x) <= f(x*)}`; maximize and minimize each coordinate over it.
    fn flat_direction(&self, b: &[Rational], xs: &[Rational]) -> Result<Option<QVector>> {
        let _ = b;
        let f = self.inst.f();
        let n = self.inst.n();
        let nt = f.terms().len();
        let ax = self.inst.a().mul_vec(xs)?;
        let fx = f.evaluate(xs)?.finite().cloned().ok_or(Error::NotInSet)?;
        let mut base = LinearProgram::new(n + nt);
        for i in 0..self.inst.m() {
            let mut row = self.inst.a().row(i).to_vec();
            row.extend(std::iter::repeat_n(Rational::zero(), nt));
            base.eq(row, ax[i].clone());
        }
        for (tau, t) in f.terms().iter().enumerate() {
            for p in &t.pieces {
                let mut g = p.slope.clone();
                g.extend(std::iter::repeat_n(Rational::zero(), nt));
                g[n + tau] = -Rational::one();
                base.le(g, -p.offset.clone());
            }
        }
        let widen = |c: &crate::polyhedra::Constraint| {
            let mut g = c.normal.clone();
            g.extend(std::iter::repeat_n(Rational::zero(), nt));
            g
        };
        for c in f.domain().inequalities() {
            base.le(widen(c), c.rhs.clone());
        }
        for c in f.domain().equalities() {
            base.eq(widen(c), c.rhs.clone());
        }
        let mut sum_t = vec![Rational::zero(); n + nt];
        for s in sum_t.iter_mut().skip(n) {
            *s = Rational::one();
        }
        base.le(sum_t, fx);
        for k in 0..n {
            for sign in [1i64, -1] {
                let mut lp = base.clone();
                let mut c = vec![Rational::zero(); n + nt];
                c[k] = q(sign);
                lp.maximize(c);
                match lp.solve() {
                    LpOutcome::Optimal { point, .. } => {
                        if point[k] != xs[k] {
                            return Ok(Some(sub(&point[..n], xs)));
                        }
                    }
                    LpOutcome::Unbounded => {
                        // The solution set contains a ray; recover a finite second point.
                        let mut capped = base.clone();
                        let mut row = vec![Rational::zero(); n + nt];
                        row[k] = q(sign);
                        capped.le(row.clone(), &xs[k] * q(sign) + Rational::one());
                        capped.maximize(row);
                        let p = capped.solve();
                        let point = p.point().expect("capped LP is bounded and feasible");
                        return Ok(Some(sub(&point[..n], xs)));
                    }
                    LpOutcome::Infeasible => {
                        return Err(Error::Construction("solution set LP infeasible".into()))
                    }
                }
            }
        }
        Ok(None)
    }

    /// Solves at `b1`, `b2` and `λb1 + (1−λ)b2` and tests exact affinity when the three
    /// solutions lie in the relative interior of one cell.
    pub fn probe(&mut self, b1: &[Rational], b2: &[Rational], lambda: &Rational) -> Result<ProbeReport> {
        if lambda.is_negative() || *lambda > Rational::one() {
            return Err(Error::Precondition("lambda must lie in [0, 1]".into()));
        }
        let mix = add(&scale(b1, lambda), &scale(b2, &(Rational::one() - lambda)));
        let s1 = self.solve(b1)?;
        let s2 = self.solve(b2)?;
        let s3 = self.solve(&mix)?;
        // Affinity is only guaranteed on the relative interior of one cell, so the
        // exact activity patterns must coincide; a common closed cell is not enough.
        let shared_cell = (s1.pattern == s2.pattern && s2.pattern == s3.pattern).then(|| s1.pattern.clone());
        let combo = add(
            &scale(&s1.minimizer, lambda),
            &scale(&s2.minimizer, &(Rational::one() - lambda)),
        );
        let affine = shared_cell.as_ref().map(|_| combo == s3.minimizer);
        Ok(ProbeReport {
            solutions: [s1.minimizer, s2.minimizer, s3.minimizer],
            mixed_b: mix,
            shared_cell,
            affine,
        })
    }
}

pub fn solve_exact(inst: &ProblemInstance, b: &[Rational], budget: &Budget) -> Result<SolveResult> {
    ExactSolver::new(inst, budget)?.solve(b)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    /// Minimizers at `b1`, `b2` and the mixture.
    pub solutions: [QVector; 3],
    pub mixed_b: QVector,
    /// A cell containing all three solutions, if there is one.
    pub shared_cell: Option<CellPattern>,
    /// Exact affinity, only tested when a shared cell exists.
    pub affine: Option<bool>,
}

pub fn solution_map_probe(
    inst: &ProblemInstance,
    b1: &[Rational],
    b2: &[Rational],
    lambda: &Rational,
    budget: &Budget,
) -> Result<ProbeReport> {
    let verdict = well_posedness(inst, budget)?;
    if verdict.status != Status::WellPosed {
        return Err(Error::Precondition(format!(
            "the instance is {}",
            verdict.status.label()
        )));
    }
    ExactSolver::new(inst, budget)?.probe(b1, b2, lambda)
}

/// Numeric counterpart of [`solve_exact`] for rational data.
pub fn solve_numeric_rational(inst: &ProblemInstance, b: &[Rational], tol: f64) -> Result<NumericSolution> {
    check_len(inst.m(), b.len())?;
    let bf: Vec<f64> = b.iter().map(crate::exact::to_f64).collect();
    solve_numeric(inst, &bf, tol, crate::numeric::DEFAULT_MAX_ITERATIONS)
}

/// Smallest dimension of a subdifferential containing the origin.
pub fn origin_subdiff_dim(f: &CpwlFunction, budget: &Budget) -> Result<Option<usize>> {
    let origin = vec![Rational::zero(); f.ambient_dim()];
    Ok(f
        .enumerate_complexes(budget)?
        .iter()
        .filter(|face| face.subdiff.contains(&origin))
        .map(|face| face.dim_subdiff)
        .min())
}

#[derive(Clone, Debug)]
pub struct MonteCarloReport {
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    /// Smallest subdifferential dimension containing the origin.
    pub p: Option<usize>,
    pub well_posed: usize,
    pub ill_posed: usize,
    pub hypothesis_violated: usize,
    /// Sampled matrices that came out ill-posed, with their trial indices.
    pub ill_posed_samples: Vec<Matrix>,
    pub ill_posed_trials: Vec<usize>,
}

impl MonteCarloReport {
    pub fn fraction(&self) -> Option<f64> {
        if self.trials == 0 {
            None
        } else {
            Some(self.well_posed as f64 / self.trials as f64)
        }
    }
}

const DENOMINATORS: [i64; 5] = [1, 2, 3, 5, 7];

/// Matrix with entries `k / d`, `k` uniform in `[-100, 100]`, `d` drawn from a fixed list.
pub fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Matrix {
    let mut a = Matrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            let k = rng.gen_range(-100i64..=100);
            let d = DENOMINATORS[rng.gen_range(0..DENOMINATORS.len())];
            a.set(i, j, qf(k, d));
        }
    }
    a
}

pub fn monte_carlo_wellposedness(
    f: &CpwlFunction,
    m: usize,
    trials: usize,
    seed: u64,
    budget: &Budget,
) -> Result<MonteCarloReport> {
    let mut report = MonteCarloReport {
        m,
        trials,
        seed,
        p: None,
        well_posed: 0,
        ill_posed: 0,
        hypothesis_violated: 0,
        ill_posed_samples: Vec::new(),
        ill_posed_trials: Vec::new(),
    };
    if trials == 0 {
        return Ok(report);
    }
    let p = origin_subdiff_dim(f, budget)?
        .ok_or_else(|| Error::Precondition("no subdifferential contains the origin".into()))?;
    report.p = Some(p);
    if m < p {
        return Err(Error::Precondition(format!(
            "m = {m} is below p = {p}, the smallest subdifferential dimension containing the origin"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let a = random_matrix(&mut rng, m, f.ambient_dim());
        let inst = ProblemInstance::new(a.clone(), f.clone())?;
        match well_posedness(&inst, budget)?.status {
            Status::WellPosed => report.well_posed += 1,
            Status::IllPosed => {
                report.ill_posed += 1;
                report.ill_posed_samples.push(a);
                report.ill_posed_trials.push(trial);
            }
            Status::HypothesisViolated => report.hypothesis_violated += 1,
        }
    }
    Ok(report)
}

/// Generalized Tikhonov `½‖Ax − b‖² + ½‖Lx − c‖²` is well-posed exactly when
/// `null(A) ∩ null(L) = {0}`.
pub fn tikhonov_well_posed(a: &Matrix, l: &Matrix) -> Result<bool> {
    Ok(a.stack(l)?.rank() == a.ncols())
}

/// The unique solution of `(AᵀA + LᵀL)x = Aᵀb + Lᵀc`, if unique.
pub fn tikhonov_solve(a: &Matrix, l: &Matrix, b: &[Rational], c: &[Rational]) -> Result<Option<QVector>> {
    let at = a.transpose();
    let lt = l.transpose();
    let lhs = at.mul(a)?;
    let lhs2 = lt.mul(l)?;
    let mut normal = Matrix::zeros(a.ncols(), a.ncols());
    for i in 0..a.ncols() {
        for j in 0..a.ncols() {
            normal.set(i, j, lhs.get(i, j) + lhs2.get(i, j));
        }
    }
    let rhs = add(&at.mul_vec(b)?, &lt.mul_vec(c)?);
    match normal.inverse() {
        Some(inv) => Ok(Some(inv.mul_vec(&rhs)?)),
        None => Ok(None),
    }
}
