//! Exact convex polyhedra in H- and V-representation.

use num_traits::{One, Signed, Zero};

use crate::budget::Budget;
use crate::error::{check_len, Error, Result};
use crate::exact::{
    add, dot, is_zero_vec, neg, primitive, primitive_factor, q, scale, sub, unit, zeros, Matrix,
    QVector, Rational, Subspace,
};
use crate::lp::{LinearProgram, LpOutcome};
use crate::pattern::{Mark, PatternSystem};

/// `normal · x <= rhs` or `normal · x = rhs`, depending on where it is stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub normal: QVector,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(normal: QVector, rhs: Rational) -> Self {
        Constraint { normal, rhs }
    }

    /// Same constraint scaled so the normal has coprime integer entries.
    pub fn normalized(&self) -> Constraint {
        let f = primitive_factor(&self.normal);
        Constraint {
            normal: scale(&self.normal, &f),
            rhs: &self.rhs * &f,
        }
    }

    pub fn slack(&self, x: &[Rational]) -> Rational {
        &self.rhs - dot(&self.normal, x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolyhedron {
    dim: usize,
    ineqs: Vec<Constraint>,
    eqs: Vec<Constraint>,
}

/// Nonnegative weights on inequalities and free weights on equalities whose combination
/// reads `0·x <= -1` (or `= -1`), proving the system has no solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub inequality_weights: QVector,
    pub equality_weights: QVector,
}

impl FarkasCertificate {
    pub fn verify(&self, p: &HPolyhedron) -> bool {
        if self.inequality_weights.len() != p.ineqs.len()
            || self.equality_weights.len() != p.eqs.len()
            || self.inequality_weights.iter().any(Signed::is_negative)
        {
            return false;
        }
        let mut combo = zeros(p.dim);
        let mut rhs = Rational::zero();
        let pairs = self
            .inequality_weights
            .iter()
            .zip(&p.ineqs)
            .chain(self.equality_weights.iter().zip(&p.eqs));
        for (w, c) in pairs {
            if w.is_zero() {
                continue;
            }
            combo = add(&combo, &scale(&c.normal, w));
            rhs += w * &c.rhs;
        }
        is_zero_vec(&combo) && rhs.is_negative()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(QVector),
    Infeasible(FarkasCertificate),
}

/// One nonempty face. For an H-polyhedron `active_set` lists the inequalities tight on the
/// face; for a V-polyhedron it lists the generators lying on it (points first, then rays
/// offset by the number of points).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceDescriptor {
    pub active_set: Vec<usize>,
    pub dim: usize,
    pub relint_point: QVector,
}

impl HPolyhedron {
    pub fn whole_space(dim: usize) -> Self {
        HPolyhedron {
            dim,
            ineqs: Vec::new(),
            eqs: Vec::new(),
        }
    }

    pub fn new(dim: usize, ineqs: Vec<Constraint>, eqs: Vec<Constraint>) -> Result<Self> {
        for c in ineqs.iter().chain(&eqs) {
            check_len(dim, c.normal.len())?;
        }
        Ok(HPolyhedron { dim, ineqs, eqs })
    }

    /// `{x : -r <= x_i <= r}`
    pub fn cube(dim: usize, r: Rational) -> Self {
        let mut p = Self::whole_space(dim);
        for i in 0..dim {
            p.ineqs.push(Constraint::new(unit(dim, i), r.clone()));
            p.ineqs.push(Constraint::new(neg(&unit(dim, i)), r.clone()));
        }
        p
    }

    /// `{x : x >= 0}` written as `-x_i <= 0`.
    pub fn nonneg_orthant(dim: usize) -> Self {
        let mut p = Self::whole_space(dim);
        for i in 0..dim {
            p.ineqs.push(Constraint::new(neg(&unit(dim, i)), Rational::zero()));
        }
        p
    }

    pub fn add_inequality(&mut self, normal: QVector, rhs: Rational) -> Result<()> {
        check_len(self.dim, normal.len())?;
        self.ineqs.push(Constraint::new(normal, rhs));
        Ok(())
    }

    pub fn add_equality(&mut self, normal: QVector, rhs: Rational) -> Result<()> {
        check_len(self.dim, normal.len())?;
        self.eqs.push(Constraint::new(normal, rhs));
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn inequalities(&self) -> &[Constraint] {
        &self.ineqs
    }

    pub fn equalities(&self) -> &[Constraint] {
        &self.eqs
    }

    pub fn intersect(&self, other: &HPolyhedron) -> Result<HPolyhedron> {
        check_len(self.dim, other.dim)?;
        let mut p = self.clone();
        p.ineqs.extend(other.ineqs.iter().cloned());
        p.eqs.extend(other.eqs.iter().cloned());
        Ok(p)
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim
            && self.ineqs.iter().all(|c| !c.slack(x).is_negative())
            && self.eqs.iter().all(|c| c.slack(x).is_zero())
    }

    /// Indices of inequalities holding with equality at `x`.
    pub fn tight_at(&self, x: &[Rational]) -> Vec<usize> {
        (0..self.ineqs.len())
            .filter(|&i| self.ineqs[i].slack(x).is_zero())
            .collect()
    }

    fn program(&self) -> LinearProgram {
        let mut lp = LinearProgram::new(self.dim);
        for c in &self.ineqs {
            lp.le(c.normal.clone(), c.rhs.clone());
        }
        for c in &self.eqs {
            lp.eq(c.normal.clone(), c.rhs.clone());
        }
        lp
    }

    /// Maximizes `c·x` over the polyhedron.
    pub fn maximize(&self, c: &[Rational]) -> Result<LpOutcome> {
        check_len(self.dim, c.len())?;
        let mut lp = self.program();
        lp.maximize(c.to_vec());
        Ok(lp.solve())
    }

    /// A feasible point, or a Farkas certificate obtained by solving the alternative system
    /// `{y_I >= 0, Aᵀy = 0, bᵀy = -1}`.
    pub fn lp_feasible(&self) -> Feasibility {
        if let Some(x) = self.program().feasible_point() {
            return Feasibility::Feasible(x);
        }
        let mi = self.ineqs.len();
        let me = self.eqs.len();
        let mut alt = LinearProgram::new(mi + me);
        for i in 0..mi {
            alt.set_nonneg(i);
        }
        let all: Vec<&Constraint> = self.ineqs.iter().chain(&self.eqs).collect();
        for j in 0..self.dim {
            alt.eq(all.iter().map(|c| c.normal[j].clone()).collect(), Rational::zero());
        }
        alt.eq(all.iter().map(|c| c.rhs.clone()).collect(), -Rational::one());
        let y = alt
            .feasible_point()
            .expect("theorem of alternatives: an infeasible system has a certificate");
        let cert = FarkasCertificate {
            inequality_weights: y[..mi].to_vec(),
            equality_weights: y[mi..].to_vec(),
        };
        debug_assert!(cert.verify(self));
        Feasibility::Infeasible(cert)
    }

    pub fn is_empty(&self) -> bool {
        self.program().feasible_point().is_none()
    }

    /// Implicit equalities and a relative interior point. Rows are normalized to primitive
    /// integer normals before the common margin is maximized, which makes the returned point
    /// independent of how the user scaled each inequality.
    fn hull(&self) -> Result<(Vec<bool>, QVector)> {
        let normalized: Vec<Constraint> = self.ineqs.iter().map(Constraint::normalized).collect();
        let mut implicit = vec![false; self.ineqs.len()];
        let margin_lp = |implicit: &[bool]| {
            let mut lp = LinearProgram::new(self.dim + 1);
            let widen = |c: &Constraint, s: i64| {
                let mut v = c.normal.clone();
                v.push(q(s));
                v
            };
            for c in &self.eqs {
                lp.eq(widen(c, 0), c.rhs.clone());
            }
            for (c, &imp) in normalized.iter().zip(implicit) {
                if imp {
                    lp.eq(widen(c, 0), c.rhs.clone());
                } else {
                    lp.le(widen(c, 1), c.rhs.clone());
                }
            }
            let cap = unit(self.dim + 1, self.dim);
            lp.le(cap.clone(), q(1));
            lp.maximize(cap);
            lp.solve()
        };
        match margin_lp(&implicit) {
            LpOutcome::Optimal { mut point, value } if value.is_positive() => {
                point.truncate(self.dim);
                return Ok((implicit, point));
            }
            LpOutcome::Infeasible => return Err(Error::EmptySet),
            _ => {}
        }
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        // Some inequalities are tight on the whole set: find them one by one.
        let base = self.program();
        for (i, c) in self.ineqs.iter().enumerate() {
            let mut lp = base.clone();
            lp.minimize(c.normal.clone());
            if let LpOutcome::Optimal { value, .. } = lp.solve() {
                // value = -min(a·x); implicit iff min(a·x) = b
                if -value == c.rhs {
                    implicit[i] = true;
                }
            }
        }
        match margin_lp(&implicit) {
            LpOutcome::Optimal { mut point, value } if value.is_positive() => {
                point.truncate(self.dim);
                Ok((implicit, point))
            }
            _ => unreachable!("margin LP after removing implicit equalities"),
        }
    }

    pub fn relative_interior_point(&self) -> Result<QVector> {
        Ok(self.hull()?.1)
    }

    /// Indices of inequalities that hold with equality on the whole (nonempty) set.
    pub fn implicit_equalities(&self) -> Result<Vec<usize>> {
        let (imp, _) = self.hull()?;
        Ok((0..imp.len()).filter(|&i| imp[i]).collect())
    }

    pub fn dimension(&self) -> Result<usize> {
        let (imp, _) = self.hull()?;
        let mut rows: Vec<QVector> = self.eqs.iter().map(|c| c.normal.clone()).collect();
        for (c, &i) in self.ineqs.iter().zip(&imp) {
            if i {
                rows.push(c.normal.clone());
            }
        }
        Ok(self.dim - Subspace::span(self.dim, &rows).dim())
    }

    /// `{d : A d = 0}` over all constraint normals.
    pub fn lineality_space(&self) -> Subspace {
        let rows: Vec<QVector> = self
            .ineqs
            .iter()
            .chain(&self.eqs)
            .map(|c| c.normal.clone())
            .collect();
        if rows.is_empty() {
            return Subspace::full(self.dim);
        }
        Matrix::from_rows(self.dim, &rows).unwrap().nullspace()
    }

    /// Every nonempty face once, sorted by `(dim, active_set)`.
    pub fn enumerate_faces(&self, budget: &Budget) -> Result<Vec<FaceDescriptor>> {
        let normalized: Vec<Constraint> = self.ineqs.iter().map(Constraint::normalized).collect();
        let sys = PatternSystem {
            nvars: self.dim,
            equalities: self.eqs.iter().map(|c| (c.normal.clone(), c.rhs.clone())).collect(),
            items: normalized.iter().map(|c| (c.normal.clone(), c.rhs.clone())).collect(),
        };
        let found = sys.enumerate(|_: &[Mark]| false, budget.faces, "faces")?;
        let eq_rows: Vec<QVector> = self.eqs.iter().map(|c| c.normal.clone()).collect();
        let mut faces: Vec<FaceDescriptor> = found
            .into_iter()
            .map(|r| {
                let mut rows = eq_rows.clone();
                rows.extend(r.tight.iter().map(|&i| self.ineqs[i].normal.clone()));
                FaceDescriptor {
                    dim: self.dim - Subspace::span(self.dim, &rows).dim(),
                    active_set: r.tight,
                    relint_point: r.witness,
                }
            })
            .collect();
        faces.sort_by(|a, b| (a.dim, &a.active_set).cmp(&(b.dim, &b.active_set)));
        Ok(faces)
    }

    /// Cone spanned by outward normals of constraints tight at `x`.
    pub fn normal_cone(&self, x: &[Rational]) -> Result<VPolyhedron> {
        check_len(self.dim, x.len())?;
        if !self.contains(x) {
            return Err(Error::NotInSet);
        }
        let mut rays: Vec<QVector> = self
            .tight_at(x)
            .into_iter()
            .map(|i| self.ineqs[i].normal.clone())
            .collect();
        for c in &self.eqs {
            rays.push(c.normal.clone());
            rays.push(neg(&c.normal));
        }
        VPolyhedron::new(self.dim, vec![zeros(self.dim)], rays)
    }

    /// Vertices of `P ∩ L⊥` plus extreme rays of its recession cone, plus `±` a basis of the
    /// lineality space `L`.
    pub fn to_v(&self, budget: &Budget) -> Result<VPolyhedron> {
        if self.is_empty() {
            return Ok(VPolyhedron::empty(self.dim));
        }
        let lin = self.lineality_space();
        let mut pointed = self.clone();
        for b in lin.basis() {
            pointed.eqs.push(Constraint::new(b.clone(), Rational::zero()));
        }
        let points: Vec<QVector> = pointed
            .enumerate_faces(budget)?
            .into_iter()
            .filter(|f| f.dim == 0)
            .map(|f| f.relint_point)
            .collect();
        let mut cone = pointed.clone();
        for c in cone.ineqs.iter_mut().chain(cone.eqs.iter_mut()) {
            c.rhs = Rational::zero();
        }
        let mut rays: Vec<QVector> = cone
            .enumerate_faces(budget)?
            .into_iter()
            .filter(|f| f.dim == 1)
            .map(|f| primitive(&f.relint_point))
            .collect();
        for b in lin.basis() {
            rays.push(b.clone());
            rays.push(neg(b));
        }
        VPolyhedron::new(self.dim, points, rays)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VPolyhedron {
    dim: usize,
    points: Vec<QVector>,
    rays: Vec<QVector>,
}

impl VPolyhedron {
    pub fn new(dim: usize, points: Vec<QVector>, rays: Vec<QVector>) -> Result<Self> {
        for v in points.iter().chain(&rays) {
            check_len(dim, v.len())?;
        }
        if points.is_empty() && !rays.is_empty() {
            return Err(Error::Precondition(
                "a V-polyhedron with rays needs at least one point".into(),
            ));
        }
        Ok(VPolyhedron { dim, points, rays })
    }

    pub fn empty(dim: usize) -> Self {
        VPolyhedron {
            dim,
            points: Vec::new(),
            rays: Vec::new(),
        }
    }

    pub fn point(x: QVector) -> Self {
        VPolyhedron {
            dim: x.len(),
            points: vec![x],
            rays: Vec::new(),
        }
    }

    /// `cone(rays)` with apex at the origin.
    pub fn cone(dim: usize, rays: Vec<QVector>) -> Result<Self> {
        Self::new(dim, vec![zeros(dim)], rays)
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[QVector] {
        &self.points
    }

    pub fn rays(&self) -> &[QVector] {
        &self.rays
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn lp_feasible(&self) -> Option<QVector> {
        self.points.first().cloned()
    }

    /// LP with variables `(λ, μ)`: `λ >= 0, Σλ = 1, μ >= 0, Σλ v + Σμ r = x`.
    fn combination(points: &[QVector], rays: &[QVector], x: &[Rational]) -> bool {
        let (np, nr) = (points.len(), rays.len());
        if np == 0 {
            return false;
        }
        let mut lp = LinearProgram::new(np + nr);
        for j in 0..np + nr {
            lp.set_nonneg(j);
        }
        let mut ones = vec![Rational::zero(); np + nr];
        for o in ones.iter_mut().take(np) {
            *o = Rational::one();
        }
        lp.eq(ones, Rational::one());
        for (k, xk) in x.iter().enumerate() {
            let row: QVector = points
                .iter()
                .chain(rays)
                .map(|g| g[k].clone())
                .collect();
            lp.eq(row, xk.clone());
        }
        lp.feasible_point().is_some()
    }

    fn in_cone(rays: &[QVector], r: &[Rational]) -> bool {
        let origin = zeros(r.len());
        Self::combination(std::slice::from_ref(&origin), rays, r)
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim && Self::combination(&self.points, &self.rays, x)
    }

    /// Set inclusion by generators: points of `self` lie in `other` and rays of `self` lie in
    /// the recession cone of `other`.
    pub fn is_subset_of(&self, other: &VPolyhedron) -> bool {
        if self.is_empty() {
            return true;
        }
        self.points.iter().all(|p| other.contains(p))
            && self.rays.iter().all(|r| Self::in_cone(&other.rays, r))
    }

    pub fn same_set(&self, other: &VPolyhedron) -> bool {
        self.is_subset_of(other) && other.is_subset_of(self)
    }

    /// Direction space of the affine hull: span of `v_i - v_0` and the rays.
    pub fn direction_space(&self) -> Subspace {
        let mut gens: Vec<QVector> = Vec::new();
        if let Some(p0) = self.points.first() {
            gens.extend(self.points[1..].iter().map(|p| sub(p, p0)));
        }
        gens.extend(self.rays.iter().cloned());
        Subspace::span(self.dim, &gens)
    }

    pub fn dimension(&self) -> Result<usize> {
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(self.direction_space().dim())
    }

    /// Barycenter of the points plus the sum of the rays.
    pub fn relative_interior_point(&self) -> Result<QVector> {
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut acc = zeros(self.dim);
        for p in &self.points {
            acc = add(&acc, p);
        }
        acc = scale(&acc, &Rational::new(1.into(), self.points.len().into()));
        for r in &self.rays {
            acc = add(&acc, r);
        }
        Ok(acc)
    }

    fn face_system(&self) -> PatternSystem {
        let mut items = Vec::new();
        for p in &self.points {
            let mut g = p.clone();
            g.push(-Rational::one());
            items.push((g, Rational::zero()));
        }
        for r in &self.rays {
            let mut g = r.clone();
            g.push(Rational::zero());
            items.push((g, Rational::zero()));
        }
        PatternSystem {
            nvars: self.dim + 1,
            equalities: Vec::new(),
            items,
        }
    }

    fn face_patterns(&self, budget: &Budget) -> Result<Vec<crate::pattern::Realized>> {
        let np = self.points.len();
        let sys = self.face_system();
        // A face must contain at least one point.
        sys.enumerate(
            |m: &[Mark]| m.len() == np && !m.contains(&Mark::Tight),
            budget.faces,
            "faces",
        )
    }

    fn generator_dim(&self, active: &[usize]) -> usize {
        let np = self.points.len();
        let pts: Vec<&QVector> = active.iter().filter(|&&i| i < np).map(|&i| &self.points[i]).collect();
        let mut gens: Vec<QVector> = pts[1..].iter().map(|p| sub(p, pts[0])).collect();
        gens.extend(active.iter().filter(|&&i| i >= np).map(|&i| self.rays[i - np].clone()));
        Subspace::span(self.dim, &gens).dim()
    }

    /// Faces as generator subsets, sorted by `(dim, active_set)`.
    pub fn enumerate_faces(&self, budget: &Budget) -> Result<Vec<FaceDescriptor>> {
        if self.is_empty() {
            return Ok(Vec::new());
        }
        let np = self.points.len();
        let mut faces: Vec<FaceDescriptor> = self
            .face_patterns(budget)?
            .into_iter()
            .map(|r| {
                let face = VPolyhedron {
                    dim: self.dim,
                    points: r.tight.iter().filter(|&&i| i < np).map(|&i| self.points[i].clone()).collect(),
                    rays: r.tight.iter().filter(|&&i| i >= np).map(|&i| self.rays[i - np].clone()).collect(),
                };
                FaceDescriptor {
                    dim: self.generator_dim(&r.tight),
                    relint_point: face.relative_interior_point().expect("face has a point"),
                    active_set: r.tight,
                }
            })
            .collect();
        faces.sort_by(|a, b| (a.dim, &a.active_set).cmp(&(b.dim, &b.active_set)));
        Ok(faces)
    }

    /// Extreme points, sorted lexicographically and deduplicated.
    pub fn vertices(&self) -> Vec<QVector> {
        let mut pts = self.points.clone();
        pts.sort();
        pts.dedup();
        let mut keep: Vec<QVector> = Vec::new();
        for i in 0..pts.len() {
            let others: Vec<QVector> = pts
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, p)| p.clone())
                .collect();
            if !Self::combination(&others, &self.rays, &pts[i]) {
                keep.push(pts[i].clone());
            }
        }
        keep
    }

    /// Same set with redundant generators removed and the remainder sorted.
    pub fn reduced(&self) -> VPolyhedron {
        if self.is_empty() {
            return self.clone();
        }
        let mut rays: Vec<QVector> = self
            .rays
            .iter()
            .filter(|r| !is_zero_vec(r))
            .map(|r| primitive(r))
            .collect();
        rays.sort();
        rays.dedup();
        let mut i = 0;
        while i < rays.len() {
            let others: Vec<QVector> = rays
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, r)| r.clone())
                .collect();
            if Self::in_cone(&others, &rays[i]) {
                rays.remove(i);
            } else {
                i += 1;
            }
        }
        let pruned = VPolyhedron {
            dim: self.dim,
            points: self.points.clone(),
            rays,
        };
        let points = pruned.vertices();
        VPolyhedron {
            points,
            ..pruned
        }
    }

    pub fn minkowski_sum(&self, other: &VPolyhedron, budget: &Budget) -> Result<VPolyhedron> {
        check_len(self.dim, other.dim)?;
        let pairs = self.points.len().saturating_mul(other.points.len());
        Budget::check("pieces", budget.pieces, pairs)?;
        let mut points = Vec::with_capacity(pairs);
        for p in &self.points {
            for r in &other.points {
                points.push(add(p, r));
            }
        }
        let mut rays = self.rays.clone();
        rays.extend(other.rays.iter().cloned());
        Ok(VPolyhedron {
            dim: self.dim,
            points,
            rays,
        }
        .reduced())
    }

    /// Affine hull equalities plus one inequality per facet.
    pub fn to_h(&self, budget: &Budget) -> Result<HPolyhedron> {
        let mut h = HPolyhedron::whole_space(self.dim);
        if self.is_empty() {
            h.ineqs.push(Constraint::new(zeros(self.dim), -Rational::one()));
            return Ok(h);
        }
        let p0 = &self.points[0];
        let dir = self.direction_space();
        for c in dir.orthogonal_complement().basis() {
            let c = primitive(c);
            let rhs = dot(&c, p0);
            h.eqs.push(Constraint::new(c, rhs));
        }
        let d = dir.dim();
        if d == 0 {
            return Ok(h);
        }
        for r in self.face_patterns(budget)? {
            if self.generator_dim(&r.tight) + 1 != d {
                continue;
            }
            // Witness (c, d) has c·v <= d on every generator with equality exactly on the face.
            let c = &r.witness[..self.dim];
            let f = primitive_factor(c);
            h.ineqs.push(Constraint::new(scale(c, &f), &r.witness[self.dim] * &f));
        }
        Ok(h)
    }
}
