//! Reductions from sparse recovery and from the partition problem to questions about
//! well-posedness, together with brute-force oracles for both source problems.

use num_traits::{One, Zero};

use crate::error::{check_len, Error, Result};
use crate::exact::{neg, primitive, q, Matrix, QVector, Rational};
use crate::lp::LinearProgram;
use crate::polyhedra::HPolyhedron;
use crate::pwl::CpwlFunction;
use crate::tvgraph::{difference_matrix, Graph};
use crate::wellposed::ProblemInstance;

/// `min ‖z‖₀` subject to `Bz = y` (and `z >= 0` when `nonneg`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct L0Instance {
    pub b: Matrix,
    pub y: QVector,
    pub nonneg: bool,
}

impl L0Instance {
    pub fn new(b: Matrix, y: QVector, nonneg: bool) -> Result<Self> {
        check_len(b.nrows(), y.len())?;
        Ok(L0Instance { b, y, nonneg })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionInstance {
    weights: Vec<u64>,
}

impl PartitionInstance {
    pub fn new(weights: Vec<u64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Precondition("the multiset must be nonempty".into()));
        }
        if weights.contains(&0) {
            return Err(Error::Precondition("weights must be positive integers".into()));
        }
        Ok(PartitionInstance { weights })
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    fn as_rationals(&self) -> QVector {
        self.weights.iter().map(|&w| Rational::from_integer((w as i64).into())).collect()
    }
}

/// Least-norm solution of `Bv = y`: `v = Rᵀw` for a row-space basis `R` of `B`.
pub fn least_norm_solution(b: &Matrix, y: &[Rational]) -> Result<QVector> {
    check_len(b.nrows(), y.len())?;
    let basis = b.row_space().basis().to_vec();
    let r = Matrix::from_rows(b.ncols(), &basis)?;
    let w = b
        .mul(&r.transpose())?
        .solve(y)?
        .ok_or_else(|| Error::Precondition("y is not in the range of B".into()))?;
    r.tmul_vec(&w)
}

/// Rows spanning `S` with denominators cleared; an empty matrix when `S = {0}`.
fn rows_spanning(n: usize, s: &crate::exact::Subspace) -> Result<Matrix> {
    let rows: Vec<QVector> = s.basis().iter().map(|v| primitive(v)).collect();
    Matrix::from_rows(n, &rows)
}

/// `A` with `row(A) = null(B)` and `f = χ_{‖·‖∞ ≤ 1} − vᵀx` (or `χ_{x ≤ v} − vᵀx` for the
/// nonnegative problem). The ill-posedness number of `(A, f)` equals the l0 minimum.
pub fn reduce_l0(inst: &L0Instance) -> Result<ProblemInstance> {
    let n = inst.b.ncols();
    let v = least_norm_solution(&inst.b, &inst.y)?;
    let a = rows_spanning(n, &inst.b.nullspace())?;
    let domain = if inst.nonneg {
        let mut d = HPolyhedron::whole_space(n);
        for i in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[i] = Rational::one();
            d.add_inequality(e, v[i].clone())?;
        }
        d
    } else {
        HPolyhedron::cube(n, Rational::one())
    };
    let f = CpwlFunction::indicator(domain)?.sum(&CpwlFunction::linear(neg(&v)))?;
    ProblemInstance::new(a, f)
}

/// Exact l0 minimum by enumerating supports in order of size.
pub fn brute_force_l0(inst: &L0Instance) -> Result<usize> {
    let n = inst.b.ncols();
    if n > 20 {
        return Err(Error::Precondition("support enumeration is limited to n <= 20".into()));
    }
    let mut masks: Vec<u32> = (0..1u32 << n).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let support: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if support_solves(inst, &support)? {
            return Ok(support.len());
        }
    }
    Err(Error::Infeasible("Bz = y has no admissible solution".into()))
}

fn support_solves(inst: &L0Instance, support: &[usize]) -> Result<bool> {
    let k = inst.b.nrows();
    if support.is_empty() {
        return Ok(inst.y.iter().all(Zero::is_zero));
    }
    if inst.nonneg {
        let mut lp = LinearProgram::new(support.len());
        for j in 0..support.len() {
            lp.set_nonneg(j);
        }
        for i in 0..k {
            let row = support.iter().map(|&c| inst.b.get(i, c).clone()).collect();
            lp.eq(row, inst.y[i].clone());
        }
        Ok(lp.feasible_point().is_some())
    } else {
        let mut sub = Matrix::zeros(k, support.len());
        for i in 0..k {
            for (j, &c) in support.iter().enumerate() {
                sub.set(i, j, inst.b.get(i, c).clone());
            }
        }
        Ok(sub.solve(&inst.y)?.is_some())
    }
}

/// True iff the weights split into two parts of equal sum (exhaustive sign search).
pub fn brute_force_partition(p: &PartitionInstance) -> Result<bool> {
    let n = p.weights.len();
    if n > 24 {
        return Err(Error::Precondition("sign enumeration is limited to 24 weights".into()));
    }
    let w: Vec<i128> = p.weights.iter().map(|&x| x as i128).collect();
    // Fixing the first sign halves the search without losing solutions.
    for mask in 0..1u32 << (n - 1) {
        let mut s = w[0];
        for i in 1..n {
            s += if mask >> (i - 1) & 1 == 1 { -w[i] } else { w[i] };
        }
        if s == 0 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `A` of rank `n − 1` with `null(A) = span(nvec)`.
fn matrix_with_kernel(nvec: &[Rational]) -> Result<Matrix> {
    let n = nvec.len();
    let row = Matrix::from_rows(n, &[nvec.to_vec()])?;
    rows_spanning(n, &row.nullspace())
}

/// `‖x‖₁` with `null(A)` spanned by the weights; ill-posed iff a balanced partition exists.
pub fn partition_to_instance(p: &PartitionInstance) -> Result<ProblemInstance> {
    if p.weights.len() < 2 {
        return Err(Error::Precondition("need at least two weights".into()));
    }
    let w = p.as_rationals();
    ProblemInstance::new(matrix_with_kernel(&w)?, CpwlFunction::l1_norm(w.len()))
}

/// Node values `n` on the path with `D n = w`, starting from `n₀ = 0`.
pub fn path_potential(weights: &[Rational]) -> QVector {
    let mut out = vec![q(0)];
    for w in weights {
        let last = out.last().unwrap().clone();
        out.push(last - w);
    }
    out
}

/// `‖D x‖₁` on the path with `len(w) + 1` nodes (plus `χ_{x >= 0}` when `nonneg`), with
/// `null(A)` spanned by the path potential of the weights.
pub fn tv_partition_instance(p: &PartitionInstance, nonneg: bool) -> Result<ProblemInstance> {
    let w = p.as_rationals();
    let nodes = w.len() + 1;
    let nvec = path_potential(&w);
    let d = difference_matrix(&Graph::path(nodes));
    let mut f = CpwlFunction::l1(&d, &Rational::one())?;
    if nonneg {
        f = f.sum(&CpwlFunction::nonneg_indicator(nodes))?;
    }
    ProblemInstance::new(matrix_with_kernel(&nvec)?, f)
}
