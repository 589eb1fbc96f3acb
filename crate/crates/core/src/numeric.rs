//! Floating-point primal-dual (Chambolle–Pock) solver.
//!
//! The objective is written as the saddle problem
//! `min_x max_y ½‖Ax − b‖²_Σ + ⟨Kx + c, y⟩ − ι(y)`, where the rows of `K` are every
//! piece slope and every domain normal. Dual blocks for a max-affine term live on the
//! probability simplex, inequality multipliers are nonnegative and equality
//! multipliers are free.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Error, Result};
use crate::exact::to_f64;
use crate::wellposed::ProblemInstance;

pub const DEFAULT_MAX_ITERATIONS: usize = 200_000;

#[derive(Clone, Debug, PartialEq)]
pub struct NumericSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Fixed-point residual at termination.
    pub residual: f64,
}

enum Block {
    Simplex(usize, usize),
    Nonneg(usize, usize),
    Free,
}

/// Euclidean projection onto the probability simplex (sort-based).
fn project_simplex(v: &mut [f64]) {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - 1.0) / (i as f64 + 1.0);
        if ui - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

fn spectral_norm(k: &DMatrix<f64>) -> f64 {
    if k.nrows() == 0 || k.ncols() == 0 {
        return 0.0;
    }
    let ktk = k.transpose() * k;
    ktk.symmetric_eigenvalues().amax().sqrt()
}

pub fn solve_numeric(inst: &ProblemInstance, b: &[f64], tol: f64, max_iterations: usize) -> Result<NumericSolution> {
    check_len(inst.m(), b.len())?;
    let n = inst.n();
    let m = inst.m();
    let f = inst.f();
    let a = DMatrix::from_fn(m, n, |i, j| to_f64(inst.a().get(i, j)));
    let sigma = DMatrix::from_fn(m, m, |i, j| to_f64(inst.sigma().get(i, j)));
    let bv = DVector::from_column_slice(b);

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut offsets: Vec<f64> = Vec::new();
    let mut blocks = Vec::new();
    for t in f.terms() {
        let start = rows.len();
        for p in &t.pieces {
            rows.push(p.slope.iter().map(to_f64).collect());
            offsets.push(to_f64(&p.offset));
        }
        blocks.push(Block::Simplex(start, rows.len()));
    }
    let start = rows.len();
    for c in f.domain().inequalities() {
        rows.push(c.normal.iter().map(to_f64).collect());
        offsets.push(-to_f64(&c.rhs));
    }
    blocks.push(Block::Nonneg(start, rows.len()));
    for c in f.domain().equalities() {
        rows.push(c.normal.iter().map(to_f64).collect());
        offsets.push(-to_f64(&c.rhs));
    }
    blocks.push(Block::Free);
    let k = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    let c = DVector::from_vec(offsets);

    let knorm = spectral_norm(&k).max(1e-12);
    let tau = 0.95 / knorm;
    let sig = 0.95 / knorm;
    let at_sigma = a.transpose() * &sigma;
    let h = &at_sigma * &a;
    let system = DMatrix::identity(n, n) + &h * tau;
    let chol = system
        .cholesky()
        .ok_or_else(|| Error::Construction("primal proximal system is not positive definite".into()))?;
    let atb = &at_sigma * &bv;

    let mut x = DVector::zeros(n);
    let mut y = DVector::zeros(k.nrows());
    for blk in &blocks {
        if let Block::Simplex(s, e) = blk {
            for i in *s..*e {
                y[i] = 1.0 / (*e - *s) as f64;
            }
        }
    }
    let mut residual = f64::INFINITY;
    for it in 1..=max_iterations {
        let rhs = &x - (k.transpose() * &y) * tau + &atb * tau;
        let xn = chol.solve(&rhs);
        let xbar = &xn * 2.0 - &x;
        let mut yn = &y + (&k * &xbar + &c) * sig;
        for blk in &blocks {
            match blk {
                Block::Simplex(s, e) => project_simplex(&mut yn.as_mut_slice()[*s..*e]),
                Block::Nonneg(s, e) => {
                    for v in &mut yn.as_mut_slice()[*s..*e] {
                        *v = v.max(0.0);
                    }
                }
                Block::Free => {}
            }
        }
        residual = ((&xn - &x).amax() / tau).max((&yn - &y).amax() / sig);
        x = xn;
        y = yn;
        if residual <= tol {
            return Ok(finish(inst, &a, &sigma, &bv, x, it, residual));
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iterations,
        residual,
    })
}

fn finish(
    inst: &ProblemInstance,
    a: &DMatrix<f64>,
    sigma: &DMatrix<f64>,
    b: &DVector<f64>,
    x: DVector<f64>,
    iterations: usize,
    residual: f64,
) -> NumericSolution {
    let r = a * &x - b;
    let quad = 0.5 * r.dot(&(sigma * &r));
    let fx: f64 = inst
        .f()
        .terms()
        .iter()
        .map(|t| {
            t.pieces
                .iter()
                .map(|p| p.slope.iter().zip(x.iter()).map(|(s, v)| to_f64(s) * v).sum::<f64>() + to_f64(&p.offset))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum();
    NumericSolution {
        x: x.iter().copied().collect(),
        objective: quad + fx,
        iterations,
        residual,
    }
}
