//! Exact rational scalars, vectors, dense matrices and subspaces.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{check_len, Error, Result};

/// Arbitrary precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;
pub type QVector = Vec<Rational>;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qvec(v: &[i64]) -> QVector {
    v.iter().map(|&x| q(x)).collect()
}

pub fn zeros(n: usize) -> QVector {
    vec![Rational::zero(); n]
}

pub fn unit(n: usize, i: usize) -> QVector {
    let mut v = zeros(n);
    v[i] = Rational::one();
    v
}

/// Parses `p`, `-p`, `p/q`. Whitespace around the literal is ignored, `q = 0` is rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::ParseRational(s.to_string());
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => (t, None),
    };
    let valid_int = |x: &str, allow_sign: bool| {
        let digits = if allow_sign {
            x.strip_prefix('-').or_else(|| x.strip_prefix('+')).unwrap_or(x)
        } else {
            x
        };
        !digits.is_empty() && digits.bytes().all(|c| c.is_ascii_digit())
    };
    if !valid_int(num, true) {
        return Err(bad());
    }
    let n: BigInt = num.trim_start_matches('+').parse().map_err(|_| bad())?;
    let d: BigInt = match den {
        Some(d) => {
            if !valid_int(d, false) {
                return Err(bad());
            }
            d.parse().map_err(|_| bad())?
        }
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// `p/q`, or `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn format_vector(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

pub fn parse_vector(s: &str) -> Result<QVector> {
    let t = s.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',').map(parse_rational).collect()
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact value of a finite float.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub fn add(a: &[Rational], b: &[Rational]) -> QVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> QVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Rational], s: &Rational) -> QVector {
    a.iter().map(|x| x * s).collect()
}

pub fn neg(a: &[Rational]) -> QVector {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Positive multiple of `v` with coprime integer entries; the zero vector is returned unchanged.
pub fn primitive(v: &[Rational]) -> QVector {
    let factor = primitive_factor(v);
    scale(v, &factor)
}

/// The positive factor that [`primitive`] multiplies by.
pub fn primitive_factor(v: &[Rational]) -> Rational {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let mut g = BigInt::zero();
    for x in v {
        let n = x.numer() * (&l / x.denom());
        g = g.gcd(&n);
    }
    if g.is_zero() {
        return Rational::one();
    }
    Rational::new(l, g)
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}[", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let r: Vec<String> = self.row(i).iter().map(format_rational).collect();
            write!(f, "{}", r.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    /// Builds from row vectors; `cols` is needed so that a matrix with no rows keeps its width.
    pub fn from_rows(cols: usize, rows: &[QVector]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            check_len(cols, r.len())?;
            data.extend(r.iter().cloned());
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rr: Vec<QVector> = rows.iter().map(|r| qvec(r)).collect();
        Self::from_rows(cols, &rr).expect("ragged integer matrix")
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> Vec<QVector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> QVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Result<QVector> {
        check_len(self.cols, x.len())?;
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// `selfᵀ y`
    pub fn tmul_vec(&self, y: &[Rational]) -> Result<QVector> {
        check_len(self.rows, y.len())?;
        let mut out = zeros(self.cols);
        for (i, yi) in y.iter().enumerate() {
            if yi.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                if !a.is_zero() {
                    *o += a * yi;
                }
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        check_len(self.cols, other.rows)?;
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &Matrix) -> Result<Matrix> {
        check_len(self.cols, other.cols)?;
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn push_row(&mut self, row: &[Rational]) -> Result<()> {
        check_len(self.cols, row.len())?;
        self.data.extend(row.iter().cloned());
        self.rows += 1;
        Ok(())
    }

    /// Reduced row echelon form and pivot columns. The pivot row for each column is the
    /// first remaining row with a nonzero entry in that column.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m: Vec<QVector> = self.rows();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == m.len() {
                break;
            }
            let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            let inv = m[r][c].recip();
            for x in m[r].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
            let pivot_row = m[r].clone();
            for (i, row) in m.iter_mut().enumerate() {
                if i == r || row[c].is_zero() {
                    continue;
                }
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *x -= &f * p;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let out = Matrix::from_rows(self.cols, &m).expect("shape preserved");
        (out, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// Basis of `{x : Mx = 0}`, one vector per free column of the echelon form.
    pub fn nullspace(&self) -> Subspace {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = zeros(self.cols);
            v[free] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(i, free).clone();
            }
            basis.push(v);
        }
        Subspace {
            ambient: self.cols,
            basis,
        }
    }

    pub fn row_space(&self) -> Subspace {
        Subspace::span(self.cols, &self.rows())
    }

    /// Some solution of `Mx = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Result<Option<QVector>> {
        check_len(self.rows, b.len())?;
        let aug: Vec<QVector> = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(b[i].clone());
                r
            })
            .collect();
        let (r, pivots) = Matrix::from_rows(self.cols + 1, &aug)?.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = zeros(self.cols);
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.get(i, self.cols).clone();
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug: Vec<QVector> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend(unit(n, i));
                r
            })
            .collect();
        let (r, pivots) = Matrix::from_rows(2 * n, &aug).ok()?.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let rows: Vec<QVector> = (0..n).map(|i| r.row(i)[n..].to_vec()).collect();
        Matrix::from_rows(n, &rows).ok()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Symmetric with all leading principal minors positive, checked by exact LDLᵀ pivots.
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        let n = self.rows;
        let mut m = self.rows();
        for k in 0..n {
            if !m[k][k].is_positive() {
                return false;
            }
            let inv = m[k][k].recip();
            for i in k + 1..n {
                let f = &m[i][k] * &inv;
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let d = &f * &m[k][j];
                    m[i][j] -= d;
                }
            }
        }
        true
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(to_f64).collect())
            .collect()
    }
}

/// Linear subspace given by an independent basis in reduced echelon form.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<QVector>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: (0..ambient).map(|i| unit(ambient, i)).collect(),
        }
    }

    /// Span of arbitrary (possibly dependent) vectors.
    pub fn span(ambient: usize, vectors: &[QVector]) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        let m = Matrix::from_rows(ambient, vectors).expect("vectors of ambient length");
        let (r, pivots) = m.rref();
        Subspace {
            ambient,
            basis: (0..pivots.len()).map(|i| r.row(i).to_vec()).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[QVector] {
        &self.basis
    }

    pub fn basis_matrix(&self) -> Matrix {
        Matrix::from_rows(self.ambient, &self.basis).expect("basis of ambient length")
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        if v.len() != self.ambient {
            return false;
        }
        if is_zero_vec(v) {
            return true;
        }
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        Matrix::from_rows(self.ambient, &rows).unwrap().rank() == self.dim()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.ambient == self.ambient && other.basis.iter().all(|v| self.contains(v))
    }

    /// Equality of spans by mutual containment.
    pub fn same_as(&self, other: &Subspace) -> bool {
        self.contains_subspace(other) && other.contains_subspace(self)
    }

    pub fn orthogonal_complement(&self) -> Subspace {
        if self.basis.is_empty() {
            return Subspace::full(self.ambient);
        }
        self.basis_matrix().nullspace()
    }

    /// `U ∩ V = (U⊥ + V⊥)⊥`.
    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        check_len(self.ambient, other.ambient)?;
        let mut rows = self.orthogonal_complement().basis;
        rows.extend(other.orthogonal_complement().basis);
        if rows.is_empty() {
            return Ok(Subspace::full(self.ambient));
        }
        Ok(Matrix::from_rows(self.ambient, &rows)?.nullspace())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        check_len(self.ambient, other.ambient)?;
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Ok(Subspace::span(self.ambient, &rows))
    }
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}
