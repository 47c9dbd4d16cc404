//! Exact dense linear algebra over tower levels.
//!
//! Everything here is deterministic: reduced row echelon form fixes all
//! canonical choices (kernel bases, particular solutions, Jordan chain
//! selection), so identical inputs produce identical outputs across runs.
//! Eigenvalue computations lift matrices to the splitting level of the
//! characteristic polynomial and report the level used.

use crate::error::{Error, Result};
use crate::field::{common_superlevel, embed_anywhere, FieldElement, Level, Repr};
use crate::poly::{factorize, splitting_field, Polynomial};

/// Dense row-major matrix over a single tower level.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    level: Level,
    rows: usize,
    cols: usize,
    data: Vec<Repr>,
}

impl Matrix {
    pub fn zero(level: &Level, rows: usize, cols: usize) -> Matrix {
        Matrix {
            level: level.clone(),
            rows,
            cols,
            data: vec![level.zero_r(); rows * cols],
        }
    }

    pub fn identity(level: &Level, n: usize) -> Matrix {
        let mut m = Matrix::zero(level, n, n);
        for i in 0..n {
            m.data[i * n + i] = level.one_r();
        }
        m
    }

    /// c times the identity.
    pub fn scalar(level: &Level, n: usize, c: &FieldElement) -> Matrix {
        assert!(c.level() == level, "scalar level mismatch");
        let mut m = Matrix::zero(level, n, n);
        for i in 0..n {
            m.data[i * n + i] = c.repr().clone();
        }
        m
    }

    pub fn from_fn(
        level: &Level,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> FieldElement,
    ) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = f(i, j);
                assert!(v.level() == level, "entry level mismatch");
                data.push(v.repr().clone());
            }
        }
        Matrix { level: level.clone(), rows, cols, data }
    }

    /// Build from integer rows, reduced mod p.
    ///
    /// # Panics
    /// Panics on ragged rows.
    pub fn from_ints(level: &Level, rows: &[&[i64]]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            for &x in *row {
                data.push(level.from_int_r(x));
            }
        }
        Matrix { level: level.clone(), rows: r, cols: c, data }
    }

    pub fn from_rows(level: &Level, rows: &[Vec<FieldElement>]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        Matrix::from_fn(level, r, c, |i, j| rows[i][j].clone())
    }

    /// Assemble from columns, each given as a length-`rows` coordinate vector.
    pub(crate) fn from_cols_repr(level: &Level, rows: usize, cols: &[Vec<Repr>]) -> Matrix {
        let c = cols.len();
        let mut data = vec![level.zero_r(); rows * c];
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for i in 0..rows {
                data[i * c + j] = col[i].clone();
            }
        }
        Matrix { level: level.clone(), rows, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub(crate) fn at(&self, i: usize, j: usize) -> &Repr {
        &self.data[i * self.cols + j]
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        FieldElement::from_repr(self.level.clone(), self.at(i, j).clone())
    }

    pub fn set(&mut self, i: usize, j: usize, v: &FieldElement) {
        assert!(v.level() == &self.level, "entry level mismatch");
        self.data[i * self.cols + j] = v.repr().clone();
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|x| self.level.is_zero_r(x))
    }

    fn check_same_shape(&self, other: &Matrix) {
        assert!(self.level == other.level, "matrix level mismatch");
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "matrix shape mismatch: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.check_same_shape(other);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| self.level.add_r(a, b))
            .collect();
        Matrix { level: self.level.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.check_same_shape(other);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| self.level.sub_r(a, b))
            .collect();
        Matrix { level: self.level.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Matrix {
        let data = self.data.iter().map(|a| self.level.neg_r(a)).collect();
        Matrix { level: self.level.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert!(self.level == other.level, "matrix level mismatch");
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let lv = &self.level;
        let mut data = vec![lv.zero_r(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if lv.is_zero_r(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = lv.mul_r(a, other.at(k, j));
                    data[i * other.cols + j] = lv.add_r(&data[i * other.cols + j], &prod);
                }
            }
        }
        Matrix { level: lv.clone(), rows: self.rows, cols: other.cols, data }
    }

    pub fn scale(&self, c: &FieldElement) -> Matrix {
        assert!(c.level() == &self.level, "scalar level mismatch");
        let data = self.data.iter().map(|a| self.level.mul_r(a, c.repr())).collect();
        Matrix { level: self.level.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.at(i, j).clone());
            }
        }
        Matrix { level: self.level.clone(), rows: self.cols, cols: self.rows, data }
    }

    pub fn trace(&self) -> FieldElement {
        assert!(self.is_square(), "trace of a non-square matrix");
        let mut acc = self.level.zero_r();
        for i in 0..self.rows {
            acc = self.level.add_r(&acc, self.at(i, i));
        }
        FieldElement::from_repr(self.level.clone(), acc)
    }

    /// Matrix power by repeated squaring.
    pub fn pow(&self, e: usize) -> Matrix {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut acc = Matrix::identity(&self.level, self.rows);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Horizontal concatenation.
    pub fn hstack(parts: &[&Matrix]) -> Matrix {
        assert!(!parts.is_empty(), "hstack of nothing");
        let level = parts[0].level.clone();
        let rows = parts[0].rows;
        let cols: usize = parts.iter().map(|m| m.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for m in parts {
                assert!(m.level == level && m.rows == rows, "hstack mismatch");
                for j in 0..m.cols {
                    data.push(m.at(i, j).clone());
                }
            }
        }
        Matrix { level, rows, cols, data }
    }

    /// Vertical concatenation.
    pub fn vstack(parts: &[&Matrix]) -> Matrix {
        assert!(!parts.is_empty(), "vstack of nothing");
        let level = parts[0].level.clone();
        let cols = parts[0].cols;
        let rows: usize = parts.iter().map(|m| m.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for m in parts {
            assert!(m.level == level && m.cols == cols, "vstack mismatch");
            data.extend(m.data.iter().cloned());
        }
        Matrix { level, rows, cols, data }
    }

    /// Block-diagonal assembly of square blocks.
    pub fn block_diag(level: &Level, parts: &[Matrix]) -> Matrix {
        let n: usize = parts.iter().map(|m| m.rows).sum();
        let mut out = Matrix::zero(level, n, n);
        let mut off = 0;
        for m in parts {
            assert!(m.is_square() && m.level == *level, "block mismatch");
            for i in 0..m.rows {
                for j in 0..m.cols {
                    out.data[(off + i) * n + (off + j)] = m.at(i, j).clone();
                }
            }
            off += m.rows;
        }
        out
    }

    /// The listed columns, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(&self.level, self.rows, idx.len(), |i, j| self.get(i, idx[j]))
    }

    /// Column j as an n-by-1 matrix.
    pub fn col(&self, j: usize) -> Matrix {
        self.select_columns(&[j])
    }

    pub(crate) fn col_repr(&self, j: usize) -> Vec<Repr> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub(crate) fn columns_repr(&self) -> Vec<Vec<Repr>> {
        (0..self.cols).map(|j| self.col_repr(j)).collect()
    }

    /// Coefficient-wise lift along the tower chain.
    pub fn embed(&self, target: &Level) -> Result<Matrix> {
        let mut data = Vec::with_capacity(self.data.len());
        for r in &self.data {
            let e = FieldElement::from_repr(self.level.clone(), r.clone()).embed(target)?;
            data.push(e.repr().clone());
        }
        Ok(Matrix { level: target.clone(), rows: self.rows, cols: self.cols, data })
    }

    /// Entry-wise canonical embedding, valid even across incomparable chains.
    pub fn embed_any(&self, target: &Level) -> Result<Matrix> {
        let mut data = Vec::with_capacity(self.data.len());
        for r in &self.data {
            let e = embed_anywhere(&FieldElement::from_repr(self.level.clone(), r.clone()), target)?;
            data.push(e.repr().clone());
        }
        Ok(Matrix { level: target.clone(), rows: self.rows, cols: self.cols, data })
    }

    /// Entry-wise restriction to an ancestor level, when every entry lies there.
    pub fn try_restrict(&self, target: &Level) -> Option<Matrix> {
        let mut data = Vec::with_capacity(self.data.len());
        for r in &self.data {
            let e = FieldElement::from_repr(self.level.clone(), r.clone()).try_restrict(target)?;
            data.push(e.repr().clone());
        }
        Some(Matrix { level: target.clone(), rows: self.rows, cols: self.cols, data })
    }

    /// Restrict to the deepest ancestor level containing every entry.
    pub fn restrict_min(&self) -> Matrix {
        let mut cur = self.clone();
        while let Some(parent) = cur.level.parent() {
            match cur.try_restrict(&parent) {
                Some(m) => cur = m,
                None => break,
            }
        }
        cur
    }

    /// Reduced row echelon form and the pivot column indices.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let lv = self.level.clone();
        let mut data = self.data.clone();
        let pivots = rref_data(&lv, &mut data, self.rows, self.cols);
        (Matrix { level: lv, rows: self.rows, cols: self.cols, data }, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn det(&self) -> FieldElement {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let lv = &self.level;
        let n = self.rows;
        let mut data = self.data.clone();
        let mut acc = lv.one_r();
        let mut negate = false;
        for c in 0..n {
            let pivot = match (c..n).find(|&i| !lv.is_zero_r(&data[i * n + c])) {
                Some(p) => p,
                None => return self.level.zero(),
            };
            if pivot != c {
                for j in 0..n {
                    data.swap(pivot * n + j, c * n + j);
                }
                negate = !negate;
            }
            let d = data[c * n + c].clone();
            acc = lv.mul_r(&acc, &d);
            let dinv = lv.inv_r(&d).expect("pivot nonzero");
            for i in c + 1..n {
                if lv.is_zero_r(&data[i * n + c]) {
                    continue;
                }
                let f = lv.mul_r(&data[i * n + c], &dinv);
                for j in c..n {
                    let t = lv.mul_r(&f, &data[c * n + j]);
                    data[i * n + j] = lv.sub_r(&data[i * n + j], &t);
                }
            }
        }
        if negate {
            acc = lv.neg_r(&acc);
        }
        FieldElement::from_repr(self.level.clone(), acc)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && !self.det().is_zero()
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let aug = Matrix::hstack(&[self, &Matrix::identity(&self.level, n)]);
        let (r, pivots) = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return Err(Error::SingularOperator);
        }
        Ok(Matrix::from_fn(&self.level, n, n, |i, j| r.get(i, n + j)))
    }

    /// Canonical basis of the null space, as columns. Basis vectors are the
    /// echelon-form generators, one per free column in ascending order.
    pub fn kernel_matrix(&self) -> Matrix {
        let lv = &self.level;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut cols = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![lv.zero_r(); self.cols];
            v[f] = lv.one_r();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = lv.neg_r(r.at(row, f));
            }
            cols.push(v);
        }
        Matrix::from_cols_repr(lv, self.cols, &cols)
    }

    /// Row-major flattening into an (rows*cols)-by-1 column.
    pub fn vectorize(&self) -> Matrix {
        Matrix {
            level: self.level.clone(),
            rows: self.rows * self.cols,
            cols: 1,
            data: self.data.clone(),
        }
    }

    /// Inverse of [`Matrix::vectorize`].
    pub fn unvectorize(level: &Level, rows: usize, cols: usize, v: &Matrix) -> Matrix {
        assert_eq!(v.cols, 1, "expected a column vector");
        assert_eq!(v.rows, rows * cols, "vector length mismatch");
        assert!(v.level() == level);
        Matrix { level: level.clone(), rows, cols, data: v.data.clone() }
    }
}

impl std::fmt::Display for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

fn rref_data(lv: &Level, data: &mut [Repr], rows: usize, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !lv.is_zero_r(&data[i * cols + c])) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                data.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = lv.inv_r(&data[r * cols + c]).expect("pivot nonzero");
        for j in c..cols {
            data[r * cols + j] = lv.mul_r(&data[r * cols + j], &inv);
        }
        for i in 0..rows {
            if i == r || lv.is_zero_r(&data[i * cols + c]) {
                continue;
            }
            let f = data[i * cols + c].clone();
            for j in c..cols {
                let t = lv.mul_r(&f, &data[r * cols + j]);
                data[i * cols + j] = lv.sub_r(&data[i * cols + j], &t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// A subspace of a coordinate space, carried as an explicit basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    /// Wrap a basis matrix (columns are the basis vectors).
    pub fn from_basis(basis: Matrix) -> Result<Subspace> {
        if basis.rank() != basis.cols() {
            return Err(Error::Shape("subspace basis columns are dependent".into()));
        }
        Ok(Subspace { basis })
    }

    pub fn zero(level: &Level, ambient: usize) -> Subspace {
        Subspace { basis: Matrix::zero(level, ambient, 0) }
    }

    pub fn full(level: &Level, ambient: usize) -> Subspace {
        Subspace { basis: Matrix::identity(level, ambient) }
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn level(&self) -> &Level {
        self.basis.level()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// Is the column vector v inside this subspace?
    pub fn contains(&self, v: &Matrix) -> bool {
        assert_eq!(v.cols(), 1, "expected a column vector");
        assert_eq!(v.rows(), self.ambient_dim());
        Matrix::hstack(&[&self.basis, v]).rank() == self.dim()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        Matrix::hstack(&[&self.basis, &other.basis]).rank() == self.dim()
    }

    /// Equality as subspaces (same span, regardless of basis choice).
    pub fn equals(&self, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.contains_subspace(other)
    }

    /// Span of the union.
    pub fn sum(&self, other: &Subspace) -> Subspace {
        let joined = Matrix::hstack(&[&self.basis, &other.basis]);
        let (_, pivots) = joined.rref();
        Subspace { basis: joined.select_columns(&pivots) }
    }

    pub fn embed(&self, target: &Level) -> Result<Subspace> {
        Ok(Subspace { basis: self.basis.embed(target)? })
    }
}

/// Canonical null-space basis of a matrix.
pub fn kernel(a: &Matrix) -> Subspace {
    Subspace { basis: a.kernel_matrix() }
}

/// One solution X of A·X = B with all free variables zero, or `None` when
/// the system is inconsistent.
pub fn solve(a: &Matrix, b: &Matrix) -> Option<Matrix> {
    assert_eq!(a.rows(), b.rows(), "right-hand side height mismatch");
    let aug = Matrix::hstack(&[a, b]);
    let (r, pivots) = aug.rref();
    if pivots.iter().any(|&p| p >= a.cols()) {
        return None;
    }
    let mut x = Matrix::zero(a.level(), a.cols(), b.cols());
    for (row, &p) in pivots.iter().enumerate() {
        for j in 0..b.cols() {
            let v = r.get(row, a.cols() + j);
            x.set(p, j, &v);
        }
    }
    Some(x)
}

/// The least solution of A·x = b in coordinate order: coordinates are
/// compared earliest-first, each by canonical element index. `None` when
/// inconsistent.
pub fn least_solution(a: &Matrix, b: &Matrix) -> Option<Matrix> {
    assert_eq!(b.cols(), 1, "expected a single right-hand side");
    let mut x = solve(a, b)?;
    let k = a.kernel_matrix();
    if k.cols() == 0 {
        return Some(x);
    }
    // Rows of the reduced transpose are kernel generators; zeroing x at each
    // generator's pivot coordinate yields the lexicographic minimum.
    let (kt, pivots) = k.transpose().rref();
    for (row, &p) in pivots.iter().enumerate() {
        let c = x.get(p, 0);
        if c.is_zero() {
            continue;
        }
        for j in 0..a.cols() {
            let adj = c.mul(&kt.get(row, j));
            let cur = x.get(j, 0);
            x.set(j, 0, &cur.sub(&adj));
        }
    }
    Some(x)
}

/// Matrix of a linear map on the space of rows-by-cols matrices, acting on
/// row-major vectorizations. Column k is f(E_k) vectorized, where E_k is the
/// k-th standard basis matrix in row-major order.
pub fn operator_matrix(
    level: &Level,
    rows: usize,
    cols: usize,
    mut f: impl FnMut(&Matrix) -> Matrix,
) -> Matrix {
    let n = rows * cols;
    let mut out_cols: Vec<Vec<Repr>> = Vec::with_capacity(n);
    for i in 0..rows {
        for j in 0..cols {
            let mut e = Matrix::zero(level, rows, cols);
            e.set(i, j, &level.one());
            let img = f(&e).vectorize();
            out_cols.push(img.data);
        }
    }
    Matrix::from_cols_repr(level, n, &out_cols)
}

/// Evaluate a polynomial at a square matrix (Horner's rule).
pub fn apply_polynomial(f: &Polynomial, m: &Matrix) -> Matrix {
    assert!(m.is_square(), "polynomial of a non-square matrix");
    assert!(f.level() == m.level(), "level mismatch");
    let n = m.rows();
    let lv = m.level();
    let d = match f.degree() {
        None => return Matrix::zero(lv, n, n),
        Some(d) => d,
    };
    let mut acc = Matrix::scalar(lv, n, &f.coeff(d));
    for i in (0..d).rev() {
        acc = acc.mul(m).add(&Matrix::scalar(lv, n, &f.coeff(i)));
    }
    acc
}

/// Characteristic polynomial det(xI - M) by fraction-free elimination over
/// the polynomial ring; always monic of degree = dim.
pub fn characteristic_polynomial(m: &Matrix) -> Result<Polynomial> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let lv = m.level().clone();
    let n = m.rows();
    if n == 0 {
        return Ok(Polynomial::one(&lv));
    }
    let mut a: Vec<Vec<Polynomial>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = m.get(i, j).neg();
                    if i == j {
                        Polynomial::x(&lv).add(&Polynomial::constant(&c))
                    } else {
                        Polynomial::constant(&c)
                    }
                })
                .collect()
        })
        .collect();
    let mut negate = false;
    let mut prev = Polynomial::one(&lv);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return Ok(Polynomial::zero(&lv)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                let (q, r) = num.divrem(&prev);
                debug_assert!(r.is_zero(), "fraction-free division must be exact");
                a[i][j] = q;
            }
            a[i][k] = Polynomial::zero(&lv);
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { det.neg() } else { det })
}

/// Monic generator of the annihilator ideal of a square matrix.
pub fn minimal_polynomial(m: &Matrix) -> Result<Polynomial> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let lv = m.level().clone();
    if m.rows() == 0 {
        return Ok(Polynomial::one(&lv));
    }
    let chi = characteristic_polynomial(m)?;
    let fac = factorize(&chi)?;
    let mut out = Polynomial::one(&lv);
    for (f, mult) in &fac.factors {
        let g = apply_polynomial(f, m);
        // Smallest e with ker(g^e) = ker(g^{e+1}): the exponent of f.
        let mut e = 1usize;
        let mut power = g.clone();
        let mut prev_rank = power.rank();
        while e < *mult {
            let next = power.mul(&g);
            let r = next.rank();
            if r == prev_rank {
                break;
            }
            power = next;
            prev_rank = r;
            e += 1;
        }
        out = out.mul(&f.pow(e));
    }
    debug_assert!(apply_polynomial(&out, m).is_zero_matrix());
    Ok(out)
}

/// Kernel of (T - λI)^dim: all vectors eventually killed by T - λI.
pub fn generalized_eigenspace(t: &Matrix, lambda: &FieldElement) -> Result<Subspace> {
    if !t.is_square() {
        return Err(Error::NotSquare { rows: t.rows(), cols: t.cols() });
    }
    let lv = common_superlevel(t.level(), lambda.level())?;
    let te = t.embed_any(&lv)?;
    let le = embed_anywhere(lambda, &lv)?;
    let n = te.rows();
    let nm = te.sub(&Matrix::scalar(&lv, n, &le));
    Ok(kernel(&nm.pow(n)))
}

/// Complete conjugacy invariant: the multiset of (eigenvalue, block size)
/// pairs over the splitting level, sorted by eigenvalue index then by
/// descending size.
#[derive(Clone, Debug)]
pub struct ElementaryDivisorSet {
    /// Level the eigenvalues live at.
    pub level: Level,
    /// (eigenvalue, Jordan block size) with multiplicity.
    pub entries: Vec<(FieldElement, usize)>,
}

impl ElementaryDivisorSet {
    /// Sum of all block sizes (= ambient dimension).
    pub fn dimension(&self) -> usize {
        self.entries.iter().map(|(_, s)| s).sum()
    }

    /// Entries grouped by eigenvalue, preserving canonical order.
    pub fn grouped(&self) -> Vec<(FieldElement, Vec<usize>)> {
        let mut out: Vec<(FieldElement, Vec<usize>)> = Vec::new();
        for (lam, s) in &self.entries {
            match out.last_mut() {
                Some((l, sizes)) if l == lam => sizes.push(*s),
                _ => out.push((lam.clone(), vec![*s])),
            }
        }
        out
    }

    /// Multiset equality after canonical identification of the two levels
    /// inside a common extension.
    pub fn same_as(&self, other: &ElementaryDivisorSet) -> Result<bool> {
        if self.entries.len() != other.entries.len() {
            return Ok(false);
        }
        let lv = common_superlevel(&self.level, &other.level)?;
        let key = |set: &ElementaryDivisorSet| -> Result<Vec<(u128, usize)>> {
            let mut v = Vec::with_capacity(set.entries.len());
            for (lam, s) in &set.entries {
                v.push((embed_anywhere(lam, &lv)?.index(), *s));
            }
            v.sort();
            Ok(v)
        };
        Ok(key(self)? == key(other)?)
    }
}

/// Elementary divisors of an invertible matrix, from the rank sequence of
/// (T - λI)^j at the splitting level.
pub fn elementary_divisors(t: &Matrix) -> Result<ElementaryDivisorSet> {
    if !t.is_square() {
        return Err(Error::NotSquare { rows: t.rows(), cols: t.cols() });
    }
    if !t.is_invertible() {
        return Err(Error::SingularOperator);
    }
    let n = t.rows();
    let chi = characteristic_polynomial(t)?;
    let (lv, roots) = splitting_field(&chi)?;
    let te = t.embed(&lv)?;
    let mut entries = Vec::new();
    for (lam, mult) in &roots {
        let nm = te.sub(&Matrix::scalar(&lv, n, lam));
        // ranks[j] = rank(nm^j); blocks of size >= j number ranks[j-1] - ranks[j].
        let mut ranks = vec![n];
        let mut pw = Matrix::identity(&lv, n);
        loop {
            pw = pw.mul(&nm);
            let r = pw.rank();
            ranks.push(r);
            if r == n - mult {
                break;
            }
        }
        let s = ranks.len() - 1;
        let ge = |j: usize| -> usize {
            if j == 0 || j > s {
                0
            } else {
                ranks[j - 1] - ranks[j]
            }
        };
        for size in (1..=s).rev() {
            let count = ge(size) - ge(size + 1);
            for _ in 0..count {
                entries.push((lam.clone(), size));
            }
        }
    }
    Ok(ElementaryDivisorSet { level: lv, entries })
}

/// A Jordan normal form: `basis⁻¹ · T · basis = form` at the reported level,
/// with blocks listed in column order.
#[derive(Clone, Debug)]
pub struct JordanForm {
    pub level: Level,
    /// Columns are the Jordan chain vectors, eigenvector first within each
    /// chain.
    pub basis: Matrix,
    /// The block-diagonal normal form itself.
    pub form: Matrix,
    /// (eigenvalue, size) per block, in column order: eigenvalues ascending
    /// by canonical index, sizes descending within an eigenvalue.
    pub blocks: Vec<(FieldElement, usize)>,
}

/// Canonical Jordan normal form over the splitting level.
///
/// Chain tops are selected greedily from the canonical kernel bases, largest
/// blocks first, which fixes the basis deterministically.
pub fn jordan_form(t: &Matrix) -> Result<JordanForm> {
    if !t.is_square() {
        return Err(Error::NotSquare { rows: t.rows(), cols: t.cols() });
    }
    let n = t.rows();
    let chi = characteristic_polynomial(t)?;
    let (lv, roots) = splitting_field(&chi)?;
    let te = t.embed(&lv)?;
    let mut cols: Vec<Vec<Repr>> = Vec::with_capacity(n);
    let mut blocks: Vec<(FieldElement, usize)> = Vec::new();
    for (lam, mult) in &roots {
        let nm = te.sub(&Matrix::scalar(&lv, n, lam));
        // Kernel bases of nm^1, nm^2, ... up to stabilization at `mult`.
        let mut kers: Vec<Matrix> = Vec::new();
        let mut pw = nm.clone();
        loop {
            let k = pw.kernel_matrix();
            let dim = k.cols();
            kers.push(k);
            if dim == *mult {
                break;
            }
            pw = pw.mul(&nm);
        }
        let s = kers.len();
        // Chain tops, largest height first. A new top at height j must be
        // independent of ker^(j-1) together with the height-j vectors of the
        // taller chains already chosen.
        let mut chains: Vec<(Vec<Repr>, usize)> = Vec::new();
        for j in (1..=s).rev() {
            let mut span: Vec<Vec<Repr>> =
                if j >= 2 { kers[j - 2].columns_repr() } else { Vec::new() };
            for (v, k) in &chains {
                if *k > j {
                    span.push(apply_repr_power(&nm, v, k - j));
                }
            }
            for cand in kers[j - 1].columns_repr() {
                if independent_of(&lv, n, &span, &cand) {
                    span.push(cand.clone());
                    chains.push((cand, j));
                }
            }
        }
        for (v, k) in &chains {
            for p in (0..*k).rev() {
                cols.push(apply_repr_power(&nm, v, p));
            }
            blocks.push((lam.clone(), *k));
        }
    }
    let basis = Matrix::from_cols_repr(&lv, n, &cols);
    let mut form = Matrix::zero(&lv, n, n);
    let mut off = 0;
    for (lam, k) in &blocks {
        for i in 0..*k {
            form.set(off + i, off + i, lam);
            if i + 1 < *k {
                form.set(off + i, off + i + 1, &lv.one());
            }
        }
        off += k;
    }
    if !basis.is_invertible() || te.mul(&basis) != basis.mul(&form) {
        return Err(Error::Construction("Jordan chain selection failed".into()));
    }
    Ok(JordanForm { level: lv, basis, form, blocks })
}

fn apply_repr_power(m: &Matrix, v: &[Repr], times: usize) -> Vec<Repr> {
    let lv = m.level();
    let mut cur = v.to_vec();
    for _ in 0..times {
        cur = (0..m.rows())
            .map(|i| {
                let mut acc = lv.zero_r();
                for (j, c) in cur.iter().enumerate() {
                    acc = lv.add_r(&acc, &lv.mul_r(m.at(i, j), c));
                }
                acc
            })
            .collect();
    }
    cur
}

fn independent_of(lv: &Level, n: usize, span: &[Vec<Repr>], cand: &[Repr]) -> bool {
    let mut cols: Vec<Vec<Repr>> = span.to_vec();
    cols.push(cand.to_vec());
    Matrix::from_cols_repr(lv, n, &cols).rank() == cols.len()
}

/// An invertible X with X·T·X⁻¹ = S when S and T are conjugate in the full
/// linear group (equal elementary divisors), or `None` when they are not.
/// The witness may live at an extension level, which is returned with it.
pub fn gl_conjugacy_witness(s: &Matrix, t: &Matrix) -> Result<Option<(Level, Matrix)>> {
    if !s.is_square() {
        return Err(Error::NotSquare { rows: s.rows(), cols: s.cols() });
    }
    if !t.is_square() {
        return Err(Error::NotSquare { rows: t.rows(), cols: t.cols() });
    }
    if s.rows() != t.rows() {
        return Err(Error::Shape(format!(
            "dimension mismatch: {} vs {}",
            s.rows(),
            t.rows()
        )));
    }
    if s.level() != t.level() {
        return Err(Error::LevelMismatch);
    }
    if !s.is_invertible() || !t.is_invertible() {
        return Err(Error::SingularOperator);
    }
    let js = jordan_form(s)?;
    let jt = jordan_form(t)?;
    let (js, jt) = if js.level == jt.level {
        (js, jt)
    } else {
        let lv = common_superlevel(&js.level, &jt.level)?;
        (jordan_form(&s.embed(&lv)?)?, jordan_form(&t.embed(&lv)?)?)
    };
    if js.form != jt.form {
        return Ok(None);
    }
    let x = js.basis.mul(&jt.basis.inverse()?);
    let lv = js.level.clone();
    let se = s.embed(&lv)?;
    let te = t.embed(&lv)?;
    if x.mul(&te) != se.mul(&x) {
        return Err(Error::Construction("conjugacy witness failed verification".into()));
    }
    Ok(Some((lv, x)))
}
