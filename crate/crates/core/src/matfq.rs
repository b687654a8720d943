//! Dense matrices over a finite field.
//!
//! Matrices with zero rows are allowed so that kernels and empty bases have a
//! uniform representation; all other shape checks are strict.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElem};

#[derive(Clone)]
pub struct MatFq {
    field: Arc<Field>,
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

/// Output of [`MatFq::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    /// Reduced row echelon form with zero rows removed.
    pub matrix: MatFq,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl PartialEq for MatFq {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data == other.data
            && (Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field)
    }
}

impl Eq for MatFq {}

impl fmt::Debug for MatFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<u32>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.value()).collect())
            .collect();
        write!(f, "MatFq({}x{} over F_{}: {:?})", self.rows, self.cols, self.field.order(), rows)
    }
}

impl MatFq {
    pub fn zeros(field: &Arc<Field>, rows: usize, cols: usize) -> MatFq {
        MatFq {
            field: Arc::clone(field),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Arc<Field>, n: usize) -> MatFq {
        let mut m = MatFq::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a matrix from row-major elements. Elements are trusted to belong
    /// to `field`.
    pub fn from_elems(field: &Arc<Field>, rows: usize, cols: usize, data: Vec<FieldElem>) -> Result<MatFq> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(MatFq { field: Arc::clone(field), rows, cols, data })
    }

    /// Builds a matrix from rows of integer encodings, checking each entry.
    pub fn from_rows<R: AsRef<[u32]>>(field: &Arc<Field>, rows: &[R]) -> Result<MatFq> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::ShapeMismatch("ragged rows".into()));
            }
            for &v in r {
                data.push(field.elem(v)?);
            }
        }
        Ok(MatFq { field: Arc::clone(field), rows: rows.len(), cols, data })
    }

    /// Builds a matrix from rows of elements, all of length `cols`.
    pub fn from_row_vecs(field: &Arc<Field>, cols: usize, rows: &[Vec<FieldElem>]) -> Result<MatFq> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::ShapeMismatch("ragged rows".into()));
            }
            data.extend_from_slice(r);
        }
        Ok(MatFq { field: Arc::clone(field), rows: rows.len(), cols, data })
    }

    pub fn diagonal(field: &Arc<Field>, diag: &[FieldElem]) -> MatFq {
        let mut m = MatFq::zeros(field, diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    #[inline]
    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[FieldElem] {
        &self.data
    }

    /// Integer encodings, row-major.
    pub fn values(&self) -> Vec<u32> {
        self.data.iter().map(|x| x.value()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.value()).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    fn check_field(&self, other: &MatFq) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field {
            Ok(())
        } else {
            Err(Error::ShapeMismatch("matrices over different fields".into()))
        }
    }

    pub fn transpose(&self) -> MatFq {
        let mut t = MatFq::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &MatFq) -> Result<MatFq> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &*self.field;
        let mut out = MatFq::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j);
                        out.set(i, j, f.add(cur, f.mul(a, b)));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &MatFq) -> Result<MatFq> {
        self.check_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch("addition of differently shaped matrices".into()));
        }
        let f = &*self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(MatFq { field: Arc::clone(&self.field), rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: FieldElem) -> MatFq {
        let f = &*self.field;
        let data = self.data.iter().map(|&a| f.mul(a, c)).collect();
        MatFq { field: Arc::clone(&self.field), rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> MatFq {
        self.scale(self.field.neg(self.field.one()))
    }

    /// Applies a map to every entry.
    pub fn map(&self, mut g: impl FnMut(FieldElem) -> FieldElem) -> MatFq {
        let data = self.data.iter().map(|&a| g(a)).collect();
        MatFq { field: Arc::clone(&self.field), rows: self.rows, cols: self.cols, data }
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn vstack(&self, other: &MatFq) -> Result<MatFq> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(Error::ShapeMismatch("vstack of differently wide matrices".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(MatFq {
            field: Arc::clone(&self.field),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Sub-matrix consisting of the given rows.
    pub fn select_rows(&self, idx: &[usize]) -> MatFq {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        MatFq { field: Arc::clone(&self.field), rows: idx.len(), cols: self.cols, data }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// `row[dst] += c * row[src]`.
    fn add_row_multiple(&mut self, dst: usize, src: usize, c: FieldElem) {
        if c.is_zero() {
            return;
        }
        let f = Arc::clone(&self.field);
        for j in 0..self.cols {
            let s = self.get(src, j);
            if !s.is_zero() {
                let d = self.get(dst, j);
                self.set(dst, j, f.add(d, f.mul(c, s)));
            }
        }
    }

    fn scale_row(&mut self, i: usize, c: FieldElem) {
        let f = Arc::clone(&self.field);
        for j in 0..self.cols {
            let v = self.get(i, j);
            self.set(i, j, f.mul(v, c));
        }
    }

    /// Reduced row echelon form. Pivots are the first nonzero entry found
    /// scanning each column top to bottom; zero rows are dropped.
    pub fn rref(&self) -> Rref {
        let f = Arc::clone(&self.field);
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            m.scale_row(r, inv);
            for i in 0..m.rows {
                if i != r {
                    let factor = m.get(i, c);
                    if !factor.is_zero() {
                        m.add_row_multiple(i, r, f.neg(factor));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        m.data.truncate(r * m.cols);
        m.rows = r;
        Rref { matrix: m, rank: r, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Canonical basis of the left kernel `{x : x M = 0}`, as the rows of a
    /// matrix in reduced row echelon form.
    pub fn kernel(&self) -> MatFq {
        let f = &*self.field;
        // x M = 0  <=>  M^T x^T = 0
        let Rref { matrix: r, pivots, .. } = self.transpose().rref();
        let n = self.rows;
        let mut basis = Vec::new();
        for free in (0..n).filter(|c| !pivots.contains(c)) {
            let mut v = vec![f.zero(); n];
            v[free] = f.one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(r.get(i, free));
            }
            basis.push(v);
        }
        MatFq::from_row_vecs(&self.field, n, &basis)
            .expect("rows have kernel length")
            .rref()
            .matrix
    }

    pub fn det(&self) -> Result<FieldElem> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("determinant of a non-square matrix".into()));
        }
        let f = Arc::clone(&self.field);
        let mut m = self.clone();
        let mut det = f.one();
        for c in 0..m.cols {
            let Some(p) = (c..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(f.zero());
            };
            if p != c {
                m.swap_rows(c, p);
                det = f.neg(det);
            }
            let piv = m.get(c, c);
            det = f.mul(det, piv);
            let inv = f.inv(piv)?;
            for i in c + 1..m.rows {
                let factor = m.get(i, c);
                if !factor.is_zero() {
                    m.add_row_multiple(i, c, f.neg(f.mul(factor, inv)));
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<MatFq> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = MatFq::zeros(&self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, self.field.one());
        }
        let r = aug.rref();
        if r.rank < n || r.pivots[n - 1] >= n {
            return Err(Error::Singular);
        }
        let mut inv = MatFq::zeros(&self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.matrix.get(i, n + j));
            }
        }
        Ok(inv)
    }

    /// Returns `(D, Q)` with `Q G Q^T = D` diagonal and `Q` invertible. The
    /// nonzero diagonal entries of `D` come first.
    pub fn congruence_diagonalize(&self) -> Result<(MatFq, MatFq)> {
        if !self.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let f = Arc::clone(&self.field);
        let n = self.rows;
        let mut a = self.clone();
        let mut q = MatFq::identity(&self.field, n);

        // Simultaneous row and column operations keep `a = q G q^T`.
        let swap = |a: &mut MatFq, q: &mut MatFq, i: usize, j: usize| {
            a.swap_rows(i, j);
            a.swap_cols(i, j);
            q.swap_rows(i, j);
        };
        let add = |a: &mut MatFq, q: &mut MatFq, dst: usize, src: usize, c: FieldElem| {
            a.add_row_multiple(dst, src, c);
            a.add_col_multiple(dst, src, c);
            q.add_row_multiple(dst, src, c);
        };

        for k in 0..n {
            if a.get(k, k).is_zero() {
                if let Some(j) = (k + 1..n).find(|&j| !a.get(j, j).is_zero()) {
                    swap(&mut a, &mut q, k, j);
                } else {
                    let pair = (k..n).find_map(|i| (i + 1..n).find(|&j| !a.get(i, j).is_zero()).map(|j| (i, j)));
                    let Some((i, j)) = pair else {
                        break;
                    };
                    // the new (i, i) entry is 2 a_ij, nonzero in odd characteristic
                    add(&mut a, &mut q, i, j, f.one());
                    swap(&mut a, &mut q, k, i);
                }
            }
            let inv = f.inv(a.get(k, k))?;
            for i in k + 1..n {
                let c = a.get(i, k);
                if !c.is_zero() {
                    add(&mut a, &mut q, i, k, f.neg(f.mul(c, inv)));
                }
            }
        }
        Ok((a, q))
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `col[dst] += c * col[src]`.
    fn add_col_multiple(&mut self, dst: usize, src: usize, c: FieldElem) {
        if c.is_zero() {
            return;
        }
        let f = Arc::clone(&self.field);
        for i in 0..self.rows {
            let s = self.get(i, src);
            if !s.is_zero() {
                let d = self.get(i, dst);
                self.set(i, dst, f.add(d, f.mul(c, s)));
            }
        }
    }
}
