//! Orthogonal spaces `F_q^n` with the form `x S y^T`, their subspaces, and
//! the classification of subspaces by type `(m, 2s+γ, s, Γ)`.

mod enumerate;
mod witt;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElem};
use crate::matfq::MatFq;

pub use enumerate::{count_by_type, gaussian_binomial, SubspaceIter};
pub use witt::{witt_bruteforce_oracle, witt_decompose, Witt, ORACLE_LIMIT};

/// The anisotropic block appended to the `ν` hyperbolic pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Disc {
    /// `δ = 0`, no block.
    None,
    /// `δ = 1`, block `(1)`.
    One,
    /// `δ = 1`, block `(z)`.
    Z,
    /// `δ = 2`, block `diag(1, -z)`.
    Plane,
}

impl Disc {
    pub fn as_str(self) -> &'static str {
        match self {
            Disc::None => "none",
            Disc::One => "one",
            Disc::Z => "z",
            Disc::Plane => "plane",
        }
    }

    /// The block used when none is named: `(1)` for `δ = 1`.
    pub fn default_for(delta: u32) -> Disc {
        match delta {
            0 => Disc::None,
            1 => Disc::One,
            _ => Disc::Plane,
        }
    }
}

impl fmt::Display for Disc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Disc {
    type Err = Error;

    fn from_str(s: &str) -> Result<Disc> {
        match s {
            "none" => Ok(Disc::None),
            "one" | "1" => Ok(Disc::One),
            "z" => Ok(Disc::Z),
            "plane" | "fixed" => Ok(Disc::Plane),
            _ => Err(Error::Parse(format!("unknown discriminant variant {s:?}"))),
        }
    }
}

/// Square class of a nonzero scalar: `1` for squares, `z` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SquareClass {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "z")]
    Z,
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SquareClass::One => "1",
            SquareClass::Z => "z",
        })
    }
}

/// The ambient space `F_q^n`, `n = 2ν + δ`, with form matrix
/// `S = [[0, I_ν, 0], [I_ν, 0, 0], [0, 0, Δ]]`.
///
/// Basis indices: `e_i` is `i - 1`, `f_i` is `ν + i - 1`, `ε` is `2ν` and
/// `κ` is `2ν + 1`.
pub struct Space {
    nu: usize,
    delta: usize,
    disc: Disc,
    field: Arc<Field>,
    z: FieldElem,
    /// Diagonal of `Δ`.
    block: Vec<FieldElem>,
    s: MatFq,
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Space({})", self.label())
    }
}

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        self.nu == other.nu && self.delta == other.delta && self.disc == other.disc && *self.field == *other.field
    }
}

impl Eq for Space {}

impl Space {
    pub fn new(nu: usize, delta: usize, disc: Disc, field: Arc<Field>) -> Result<Arc<Space>> {
        if delta > 2 {
            return Err(Error::InvalidSpace(format!("δ must be 0, 1 or 2, got {delta}")));
        }
        let n = 2 * nu + delta;
        if n < 2 {
            return Err(Error::InvalidSpace(format!("dimension 2ν+δ = {n} is below 2")));
        }
        let consistent = matches!(
            (delta, disc),
            (0, Disc::None) | (1, Disc::One) | (1, Disc::Z) | (2, Disc::Plane)
        );
        if !consistent {
            return Err(Error::InvalidSpace(format!("variant {disc} does not fit δ = {delta}")));
        }
        let z = field.canonical_nonsquare();
        let block = match disc {
            Disc::None => vec![],
            Disc::One => vec![field.one()],
            Disc::Z => vec![z],
            Disc::Plane => vec![field.one(), field.neg(z)],
        };
        let mut s = MatFq::zeros(&field, n, n);
        for i in 0..nu {
            s.set(i, nu + i, field.one());
            s.set(nu + i, i, field.one());
        }
        for (k, &d) in block.iter().enumerate() {
            s.set(2 * nu + k, 2 * nu + k, d);
        }
        Ok(Arc::new(Space { nu, delta, disc, field, z, block, s }))
    }

    #[inline]
    pub fn nu(&self) -> usize {
        self.nu
    }

    #[inline]
    pub fn delta(&self) -> usize {
        self.delta
    }

    #[inline]
    pub fn disc(&self) -> Disc {
        self.disc
    }

    #[inline]
    pub fn n(&self) -> usize {
        2 * self.nu + self.delta
    }

    #[inline]
    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    /// The fixed non-square `z`.
    pub fn z(&self) -> FieldElem {
        self.z
    }

    /// Diagonal entries of `Δ`.
    pub fn block(&self) -> &[FieldElem] {
        &self.block
    }

    /// The form matrix `S`.
    pub fn form_matrix(&self) -> &MatFq {
        &self.s
    }

    /// Human-readable name such as `Oi(4,3)` or `Oi(3,3;z)`.
    pub fn label(&self) -> String {
        let q = self.field.descriptor();
        match self.disc {
            Disc::Z => format!("Oi({},{};z)", self.n(), q),
            _ => format!("Oi({},{})", self.n(), q),
        }
    }

    pub fn e(&self, i: usize) -> usize {
        assert!(i >= 1 && i <= self.nu, "e_{i} out of range");
        i - 1
    }

    pub fn f(&self, i: usize) -> usize {
        assert!(i >= 1 && i <= self.nu, "f_{i} out of range");
        self.nu + i - 1
    }

    pub fn epsilon(&self) -> Option<usize> {
        (self.delta >= 1).then_some(2 * self.nu)
    }

    pub fn kappa(&self) -> Option<usize> {
        (self.delta == 2).then_some(2 * self.nu + 1)
    }

    /// Standard basis vector with a one in coordinate `i`.
    pub fn unit(&self, i: usize) -> Vec<FieldElem> {
        let mut v = vec![self.field.zero(); self.n()];
        v[i] = self.field.one();
        v
    }

    /// `x S y^T`, evaluated using the block structure of `S`.
    pub fn form(&self, x: &[FieldElem], y: &[FieldElem]) -> FieldElem {
        let f = &*self.field;
        let nu = self.nu;
        let mut acc = f.zero();
        for i in 0..nu {
            acc = f.add(acc, f.mul(x[i], y[nu + i]));
            acc = f.add(acc, f.mul(x[nu + i], y[i]));
        }
        for (k, &d) in self.block.iter().enumerate() {
            let j = 2 * nu + k;
            acc = f.add(acc, f.mul(d, f.mul(x[j], y[j])));
        }
        acc
    }

    /// `x S`, as a row vector.
    pub fn apply_form(&self, x: &[FieldElem]) -> Vec<FieldElem> {
        let f = &*self.field;
        let nu = self.nu;
        let mut out = vec![f.zero(); self.n()];
        for i in 0..nu {
            out[nu + i] = x[i];
            out[i] = x[nu + i];
        }
        for (k, &d) in self.block.iter().enumerate() {
            let j = 2 * nu + k;
            out[j] = f.mul(d, x[j]);
        }
        out
    }
}

/// A nonzero subspace of the ambient space, stored by its reduced row echelon
/// basis. Proper subspaces are graph vertices; the whole space can only arise
/// as a subspace sum and is reported by [`Subspace::is_vertex`].
#[derive(Clone)]
pub struct Subspace {
    space: Arc<Space>,
    basis: MatFq,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis && (Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space)
    }
}

impl Eq for Subspace {}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace{:?}", self.basis.to_rows())
    }
}

impl Subspace {
    /// Canonicalizes the row space of `rows`; rejects the zero space and the
    /// whole space.
    pub fn new(space: &Arc<Space>, rows: &MatFq) -> Result<Subspace> {
        let sub = Subspace::span(space, rows)?;
        if !sub.is_vertex() {
            return Err(Error::FullSpace);
        }
        Ok(sub)
    }

    /// Like [`Subspace::new`] but accepts the whole space.
    pub fn span(space: &Arc<Space>, rows: &MatFq) -> Result<Subspace> {
        if rows.cols() != space.n() {
            return Err(Error::ShapeMismatch(format!(
                "rows of length {} in a space of dimension {}",
                rows.cols(),
                space.n()
            )));
        }
        if **rows.field() != **space.field() {
            return Err(Error::SpaceMismatch);
        }
        let basis = rows.rref().matrix;
        if basis.rows() == 0 {
            return Err(Error::ZeroSubspace);
        }
        Ok(Subspace { space: Arc::clone(space), basis })
    }

    /// Wraps a matrix already known to be in reduced row echelon form.
    pub(crate) fn from_rref_unchecked(space: &Arc<Space>, basis: MatFq) -> Subspace {
        Subspace { space: Arc::clone(space), basis }
    }

    /// Span of integer-encoded rows.
    pub fn from_rows<R: AsRef<[u32]>>(space: &Arc<Space>, rows: &[R]) -> Result<Subspace> {
        let m = MatFq::from_rows(space.field(), rows)?;
        Subspace::new(space, &m)
    }

    /// Span of the given standard basis vectors.
    pub fn from_units(space: &Arc<Space>, idx: &[usize]) -> Result<Subspace> {
        let rows: Vec<Vec<FieldElem>> = idx.iter().map(|&i| space.unit(i)).collect();
        let m = MatFq::from_row_vecs(space.field(), space.n(), &rows)?;
        Subspace::new(space, &m)
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    #[inline]
    pub fn basis(&self) -> &MatFq {
        &self.basis
    }

    pub fn is_vertex(&self) -> bool {
        self.dim() < self.space.n()
    }

    /// Canonical-order sort key of the basis entries, row-major.
    pub fn order_key(&self) -> Vec<u32> {
        let f = self.space.field();
        self.basis.data().iter().map(|&x| f.order_key(x)).collect()
    }

    /// Compares by dimension, then by basis entries in canonical order.
    pub fn cmp_canonical(&self, other: &Subspace) -> Ordering {
        self.dim().cmp(&other.dim()).then_with(|| self.order_key().cmp(&other.order_key()))
    }

    fn check_space(&self, other: &Subspace) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// Gram matrix `P S P^T`.
    pub fn gram(&self) -> MatFq {
        let m = self.dim();
        let mut g = MatFq::zeros(self.space.field(), m, m);
        for i in 0..m {
            let xs = self.space.apply_form(self.basis.row(i));
            for j in 0..m {
                let v = dot(self.space.field(), &xs, self.basis.row(j));
                g.set(i, j, v);
            }
        }
        g
    }

    /// The matrix `A S B^T`.
    pub fn pairing(&self, other: &Subspace) -> Result<MatFq> {
        self.check_space(other)?;
        let f = self.space.field();
        let mut g = MatFq::zeros(f, self.dim(), other.dim());
        for i in 0..self.dim() {
            let xs = self.space.apply_form(self.basis.row(i));
            for j in 0..other.dim() {
                g.set(i, j, dot(f, &xs, other.basis.row(j)));
            }
        }
        Ok(g)
    }

    /// Whether `A S B^T = 0`.
    pub fn is_orthogonal_to(&self, other: &Subspace) -> Result<bool> {
        Ok(self.pairing(other)?.is_zero())
    }

    /// `P^⊥ = {x : x S β^T = 0 for all β in P}`. For a vertex the result is a
    /// vertex again.
    pub fn dual(&self) -> Subspace {
        // x S P^T = 0  <=>  x lies in the left kernel of S P^T
        let sp = self
            .space
            .form_matrix()
            .mul(&self.basis.transpose())
            .expect("shapes agree");
        let k = sp.kernel();
        Subspace { space: Arc::clone(&self.space), basis: k }
    }

    /// Whether `self ⊆ other`.
    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        self.check_space(other)?;
        let stacked = other.basis.vstack(&self.basis)?;
        Ok(stacked.rank() == other.dim())
    }

    /// `X_1 + X_2`, possibly the whole space.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_space(other)?;
        Subspace::span(&self.space, &self.basis.vstack(&other.basis)?)
    }

    /// Type `(m, 2s+γ, s, Γ)` of the restricted form.
    pub fn classify(&self) -> SubspaceType {
        let w = witt_decompose(&self.gram()).expect("Gram matrices are symmetric");
        SubspaceType { m: self.dim(), rank: w.rank, s: w.s, class: w.class }
    }

    /// `1` if the Gram determinant is a square, `0` otherwise.
    pub fn disc_square_class(&self) -> Result<u8> {
        let d = self.gram().det()?;
        if d.is_zero() {
            return Err(Error::SingularGram);
        }
        Ok(u8::from(self.space.field().is_square(d)?))
    }

    /// Integer encodings of the basis rows.
    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.basis.to_rows()
    }
}

pub(crate) fn dot(f: &Field, x: &[FieldElem], y: &[FieldElem]) -> FieldElem {
    x.iter()
        .zip(y)
        .fold(f.zero(), |acc, (&a, &b)| if a.is_zero() || b.is_zero() { acc } else { f.add(acc, f.mul(a, b)) })
}

/// Type `(m, r, s, Γ)` of a subspace, with `r = 2s + γ` the Gram rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubspaceType {
    pub m: usize,
    pub rank: usize,
    pub s: usize,
    /// Present exactly when `γ = 1`.
    pub class: Option<SquareClass>,
}

impl SubspaceType {
    pub fn gamma(&self) -> usize {
        self.rank - 2 * self.s
    }
}

impl fmt::Display for SubspaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.class {
            None => write!(f, "({},{},{})", self.m, self.rank, self.s),
            Some(c) => write!(f, "({},{},{},{})", self.m, self.rank, self.s, c),
        }
    }
}

/// `{t(X_1), t(X_2)}` together with `t(X_1 + X_2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeTypeTriple {
    pub low: SubspaceType,
    pub high: SubspaceType,
    pub sum: SubspaceType,
}

impl EdgeTypeTriple {
    pub fn new(t1: SubspaceType, t2: SubspaceType, sum: SubspaceType) -> EdgeTypeTriple {
        let (low, high) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        EdgeTypeTriple { low, high, sum }
    }

    pub fn of(x1: &Subspace, x2: &Subspace) -> Result<EdgeTypeTriple> {
        Ok(EdgeTypeTriple::new(x1.classify(), x2.classify(), x1.sum(x2)?.classify()))
    }
}

impl fmt::Display for EdgeTypeTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}} -> {}", self.low, self.high, self.sum)
    }
}
