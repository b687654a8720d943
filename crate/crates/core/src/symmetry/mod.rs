//! Graph automorphisms induced by orthogonal matrices and by the semilinear
//! maps `x ↦ π(x) D`, their group orders, and orbit partitions.

mod formula;
mod orbits;
mod schreier;

use std::sync::Arc;

use rayon::prelude::*;

use crate::autsearch::is_automorphism;
use crate::error::{Error, Result};
use crate::ff::{Field, FieldElem};
use crate::graph::OiGraph;
use crate::matfq::MatFq;
use crate::ospace::Space;

pub use formula::{aut_order_formula, e_subgroup_order, FormulaValue};
pub use orbits::{compare_partitions, edge_orbits, partition_classes, vertex_orbits, EdgeOrbits, PartitionComparison};
pub use schreier::{Perm, PermGroup};

/// Largest number of vectors [`matrix_group_order`] will act on.
pub const VECTOR_ACTION_LIMIT: u64 = 1_000_000;

/// A permutation of vertex ids that preserves adjacency and loops.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexPerm {
    images: Vec<u32>,
}

impl VertexPerm {
    pub fn identity(n: usize) -> VertexPerm {
        VertexPerm { images: (0..n as u32).collect() }
    }

    /// Checks that `images` is a bijection preserving the graph.
    pub fn new(g: &OiGraph, images: Vec<u32>) -> Result<VertexPerm> {
        if !is_automorphism(g.bits(), &images)? {
            return Err(Error::NotAutomorphism);
        }
        Ok(VertexPerm { images })
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn into_images(self) -> Vec<u32> {
        self.images
    }

    #[inline]
    pub fn apply(&self, v: usize) -> usize {
        self.images[v] as usize
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }
}

/// The map `x ↦ π^j(x) diag(k_1..k_ν, k_1^{-1}..k_ν^{-1}, δ_1 c_1, δ_2 c_2)`,
/// where `c_i = sqrt(π(Δ_i) / Δ_i)` makes the map preserve the form up to
/// `π`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Semilinear {
    pub ks: Vec<FieldElem>,
    pub delta1: FieldElem,
    pub delta2: FieldElem,
    pub frobenius: u32,
}

impl Semilinear {
    pub fn identity(space: &Space) -> Semilinear {
        let one = space.field().one();
        Semilinear { ks: vec![one; space.nu()], delta1: one, delta2: one, frobenius: 0 }
    }
}

/// A generator of a group of graph automorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AutGenerator {
    Orthogonal(MatFq),
    Semilinear(Semilinear),
}

/// Whether `T S T^T = S`.
pub fn is_orthogonal(space: &Space, t: &MatFq) -> bool {
    let s = space.form_matrix();
    t.rows() == s.rows()
        && t.cols() == s.cols()
        && t.mul(s).and_then(|x| x.mul(&t.transpose())).map(|x| x == *s).unwrap_or(false)
}

/// The reflection `x ↦ x - 2 (x S v^T / v S v^T) v` as a matrix acting on
/// row vectors.
pub fn reflection(space: &Space, v: &[FieldElem]) -> Result<MatFq> {
    let f = space.field();
    let n = space.n();
    if v.len() != n {
        return Err(Error::ShapeMismatch(format!("vector of length {} in dimension {n}", v.len())));
    }
    let qv = space.form(v, v);
    if qv.is_zero() {
        return Err(Error::IsotropicVector);
    }
    let c = f.div(f.from_int(2), qv)?;
    // row i of T is e_i - c (e_i S v^T) v
    let sv = space.apply_form(v);
    let mut t = MatFq::identity(f, n);
    for i in 0..n {
        let coeff = f.mul(c, sv[i]);
        if coeff.is_zero() {
            continue;
        }
        for j in 0..n {
            let cur = t.get(i, j);
            t.set(i, j, f.sub(cur, f.mul(coeff, v[j])));
        }
    }
    Ok(t)
}

/// Representatives of the projective points of `F_q^n`: nonzero vectors
/// whose first nonzero coordinate is one, in increasing integer order.
pub fn projective_points(field: &Field, n: usize) -> Vec<Vec<FieldElem>> {
    let q = field.order() as u64;
    let total = q.pow(n as u32);
    let mut out = Vec::with_capacity(((total - 1) / (q - 1)) as usize);
    for code in 1..total {
        let v = decode_vector(field, n, code);
        if v.iter().find(|x| !x.is_zero()) == Some(&field.one()) {
            out.push(v);
        }
    }
    out
}

fn decode_vector(field: &Field, n: usize, mut code: u64) -> Vec<FieldElem> {
    let q = field.order() as u64;
    (0..n)
        .map(|_| {
            let x = (code % q) as u32;
            code /= q;
            field.elem(x).expect("digit below q")
        })
        .collect()
}

fn encode_vector(field: &Field, v: &[FieldElem]) -> u64 {
    let q = field.order() as u64;
    v.iter().rev().fold(0, |acc, x| acc * q + x.value() as u64)
}

/// Reflections at every projective anisotropic point, in point order.
pub fn orthogonal_generators(space: &Space) -> Vec<MatFq> {
    projective_points(space.field(), space.n())
        .into_par_iter()
        .filter(|v| !space.form(v, v).is_zero())
        .map(|v| reflection(space, &v).expect("anisotropic"))
        .collect()
}

/// `σ_T`: vertex `P` goes to `P T`.
pub fn perm_from_matrix(g: &OiGraph, t: &MatFq) -> Result<VertexPerm> {
    let space = g.space();
    if !is_orthogonal(space, t) {
        return Err(Error::NotOrthogonal);
    }
    let images = map_vertices(g, |b| b.mul(t).expect("shapes agree"))?;
    VertexPerm::new(g, images)
}

/// Checks the parameters and returns the diagonal matrix `D`.
pub fn semilinear_matrix(space: &Space, s: &Semilinear) -> Result<MatFq> {
    let f = space.field();
    let nu = space.nu();
    if s.ks.len() != nu {
        return Err(Error::InvalidSemilinear(format!("expected {nu} scalars, got {}", s.ks.len())));
    }
    if s.frobenius >= f.degree() {
        return Err(Error::FrobeniusOutOfRange { j: s.frobenius, e: f.degree() });
    }
    if let Some(&k1) = s.ks.first() {
        if k1.is_zero() || !f.is_square(k1)? {
            return Err(Error::InvalidSemilinear("k_1 must be a nonzero square".into()));
        }
    }
    if s.ks.iter().any(|k| k.is_zero()) {
        return Err(Error::InvalidSemilinear("scalars must be nonzero".into()));
    }
    let minus_one = f.neg(f.one());
    for d in [s.delta1, s.delta2] {
        if d != f.one() && d != minus_one {
            return Err(Error::InvalidSemilinear("signs must be 1 or -1".into()));
        }
    }
    let mut diag = Vec::with_capacity(space.n());
    diag.extend(s.ks.iter().copied());
    for &k in &s.ks {
        diag.push(f.inv(k)?);
    }
    for (&d, sign) in space.block().iter().zip([s.delta1, s.delta2]) {
        let ratio = f.div(f.frobenius(d, s.frobenius)?, d)?;
        diag.push(f.mul(sign, f.sqrt_of_square(ratio)?));
    }
    Ok(MatFq::diagonal(f, &diag))
}

/// The vertex permutation of a semilinear map.
pub fn perm_from_semilinear(g: &OiGraph, s: &Semilinear) -> Result<VertexPerm> {
    let space = g.space();
    let f = Arc::clone(space.field());
    let d = semilinear_matrix(space, s)?;
    let pi: Vec<FieldElem> = f.elements().map(|x| f.frobenius(x, s.frobenius).expect("checked")).collect();
    let images = map_vertices(g, |b| b.map(|x| pi[x.value() as usize]).mul(&d).expect("shapes agree"))?;
    VertexPerm::new(g, images)
}

/// Vertex permutation of any generator.
pub fn generator_perm(g: &OiGraph, gen: &AutGenerator) -> Result<VertexPerm> {
    match gen {
        AutGenerator::Orthogonal(t) => perm_from_matrix(g, t),
        AutGenerator::Semilinear(s) => perm_from_semilinear(g, s),
    }
}

fn map_vertices(g: &OiGraph, act: impl Fn(&MatFq) -> MatFq + Sync) -> Result<Vec<u32>> {
    g.vertices()
        .par_iter()
        .map(|v| {
            let img = act(v.basis()).rref().matrix;
            g.index_of_values(&img.values())
                .map(|i| i as u32)
                .ok_or(Error::NotAutomorphism)
        })
        .collect()
}

/// Generators of the subgroup fixing every standard basis vertex: scaling
/// `k_1` by the square of a primitive element, each `k_i` (`i ≥ 2`) by a
/// primitive element, each sign slot by `-1`, and the Frobenius map.
pub fn e_generators(space: &Space) -> Vec<Semilinear> {
    let f = space.field();
    let g = primitive_element(f);
    let minus_one = f.neg(f.one());
    let id = Semilinear::identity(space);
    let mut out = Vec::new();
    for i in 0..space.nu() {
        let mut s = id.clone();
        s.ks[i] = if i == 0 { f.mul(g, g) } else { g };
        out.push(s);
    }
    if space.delta() >= 1 {
        out.push(Semilinear { delta1: minus_one, ..id.clone() });
    }
    if space.delta() == 2 {
        out.push(Semilinear { delta2: minus_one, ..id.clone() });
    }
    if f.degree() > 1 {
        out.push(Semilinear { frobenius: 1, ..id });
    }
    out
}

/// Least element, by integer encoding, generating the multiplicative group.
pub fn primitive_element(f: &Field) -> FieldElem {
    let order = (f.order() - 1) as u64;
    f.nonzero_elements()
        .find(|&a| (1..order).filter(|k| order % k == 0).all(|k| f.pow(a, k) != f.one()))
        .expect("multiplicative group is cyclic")
}

/// Reflection and semilinear generators, all as generator descriptions.
pub fn po_e_generators(space: &Space) -> Vec<AutGenerator> {
    let mut gens: Vec<AutGenerator> = orthogonal_generators(space).into_iter().map(AutGenerator::Orthogonal).collect();
    gens.extend(e_generators(space).into_iter().map(AutGenerator::Semilinear));
    gens
}

/// Vertex permutations of all reflections and semilinear generators.
pub fn po_e_perms(g: &OiGraph) -> Result<Vec<VertexPerm>> {
    po_e_generators(g.space()).par_iter().map(|gen| generator_perm(g, gen)).collect()
}

/// Order of the group generated by vertex permutations.
pub fn group_order(n: usize, gens: &[VertexPerm]) -> Result<u128> {
    perm_group(n, gens)?.order()
}

pub fn perm_group(n: usize, gens: &[VertexPerm]) -> Result<PermGroup> {
    let perms: Vec<Perm> = gens.iter().map(|p| p.images.clone()).collect();
    PermGroup::new(n, &perms)
}

/// Order of the matrix group generated by `mats`, from its faithful action
/// on the nonzero vectors of `F_q^n`.
pub fn matrix_group_order(space: &Space, mats: &[MatFq]) -> Result<u128> {
    let f = space.field();
    let n = space.n();
    let total = (f.order() as u64)
        .checked_pow(n as u32)
        .filter(|&t| t <= VECTOR_ACTION_LIMIT)
        .ok_or_else(|| Error::InstanceTooLarge(format!("q^n exceeds {VECTOR_ACTION_LIMIT}")))?;
    let points = (total - 1) as usize;
    let perms: Vec<Perm> = mats
        .par_iter()
        .map(|t| {
            (1..total)
                .map(|code| {
                    let v = MatFq::from_row_vecs(f, n, &[decode_vector(f, n, code)]).expect("row of length n");
                    let w = v.mul(t).expect("shapes agree");
                    (encode_vector(f, w.row(0)) - 1) as u32
                })
                .collect()
        })
        .collect();
    PermGroup::new(points, &perms)?.order()
}
