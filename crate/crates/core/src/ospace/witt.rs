//! Witt decomposition of symmetric bilinear forms over `F_q`, `q` odd.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElem};
use crate::matfq::MatFq;

use super::SquareClass;

/// Largest `q^m` accepted by [`witt_bruteforce_oracle`].
pub const ORACLE_LIMIT: u64 = 1_000_000;

/// Invariants of a symmetric form: rank `r = 2s + γ`, Witt index `s` of the
/// nondegenerate part, and the square class of the anisotropic residual when
/// it is one-dimensional.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Witt {
    pub rank: usize,
    pub s: usize,
    pub gamma: usize,
    pub class: Option<SquareClass>,
}

/// Splits off hyperbolic planes until the remaining form is anisotropic.
pub fn witt_decompose(g: &MatFq) -> Result<Witt> {
    let f = Arc::clone(g.field());
    let (d, _) = g.congruence_diagonalize()?;
    let mut diag: Vec<FieldElem> = (0..d.rows()).map(|i| d.get(i, i)).take_while(|x| !x.is_zero()).collect();
    let rank = diag.len();
    let mut s = 0;
    while diag.len() >= 2 {
        let Some(v) = isotropic_vector(&f, &diag) else {
            break;
        };
        diag = split_hyperbolic_plane(&f, &diag, &v);
        s += 1;
    }
    let class = match diag.as_slice() {
        [a] => Some(if f.is_square(*a)? { SquareClass::One } else { SquareClass::Z }),
        _ => None,
    };
    Ok(Witt { rank, s, gamma: diag.len(), class })
}

/// A nonzero isotropic vector of `diag(d_1, ..., d_k)`, supported on at most
/// the first three coordinates.
fn isotropic_vector(f: &Field, diag: &[FieldElem]) -> Option<Vec<FieldElem>> {
    let k = diag.len();
    let mut v = vec![f.zero(); k];
    if k == 2 {
        // d_1 x^2 + d_2 = 0
        let t = f.neg(f.div(diag[1], diag[0]).ok()?);
        if !f.is_square(t).ok()? {
            return None;
        }
        v[0] = f.sqrt_of_square(t).ok()?;
        v[1] = f.one();
        return Some(v);
    }
    // d_1 x^2 + d_2 y^2 + d_3 = 0 has a solution for every x making
    // (-d_3 - d_1 x^2) / d_2 a square or zero; half the field qualifies.
    for x in f.elements() {
        let rhs = f.neg(f.add(diag[2], f.mul(diag[0], f.mul(x, x))));
        let t = f.div(rhs, diag[1]).ok()?;
        let y = if t.is_zero() {
            f.zero()
        } else if f.is_square(t).ok()? {
            f.sqrt_of_square(t).ok()?
        } else {
            continue;
        };
        v[0] = x;
        v[1] = y;
        v[2] = f.one();
        return Some(v);
    }
    None
}

/// Diagonal form on the orthogonal complement of a hyperbolic plane through
/// the isotropic vector `v`.
fn split_hyperbolic_plane(f: &Arc<Field>, diag: &[FieldElem], v: &[FieldElem]) -> Vec<FieldElem> {
    let k = diag.len();
    let dv: Vec<FieldElem> = diag.iter().zip(v).map(|(&d, &x)| f.mul(d, x)).collect();
    let i = dv.iter().position(|x| !x.is_zero()).expect("form is nondegenerate");
    let mut w = vec![f.zero(); k];
    w[i] = f.one();
    let dw: Vec<FieldElem> = diag.iter().zip(&w).map(|(&d, &x)| f.mul(d, x)).collect();
    // complement = left kernel of the k x 2 matrix [D v^T | D w^T]
    let mut m = MatFq::zeros(f, k, 2);
    for r in 0..k {
        m.set(r, 0, dv[r]);
        m.set(r, 1, dw[r]);
    }
    let basis = m.kernel();
    let gram = basis
        .mul(&MatFq::diagonal(f, diag))
        .and_then(|x| x.mul(&basis.transpose()))
        .expect("shapes agree");
    let (d, _) = gram.congruence_diagonalize().expect("Gram matrices are symmetric");
    (0..d.rows()).map(|j| d.get(j, j)).collect()
}

/// Witt index of the nondegenerate part of `g`, found by exhaustive search
/// over isotropic projective points of `F_q^m`.
///
/// The largest totally isotropic subspace of a degenerate form is the radical
/// plus a largest totally isotropic subspace of the nondegenerate part, so
/// the index is the maximal totally isotropic dimension minus `m - rank`.
pub fn witt_bruteforce_oracle(g: &MatFq) -> Result<usize> {
    if !g.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let f = Arc::clone(g.field());
    let m = g.rows();
    let size = (f.order() as u64).checked_pow(m as u32).filter(|&s| s <= ORACLE_LIMIT);
    if size.is_none() {
        return Err(Error::InstanceTooLarge(format!("q^m = {}^{m} exceeds {ORACLE_LIMIT}", f.order())));
    }
    let rank = g.rank();
    let form = |x: &[FieldElem], y: &[FieldElem]| -> FieldElem {
        let mut acc = f.zero();
        for i in 0..m {
            for j in 0..m {
                acc = f.add(acc, f.mul(x[i], f.mul(g.get(i, j), y[j])));
            }
        }
        acc
    };

    // projective points: first nonzero coordinate equal to one
    let q = f.order();
    let mut points: Vec<Vec<FieldElem>> = Vec::new();
    for code in 1..size.unwrap() {
        let mut c = code;
        let v: Vec<FieldElem> = (0..m)
            .map(|_| {
                let x = (c % q as u64) as u32;
                c /= q as u64;
                f.elem(x).expect("digit below q")
            })
            .collect();
        if v.iter().find(|x| !x.is_zero()) != Some(&f.one()) {
            continue;
        }
        if form(&v, &v).is_zero() {
            points.push(v);
        }
    }
    let n = points.len();
    let orth: Vec<Vec<bool>> = (0..n)
        .map(|a| (0..n).map(|b| form(&points[a], &points[b]).is_zero()).collect())
        .collect();

    let bound = (m - rank) + rank / 2;
    let mut best = 0;
    let mut chosen: Vec<usize> = Vec::new();
    search(&f, &points, &orth, m, bound, 0, &mut chosen, &mut best);
    Ok(best - (m - rank))
}

#[allow(clippy::too_many_arguments)]
fn search(
    f: &Arc<Field>,
    points: &[Vec<FieldElem>],
    orth: &[Vec<bool>],
    m: usize,
    bound: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    best: &mut usize,
) {
    *best = (*best).max(chosen.len());
    if *best >= bound {
        return;
    }
    for c in start..points.len() {
        if !chosen.iter().all(|&x| orth[x][c]) {
            continue;
        }
        chosen.push(c);
        let rows: Vec<Vec<FieldElem>> = chosen.iter().map(|&x| points[x].clone()).collect();
        let independent = MatFq::from_row_vecs(f, m, &rows).expect("rows have length m").rank() == chosen.len();
        if independent {
            search(f, points, orth, m, bound, c + 1, chosen, best);
        }
        chosen.pop();
        if *best >= bound {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(p: u32) -> Arc<Field> {
        Arc::new(Field::new(p, 1, None).unwrap())
    }

    fn m(f: &Arc<Field>, rows: &[&[u32]]) -> MatFq {
        MatFq::from_rows(f, rows).unwrap()
    }

    #[test]
    fn decomposition_examples() {
        let f3 = field(3);
        let w = witt_decompose(&m(&f3, &[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!((w.s, w.gamma, w.class), (1, 0, None));
        let w = witt_decompose(&m(&f3, &[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!((w.s, w.gamma, w.class), (0, 2, None));
        let w = witt_decompose(&m(&f3, &[&[1, 0], &[0, 2]])).unwrap();
        assert_eq!((w.s, w.gamma, w.class), (1, 0, None));
        let w = witt_decompose(&m(&f3, &[&[2]])).unwrap();
        assert_eq!((w.rank, w.s, w.gamma, w.class), (1, 0, 1, Some(SquareClass::Z)));
    }

    #[test]
    fn oracle_examples() {
        let f3 = field(3);
        assert_eq!(witt_bruteforce_oracle(&m(&f3, &[&[1, 0], &[0, 1]])).unwrap(), 0);
        assert_eq!(witt_bruteforce_oracle(&m(&f3, &[&[1, 0, 0], &[0, 2, 0], &[0, 0, 0]])).unwrap(), 1);
        assert_eq!(witt_bruteforce_oracle(&m(&f3, &[&[0, 1], &[1, 0]])).unwrap(), 1);
        let big = MatFq::identity(&field(101), 3);
        assert!(matches!(witt_bruteforce_oracle(&big), Err(Error::InstanceTooLarge(_))));
    }

    #[test]
    fn decomposition_matches_oracle_on_small_forms() {
        let f3 = field(3);
        for dim in 1..=2usize {
            let entries = dim * (dim + 1) / 2;
            for code in 0..3u32.pow(entries as u32) {
                let g = symmetric_from_code(&f3, dim, code);
                let w = witt_decompose(&g).unwrap();
                assert_eq!(w.s, witt_bruteforce_oracle(&g).unwrap(), "{g:?}");
                assert_eq!(w.rank, 2 * w.s + w.gamma);
            }
        }
        let f5 = field(5);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let g = symmetric_from_code(&f5, 3, rng.gen_range(0..5u32.pow(6)));
            assert_eq!(witt_decompose(&g).unwrap().s, witt_bruteforce_oracle(&g).unwrap());
        }
    }

    fn symmetric_from_code(f: &Arc<Field>, dim: usize, mut code: u32) -> MatFq {
        let q = f.order();
        let mut g = MatFq::zeros(f, dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let v = f.elem(code % q).unwrap();
                code /= q;
                g.set(i, j, v);
                g.set(j, i, v);
            }
        }
        g
    }
}
