//! Exhaustive enumeration of subspaces of a fixed dimension.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matfq::MatFq;

use super::{Space, Subspace, SubspaceType};

/// `[n choose m]_q`, the number of `m`-dimensional subspaces of `F_q^n`.
pub fn gaussian_binomial(n: usize, m: usize, q: u64) -> Result<u128> {
    if m > n {
        return Ok(0);
    }
    let q = q as u128;
    let pow = |k: usize| q.checked_pow(k as u32).ok_or(Error::Overflow("gaussian binomial"));
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..m {
        num = num
            .checked_mul(pow(n - i)? - 1)
            .ok_or(Error::Overflow("gaussian binomial"))?;
        den = den
            .checked_mul(pow(i + 1)? - 1)
            .ok_or(Error::Overflow("gaussian binomial"))?;
    }
    Ok(num / den)
}

/// Streams every `m`-dimensional subspace exactly once: pivot column sets in
/// lexicographic order, and within a pivot set the free entries as an
/// odometer whose last position turns fastest.
pub struct SubspaceIter {
    space: Arc<Space>,
    m: usize,
    pivots: Vec<usize>,
    free: Vec<(usize, usize)>,
    values: Vec<u32>,
    done: bool,
}

impl SubspaceIter {
    pub fn new(space: &Arc<Space>, m: usize) -> Result<SubspaceIter> {
        let n = space.n();
        if m == 0 || m >= n {
            return Err(Error::DimensionOutOfRange { m, max: n - 1 });
        }
        let pivots: Vec<usize> = (0..m).collect();
        let free = free_positions(&pivots, n);
        Ok(SubspaceIter {
            space: Arc::clone(space),
            m,
            values: vec![0; free.len()],
            pivots,
            free,
            done: false,
        })
    }

    fn current(&self) -> Subspace {
        let f = self.space.field();
        let n = self.space.n();
        let mut b = MatFq::zeros(f, self.m, n);
        for (i, &p) in self.pivots.iter().enumerate() {
            b.set(i, p, f.one());
        }
        for (&(r, c), &v) in self.free.iter().zip(&self.values) {
            b.set(r, c, f.elem(v).expect("odometer digit below q"));
        }
        Subspace::from_rref_unchecked(&self.space, b)
    }

    fn advance(&mut self) {
        let q = self.space.field().order();
        for v in self.values.iter_mut().rev() {
            *v += 1;
            if *v < q {
                return;
            }
            *v = 0;
        }
        if !next_combination(&mut self.pivots, self.space.n()) {
            self.done = true;
            return;
        }
        self.free = free_positions(&self.pivots, self.space.n());
        self.values = vec![0; self.free.len()];
    }
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        if self.done {
            return None;
        }
        let out = self.current();
        self.advance();
        Some(out)
    }
}

/// Entries right of each pivot that are not themselves pivot columns.
fn free_positions(pivots: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (r, &p) in pivots.iter().enumerate() {
        for c in p + 1..n {
            if !pivots.contains(&c) {
                out.push((r, c));
            }
        }
    }
    out
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Number of `m`-dimensional subspaces of each type, by exhaustive
/// classification. Refuses when the total exceeds `budget`.
pub fn count_by_type(space: &Arc<Space>, m: usize, budget: u128) -> Result<BTreeMap<SubspaceType, u64>> {
    let iter = SubspaceIter::new(space, m)?;
    let total = gaussian_binomial(space.n(), m, space.field().order() as u64)?;
    if total > budget {
        return Err(Error::BudgetExceeded { count: total, budget });
    }
    let subspaces: Vec<Subspace> = iter.collect();
    let counts = subspaces
        .par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<SubspaceType, u64>, p| {
            *acc.entry(p.classify()).or_insert(0) += 1;
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Field;
    use crate::ospace::Disc;
    use std::collections::HashSet;

    fn space(nu: usize, delta: usize, disc: Disc, p: u32, e: u32) -> Arc<Space> {
        Space::new(nu, delta, disc, Arc::new(Field::new(p, e, None).unwrap())).unwrap()
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(gaussian_binomial(4, 1, 3).unwrap(), 40);
        assert_eq!(gaussian_binomial(4, 2, 3).unwrap(), 130);
        assert_eq!(gaussian_binomial(2, 1, 3).unwrap(), 4);
        assert_eq!(gaussian_binomial(5, 0, 7).unwrap(), 1);
        assert_eq!(gaussian_binomial(3, 4, 7).unwrap(), 0);
    }

    #[test]
    fn enumeration_counts_and_distinctness() {
        for (sp, q) in [
            (space(2, 0, Disc::None, 3, 1), 3u64),
            (space(1, 0, Disc::None, 3, 1), 3),
            (space(1, 1, Disc::One, 3, 1), 3),
            (space(1, 0, Disc::None, 3, 2), 9),
            (space(1, 2, Disc::Plane, 5, 1), 5),
        ] {
            let n = sp.n();
            for m in 1..n {
                let all: Vec<Subspace> = SubspaceIter::new(&sp, m).unwrap().collect();
                assert_eq!(all.len() as u128, gaussian_binomial(n, m, q).unwrap());
                let distinct: HashSet<Vec<u32>> = all.iter().map(|p| p.basis().values()).collect();
                assert_eq!(distinct.len(), all.len());
                for p in &all {
                    assert_eq!(p.basis().rref().matrix, *p.basis());
                    assert_eq!(p.dim(), m);
                }
            }
        }
    }

    #[test]
    fn enumeration_rejects_bad_dimensions() {
        let sp = space(2, 0, Disc::None, 3, 1);
        assert!(SubspaceIter::new(&sp, 0).is_err());
        assert!(SubspaceIter::new(&sp, 4).is_err());
    }

    #[test]
    fn type_counts() {
        let sp = space(2, 0, Disc::None, 3, 1);
        let c = count_by_type(&sp, 1, u128::MAX).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.values().sum::<u64>(), 40);

        let sp = space(1, 0, Disc::None, 3, 1);
        let c = count_by_type(&sp, 1, u128::MAX).unwrap();
        let iso = c.iter().find(|(t, _)| t.rank == 0).unwrap();
        assert_eq!(*iso.1, 2);

        let sp = space(1, 1, Disc::One, 3, 1);
        assert_eq!(count_by_type(&sp, 1, u128::MAX).unwrap().values().sum::<u64>(), 13);
        assert!(matches!(count_by_type(&sp, 1, 5), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn type_counts_partition_gaussian_binomials() {
        for sp in [space(2, 1, Disc::Z, 3, 1), space(1, 2, Disc::Plane, 3, 1), space(2, 0, Disc::None, 5, 1)] {
            let n = sp.n();
            for m in 1..n {
                let total: u64 = count_by_type(&sp, m, u128::MAX).unwrap().values().sum();
                assert_eq!(total as u128, gaussian_binomial(n, m, sp.field().order() as u64).unwrap());
            }
        }
    }
}
