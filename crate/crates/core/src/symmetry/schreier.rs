//! Deterministic Schreier–Sims with explicit transversals.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Permutation of `0..n` as an image array: `p[x]` is the image of `x`.
pub type Perm = Vec<u32>;

fn identity(n: usize) -> Perm {
    (0..n as u32).collect()
}

fn is_identity(p: &[u32]) -> bool {
    p.iter().enumerate().all(|(i, &x)| i as u32 == x)
}

/// `a` followed by `b`.
fn compose(a: &[u32], b: &[u32]) -> Perm {
    a.iter().map(|&x| b[x as usize]).collect()
}

fn inverse(a: &[u32]) -> Perm {
    let mut inv = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        inv[x as usize] = i as u32;
    }
    inv
}

fn first_moved(p: &[u32]) -> Option<u32> {
    p.iter().enumerate().find(|&(i, &x)| i as u32 != x).map(|(i, _)| i as u32)
}

struct Level {
    point: u32,
    gens: Vec<Perm>,
    orbit: Vec<u32>,
    /// `β -> (u_β, u_β^{-1})` with `u_β` mapping the base point to `β`.
    transversal: HashMap<u32, (Perm, Perm)>,
}

impl Level {
    fn new(point: u32, n: usize) -> Level {
        let mut level = Level { point, gens: Vec::new(), orbit: Vec::new(), transversal: HashMap::new() };
        level.rebuild(n);
        level
    }

    fn rebuild(&mut self, n: usize) {
        self.orbit = vec![self.point];
        self.transversal.clear();
        self.transversal.insert(self.point, (identity(n), identity(n)));
        let mut i = 0;
        while i < self.orbit.len() {
            let beta = self.orbit[i];
            i += 1;
            for s in &self.gens {
                let gamma = s[beta as usize];
                if !self.transversal.contains_key(&gamma) {
                    let u = compose(&self.transversal[&beta].0, s);
                    let inv = inverse(&u);
                    self.transversal.insert(gamma, (u, inv));
                    self.orbit.push(gamma);
                }
            }
        }
    }
}

/// Permutation group with a base and strong generating set.
pub struct PermGroup {
    n: usize,
    generators: Vec<Perm>,
    levels: Vec<Level>,
}

impl PermGroup {
    /// Builds a stabilizer chain. Base points are added in the order they are
    /// needed, each the least point moved by the generator that required it.
    pub fn new(n: usize, generators: &[Perm]) -> Result<PermGroup> {
        for g in generators {
            if g.len() != n {
                return Err(Error::LengthMismatch { got: g.len(), expected: n });
            }
        }
        let gens: Vec<Perm> = generators.iter().filter(|g| !is_identity(g)).cloned().collect();
        let mut group = PermGroup { n, generators: gens.clone(), levels: Vec::new() };
        for g in &gens {
            if group.levels.iter().all(|l| g[l.point as usize] == l.point) {
                let p = first_moved(g).expect("non-identity");
                group.levels.push(Level { point: p, gens: Vec::new(), orbit: Vec::new(), transversal: HashMap::new() });
            }
        }
        for i in 0..group.levels.len() {
            let fixing: Vec<Perm> = gens
                .iter()
                .filter(|g| group.levels[..i].iter().all(|l| g[l.point as usize] == l.point))
                .cloned()
                .collect();
            group.levels[i].gens = fixing;
            group.levels[i].rebuild(n);
        }
        group.complete();
        Ok(group)
    }

    fn complete(&mut self) {
        let n = self.n;
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let lvl = i as usize;
            let mut restart = None;
            'scan: for bi in 0..self.levels[lvl].orbit.len() {
                let beta = self.levels[lvl].orbit[bi];
                for si in 0..self.levels[lvl].gens.len() {
                    let level = &self.levels[lvl];
                    let s = &level.gens[si];
                    let gamma = s[beta as usize];
                    let ub = &level.transversal[&beta].0;
                    let ug_inv = &level.transversal[&gamma].1;
                    let schreier = compose(&compose(ub, s), ug_inv);
                    if is_identity(&schreier) {
                        continue;
                    }
                    let (h, j) = self.strip(schreier, lvl + 1);
                    if j == self.levels.len() {
                        if is_identity(&h) {
                            continue;
                        }
                        let p = first_moved(&h).expect("non-identity");
                        self.levels.push(Level::new(p, n));
                    }
                    for l in lvl + 1..=j {
                        self.levels[l].gens.push(h.clone());
                        self.levels[l].rebuild(n);
                    }
                    restart = Some(j);
                    break 'scan;
                }
            }
            match restart {
                Some(j) => i = j as isize,
                None => i -= 1,
            }
        }
    }

    /// Sifts `g` through levels `from..`; returns the residue and the level
    /// at which sifting stopped (the number of levels if it passed all).
    fn strip(&self, g: Perm, from: usize) -> (Perm, usize) {
        let mut h = g;
        for (l, level) in self.levels.iter().enumerate().skip(from) {
            let beta = h[level.point as usize];
            match level.transversal.get(&beta) {
                None => return (h, l),
                Some((_, u_inv)) => h = compose(&h, u_inv),
            }
        }
        (h, self.levels.len())
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn transversal_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> Result<u128> {
        self.levels
            .iter()
            .try_fold(1u128, |acc, l| acc.checked_mul(l.orbit.len() as u128).ok_or(Error::Overflow("group order")))
    }

    pub fn contains(&self, g: &[u32]) -> bool {
        if g.len() != self.n {
            return false;
        }
        let (h, j) = self.strip(g.to_vec(), 0);
        j == self.levels.len() && is_identity(&h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn cycle(n: usize) -> Perm {
        (0..n as u32).map(|i| (i + 1) % n as u32).collect()
    }

    fn transposition(n: usize, a: u32, b: u32) -> Perm {
        let mut p = identity(n);
        p.swap(a as usize, b as usize);
        p
    }

    /// Closure by breadth-first multiplication; only for tiny groups.
    fn brute_force_order(n: usize, gens: &[Perm]) -> usize {
        let mut seen: HashSet<Perm> = HashSet::from([identity(n)]);
        let mut queue = vec![identity(n)];
        while let Some(p) = queue.pop() {
            for g in gens {
                let q = compose(&p, g);
                if seen.insert(q.clone()) {
                    queue.push(q);
                }
            }
        }
        seen.len()
    }

    #[test]
    fn classic_groups() {
        assert_eq!(PermGroup::new(5, &[]).unwrap().order().unwrap(), 1);
        assert_eq!(PermGroup::new(5, &[identity(5)]).unwrap().order().unwrap(), 1);
        assert_eq!(PermGroup::new(6, &[cycle(6)]).unwrap().order().unwrap(), 6);
        let s6 = PermGroup::new(6, &[cycle(6), transposition(6, 0, 1)]).unwrap();
        assert_eq!(s6.order().unwrap(), 720);
        let s12 = PermGroup::new(12, &[cycle(12), transposition(12, 0, 1)]).unwrap();
        assert_eq!(s12.order().unwrap(), 479_001_600);
        assert!(s6.contains(&transposition(6, 2, 5)));
        let c6 = PermGroup::new(6, &[cycle(6)]).unwrap();
        assert!(!c6.contains(&transposition(6, 2, 5)));
        assert!(PermGroup::new(4, &[identity(5)]).is_err());
    }

    #[test]
    fn random_groups_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = 7;
            let gens: Vec<Perm> = (0..2)
                .map(|_| {
                    let mut p = identity(n);
                    // sparse permutations give a spread of small groups
                    let k = 3;
                    let mut idx: Vec<usize> = (0..n).collect();
                    idx.shuffle(&mut rng);
                    let pts: Vec<usize> = idx[..k].to_vec();
                    for w in 0..k {
                        p[pts[w]] = pts[(w + 1) % k] as u32;
                    }
                    p
                })
                .collect();
            let g = PermGroup::new(n, &gens).unwrap();
            assert_eq!(g.order().unwrap() as usize, brute_force_order(n, &gens));
            for s in &gens {
                assert!(g.contains(s));
            }
        }
    }
}
