//! Orbit partitions by union-find closure over generators.

use std::collections::HashMap;
use std::hash::Hash;

use crate::graph::OiGraph;

use super::VertexPerm;

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller root so labels do not depend on merge order
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Orbit ids numbered by first appearance.
    fn labels(&mut self) -> Vec<usize> {
        let mut ids = HashMap::new();
        (0..self.parent.len())
            .map(|x| {
                let r = self.find(x);
                let next = ids.len();
                *ids.entry(r).or_insert(next)
            })
            .collect()
    }
}

/// Orbit id of each vertex under the group generated by `gens`; ids are
/// numbered in order of least member.
pub fn vertex_orbits(n: usize, gens: &[VertexPerm]) -> Vec<usize> {
    let mut dsu = Dsu::new(n);
    for g in gens {
        for v in 0..n {
            dsu.union(v, g.apply(v));
        }
    }
    dsu.labels()
}

/// Edges `(u, v)`, `u <= v`, with loops as `(v, v)`, and their orbit ids.
#[derive(Clone, Debug)]
pub struct EdgeOrbits {
    pub edges: Vec<(usize, usize)>,
    pub labels: Vec<usize>,
}

impl EdgeOrbits {
    /// Orbit id of the unordered pair `{u, v}`.
    pub fn orbit_of(&self, u: usize, v: usize) -> Option<usize> {
        let key = if u <= v { (u, v) } else { (v, u) };
        self.edges.binary_search(&key).ok().map(|i| self.labels[i])
    }
}

pub fn edge_orbits(g: &OiGraph, gens: &[VertexPerm]) -> EdgeOrbits {
    let bits = g.bits();
    let mut edges: Vec<(usize, usize)> = bits.edges();
    edges.extend((0..g.len()).filter(|&v| bits.has_loop(v)).map(|v| (v, v)));
    edges.sort_unstable();
    let mut dsu = Dsu::new(edges.len());
    for p in gens {
        for (i, &(u, v)) in edges.iter().enumerate() {
            let (a, b) = (p.apply(u), p.apply(v));
            let key = if a <= b { (a, b) } else { (b, a) };
            let j = edges.binary_search(&key).expect("automorphisms map edges to edges");
            dsu.union(i, j);
        }
    }
    let labels = dsu.labels();
    EdgeOrbits { edges, labels }
}

/// Classes of a labelling, each sorted, ordered by least member.
pub fn partition_classes<L: Eq + Hash>(labels: &[L]) -> Vec<Vec<usize>> {
    let mut ids: HashMap<&L, usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, l) in labels.iter().enumerate() {
        let next = classes.len();
        let id = *ids.entry(l).or_insert(next);
        if id == next {
            classes.push(Vec::new());
        }
        classes[id].push(i);
    }
    classes
}

/// How two partitions of the same index set relate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartitionComparison {
    /// Every class of the first lies inside a class of the second.
    pub first_refines_second: bool,
    pub second_refines_first: bool,
    pub first_classes: usize,
    pub second_classes: usize,
}

impl PartitionComparison {
    pub fn equal(&self) -> bool {
        self.first_refines_second && self.second_refines_first
    }
}

pub fn compare_partitions<A: Eq + Hash, B: Eq + Hash>(a: &[A], b: &[B]) -> PartitionComparison {
    assert_eq!(a.len(), b.len(), "partitions of different sets");
    fn refines<X: Eq + Hash, Y: Eq + Hash>(x: &[X], y: &[Y]) -> bool {
        let mut seen: HashMap<&X, &Y> = HashMap::new();
        x.iter().zip(y).all(|(l, m)| *seen.entry(l).or_insert(m) == m)
    }
    PartitionComparison {
        first_refines_second: refines(a, b),
        second_refines_first: refines(b, a),
        first_classes: partition_classes(a).len(),
        second_classes: partition_classes(b).len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_gives_singletons() {
        let labels = vertex_orbits(5, &[VertexPerm::identity(5)]);
        assert_eq!(labels, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn partition_relations() {
        let a = [0, 0, 1, 1, 2];
        let b = ["x", "x", "y", "y", "y"];
        let c = compare_partitions(&a, &b);
        assert!(c.first_refines_second && !c.second_refines_first && !c.equal());
        assert_eq!((c.first_classes, c.second_classes), (3, 2));
        assert!(compare_partitions(&a, &[5, 5, 7, 7, 9]).equal());
        assert_eq!(partition_classes(&b), vec![vec![0, 1], vec![2, 3, 4]]);
    }
}
