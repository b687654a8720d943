//! Full automorphism group of a graph by individualization and refinement.
//!
//! The search walks a first path of the refinement tree down to a discrete
//! partition, then works back up: at each level it finds the orbit of the
//! individualized vertex under the stabilizer of the earlier choices by
//! searching for automorphisms that map it to each other vertex of its cell.
//! The group order is the product of those orbit lengths.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{BitGraph, OiGraph};

/// Vertex count above which [`full_aut_order`] refuses to search.
pub const DEFAULT_SEARCH_BUDGET: usize = 2000;

/// Whether `images` is a bijection preserving adjacency and loops.
pub fn is_automorphism(g: &BitGraph, images: &[u32]) -> Result<bool> {
    let n = g.len();
    if images.len() != n {
        return Err(Error::LengthMismatch { got: images.len(), expected: n });
    }
    let mut seen = vec![false; n];
    for &x in images {
        let x = x as usize;
        if x >= n || seen[x] {
            return Ok(false);
        }
        seen[x] = true;
    }
    for u in 0..n {
        let iu = images[u] as usize;
        if g.has_loop(u) != g.has_loop(iu) || g.degree(u) != g.degree(iu) {
            return Ok(false);
        }
        if !g.neighbors(u).all(|v| g.has_edge(iu, images[v] as usize)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Ordered partition of the vertex set into cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredPartition {
    cells: Vec<Vec<usize>>,
}

impl ColoredPartition {
    /// One cell holding every vertex.
    pub fn unit(n: usize) -> ColoredPartition {
        ColoredPartition { cells: if n == 0 { vec![] } else { vec![(0..n).collect()] } }
    }

    /// Cells are the fibers of `colors`, ordered by color.
    pub fn from_colors<K: Ord + Clone>(colors: &[K]) -> ColoredPartition {
        let mut by: BTreeMap<K, Vec<usize>> = BTreeMap::new();
        for (v, c) in colors.iter().enumerate() {
            by.entry(c.clone()).or_default().push(v);
        }
        ColoredPartition { cells: by.into_values().collect() }
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn is_discrete(&self) -> bool {
        self.cells.iter().all(|c| c.len() == 1)
    }

    fn cell_index(&self, n: usize) -> Vec<usize> {
        let mut idx = vec![0; n];
        for (i, c) in self.cells.iter().enumerate() {
            for &v in c {
                idx[v] = i;
            }
        }
        idx
    }

    /// First cell of least size among those with more than one vertex.
    fn target_cell(&self) -> Option<usize> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.len() > 1)
            .min_by_key(|&(i, c)| (c.len(), i))
            .map(|(i, _)| i)
    }

    /// Splits `v` out of cell `t`, placing it first.
    fn individualize(&self, t: usize, v: usize) -> ColoredPartition {
        let mut cells = Vec::with_capacity(self.cells.len() + 1);
        for (i, c) in self.cells.iter().enumerate() {
            if i == t {
                cells.push(vec![v]);
                cells.push(c.iter().copied().filter(|&x| x != v).collect());
            } else {
                cells.push(c.clone());
            }
        }
        ColoredPartition { cells }
    }
}

/// Neighbour counts of `v` per cell, as sorted `(cell, count)` pairs.
fn signature(g: &BitGraph, cell_of: &[usize], v: usize) -> Vec<(usize, u32)> {
    let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
    for w in g.neighbors(v) {
        *counts.entry(cell_of[w]).or_insert(0) += 1;
    }
    counts.into_iter().collect()
}

/// Coarsest equitable refinement. Each cell is split by neighbour-count
/// signature, the pieces ordered by signature, until nothing splits. The
/// result depends only on the graph and the input partition up to
/// relabelling.
pub fn refine(g: &BitGraph, p: &ColoredPartition) -> ColoredPartition {
    let n = g.len();
    let mut cur = p.clone();
    loop {
        let cell_of = cur.cell_index(n);
        let mut next = Vec::with_capacity(cur.cells.len());
        for c in &cur.cells {
            if c.len() == 1 {
                next.push(c.clone());
                continue;
            }
            let mut groups: BTreeMap<Vec<(usize, u32)>, Vec<usize>> = BTreeMap::new();
            for &v in c {
                groups.entry(signature(g, &cell_of, v)).or_default().push(v);
            }
            next.extend(groups.into_values());
        }
        let split = next.len() != cur.cells.len();
        cur = ColoredPartition { cells: next };
        if !split {
            return cur;
        }
    }
}

/// Isomorphism invariant of an equitable partition: per cell, its size and
/// the signature shared by its members.
fn profile(g: &BitGraph, p: &ColoredPartition) -> Vec<(usize, bool, Vec<(usize, u32)>)> {
    let cell_of = p.cell_index(g.len());
    p.cells
        .iter()
        .map(|c| (c.len(), g.has_loop(c[0]), signature(g, &cell_of, c[0])))
        .collect()
}

/// Output of [`full_aut_order`].
#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub order: u128,
    /// Automorphisms found while computing orbits, as image arrays.
    pub generators: Vec<Vec<u32>>,
    /// Number of refined partitions visited.
    pub node_count: u64,
}

struct Searcher<'a> {
    g: &'a BitGraph,
    nodes: u64,
    generators: Vec<Vec<u32>>,
}

impl Searcher<'_> {
    fn refine(&mut self, p: &ColoredPartition) -> ColoredPartition {
        self.nodes += 1;
        refine(self.g, p)
    }

    /// Depth-first search below `q` along the shape of `path[depth..]`,
    /// looking for a leaf that yields an automorphism.
    fn find(&mut self, path: &[(ColoredPartition, Option<usize>)], depth: usize, q: &ColoredPartition) -> Option<Vec<u32>> {
        let (p, target) = &path[depth];
        let Some(t) = *target else {
            let mut images = vec![0u32; self.g.len()];
            for (a, b) in p.cells.iter().zip(&q.cells) {
                images[a[0]] = b[0] as u32;
            }
            return is_automorphism(self.g, &images).unwrap_or(false).then_some(images);
        };
        let want = profile(self.g, &path[depth + 1].0);
        for &x in &q.cells[t] {
            let child = self.refine(&q.individualize(t, x));
            if profile(self.g, &child) != want {
                continue;
            }
            if let Some(found) = self.find(path, depth + 1, &child) {
                return Some(found);
            }
        }
        None
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Order of the group of permutations preserving adjacency, loops and the
/// initial colouring.
pub fn aut_order(g: &BitGraph, initial: &ColoredPartition) -> Result<SearchResult> {
    let n = g.len();
    let mut s = Searcher { g, nodes: 0, generators: Vec::new() };

    // first path: (partition, target cell) pairs down to a discrete leaf
    let mut path: Vec<(ColoredPartition, Option<usize>)> = Vec::new();
    let mut p = s.refine(initial);
    loop {
        let t = p.target_cell();
        path.push((p.clone(), t));
        let Some(t) = t else { break };
        let v = p.cells[t][0];
        p = s.refine(&p.individualize(t, v));
    }

    let mut orbits = Dsu((0..n).collect());
    let mut order: u128 = 1;
    for depth in (0..path.len() - 1).rev() {
        let (p, t) = path[depth].clone();
        let t = t.expect("non-leaf levels have a target");
        let cell = p.cells[t].clone();
        let v = cell[0];
        for &w in &cell[1..] {
            if orbits.find(w) == orbits.find(v) {
                continue;
            }
            let q = s.refine(&p.individualize(t, w));
            if profile(g, &q) != profile(g, &path[depth + 1].0) {
                continue;
            }
            if let Some(images) = s.find(&path, depth + 1, &q) {
                for (x, &y) in images.iter().enumerate() {
                    orbits.union(x, y as usize);
                }
                s.generators.push(images);
            }
        }
        let root = orbits.find(v);
        let orbit_len = cell.iter().filter(|&&w| orbits.find(w) == root).count();
        order = order.checked_mul(orbit_len as u128).ok_or(Error::Overflow("automorphism group order"))?;
    }
    Ok(SearchResult { order, generators: s.generators, node_count: s.nodes })
}

/// Initial colouring by (dimension, loop flag, degree).
pub fn initial_partition(g: &OiGraph) -> ColoredPartition {
    let bits = g.bits();
    let colors: Vec<(usize, bool, usize)> = g
        .vertices()
        .iter()
        .enumerate()
        .map(|(v, p)| (p.dim(), bits.has_loop(v), bits.degree(v)))
        .collect();
    ColoredPartition::from_colors(&colors)
}

/// `|Aut(g)|` by exhaustive search, refusing graphs above `budget` vertices.
pub fn full_aut_order(g: &OiGraph, budget: usize) -> Result<SearchResult> {
    if g.len() > budget {
        return Err(Error::BudgetExceeded { count: g.len() as u128, budget: budget as u128 });
    }
    aut_order(g.bits(), &initial_partition(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Field;
    use crate::ospace::{Disc, Space};
    use std::sync::Arc;

    fn graph(nu: usize, delta: usize, disc: Disc, p: u32, e: u32) -> OiGraph {
        let sp = Space::new(nu, delta, disc, Arc::new(Field::new(p, e, None).unwrap())).unwrap();
        OiGraph::build(&sp, u128::MAX).unwrap()
    }

    fn cycle_graph(n: usize) -> BitGraph {
        let mut g = BitGraph::new(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n);
        }
        g
    }

    #[test]
    fn automorphism_checks() {
        let g = graph(1, 0, Disc::None, 3, 1);
        let id: Vec<u32> = (0..4).collect();
        assert!(is_automorphism(g.bits(), &id).unwrap());
        let loop_v = (0..4).find(|&v| g.bits().has_loop(v)).unwrap();
        let plain = (0..4).find(|&v| !g.bits().has_loop(v)).unwrap();
        let mut swap = id.clone();
        swap.swap(loop_v, plain);
        assert!(!is_automorphism(g.bits(), &swap).unwrap());
        assert!(matches!(is_automorphism(g.bits(), &id[..3]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn refinement_examples() {
        let g = graph(1, 0, Disc::None, 3, 1);
        let r = refine(g.bits(), &ColoredPartition::unit(4));
        let loops: Vec<usize> = (0..4).filter(|&v| g.bits().has_loop(v)).collect();
        let ends: Vec<usize> = (0..4).filter(|&v| !g.bits().has_loop(v)).collect();
        assert_eq!(r.cells(), &[loops, ends]);

        let discrete = ColoredPartition::from_colors(&[3, 1, 2, 0]);
        assert_eq!(refine(g.bits(), &discrete), discrete);
    }

    #[test]
    fn classic_orders() {
        assert_eq!(aut_order(&cycle_graph(7), &ColoredPartition::unit(7)).unwrap().order, 14);
        let mut k4 = BitGraph::new(4);
        for u in 0..4 {
            for v in u + 1..4 {
                k4.add_edge(u, v);
            }
        }
        assert_eq!(aut_order(&k4, &ColoredPartition::unit(4)).unwrap().order, 24);
        // Petersen graph
        let mut p = BitGraph::new(10);
        for i in 0..5 {
            p.add_edge(i, (i + 1) % 5);
            p.add_edge(i, i + 5);
            p.add_edge(5 + i, 5 + (i + 2) % 5);
        }
        assert_eq!(aut_order(&p, &ColoredPartition::unit(10)).unwrap().order, 120);
    }

    #[test]
    fn plane_graphs() {
        assert_eq!(full_aut_order(&graph(1, 0, Disc::None, 3, 1), 2000).unwrap().order, 4);
        assert_eq!(full_aut_order(&graph(1, 0, Disc::None, 5, 1), 2000).unwrap().order, 16);
        assert_eq!(full_aut_order(&graph(1, 0, Disc::None, 3, 2), 2000).unwrap().order, 768);
        assert!(matches!(full_aut_order(&graph(1, 0, Disc::None, 5, 1), 5), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn found_generators_are_automorphisms() {
        let g = graph(1, 1, Disc::One, 3, 1);
        let r = full_aut_order(&g, 2000).unwrap();
        for gen in &r.generators {
            assert!(is_automorphism(g.bits(), gen).unwrap());
        }
        assert!(r.node_count > 0);
    }
}
