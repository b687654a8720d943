//! The graph `Oi(2ν+δ, q)`: vertices are the nonzero proper subspaces, and
//! `A`, `B` are joined when `A S B^T = 0`.
//!
//! Adjacency between distinct vertices lives in packed bitset rows; loops
//! (totally isotropic vertices) are kept in a separate flag vector so that
//! degrees and distances only see proper edges.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElem};
use crate::ospace::{dot, gaussian_binomial, Disc, Space, Subspace, SubspaceIter};

/// Vertex budget applied when neither a flag nor `OIGRAPH_BUDGET` is given.
pub const DEFAULT_VERTEX_BUDGET: u128 = 1_000_000;

/// The vertex budget from `OIGRAPH_BUDGET`, or the default.
pub fn vertex_budget_from_env() -> u128 {
    std::env::var("OIGRAPH_BUDGET")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_VERTEX_BUDGET)
}

/// Simple graph on `0..n` with a loop flag per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitGraph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    loops: Vec<bool>,
}

impl BitGraph {
    pub fn new(n: usize) -> BitGraph {
        let words = n.div_ceil(64);
        BitGraph { n, words, rows: vec![0; n * words], loops: vec![false; n] }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    /// Adds the proper edge `{u, v}`, or a loop when `u == v`.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u == v {
            self.loops[u] = true;
        } else {
            self.rows[u * self.words + v / 64] |= 1 << (v % 64);
            self.rows[v * self.words + u / 64] |= 1 << (u % 64);
        }
    }

    #[inline]
    pub fn has_loop(&self, u: usize) -> bool {
        self.loops[u]
    }

    pub fn loops(&self) -> &[bool] {
        &self.loops
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(u).iter().enumerate().flat_map(|(wi, &w)| BitIter(w).map(move |b| wi * 64 + b))
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).sum::<usize>() / 2
    }

    /// Proper edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
            .collect()
    }

    /// The graph with vertex `u` renamed to `perm[u]`.
    pub fn relabel(&self, perm: &[usize]) -> BitGraph {
        let mut g = BitGraph::new(self.n);
        for u in 0..self.n {
            if self.loops[u] {
                g.loops[perm[u]] = true;
            }
            for v in self.neighbors(u) {
                g.rows[perm[u] * g.words + perm[v] / 64] |= 1 << (perm[v] % 64);
            }
        }
        g
    }

    /// Induced subgraph on `keep`, renumbered in the given order.
    pub fn induced(&self, keep: &[usize]) -> BitGraph {
        let mut g = BitGraph::new(keep.len());
        for (i, &u) in keep.iter().enumerate() {
            g.loops[i] = self.loops[u];
            for (j, &v) in keep.iter().enumerate() {
                if self.has_edge(u, v) {
                    g.rows[i * g.words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        g
    }

    /// Breadth-first distances from `src`; `None` for unreachable vertices.
    pub fn distances(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut visited = vec![0u64; self.words];
        visited[src / 64] |= 1 << (src % 64);
        dist[src] = Some(0);
        let mut frontier = vec![src];
        let mut level = 0;
        while !frontier.is_empty() {
            level += 1;
            let mut next = vec![0u64; self.words];
            for &u in &frontier {
                for (x, &r) in next.iter_mut().zip(self.row(u)) {
                    *x |= r;
                }
            }
            frontier.clear();
            for (w, (x, vis)) in next.iter_mut().zip(visited.iter_mut()).enumerate() {
                *x &= !*vis;
                *vis |= *x;
                for b in BitIter(*x) {
                    let v = w * 64 + b;
                    dist[v] = Some(level);
                    frontier.push(v);
                }
            }
        }
        dist
    }

    /// Largest distance from `src`, or `None` if some vertex is unreachable.
    pub fn eccentricity(&self, src: usize) -> Option<usize> {
        self.distances(src).into_iter().try_fold(0, |acc, d| d.map(|d| acc.max(d)))
    }

    /// Maximum eccentricity, `None` when the graph is disconnected.
    pub fn diameter(&self) -> Option<usize> {
        (0..self.n)
            .into_par_iter()
            .map(|u| self.eccentricity(u))
            .reduce(|| Some(0), |a, b| Some(a?.max(b?)))
    }

    /// Connected components over proper edges, each sorted, ordered by least
    /// member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < members.len() {
                let u = members[i];
                i += 1;
                for v in self.neighbors(u) {
                    if comp[v] == usize::MAX {
                        comp[v] = id;
                        members.push(v);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// A shortest path from `u` to `v` over proper edges.
    pub fn shortest_path(&self, u: usize, v: usize) -> Result<Vec<usize>> {
        if u >= self.n {
            return Err(Error::BadVertex(u));
        }
        if v >= self.n {
            return Err(Error::BadVertex(v));
        }
        let mut parent = vec![usize::MAX; self.n];
        parent[u] = u;
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            if x == v {
                break;
            }
            for y in self.neighbors(x) {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if parent[v] == usize::MAX {
            return Err(Error::Disconnected(u, v));
        }
        let mut path = vec![v];
        let mut x = v;
        while x != u {
            x = parent[x];
            path.push(x);
        }
        path.reverse();
        Ok(path)
    }
}

/// Iterator over set bit positions of a word.
pub(crate) struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// Whether `A S B^T = 0`. `A == B` tests for a loop.
pub fn adjacent(a: &Subspace, b: &Subspace) -> Result<bool> {
    a.is_orthogonal_to(b)
}

/// Result of [`OiGraph::max_clique_dim1`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliqueReport {
    /// Size of a maximum clique of mutually orthogonal one-dimensional
    /// vertices.
    pub size: usize,
    /// Number of anisotropic points (no loop) in the first maximum clique
    /// found.
    pub anisotropic: usize,
    /// All distinct anisotropic counts over maximum cliques, ascending.
    pub anisotropic_counts: Vec<usize>,
    /// The first maximum clique found, as vertex ids of the queried graph.
    pub clique: Vec<usize>,
}

#[derive(Clone)]
pub struct OiGraph {
    space: Arc<Space>,
    vertices: Vec<Subspace>,
    index: HashMap<Vec<u32>, usize>,
    adj: BitGraph,
}

impl PartialEq for OiGraph {
    fn eq(&self, other: &Self) -> bool {
        *self.space == *other.space && self.vertices == other.vertices && self.adj == other.adj
    }
}

impl std::fmt::Debug for OiGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "OiGraph({}, {} vertices)", self.space.label(), self.vertices.len())
    }
}

/// Number of vertices of `Oi(n, q)`: nonzero proper subspaces of `F_q^n`.
pub fn vertex_count(space: &Space) -> Result<u128> {
    let q = space.field().order() as u64;
    (1..space.n()).try_fold(0u128, |acc, m| {
        acc.checked_add(gaussian_binomial(space.n(), m, q)?)
            .ok_or(Error::Overflow("vertex count"))
    })
}

impl OiGraph {
    /// Builds the whole graph, refusing when the vertex count exceeds
    /// `budget`.
    pub fn build(space: &Arc<Space>, budget: u128) -> Result<OiGraph> {
        let count = vertex_count(space)?;
        if count > budget {
            return Err(Error::BudgetExceeded { count, budget });
        }
        let mut vertices: Vec<Subspace> = Vec::with_capacity(count as usize);
        for m in 1..space.n() {
            vertices.extend(SubspaceIter::new(space, m)?);
        }
        vertices.sort_by_cached_key(|v| (v.dim(), v.order_key()));
        Ok(OiGraph::from_vertices(space, vertices))
    }

    /// Graph on the given vertices, which must be distinct and already in
    /// the desired order.
    fn from_vertices(space: &Arc<Space>, vertices: Vec<Subspace>) -> OiGraph {
        let n = vertices.len();
        let f: &Field = space.field();
        // for each vertex, its basis rows multiplied by S
        let images: Vec<Vec<Vec<FieldElem>>> = vertices
            .par_iter()
            .map(|v| (0..v.dim()).map(|i| space.apply_form(v.basis().row(i))).collect())
            .collect();
        let orthogonal = |u: usize, v: usize| {
            images[u].iter().all(|x| (0..vertices[v].dim()).all(|j| dot(f, x, vertices[v].basis().row(j)).is_zero()))
        };
        let words = n.div_ceil(64);
        let (bit_rows, loops): (Vec<Vec<u64>>, Vec<bool>) = (0..n)
            .into_par_iter()
            .map(|u| {
                let mut row = vec![0u64; words];
                for v in 0..n {
                    if v != u && orthogonal(u, v) {
                        row[v / 64] |= 1 << (v % 64);
                    }
                }
                (row, orthogonal(u, u))
            })
            .unzip();
        let adj = BitGraph { n, words, rows: bit_rows.concat(), loops };
        let index = vertices.iter().enumerate().map(|(i, v)| (v.basis().values(), i)).collect();
        OiGraph { space: Arc::clone(space), vertices, index, adj }
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Subspace] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Result<&Subspace> {
        self.vertices.get(i).ok_or(Error::BadVertex(i))
    }

    pub fn bits(&self) -> &BitGraph {
        &self.adj
    }

    /// Vertex id of a subspace given by its reduced row echelon basis.
    pub fn index_of(&self, p: &Subspace) -> Option<usize> {
        self.index.get(&p.basis().values()).copied()
    }

    /// Vertex id for the integer encodings of a reduced row echelon basis.
    pub fn index_of_values(&self, values: &[u32]) -> Option<usize> {
        self.index.get(values).copied()
    }

    /// Edge test between vertex ids; `u == v` reports the loop flag.
    pub fn adjacent(&self, u: usize, v: usize) -> Result<bool> {
        if u >= self.len() {
            return Err(Error::BadVertex(u));
        }
        if v >= self.len() {
            return Err(Error::BadVertex(v));
        }
        Ok(if u == v { self.adj.has_loop(u) } else { self.adj.has_edge(u, v) })
    }

    /// Number of neighbours other than `v` itself.
    pub fn degree(&self, v: usize) -> Result<usize> {
        self.vertex(v)?;
        Ok(self.adj.degree(v))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.edge_count()
    }

    pub fn loop_count(&self) -> usize {
        self.adj.loops().iter().filter(|&&l| l).count()
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        self.adj.components()
    }

    /// `None` stands for infinite diameter.
    pub fn diameter(&self) -> Option<usize> {
        self.adj.diameter()
    }

    pub fn witness_path(&self, u: usize, v: usize) -> Result<Vec<usize>> {
        self.adj.shortest_path(u, v)
    }

    /// Ids of the one-dimensional vertices; they form a prefix of the vertex
    /// order.
    pub fn dim1_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.vertices[i].dim() == 1).collect()
    }

    /// Subgraph induced on the one-dimensional vertices.
    pub fn dim1_subgraph(&self) -> OiGraph {
        let keep = self.dim1_vertices();
        let vertices: Vec<Subspace> = keep.iter().map(|&i| self.vertices[i].clone()).collect();
        let index = vertices.iter().enumerate().map(|(i, v)| (v.basis().values(), i)).collect();
        OiGraph { space: Arc::clone(&self.space), vertices, index, adj: self.adj.induced(&keep) }
    }

    /// Maximum cliques among one-dimensional vertices, loops ignored.
    pub fn max_clique_dim1(&self) -> CliqueReport {
        let keep = self.dim1_vertices();
        let sub = self.adj.induced(&keep);
        let cliques = maximum_cliques(&sub);
        let aniso = |c: &[usize]| c.iter().filter(|&&v| !sub.has_loop(v)).count();
        let first = cliques.first().cloned().unwrap_or_default();
        let mut counts: Vec<usize> = cliques.iter().map(|c| aniso(c)).collect();
        counts.sort_unstable();
        counts.dedup();
        CliqueReport {
            size: first.len(),
            anisotropic: aniso(&first),
            anisotropic_counts: counts,
            clique: first.iter().map(|&i| keep[i]).collect(),
        }
    }

    /// Graphviz rendering. Loops appear as `vi -- vi`.
    pub fn to_dot(&self, header: bool) -> String {
        let mut s = String::new();
        if header {
            let _ = writeln!(s, "// {}", self.header_line());
        }
        s.push_str("graph oi {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "  v{i} [label=\"{}\"];", basis_label(v));
        }
        for u in 0..self.len() {
            if self.adj.has_loop(u) {
                let _ = writeln!(s, "  v{u} -- v{u};");
            }
            for v in self.adj.neighbors(u).filter(|&v| v > u) {
                let _ = writeln!(s, "  v{u} -- v{v};");
            }
        }
        s.push_str("}\n");
        s
    }

    /// One-line description of the space and tool version.
    pub fn header_line(&self) -> String {
        let sp = &self.space;
        format!(
            "oigraph {} {} nu={} delta={} disc={} field={}",
            env!("CARGO_PKG_VERSION"),
            sp.label(),
            sp.nu(),
            sp.delta(),
            sp.disc(),
            sp.field().descriptor()
        )
    }

    pub fn to_json(&self) -> GraphJson {
        let sp = &self.space;
        GraphJson {
            space: SpaceJson::of(sp),
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .map(|(id, v)| VertexJson { id, dim: v.dim(), basis: v.rows() })
                .collect(),
            edges: self.adj.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            loops: (0..self.len()).filter(|&u| self.adj.has_loop(u)).collect(),
        }
    }

    /// Rebuilds a graph from its JSON form without recomputing adjacency.
    pub fn from_json(doc: &GraphJson) -> Result<OiGraph> {
        let space = doc.space.to_space()?;
        let mut vertices = Vec::with_capacity(doc.vertices.len());
        for (i, v) in doc.vertices.iter().enumerate() {
            if v.id != i {
                return Err(Error::Parse(format!("vertex ids must be 0..n in order, found {} at {i}", v.id)));
            }
            let p = Subspace::from_rows(&space, &v.basis)?;
            if p.dim() != v.dim || p.rows() != v.basis {
                return Err(Error::Parse(format!("vertex {i} basis is not in reduced row echelon form")));
            }
            vertices.push(p);
        }
        let n = vertices.len();
        let mut adj = BitGraph::new(n);
        for &[u, v] in &doc.edges {
            if u >= n || v >= n {
                return Err(Error::BadVertex(u.max(v)));
            }
            if u == v {
                return Err(Error::Parse(format!("loop {u} listed as an edge")));
            }
            adj.add_edge(u, v);
        }
        for &u in &doc.loops {
            if u >= n {
                return Err(Error::BadVertex(u));
            }
            adj.add_edge(u, u);
        }
        let index: HashMap<Vec<u32>, usize> =
            vertices.iter().enumerate().map(|(i, v)| (v.basis().values(), i)).collect();
        if index.len() != n {
            return Err(Error::Parse("duplicate vertices".into()));
        }
        Ok(OiGraph { space, vertices, index, adj })
    }

    /// Serializes as `dot` or `json`.
    pub fn export(&self, format: &str, header: bool) -> Result<String> {
        match format {
            "dot" => Ok(self.to_dot(header)),
            "json" => {
                let mut s = serde_json::to_string_pretty(&self.to_json())?;
                s.push('\n');
                Ok(s)
            }
            "" => Err(Error::Parse("empty export format".into())),
            other => Err(Error::Parse(format!("unknown export format {other:?}"))),
        }
    }
}

fn basis_label(v: &Subspace) -> String {
    let rows: Vec<String> = v
        .rows()
        .iter()
        .map(|r| format!("({})", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    format!("[{}]", rows.join(","))
}

/// All maximum cliques of a simple graph (loops ignored), each sorted, in
/// lexicographic order.
fn maximum_cliques(g: &BitGraph) -> Vec<Vec<usize>> {
    let mut best: Vec<Vec<usize>> = Vec::new();
    let mut r = Vec::new();
    let mut p = vec![0u64; g.words()];
    for v in 0..g.len() {
        p[v / 64] |= 1 << (v % 64);
    }
    let x = vec![0u64; g.words()];
    bron_kerbosch(g, &mut r, p, x, &mut best);
    for c in &mut best {
        c.sort_unstable();
    }
    best.sort();
    best
}

fn bron_kerbosch(g: &BitGraph, r: &mut Vec<usize>, mut p: Vec<u64>, mut x: Vec<u64>, best: &mut Vec<Vec<usize>>) {
    let p_empty = p.iter().all(|&w| w == 0);
    if p_empty {
        if x.iter().all(|&w| w == 0) {
            let size = best.first().map_or(0, |c| c.len());
            if r.len() > size {
                best.clear();
            }
            if r.len() >= size {
                best.push(r.clone());
            }
        }
        return;
    }
    let size = best.first().map_or(0, |c| c.len());
    let p_count: usize = p.iter().map(|w| w.count_ones() as usize).sum();
    if r.len() + p_count < size {
        return;
    }
    // pivot maximising |P ∩ N(u)|
    let pivot = p
        .iter()
        .zip(&x)
        .enumerate()
        .flat_map(|(wi, (&a, &b))| BitIter(a | b).map(move |bit| wi * 64 + bit))
        .max_by_key(|&u| {
            let count: usize = p.iter().zip(g.row(u)).map(|(a, b)| (a & b).count_ones() as usize).sum();
            (count, usize::MAX - u)
        })
        .expect("P is nonempty");
    let candidates: Vec<usize> = p
        .iter()
        .zip(g.row(pivot))
        .enumerate()
        .flat_map(|(wi, (&a, &b))| BitIter(a & !b).map(move |bit| wi * 64 + bit))
        .collect();
    for v in candidates {
        r.push(v);
        let np: Vec<u64> = p.iter().zip(g.row(v)).map(|(a, b)| a & b).collect();
        let nx: Vec<u64> = x.iter().zip(g.row(v)).map(|(a, b)| a & b).collect();
        bron_kerbosch(g, r, np, nx, best);
        r.pop();
        p[v / 64] &= !(1 << (v % 64));
        x[v / 64] |= 1 << (v % 64);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceJson {
    pub nu: usize,
    pub delta: usize,
    pub disc: Disc,
    pub field: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

impl SpaceJson {
    pub fn of(sp: &Space) -> SpaceJson {
        let f = sp.field();
        SpaceJson {
            nu: sp.nu(),
            delta: sp.delta(),
            disc: sp.disc(),
            field: f.descriptor(),
            modulus: (!f.has_canonical_modulus()).then(|| f.modulus().to_vec()),
        }
    }

    pub fn to_space(&self) -> Result<Arc<Space>> {
        let modulus = self
            .modulus
            .as_ref()
            .map(|m| m.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","));
        let field = Field::parse(&self.field, modulus.as_deref())?;
        Space::new(self.nu, self.delta, self.disc, Arc::new(field))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    pub dim: usize,
    pub basis: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub space: SpaceJson,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[usize; 2]>,
    pub loops: Vec<usize>,
}
