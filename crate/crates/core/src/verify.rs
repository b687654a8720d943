//! Reproducible checks of the structural claims about `Oi(2ν+δ, q)` at desk
//! scale, collected into a report.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::autsearch::{full_aut_order, DEFAULT_SEARCH_BUDGET};
use crate::error::{Error, Result};
use crate::ff::Field;
use crate::graph::OiGraph;
use crate::matfq::MatFq;
use crate::ospace::{witt_bruteforce_oracle, witt_decompose, Disc, EdgeTypeTriple, Space, SubspaceType};
use crate::symmetry::{
    aut_order_formula, compare_partitions, edge_orbits, group_order, matrix_group_order, orthogonal_generators,
    po_e_perms, vertex_orbits,
};

/// Marker used as the claim of checks backed only by an independent oracle.
pub const DERIVED_ORACLE: &str = "derived oracle";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    OutsidePaperCoverage,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::OutsidePaperCoverage => "outside-paper-coverage",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub space: String,
    /// The claim being checked, or [`DERIVED_ORACLE`].
    pub claim: String,
    pub expected: String,
    pub computed: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub records: Vec<CheckRecord>,
}

impl VerifyReport {
    /// No record has status [`Status::Fail`].
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status != Status::Fail)
    }

    pub fn strip_runtimes(&mut self) {
        for r in &mut self.records {
            r.runtime_ms = None;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Extended,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        match s {
            "core" => Ok(Suite::Core),
            "extended" => Ok(Suite::Extended),
            _ => Err(Error::Parse(format!("unknown suite {s:?}; expected core or extended"))),
        }
    }
}

fn space(nu: usize, delta: usize, disc: Disc, p: u32, e: u32) -> Result<Arc<Space>> {
    Space::new(nu, delta, disc, Arc::new(Field::new(p, e, None)?))
}

/// The spaces on which connectivity, counts and parameter recovery are
/// checked.
pub fn connectivity_spaces() -> Result<Vec<Arc<Space>>> {
    Ok(vec![
        space(1, 0, Disc::None, 3, 1)?,
        space(1, 0, Disc::None, 5, 1)?,
        space(1, 1, Disc::One, 3, 1)?,
        space(1, 1, Disc::Z, 3, 1)?,
        space(2, 0, Disc::None, 3, 1)?,
        space(2, 1, Disc::One, 3, 1)?,
    ])
}

struct Recorder {
    records: Vec<CheckRecord>,
}

impl Recorder {
    fn push(
        &mut self,
        name: &str,
        space: &str,
        claim: &str,
        expected: impl ToString,
        computed: impl ToString,
        status: Status,
        started: Instant,
    ) {
        self.records.push(CheckRecord {
            name: name.into(),
            space: space.into(),
            claim: claim.into(),
            expected: expected.to_string(),
            computed: computed.to_string(),
            status,
            runtime_ms: Some(started.elapsed().as_millis() as u64),
        });
    }

    fn compare(&mut self, name: &str, space: &str, claim: &str, expected: impl ToString, computed: impl ToString, started: Instant) {
        let (e, c) = (expected.to_string(), computed.to_string());
        let status = if e == c { Status::Pass } else { Status::Fail };
        self.push(name, space, claim, e, c, status, started);
    }
}

fn fmt_diameter(d: Option<usize>) -> String {
    d.map_or_else(|| "infinite".to_string(), |d| d.to_string())
}

/// Runs every check of `suite`.
pub fn run_suite(suite: Suite, vertex_budget: u128) -> Result<VerifyReport> {
    let mut r = Recorder { records: Vec::new() };
    let mut graphs = Vec::new();
    for sp in connectivity_spaces()? {
        graphs.push(OiGraph::build(&sp, vertex_budget)?);
    }

    for g in &graphs {
        let t = Instant::now();
        let expected = if g.space().n() >= 3 { "4" } else { "infinite" };
        r.compare(
            "connectivity-diameter",
            &g.space().label(),
            "Oi(2ν+δ,q) is connected, with diameter 4, exactly when 2ν+δ ≥ 3",
            expected,
            fmt_diameter(g.diameter()),
            t,
        );
    }

    for g in &graphs {
        let t = Instant::now();
        let q = g.space().field().order() as u128;
        let expected = (q.pow(g.space().n() as u32) - 1) / (q - 1);
        r.compare(
            "dim1-vertex-count",
            &g.space().label(),
            "there are (q^n - 1)/(q - 1) vertices of dimension 1",
            expected,
            g.dim1_vertices().len(),
            t,
        );
    }

    for (p, e) in [(3, 1), (5, 1), (3, 2)] {
        let t = Instant::now();
        let sp = space(1, 0, Disc::None, p, e)?;
        let g = OiGraph::build(&sp, vertex_budget)?;
        let formula = aut_order_formula(1, 0, sp.field())?.order;
        let found = full_aut_order(&g, DEFAULT_SEARCH_BUDGET)?.order;
        r.compare(
            "plane-automorphism-order",
            &sp.label(),
            "|Aut(Oi(2,q))| = 2^{(q+1)/2} ((q-1)/2)!",
            formula,
            found,
            t,
        );
    }

    {
        let sp = space(2, 0, Disc::None, 3, 1)?;
        let label = sp.label();
        let g = OiGraph::build(&sp, vertex_budget)?;
        let claim = "Aut(Oi(2ν,q)) is generated by the projective orthogonal group and the semilinear maps fixing the basis vertices, of the closed-form order";
        let t = Instant::now();
        let formula = aut_order_formula(2, 0, sp.field())?.order;
        let perms = po_e_perms(&g)?;
        let generated = group_order(g.len(), &perms)?;
        r.compare("generated-group-order", &label, claim, formula, generated, t);
        let t = Instant::now();
        let found = full_aut_order(&g, DEFAULT_SEARCH_BUDGET)?.order;
        r.compare("full-automorphism-order", &label, claim, formula, found, t);
    }

    if suite == Suite::Extended {
        let t = Instant::now();
        let sp = space(2, 1, Disc::One, 3, 1)?;
        let g = OiGraph::build(&sp, vertex_budget)?;
        let formula = aut_order_formula(2, 1, sp.field())?;
        let generated = group_order(g.len(), &po_e_perms(&g)?)?;
        r.compare(
            "generated-group-order",
            &sp.label(),
            "|Aut(Oi(2ν+1,q))| = q^{ν²} Π(q^i-1) Π(q^i+1) [F_q:F_p], halved when -1 is a square",
            formula.order,
            generated,
            t,
        );
    }

    let mut orbit_spaces = vec![space(2, 0, Disc::None, 3, 1)?, space(1, 1, Disc::One, 3, 1)?, space(1, 1, Disc::Z, 3, 1)?];
    if suite == Suite::Extended {
        orbit_spaces.push(space(2, 1, Disc::One, 3, 1)?);
    }
    for sp in &orbit_spaces {
        let t = Instant::now();
        let g = OiGraph::build(sp, vertex_budget)?;
        let perms = po_e_perms(&g)?;
        let orbits = vertex_orbits(g.len(), &perms);
        let types: Vec<SubspaceType> = g.vertices().iter().map(|v| v.classify()).collect();
        let cmp = compare_partitions(&orbits, &types);
        r.push(
            "vertex-orbits-are-types",
            &sp.label(),
            "two vertices lie in one orbit exactly when they have the same type",
            format!("{} orbits = {} type classes", cmp.second_classes, cmp.second_classes),
            format!("{} orbits, {} type classes", cmp.first_classes, cmp.second_classes),
            if cmp.equal() { Status::Pass } else { Status::Fail },
            t,
        );

        if sp.n() <= 4 {
            let t = Instant::now();
            let eo = edge_orbits(&g, &perms);
            let verts = g.vertices();
            let triples = eo
                .edges
                .iter()
                .map(|&(u, v)| EdgeTypeTriple::of(&verts[u], &verts[v]))
                .collect::<Result<Vec<_>>>()?;
            let cmp = compare_partitions(&eo.labels, &triples);
            r.push(
                "edge-orbits-are-type-triples",
                &sp.label(),
                "two edges lie in one orbit exactly when their end types and the type of their sum agree",
                format!("{} orbits = {} triple classes", cmp.second_classes, cmp.second_classes),
                format!("{} orbits, {} triple classes", cmp.first_classes, cmp.second_classes),
                if cmp.equal() { Status::Pass } else { Status::Fail },
                t,
            );
        }
    }

    {
        let t = Instant::now();
        let (agree, total) = witt_oracle_agreement()?;
        r.compare("witt-index-oracle", "F_3 3x3, F_5 4x4", DERIVED_ORACLE, total, agree, t);
    }

    {
        let t = Instant::now();
        let sp = space(2, 0, Disc::None, 3, 1)?;
        let order = matrix_group_order(&sp, &orthogonal_generators(&sp))?;
        r.compare(
            "reflection-closure-order",
            &sp.label(),
            "|PO_{2ν}(F_q)| = ½|O_{2ν}(F_q)|, so |O_4(F_3)| = 2·576",
            1152,
            order,
            t,
        );
    }

    // invariant triple -> parameter triples seen with it
    let mut recovered: BTreeMap<(usize, Vec<usize>, usize), BTreeSet<(usize, usize, u32)>> = BTreeMap::new();
    for g in &graphs {
        let t = Instant::now();
        let sp = g.space();
        let c = g.max_clique_dim1();
        let dim1 = g.dim1_vertices().len();
        recovered
            .entry((c.size, c.anisotropic_counts.clone(), dim1))
            .or_default()
            .insert((sp.nu(), sp.delta(), sp.field().order()));
        r.compare(
            "max-clique-recovers-parameters",
            &sp.label(),
            "a maximum clique M of dimension-1 vertices has |M| = ν+δ, with δ anisotropic members",
            format!("({}, {})", sp.nu() + sp.delta(), sp.delta()),
            format!("({}, {})", c.size, c.anisotropic),
            t,
        );
    }
    {
        let t = Instant::now();
        let ambiguous = recovered.values().filter(|p| p.len() > 1).count();
        r.compare(
            "graph-invariants-separate-parameters",
            "Oi(2,3) Oi(2,5) Oi(3,3) Oi(3,3;z) Oi(4,3) Oi(5,3)",
            DERIVED_ORACLE,
            "0 invariant triples shared by distinct (ν, δ, q)",
            format!("{ambiguous} invariant triples shared by distinct (ν, δ, q)"),
            t,
        );
    }

    r.records.push(plane_edge_rule(vertex_budget)?);

    Ok(VerifyReport { suite, records: r.records })
}

/// Closed-form Witt index against exhaustive search, on every symmetric 3x3
/// matrix over F_3 and 500 seeded random symmetric 4x4 matrices over F_5.
pub fn witt_oracle_agreement() -> Result<(usize, usize)> {
    let f3 = Arc::new(Field::new(3, 1, None)?);
    let f5 = Arc::new(Field::new(5, 1, None)?);
    let mut mats = Vec::new();
    for code in 0..729u32 {
        mats.push(symmetric_from_code(&f3, 3, code)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..500 {
        mats.push(symmetric_from_code(&f5, 4, rng.gen_range(0..5u32.pow(10)))?);
    }
    let mut agree = 0;
    for g in &mats {
        if witt_decompose(g)?.s == witt_bruteforce_oracle(g)? {
            agree += 1;
        }
    }
    Ok((agree, mats.len()))
}

/// Symmetric `dim x dim` matrix whose upper triangle, read row by row, holds
/// the base-q digits of `code`.
pub fn symmetric_from_code(f: &Arc<Field>, dim: usize, mut code: u32) -> Result<MatFq> {
    let q = f.order();
    let mut g = MatFq::zeros(f, dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = f.elem(code % q)?;
            code /= q;
            g.set(i, j, v);
            g.set(j, i, v);
        }
    }
    Ok(g)
}

/// Compares the edges of `Oi(2,5)` among the vertices `[(1,x)]` with the
/// rule `xy = -1` and with `x + y = 0`, which is what `A S B^T = 0` gives
/// for `S = [[0,1],[1,0]]`.
fn plane_edge_rule(vertex_budget: u128) -> Result<CheckRecord> {
    let t = Instant::now();
    let sp = space(1, 0, Disc::None, 5, 1)?;
    let f = Arc::clone(sp.field());
    let g = OiGraph::build(&sp, vertex_budget)?;
    let id = |x: u32| -> Result<usize> {
        let v = crate::ospace::Subspace::from_rows(&sp, &[[1, x]])?;
        g.index_of(&v).ok_or(Error::BadVertex(usize::MAX))
    };
    let mut graph_edges = BTreeSet::new();
    let mut sum_rule = BTreeSet::new();
    let mut product_rule = BTreeSet::new();
    for x in 0..f.order() {
        for y in x..f.order() {
            let (ex, ey) = (f.elem(x)?, f.elem(y)?);
            if g.adjacent(id(x)?, id(y)?)? {
                graph_edges.insert((x, y));
            }
            if f.add(ex, ey).is_zero() {
                sum_rule.insert((x, y));
            }
            if f.mul(ex, ey) == f.neg(f.one()) {
                product_rule.insert((x, y));
            }
        }
    }
    let status = if graph_edges != sum_rule {
        Status::Fail
    } else if sum_rule == product_rule {
        Status::Pass
    } else {
        Status::OutsidePaperCoverage
    };
    Ok(CheckRecord {
        name: "plane-edge-rule".into(),
        space: sp.label(),
        claim: "the edges of Oi(2,q) between [(1,x)] and [(1,y)] are those with xy = -1".into(),
        expected: format!("xy = -1: {product_rule:?}"),
        computed: format!("x + y = 0 (from A S B^T = 0): {graph_edges:?}"),
        status,
        runtime_ms: Some(t.elapsed().as_millis() as u64),
    })
}
