//! Command-line front end: argument parsing, dispatch and report output.

use std::ffi::OsString;
use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::autsearch::{full_aut_order, DEFAULT_SEARCH_BUDGET};
use crate::error::{Error, Result};
use crate::ff::Field;
use crate::graph::{vertex_budget_from_env, OiGraph, SpaceJson};
use crate::ospace::{count_by_type, Disc, EdgeTypeTriple, Space};
use crate::symmetry::{aut_order_formula, edge_orbits, group_order, partition_classes, po_e_perms, vertex_orbits};
use crate::verify::{run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "oigraph", version, about = "Orthogonal inner product graphs over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker thread cap (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Vertex budget; for `aut --method search`, the largest graph searched.
    #[arg(long, global = true)]
    budget: Option<u128>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the artifact to this path instead of standard output.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Omit the version header and runtimes, making output byte-stable.
    #[arg(long, global = true)]
    no_header: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the graph and export it.
    Build(SpaceArgs),
    /// Count the subspaces of one dimension by type.
    Classify {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        dim: usize,
    },
    /// Orbits of the group generated by the orthogonal and semilinear maps.
    Orbits {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, value_enum, default_value = "vertices")]
        on: OrbitTarget,
    },
    /// Diameter of the graph.
    Diameter(SpaceArgs),
    /// Order of the automorphism group.
    Aut {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, value_enum, default_value = "generated")]
        method: AutMethod,
    },
    /// Run the check suite.
    Verify {
        #[arg(long, default_value = "core")]
        suite: String,
    },
}

#[derive(Args, Debug)]
struct SpaceArgs {
    #[arg(long)]
    nu: usize,
    #[arg(long, default_value_t = 0)]
    delta: usize,
    /// Anisotropic block: one, z (δ = 1) or plane (δ = 2).
    #[arg(long)]
    disc: Option<String>,
    /// Field order `q`, or `p^e`.
    #[arg(long)]
    field: String,
    /// Modulus coefficients `c0,c1,...,1`, lowest degree first.
    #[arg(long)]
    modulus: Option<String>,
}

impl SpaceArgs {
    fn space(&self) -> Result<Arc<Space>> {
        let field = Arc::new(Field::parse(&self.field, self.modulus.as_deref())?);
        let disc = match &self.disc {
            Some(d) => d.parse()?,
            None => Disc::default_for(self.delta as u32),
        };
        Space::new(self.nu, self.delta, disc, field)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OrbitTarget {
    Vertices,
    Edges,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AutMethod {
    Generated,
    Formula,
    Search,
}

#[derive(Serialize)]
struct Header {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    header: Header,
    #[serde(skip_serializing_if = "Option::is_none")]
    space: Option<SpaceJson>,
    result: &'a T,
}

#[derive(Serialize)]
struct TypeRow {
    #[serde(rename = "type")]
    ty: String,
    m: usize,
    rank: usize,
    s: usize,
    class: String,
    count: u64,
}

#[derive(Serialize)]
struct OrbitRow {
    orbit: usize,
    size: usize,
    representative: usize,
    label: String,
}

#[derive(Serialize)]
struct DiameterRow {
    diameter: String,
    components: usize,
}

#[derive(Serialize)]
struct AutRow {
    method: &'static str,
    order: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    covered: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generator_count: Option<usize>,
    /// Image arrays; JSON only.
    #[serde(skip_serializing_if = "Option::is_none")]
    generators: Option<Vec<Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    node_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_ms: Option<u64>,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Results go to `out`, diagnostics to standard error.
pub fn run<I, T>(args: I, out: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { e.print() } else { write!(out, "{e}") };
            return code;
        }
    };
    let mut buf = Vec::new();
    let outcome = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, &mut buf)),
            Err(e) => Err(Error::Parse(format!("cannot start {n} threads: {e}"))),
        },
        None => dispatch(&cli, &mut buf),
    };
    let outcome = outcome.and_then(|code| {
        out.write_all(&buf)?;
        out.flush()?;
        Ok(code)
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("oigraph: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } | Error::InstanceTooLarge(..) => EXIT_BUDGET,
        Error::Io(_) | Error::Json(_) | Error::Overflow(_) => EXIT_CHECK_FAILED,
        _ => EXIT_USAGE,
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Build(_) => "build",
        Command::Classify { .. } => "classify",
        Command::Orbits { .. } => "orbits",
        Command::Diameter(_) => "diameter",
        Command::Aut { .. } => "aut",
        Command::Verify { .. } => "verify",
    }
}

fn dispatch(cli: &Cli, out: &mut impl Write) -> Result<i32> {
    let budget = cli.budget.unwrap_or_else(vertex_budget_from_env);
    let header = !cli.no_header;
    let format = cli.format;
    match &cli.command {
        Command::Build(args) => {
            let sp = args.space()?;
            let g = OiGraph::build(&sp, budget)?;
            let artifact = g.export(if format == Some(Format::Json) { "json" } else { "dot" }, header)?;
            if format == Some(Format::Csv) {
                return Err(Error::Parse("build exports dot or json".into()));
            }
            let summary = format!("{} vertices, {} edges, {} loops", g.len(), g.edge_count(), g.loop_count());
            match &cli.out {
                Some(path) => {
                    std::fs::write(path, artifact)?;
                    writeln!(out, "{summary}")?;
                }
                None => {
                    out.write_all(artifact.as_bytes())?;
                    eprintln!("{summary}");
                }
            }
            Ok(EXIT_OK)
        }
        Command::Classify { space, dim } => {
            let sp = space.space()?;
            let counts = count_by_type(&sp, *dim, budget)?;
            let rows: Vec<TypeRow> = counts
                .into_iter()
                .map(|(t, count)| TypeRow {
                    ty: t.to_string(),
                    m: t.m,
                    rank: t.rank,
                    s: t.s,
                    class: t.class.map_or_else(String::new, |c| c.to_string()),
                    count,
                })
                .collect();
            write_output(cli, out, Some(&sp), &rows)?;
            Ok(EXIT_OK)
        }
        Command::Orbits { space, on } => {
            let sp = space.space()?;
            let g = OiGraph::build(&sp, budget)?;
            let perms = po_e_perms(&g)?;
            let rows: Vec<OrbitRow> = match on {
                OrbitTarget::Vertices => {
                    let labels = vertex_orbits(g.len(), &perms);
                    partition_classes(&labels)
                        .into_iter()
                        .enumerate()
                        .map(|(i, c)| OrbitRow {
                            orbit: i,
                            size: c.len(),
                            representative: c[0],
                            label: g.vertices()[c[0]].classify().to_string(),
                        })
                        .collect()
                }
                OrbitTarget::Edges => {
                    let eo = edge_orbits(&g, &perms);
                    partition_classes(&eo.labels)
                        .into_iter()
                        .enumerate()
                        .map(|(i, c)| {
                            let (u, v) = eo.edges[c[0]];
                            let triple = EdgeTypeTriple::of(&g.vertices()[u], &g.vertices()[v])?;
                            Ok(OrbitRow { orbit: i, size: c.len(), representative: c[0], label: triple.to_string() })
                        })
                        .collect::<Result<_>>()?
                }
            };
            write_output(cli, out, Some(&sp), &rows)?;
            Ok(EXIT_OK)
        }
        Command::Diameter(args) => {
            let sp = args.space()?;
            let g = OiGraph::build(&sp, budget)?;
            let row = DiameterRow {
                diameter: g.diameter().map_or_else(|| "infinite".to_string(), |d| d.to_string()),
                components: g.components().len(),
            };
            write_output(cli, out, Some(&sp), &[row])?;
            Ok(EXIT_OK)
        }
        Command::Aut { space, method } => {
            let sp = space.space()?;
            let row = match method {
                AutMethod::Formula => {
                    let v = aut_order_formula(sp.nu(), sp.delta(), sp.field())?;
                    AutRow {
                        method: "formula",
                        order: v.order.to_string(),
                        covered: Some(v.covered),
                        generator_count: None,
                        generators: None,
                        node_count: None,
                        runtime_ms: None,
                    }
                }
                AutMethod::Generated => {
                    let g = OiGraph::build(&sp, budget)?;
                    let perms = po_e_perms(&g)?;
                    AutRow {
                        method: "generated",
                        order: group_order(g.len(), &perms)?.to_string(),
                        covered: None,
                        generator_count: None,
                        generators: None,
                        node_count: None,
                        runtime_ms: None,
                    }
                }
                AutMethod::Search => {
                    let search_budget = cli.budget.map_or(DEFAULT_SEARCH_BUDGET, |b| b.min(usize::MAX as u128) as usize);
                    let g = OiGraph::build(&sp, budget.max(search_budget as u128))?;
                    let t = Instant::now();
                    let r = full_aut_order(&g, search_budget)?;
                    AutRow {
                        method: "search",
                        order: r.order.to_string(),
                        covered: None,
                        generator_count: Some(r.generators.len()),
                        generators: (format != Some(Format::Csv)).then_some(r.generators),
                        node_count: Some(r.node_count),
                        runtime_ms: header.then(|| t.elapsed().as_millis() as u64),
                    }
                }
            };
            write_output(cli, out, Some(&sp), &[row])?;
            Ok(EXIT_OK)
        }
        Command::Verify { suite } => {
            let suite: Suite = suite.parse()?;
            let mut report = run_suite(suite, budget)?;
            if !header {
                report.strip_runtimes();
            }
            write_output(cli, out, None, &report.records)?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
    }
}

/// Writes `rows` as JSON (default) or CSV, to `--out` when given.
fn write_output<T: Serialize>(cli: &Cli, out: &mut impl Write, space: Option<&Space>, rows: &[T]) -> Result<()> {
    match &cli.out {
        Some(path) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            emit_rows(cli, &mut file, space, rows)?;
            file.flush()?;
            Ok(())
        }
        None => emit_rows(cli, out, space, rows),
    }
}

fn emit_rows<T: Serialize>(cli: &Cli, out: &mut (impl Write + ?Sized), space: Option<&Space>, rows: &[T]) -> Result<()> {
    let header = !cli.no_header;
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => {
            let text = if header {
                let env = Envelope {
                    header: Header { tool: "oigraph", version: env!("CARGO_PKG_VERSION"), command: command_name(&cli.command) },
                    space: space.map(SpaceJson::of),
                    result: &rows,
                };
                serde_json::to_string_pretty(&env)?
            } else {
                serde_json::to_string_pretty(&rows)?
            };
            writeln!(out, "{text}")?;
        }
        Format::Csv => {
            if header {
                let label = space.map_or_else(String::new, |s| format!(" {}", s.label()));
                writeln!(out, "# oigraph {} {}{label}", env!("CARGO_PKG_VERSION"), command_name(&cli.command))?;
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(|e| Error::Parse(format!("csv: {e}")))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Parse(format!("csv: {e}")))?;
            out.write_all(&bytes)?;
        }
        Format::Dot => return Err(Error::Parse("dot output is only available for build".into())),
    }
    Ok(())
}
