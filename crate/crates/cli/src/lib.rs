//! Subcommands of the `reebforge` binary. Each `cmd_*` function writes its
//! report to `out` and returns the process exit code.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use reebforge_core::corpus::{realizable_corpus, violating_corpus, CorpusParams};
use reebforge_core::forge::verify_block;
use reebforge_core::rational::int;
use reebforge_core::reeb::{reeb_to_dot, reeb_to_json};
use reebforge_core::surface::{canonical_recipe, mesh_to_json, parse_mesh, to_off};
use reebforge_core::{
    assemble, build_junction, check_realizable, classify_surface, generate_surface, graph_to_dot,
    labeled_isomorphic, parse_graph, plan_junction, reeb_graph, serialize_graph, validate_manifold,
    AssembleError, AssembleOptions, IsoResult, LabeledGraph, Manifold3, SurfaceLabel,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "REEBFORGE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "reebforge",
    version,
    about = "Realize labeled Reeb graphs as PL functions on closed 3-manifolds"
)]
pub struct Cli {
    /// Increase output detail.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the parity conditions for a graph.
    Check {
        graph: PathBuf,
        /// Print the graph in DOT.
        #[arg(long)]
        dot: bool,
    },
    /// Assemble a manifold realizing a graph.
    Build {
        graph: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        refinement: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract the Reeb graph of a manifold file.
    Extract {
        manifold: PathBuf,
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build, extract and compare with the input graph.
    Verify {
        graph: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        refinement: u32,
        #[arg(long)]
        dot: bool,
        /// Debug hook: realize this edge with a wrong label.
        #[arg(long, hide = true)]
        mislabel_edge: Option<usize>,
    },
    /// Build and verify a single junction block.
    Junction {
        /// Comma-separated bottom labels.
        #[arg(long, allow_hyphen_values = true)]
        down: String,
        /// Comma-separated top labels.
        #[arg(long, allow_hyphen_values = true)]
        up: String,
        #[arg(long)]
        dot: bool,
    },
    /// Surface utilities.
    Surface {
        #[command(subcommand)]
        command: SurfaceCommand,
    },
    /// Write or check seeded random graphs.
    Corpus {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Generate graphs that fail the parity check at one edge.
        #[arg(long)]
        violating: bool,
        /// Directory to write graph files into; otherwise graphs are checked in place.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        refinement: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum SurfaceCommand {
    /// Generate the canonical mesh of label R at refinement K.
    Gen {
        #[arg(allow_hyphen_values = true)]
        label: i64,
        #[arg(default_value_t = 1)]
        refinement: usize,
        #[arg(long, value_enum, default_value_t = MeshFormat::Json)]
        format: MeshFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify every component of a mesh file.
    Classify { mesh: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeshFormat {
    Json,
    Off,
}

/// Thread count requested through the environment, if any.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> i32 {
    let v = cli.verbose;
    let code = match &cli.command {
        Command::Check { graph, dot } => cmd_check(graph, *dot, out),
        Command::Build {
            graph,
            refinement,
            out: path,
        } => cmd_build(graph, *refinement as usize, path.as_deref(), out),
        Command::Extract {
            manifold,
            dot,
            out: path,
        } => cmd_extract(manifold, *dot, path.as_deref(), out),
        Command::Verify {
            graph,
            refinement,
            dot,
            mislabel_edge,
        } => {
            let options = AssembleOptions {
                refinement: *refinement as usize,
                mislabel_edge: *mislabel_edge,
            };
            cmd_verify(graph, &options, *dot, v, out)
        }
        Command::Junction { down, up, dot } => cmd_junction(down, up, *dot, v, out),
        Command::Surface {
            command:
                SurfaceCommand::Gen {
                    label,
                    refinement,
                    format,
                    out: path,
                },
        } => cmd_surface_gen(*label, *refinement, *format, path.as_deref(), out),
        Command::Surface {
            command: SurfaceCommand::Classify { mesh },
        } => cmd_surface_classify(mesh, out),
        Command::Corpus {
            seed,
            count,
            violating,
            out: path,
            refinement,
        } => cmd_corpus(
            *seed,
            *count,
            *violating,
            path.as_deref(),
            *refinement as usize,
            out,
        ),
    };
    let _ = out.flush();
    code
}

fn load_graph(path: &Path) -> Result<LabeledGraph> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("invalid graph in {}", path.display()))
}

fn write_output(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

macro_rules! input {
    ($out:expr, $e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => {
                let _ = writeln!($out, "error: {err:#}");
                return EXIT_INPUT;
            }
        }
    };
}

pub fn cmd_check(path: &Path, dot: bool, out: &mut dyn Write) -> i32 {
    let g = input!(out, load_graph(path));
    if dot {
        let _ = write!(out, "{}", graph_to_dot(&g));
    }
    let report = check_realizable(&g);
    for d in &report.failures {
        let _ = writeln!(out, "{d}");
    }
    if report.accepted() {
        let _ = writeln!(
            out,
            "realizable: {} vertices, {} edges",
            g.vertex_count(),
            g.edges().len()
        );
        EXIT_OK
    } else {
        let _ = writeln!(
            out,
            "rejected: {} vertices fail the parity conditions",
            report.failures.len()
        );
        EXIT_REJECTED
    }
}

fn build(
    g: &LabeledGraph,
    options: &AssembleOptions,
    out: &mut dyn Write,
) -> Result<Manifold3, i32> {
    match assemble(g, options) {
        Ok(m) => Ok(m),
        Err(AssembleError::NotRealizable(reason)) => {
            let _ = writeln!(out, "rejected: {reason}");
            Err(EXIT_REJECTED)
        }
        Err(AssembleError::NoSuchEdge(e)) => {
            let _ = writeln!(out, "error: no edge with index {e}");
            Err(EXIT_INPUT)
        }
        Err(e) => {
            let _ = writeln!(out, "internal error: {e}");
            Err(EXIT_VERIFY)
        }
    }
}

pub fn cmd_build(path: &Path, refinement: usize, dest: Option<&Path>, out: &mut dyn Write) -> i32 {
    let g = input!(out, load_graph(path));
    let options = AssembleOptions {
        refinement,
        ..Default::default()
    };
    let m = match build(&g, &options, out) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let report = validate_manifold(&m);
    if !report.passed() {
        let _ = write!(out, "{report}");
        return EXIT_VERIFY;
    }
    if let Some(dest) = dest {
        input!(out, write_output(dest, &m.to_json()));
    }
    let _ = writeln!(out, "{}", m.summary());
    EXIT_OK
}

pub fn cmd_extract(path: &Path, dot: bool, dest: Option<&Path>, out: &mut dyn Write) -> i32 {
    let text = input!(
        out,
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
    );
    let m = input!(
        out,
        Manifold3::from_json(&text)
            .with_context(|| format!("invalid manifold in {}", path.display()))
    );
    let report = validate_manifold(&m);
    if !report.passed() {
        let _ = write!(out, "{report}");
        return EXIT_REJECTED;
    }
    let r = match reeb_graph(&m.mesh, &m.values) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(out, "extraction failed: {e}");
            return EXIT_VERIFY;
        }
    };
    let json = reeb_to_json(&r);
    if let Some(dest) = dest {
        input!(out, write_output(dest, &json));
    } else {
        let _ = writeln!(out, "{json}");
    }
    if dot {
        let _ = write!(out, "{}", reeb_to_dot(&r));
    }
    EXIT_OK
}

/// Assembles, validates, extracts and compares; returns the exit code.
pub fn verify_graph(
    g: &LabeledGraph,
    options: &AssembleOptions,
    dot: bool,
    verbose: u8,
    out: &mut dyn Write,
) -> i32 {
    let m = match build(g, options, out) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let report = validate_manifold(&m);
    if verbose > 0 || !report.passed() {
        let _ = write!(out, "{report}");
    }
    if !report.passed() {
        return EXIT_VERIFY;
    }
    let r = match reeb_graph(&m.mesh, &m.values) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(out, "extraction failed: {e}");
            return EXIT_VERIFY;
        }
    };
    match labeled_isomorphic(&r, g) {
        IsoResult::Isomorphic(map) => {
            if verbose > 0 {
                let names: Vec<String> = map
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| format!("n{i}->{}", g.vertices()[v].name))
                    .collect();
                let _ = writeln!(out, "mapping: {}", names.join(" "));
            }
            if dot {
                let _ = write!(out, "{}", reeb_to_dot(&r));
            }
            let _ = writeln!(
                out,
                "verified: {} tetrahedra, Reeb graph isomorphic to input",
                m.mesh.tets.len()
            );
            EXIT_OK
        }
        IsoResult::Mismatch(mismatch) => {
            let _ = writeln!(out, "mismatch: {mismatch}");
            let _ = write!(out, "{}{}", graph_to_dot(g), reeb_to_dot(&r));
            EXIT_VERIFY
        }
    }
}

pub fn cmd_verify(
    path: &Path,
    options: &AssembleOptions,
    dot: bool,
    verbose: u8,
    out: &mut dyn Write,
) -> i32 {
    let g = input!(out, load_graph(path));
    verify_graph(&g, options, dot, verbose, out)
}

fn parse_labels(text: &str) -> Result<Vec<SurfaceLabel>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse()
                .map(SurfaceLabel)
                .with_context(|| format!("invalid label `{s}`"))
        })
        .collect()
}

pub fn cmd_junction(down: &str, up: &str, dot: bool, verbose: u8, out: &mut dyn Write) -> i32 {
    let down = input!(out, parse_labels(down));
    let up = input!(out, parse_labels(up));
    let plan = match plan_junction(&down, &up) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(out, "rejected: {e}");
            return EXIT_REJECTED;
        }
    };
    if verbose > 0 {
        let _ = writeln!(out, "{}", plan.to_json());
    }
    let (a1, a, a2) = (int(0), int(1), int(2));
    let block = match build_junction(&plan, &a1, &a, &a2) {
        Ok(b) => b,
        Err(e) => {
            let _ = writeln!(out, "internal error: {e}");
            return EXIT_VERIFY;
        }
    };
    let report = verify_block(&block);
    let _ = write!(out, "{report}");
    if dot {
        if let Some(r) = &report.reeb {
            let _ = write!(out, "{}", reeb_to_dot(r));
        }
    }
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY
    }
}

pub fn cmd_surface_gen(
    label: i64,
    refinement: usize,
    format: MeshFormat,
    dest: Option<&Path>,
    out: &mut dyn Write,
) -> i32 {
    if refinement == 0 {
        let _ = writeln!(out, "error: refinement must be at least 1");
        return EXIT_INPUT;
    }
    let label = SurfaceLabel(label);
    let mesh = generate_surface(label, refinement);
    let text = match format {
        MeshFormat::Json => mesh_to_json(&mesh),
        MeshFormat::Off => to_off(&mesh),
    };
    match dest {
        Some(dest) => {
            input!(out, write_output(dest, &text));
            let pieces: Vec<String> = canonical_recipe(label)
                .iter()
                .map(|p| format!("{p:?}"))
                .collect();
            let _ = writeln!(
                out,
                "r={}: {} vertices, {} triangles, pieces [{}]",
                label.0,
                mesh.n_vertices,
                mesh.triangles.len(),
                pieces.join(" ")
            );
        }
        None => {
            let _ = writeln!(out, "{text}");
        }
    }
    EXIT_OK
}

pub fn cmd_surface_classify(path: &Path, out: &mut dyn Write) -> i32 {
    let text = input!(
        out,
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
    );
    if let Err(e) = serde_json::from_str::<serde_json::Value>(&text) {
        let _ = writeln!(out, "error: malformed JSON: {e}");
        return EXIT_INPUT;
    }
    let mesh = match parse_mesh(&text) {
        Ok(m) => m,
        Err(e) => {
            let _ = writeln!(out, "invalid mesh: {e}");
            return EXIT_REJECTED;
        }
    };
    match classify_surface(&mesh) {
        Ok(components) => {
            for c in components {
                let _ = writeln!(out, "r={}", c.label.0);
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(out, "invalid mesh: {e}");
            EXIT_REJECTED
        }
    }
}

pub fn cmd_corpus(
    seed: u64,
    count: usize,
    violating: bool,
    dest: Option<&Path>,
    refinement: usize,
    out: &mut dyn Write,
) -> i32 {
    let params = CorpusParams::default();
    let graphs: Vec<(LabeledGraph, Vec<usize>)> = if violating {
        violating_corpus(seed, count, &params)
            .into_iter()
            .map(|c| (c.graph, c.vertices))
            .collect()
    } else {
        realizable_corpus(seed, count, &params)
            .into_iter()
            .map(|g| (g, Vec::new()))
            .collect()
    };
    if let Some(dir) = dest {
        input!(
            out,
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
        );
        for (i, (g, _)) in graphs.iter().enumerate() {
            input!(
                out,
                write_output(&dir.join(format!("graph_{i:03}.json")), &serialize_graph(g))
            );
        }
        let _ = writeln!(out, "wrote {} graphs to {}", graphs.len(), dir.display());
        return EXIT_OK;
    }
    let mut failed = 0;
    for (i, (g, expected)) in graphs.iter().enumerate() {
        let ok = if violating {
            let failing: Vec<usize> = check_realizable(g)
                .failures
                .iter()
                .map(|d| d.vertex)
                .collect();
            let _ = writeln!(
                out,
                "graph {i}: rejected at {failing:?}, expected {expected:?}"
            );
            failing == *expected
        } else {
            let mut sink = Vec::new();
            let options = AssembleOptions {
                refinement,
                ..Default::default()
            };
            let code = verify_graph(g, &options, false, 0, &mut sink);
            let _ = write!(out, "graph {i}: {}", String::from_utf8_lossy(&sink));
            code == EXIT_OK
        };
        failed += usize::from(!ok);
    }
    let _ = writeln!(
        out,
        "{} of {} graphs as expected",
        graphs.len() - failed,
        graphs.len()
    );
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_VERIFY
    }
}
