//! `pursuit`: build arenas, run matches and tournaments, verify the local
//! escape claims, solve small graphs exactly, separate planar graphs and
//! serve the play API.
//!
//! Exit codes: 0 pass, 1 property violation, 2 usage or input error.

mod config;
mod run;

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pursuit_core::catalog::Arena;
use pursuit_core::construction::{Construction, ConstructionParams};
use pursuit_core::evader::UnitTables;
use pursuit_core::gen;
use pursuit_core::io::ArenaDocument;
use pursuit_core::lemma::{verify_center_escape, verify_return};
use pursuit_core::separator::{separate_graph, SeparatorResult};
use pursuit_core::solver::{solve, SolveOptions};

use run::{MatchArgs, TournamentArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] pursuit_core::Error),
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// `Ok(true)` passes, `Ok(false)` is a property violation.
pub type Outcome = Result<bool, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "pursuit",
    version,
    about = "Cops and robber on strongly connected planar digraphs"
)]
struct Cli {
    /// JSON file supplying flag values (top-level keys, or an object per
    /// subcommand). Flags on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a construction arena and report its counts.
    #[command(args_override_self = true)]
    Build(BuildArgs),
    /// Run one cop strategy against one robber over a list of seeds.
    #[command(args_override_self = true)]
    Simulate(MatchArgs),
    /// Run several cop strategies against one robber in a worker pool.
    #[command(args_override_self = true)]
    Tournament(TournamentArgs),
    /// Exhaustively check the local escape and return claims on one unit.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
    /// Solve a small graph exactly: cop number and optimal strategy table.
    #[command(args_override_self = true)]
    Solve(SolveArgs),
    /// Compute and check a planar separator.
    #[command(args_override_self = true)]
    Separate(SeparateArgs),
    /// Serve the HTTP play API.
    #[command(args_override_self = true)]
    Serve(ServeArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    /// Unit-to-unit path length G.
    #[arg(long, default_value_t = 1000)]
    pub green: u32,
    /// Center-to-corner spoke length S.
    #[arg(long, default_value_t = 10)]
    pub spoke: u32,
    /// Corner-to-corner chain length C.
    #[arg(long, default_value_t = 16)]
    pub chain: u32,
}

impl ParamArgs {
    pub fn params(&self) -> ConstructionParams {
        ConstructionParams::new(self.green, self.spoke, self.chain)
    }
}

/// Where the graph comes from: a file, a named family, or the construction.
#[derive(Args, Debug, Clone)]
pub struct ArenaArgs {
    /// Arena (`build` output) or graph document `{n, arcs, rotation?}`.
    #[arg(long, alias = "graph", value_name = "FILE", conflicts_with = "family")]
    pub arena: Option<PathBuf>,
    /// Named family: point, path:N, cycle:N, directed-cycle:N, complete:N,
    /// grid:WxH, tree:N[:SEED], dodecahedron, triangulation:N[:SEED].
    #[arg(long)]
    pub family: Option<String>,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Clone, Debug, Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArenaSource {
    File { path: PathBuf },
    Family { name: String },
    Construction { params: ConstructionParams },
}

impl ArenaArgs {
    pub fn source(&self) -> ArenaSource {
        if let Some(p) = &self.arena {
            ArenaSource::File { path: p.clone() }
        } else if let Some(f) = &self.family {
            ArenaSource::Family { name: f.clone() }
        } else {
            ArenaSource::Construction {
                params: self.params.params(),
            }
        }
    }
}

impl ArenaSource {
    pub fn load(&self) -> Result<Arena, CliError> {
        Ok(match self {
            ArenaSource::File { path } => Arena::load(path)?,
            ArenaSource::Family { name } => {
                let e = gen::family(name)?;
                Arena::from_graph(e.graph, Some(e.rotation))
            }
            ArenaSource::Construction { params } => Arena::build(*params)?,
        })
    }
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Write the arena document (graph, rotation, roles, units, coords).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Lemma {
    /// Escape from the center against c cops on the unit.
    L31,
    /// Return to the center against one cop on an outbound spoke.
    L32,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    lemma: Lemma,
    /// Cops in the unit (escape claim only).
    #[arg(long, default_value_t = 1)]
    c: usize,
    /// Move bound; defaults to S for the escape and 1 + C + S for the return.
    #[arg(long)]
    horizon: Option<u32>,
    /// Multi-cop placements replayed through the full joint search.
    #[arg(long, default_value_t = 256)]
    cross_check: usize,
    #[command(flatten)]
    params: ParamArgs,
    /// Write the full report as JSON.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    arena: ArenaArgs,
    /// Solve exactly this many cops instead of searching for the cop number.
    #[arg(long)]
    k: Option<usize>,
    /// Largest cop count tried by the search.
    #[arg(long, default_value_t = 3)]
    k_max: usize,
    /// Refuse state spaces larger than this.
    #[arg(long, default_value_t = SolveOptions::default().max_states as u64)]
    max_states: u64,
    /// Write the strategy table of the winning (or given) cop count.
    #[arg(long, value_name = "FILE")]
    table: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SeparateArgs {
    #[command(flatten)]
    arena: ArenaArgs,
    /// Separator size bound factor: |C| <= constant * sqrt(n).
    #[arg(long, default_value_t = 4.0)]
    constant: f64,
    /// Write `{a, b, c}` as JSON.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Extra arena files, registered under their file stem.
    #[arg(long = "arena-file", value_name = "FILE")]
    arena_files: Vec<PathBuf>,
    /// Write finished session traces here.
    #[arg(long, value_name = "DIR")]
    trace_dir: Option<PathBuf>,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn cmd_build(a: BuildArgs) -> Outcome {
    let params = a.params.params();
    params.validate()?;
    let c = Construction::assemble(params)?;
    let adm = params.admissible();
    let counts_ok = c.graph.vertex_count() == params.vertex_count() && c.graph.arc_count() == params.arc_count();
    println!(
        "arena G={} S={} C={}: {} vertices, {} arcs, unit size {}, {} green paths",
        params.green,
        params.spoke,
        params.chain,
        c.graph.vertex_count(),
        c.graph.arc_count(),
        params.unit_size(),
        c.paths.len()
    );
    println!(
        "closed form: {} vertices, {} arcs ({})",
        params.vertex_count(),
        params.arc_count(),
        pass_fail(counts_ok)
    );
    println!(
        "strongly connected: {}, exit budget {}, return budget {}",
        c.graph.strongly_connected(),
        adm.exit_budget,
        params.return_budget()
    );
    if adm.admissible {
        println!("admissible ({} > {})", adm.green, adm.threshold);
    } else {
        eprintln!("warning: not admissible ({} < {})", adm.green, adm.threshold);
    }
    if let Some(out) = &a.out {
        write_json(out, &ArenaDocument::from_construction(&c))?;
        println!("wrote {}", out.display());
    }
    Ok(counts_ok)
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    let params = a.params.params();
    let c = Construction::assemble(params)?;
    let tables = UnitTables::new(&c)?;
    match a.lemma {
        Lemma::L31 => {
            let horizon = a.horizon.unwrap_or(params.spoke);
            let r = verify_center_escape(&c, &tables, a.c, horizon, a.cross_check)?;
            println!(
                "l31 c={} horizon={}: {} cases over {} placements, {} escapes, max {} moves, cross-checked {} ({} mismatches), {} counterexamples: {}",
                r.c,
                r.horizon,
                r.cases,
                r.placements,
                r.successes,
                r.max_moves,
                r.cross_checked,
                r.cross_check_mismatches,
                r.counterexamples.len(),
                pass_fail(r.passed())
            );
            if let Some(out) = &a.out {
                write_json(out, &r)?;
            }
            Ok(r.passed())
        }
        Lemma::L32 => {
            let horizon = a.horizon.unwrap_or(params.return_budget() as u32);
            let r = verify_return(&c, &tables, horizon)?;
            let ok = r.passed() && r.max_moves <= horizon;
            println!(
                "l32 horizon={}: {} cases from {} perimeter vertices, {} returns, max {} moves, {} counterexamples: {}",
                r.horizon,
                r.cases,
                r.perimeter,
                r.successes,
                r.max_moves,
                r.counterexamples.len(),
                pass_fail(ok)
            );
            if let Some(out) = &a.out {
                write_json(out, &r)?;
            }
            Ok(ok)
        }
    }
}

fn cmd_solve(a: SolveArgs) -> Outcome {
    let arena = a.arena.source().load()?;
    let g = &arena.graph;
    let options = SolveOptions {
        max_states: a.max_states as u128,
    };
    let range = match a.k {
        Some(k) => k..=k,
        None => 1..=a.k_max,
    };
    let mut found = None;
    for k in range {
        let r = solve(g, k, &options)?;
        let win = r.winning_placement();
        match &win {
            Some((cops, d)) => {
                let at: Vec<u32> = cops.iter().map(|v| v.0).collect();
                println!("{k} cops: cop win, capture within {d} plies from {at:?}")
            }
            None => println!("{k} cops: robber win"),
        }
        if win.is_some() || a.k.is_some() {
            found = Some((k, r, win.is_some()));
            if win.is_some() {
                break;
            }
        }
    }
    match (&found, a.k) {
        (Some((k, _, true)), None) => println!("cop number {k}"),
        (None, None) => println!("cop number > {}", a.k_max),
        _ => {}
    }
    if let (Some(path), Some((_, r, _))) = (&a.table, found.as_mut()) {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        r.write_table(g, f)?;
        println!("wrote table {}", path.display());
    } else if a.table.is_some() {
        return Err(CliError::Usage(
            "no cop count up to --k-max wins; no table written".into(),
        ));
    }
    Ok(true)
}

#[derive(Serialize)]
struct SeparateReport<'a> {
    v: u32,
    n: usize,
    constant: f64,
    size_ratio: f64,
    balance: f64,
    passed: bool,
    #[serde(flatten)]
    sets: &'a SeparatorResult,
}

fn cmd_separate(a: SeparateArgs) -> Outcome {
    let arena = a.arena.source().load()?;
    let rot = arena
        .rotation
        .as_ref()
        .ok_or_else(|| CliError::Usage("the graph has no rotation system".into()))?;
    let n = arena.vertex_count();
    let r = separate_graph(&arena.graph, rot)?;
    let check = r.check(rot, a.constant);
    let size_ratio = r.c.len() as f64 / (n as f64).sqrt();
    let balance = r.a.len().max(r.b.len()) as f64 / n as f64;
    println!(
        "n={n}: |A|={} |B|={} |C|={}, |C|/sqrt(n)={size_ratio:.3}, max side {balance:.3}n: {}",
        r.a.len(),
        r.b.len(),
        r.c.len(),
        pass_fail(check.is_ok())
    );
    if let Err(e) = &check {
        eprintln!("separator check failed: {e}");
    }
    if let Some(out) = &a.out {
        let report = SeparateReport {
            v: 1,
            n,
            constant: a.constant,
            size_ratio,
            balance,
            passed: check.is_ok(),
            sets: &r,
        };
        write_json(out, &report)?;
    }
    Ok(check.is_ok())
}

fn cmd_serve(a: ServeArgs) -> Outcome {
    use pursuit_service::{AppState, ArenaEntry, ServiceConfig};
    let state = AppState::with_default_arenas(ServiceConfig { trace_dir: a.trace_dir })?;
    for path in &a.arena_files {
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .ok_or_else(|| CliError::Usage(format!("bad arena path {}", path.display())))?;
        state.add_arena(ArenaEntry::new(id, Arena::load(path)?, false));
    }
    println!(
        "serving on http://{} (arenas: {})",
        a.addr,
        state.arena_ids().join(", ")
    );
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(pursuit_service::serve(a.addr, Arc::new(state)))?;
    Ok(true)
}

fn dispatch(cli: Cli) -> Outcome {
    match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Simulate(a) => run::cmd_simulate(a),
        Command::Tournament(a) => run::cmd_tournament(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Separate(a) => cmd_separate(a),
        Command::Serve(a) => cmd_serve(a),
    }
}

fn main() -> ExitCode {
    let args = match config::merge(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    // clap exits with 2 on usage errors and 0 for --help
    let cli = Cli::parse_from(args);
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
