//! `bnuc`: command-line front end for b-matching game solvers.

mod commands;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use bnucleolus::gadgets::DEFAULT_DETECT_CAP;
use bnucleolus::rational::{parse_rational, Rational};
use clap::{Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "bnuc",
    version,
    about = "Exact nucleolus and core computations for b-matching games"
)]
struct Cli {
    /// Output style; `lines` is stable and meant for scripts.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Brute,
    CharsetI,
    CharsetIi,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print v(S) for coalitions given as comma-separated names, or `all`.
    Value {
        graph: PathBuf,
        #[arg(default_value = "all")]
        coalitions: Vec<String>,
        /// Maximum number of edges in an induced subgraph.
        #[arg(long, default_value_t = bnucleolus::bmatching::DEFAULT_EDGE_CAP)]
        cap: usize,
    },
    /// Compute the nucleolus and its round-by-round trace.
    Nucleolus {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Brute)]
        mode: Mode,
        /// Bound on side-B capacity-2 vertices for charset-i; defaults to
        /// the number present.
        #[arg(long)]
        k: Option<usize>,
        /// List the coalitions fixed in each round.
        #[arg(long)]
        trace: bool,
        /// Also write the allocation to this file.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Check an allocation file against every proper coalition.
    CoreCheck { graph: PathBuf, allocation: PathBuf },
    /// Generate a hardness construction and report its structure.
    Gadget {
        #[command(subcommand)]
        kind: GadgetKind,
    },
    /// Search for cubic and two-from-cubic subgraphs.
    Detect {
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DETECT_CAP)]
        cap: usize,
    },
    /// Check excess tables, core membership, nucleolus claims and family equivalences.
    Verify {
        #[command(subcommand)]
        check: VerifyCheck,
    },
    /// Exact-cover instances: solve or generate.
    X3c {
        #[command(subcommand)]
        action: X3cAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum GadgetKind {
    /// Attach a K3,3 gadget to every vertex of a bipartite graph.
    Nucleolus {
        graph: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Build the cubic-subgraph reduction graph of an X3C instance.
    X3c {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Stage::Full)]
        stage: Stage,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Stage {
    G0,
    G1,
    G2,
    Full,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCheck {
    /// Excess classes of a complete gadget under the uniform allocation.
    Table1 {
        /// Source graph for the gadget; a single edge by default.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Excess classes of a complete gadget under the tilted allocation.
    Table2 {
        #[arg(long, value_parser = rational_arg)]
        delta: Rational,
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Core membership of an allocation, or of the dual-derived allocation
    /// when none is given.
    Core {
        graph: PathBuf,
        #[arg(long)]
        allocation: Option<PathBuf>,
    },
    /// Whether an allocation file is the nucleolus.
    IsNucleolus {
        graph: PathBuf,
        allocation: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Brute)]
        mode: Mode,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Size-bounded family against brute force on seeded random instances.
    CharsetI {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 10)]
        max_players: usize,
        #[arg(long, default_value_t = 2)]
        max_heavy: usize,
    },
    /// Pair family, fast value path and dual core allocation against brute
    /// force on seeded random instances.
    CharsetIi {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 10)]
        max_players: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum X3cAction {
    /// Search for an exact cover; for restricted instances also build the
    /// reduction graph and check the induced cubic subgraph.
    Solve { instance: PathBuf },
    /// Write a restricted instance with a planted cover.
    Plant {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

/// Exit status 1 means a check failed; 2 means the command could not run.
fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let out = output::Out::new(cli.format);
    Ok(match cli.command {
        Command::Value {
            graph,
            coalitions,
            cap,
        } => commands::value(&out, &graph, &coalitions, cap)?,
        Command::Nucleolus {
            graph,
            mode,
            k,
            trace,
            output,
        } => commands::nucleolus(&out, &graph, mode, k, trace, output.as_deref())?,
        Command::CoreCheck { graph, allocation } => {
            commands::core_check_cmd(&out, &graph, &allocation)?
        }
        Command::Gadget { kind } => commands::gadget(&out, kind)?,
        Command::Detect { graph, cap } => commands::detect(&out, &graph, cap)?,
        Command::Verify { check } => verify::run(&out, check)?,
        Command::X3c { action } => commands::x3c(&out, action)?,
    })
}
