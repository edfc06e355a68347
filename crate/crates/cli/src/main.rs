//! `qrpm`: simulate, sweep and analyze quantum raise-and-peel circuits.

mod analyze;
mod config;
mod output;
mod run;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use qrpm::engine::{enumerate_models, ANCHORS};
use qrpm::BlockConvention;

use crate::config::{ConfigFile, Overrides};

#[derive(Parser)]
#[command(name = "qrpm", version, about = "Stabilizer simulations of measurement-feedback circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the 30 rule sets with their unitary and measured blocks and class.
    Catalog,
    /// Run the single trajectory of a `[cell]` config.
    Simulate(RunArgs),
    /// Run every cell of a `[grid]` config.
    Sweep(RunArgs),
    /// Continue an interrupted simulate or sweep run.
    Resume {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Fit archived run output.
    Analyze {
        #[command(subcommand)]
        kind: AnalyzeKind,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (default: one per core).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Block-letter assignment, LP or PL.
    #[arg(long)]
    convention: Option<BlockConvention>,
    /// Sweeps between profile snapshots; 0 also records S_half every microstep.
    #[arg(long)]
    snapshot_cadence: Option<u64>,
}

#[derive(Args)]
struct Inputs {
    /// Run directories to read (repeatable).
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    /// Directory receiving fits.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum AnalyzeKind {
    /// Finite-size collapse of the half-cut entropy.
    Collapse {
        #[command(flatten)]
        io: Inputs,
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Power-law fit of the impact distribution.
    Avalanche {
        #[command(flatten)]
        io: Inputs,
        /// Fit range `LO HI` in s (default 1..L).
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        range: Option<Vec<usize>>,
    },
    /// Volume plus L^gamma fit of the steady half-cut entropy.
    Kpz {
        #[command(flatten)]
        io: Inputs,
        #[arg(long)]
        free_gamma: bool,
    },
    /// Peak of the edge-region mutual information.
    Mutualinfo {
        #[command(flatten)]
        io: Inputs,
    },
    /// Growth exponents of the protected length.
    Frozen {
        #[command(flatten)]
        io: Inputs,
        /// Fit window `FROM TO` in sweeps (default: all recorded sweeps).
        #[arg(long, num_args = 2, value_names = ["FROM", "TO"])]
        window: Option<Vec<u64>>,
    },
}

fn load(args: &RunArgs) -> Result<ConfigFile> {
    let mut c = ConfigFile::load(&args.config)?;
    c.apply(Overrides { seed: args.seed, convention: args.convention, snapshot_cadence: args.snapshot_cadence });
    Ok(c)
}

fn catalog() {
    let cat = enumerate_models();
    let mut out = format!("{:>5}  {:<13} {:<13} {:>5}  alias\n", "index", "unitary", "measure", "class");
    for e in cat.entries() {
        let alias = ANCHORS.iter().find(|(n, _)| cat.anchor(n).is_some_and(|a| a.index == e.index)).map_or("", |a| a.0);
        let join = |b: Vec<qrpm::BlockClass>| b.iter().map(|c| c.letter().to_string()).collect::<Vec<_>>().join(",");
        out += &format!(
            "{:>5}  {:<13} {:<13} {:>5}  {alias}\n",
            e.index,
            join(e.rules.unitary_blocks()),
            join(e.rules.measure_blocks()),
            e.class.number()
        );
    }
    let _ = std::io::stdout().write_all(out.as_bytes());
}

fn pair<T: Copy>(v: &Option<Vec<T>>) -> Option<(T, T)> {
    v.as_ref().map(|v| (v[0], v[1]))
}

fn analyze(kind: AnalyzeKind) -> Result<()> {
    let io = match &kind {
        AnalyzeKind::Collapse { io, .. }
        | AnalyzeKind::Avalanche { io, .. }
        | AnalyzeKind::Kpz { io, .. }
        | AnalyzeKind::Mutualinfo { io }
        | AnalyzeKind::Frozen { io, .. } => io,
    };
    output::check_inputs(&io.inputs)?;
    let dirs = &io.inputs;
    let rows = match &kind {
        AnalyzeKind::Collapse { restarts, seed, .. } => analyze::collapse(dirs, *restarts, *seed)?,
        AnalyzeKind::Avalanche { range, .. } => analyze::avalanche(dirs, pair(range))?,
        AnalyzeKind::Kpz { free_gamma, .. } => analyze::kpz(dirs, *free_gamma)?,
        AnalyzeKind::Mutualinfo { .. } => analyze::mutualinfo(dirs)?,
        AnalyzeKind::Frozen { window, .. } => analyze::frozen(dirs, pair(window))?,
    };
    analyze::write_fits(&io.out, &rows)
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Catalog => {
            catalog();
            Ok(())
        }
        Command::Simulate(args) => {
            let c = load(&args)?;
            let cell = c.single_cell()?;
            run::start("simulate", c, vec![cell], &args.out, args.workers)
        }
        Command::Sweep(args) => {
            let c = load(&args)?;
            let cells = c.grid_cells()?;
            run::start("sweep", c, cells, &args.out, args.workers)
        }
        Command::Resume { out, workers } => run::resume(&out, workers),
        Command::Analyze { kind } => analyze(kind),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
