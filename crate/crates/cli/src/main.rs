//! `pam-magic`: bounds, sweeps and checks for prepare-and-measure witnesses
//! of non-stabilizerness.

mod commands;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pam_magic::qrac::SeesawConfig;
use pam_magic::witness::AscentConfig;
use pam_magic::Error;

use commands::{Outcome, SweepKind};
use output::{write_records, Format};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAPACITY: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(name = "pam-magic", version, about = "Witnesses of non-stabilizerness in prepare-and-measure scenarios")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunConfig {
    /// Base seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random restarts (default: 200 for ascents, 100 for the seesaw).
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Stopping or matching tolerance (default: 1e-13 for ascents, 1e-10 for
    /// the seesaw, 1e-8 for Gram entries).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Number of grid intervals for sweeps.
    #[arg(long, global = true, default_value_t = 60)]
    grid: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl RunConfig {
    fn ascent(&self) -> AscentConfig {
        let mut cfg = AscentConfig { seed: self.seed, ..AscentConfig::default() };
        if let Some(r) = self.restarts {
            cfg.restarts = r;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        cfg
    }

    fn seesaw(&self) -> SeesawConfig {
        let mut cfg = SeesawConfig { seed: self.seed, ..SeesawConfig::default() };
        if let Some(r) = self.restarts {
            cfg.restarts = r;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        cfg
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classical, stabilizer, 2-stabilizer and quantum bounds of a witness.
    Bounds {
        #[command(subcommand)]
        witness: Witness,
    },
    /// Witness maxima over states pinned to a facet-witness level.
    Sweep {
        #[command(subcommand)]
        kind: Sweep,
    },
    /// T_N maxima by number of stabilizer preparations.
    Table {
        #[command(subcommand)]
        which: Table,
    },
    /// Evaluate the bundled optimal stabilizer configurations.
    FixtureCheck,
    /// Classify a Gram matrix read from CSV.
    Gram {
        path: PathBuf,
        /// Dimension; overrides the one in the CSV header.
        #[arg(long)]
        d: Option<u32>,
    },
    /// Recover the maximizers of the 2-stabilizer S3 problem.
    SelftestH {
        /// Sphere grid size.
        #[arg(long, default_value_t = 100_000)]
        points: usize,
    },
    /// Stabilizer seesaw for the qudit random access code; one row per restart.
    Qrac {
        #[arg(long, default_value_t = 3)]
        d: u32,
    },
}

#[derive(Subcommand)]
enum Witness {
    S3,
    Tilted {
        #[arg(long)]
        t: f64,
    },
    Tn {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum Sweep {
    /// S3 with two stabilizer preparations and the third at level w.
    S3w,
    /// S3 with all three preparations at level w.
    S3wAll,
    /// T_N with every preparation at level w.
    Tnw {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum Table {
    TStab {
        #[arg(long)]
        n: usize,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Capacity { .. } => EXIT_CAPACITY,
        Error::OutOfRange { .. }
        | Error::NotPrime(_)
        | Error::Unsupported(_)
        | Error::Parse { .. }
        | Error::InvalidGram(_)
        | Error::Shape(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let run = &cli.run;
    match &cli.command {
        Command::Bounds { witness } => match witness {
            Witness::S3 => commands::bounds_s3(&run.ascent()),
            Witness::Tilted { t } => commands::bounds_tilted(*t, &run.ascent()),
            Witness::Tn { n } => commands::bounds_tn(*n, &run.ascent()),
        },
        Command::Sweep { kind } => {
            let kind = match kind {
                Sweep::S3w => SweepKind::OneFree,
                Sweep::S3wAll => SweepKind::AllAtW,
                Sweep::Tnw { n } => SweepKind::Tn(*n),
            };
            commands::sweep(kind, run.grid, &run.ascent())
        }
        Command::Table { which: Table::TStab { n } } => commands::table_t_stab(*n, &run.ascent()),
        Command::FixtureCheck => commands::fixture_check(),
        Command::Gram { path, d } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse { line: 0, msg: format!("{}: {e}", path.display()) })?;
            commands::gram(&text, *d, run.tol.unwrap_or(1e-8))
        }
        Command::SelftestH { points } => commands::selftest(*points),
        Command::Qrac { d } => {
            let (outcome, summary) = commands::qrac(*d, &run.seesaw())?;
            eprintln!(
                "best stabilizer value {} (classical {}, quantum {})",
                output::format_significant(summary.best),
                output::format_significant(summary.classical),
                output::format_significant(summary.quantum)
            );
            Ok(outcome)
        }
    }
}

fn emit(outcome: &Outcome, run: &RunConfig) -> io::Result<()> {
    let mut sink: Box<dyn Write> = match &run.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    write_records(&mut sink, &outcome.records, run.format)?;
    sink.flush()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Err(e) = emit(&outcome, &cli.run) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_FAILURE);
    }
    match &outcome.mismatch {
        Some(msg) => {
            eprintln!("mismatch: {msg}");
            ExitCode::from(EXIT_MISMATCH)
        }
        None => ExitCode::SUCCESS,
    }
}
