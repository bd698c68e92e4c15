//! Batch front end: formula generation, witness models, checking,
//! property suites, extraction and the separation search.

mod error;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "linmodal", version, about = "Tiling reductions for two-variable modal logic over linear frames")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Print phase timings to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Structured,
}

#[derive(Args, Debug, Clone)]
pub struct TilesArgs {
    /// Tile set file, or `random:<n>` for a seeded random set of n tiles.
    #[arg(long)]
    tiles: String,
    /// Seed for `random:<n>` tile sets.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct BoundArgs {
    /// Materialized worlds (prefix length, or ω-copy length for ordinals).
    #[arg(long)]
    horizon: Option<usize>,
    /// Largest domain element K; the domain is {-1, …, K}.
    #[arg(long)]
    domain_bound: Option<i64>,
    /// Rows of the star model.
    #[arg(long)]
    blocks: Option<usize>,
    /// Window width used for default bounds and extraction.
    #[arg(long, default_value_t = 8)]
    cols: usize,
    /// Window height used for default bounds and extraction.
    #[arg(long, default_value_t = 8)]
    rows: usize,
    /// Largest side of the periodic block searched for.
    #[arg(long, default_value_t = 4)]
    max_period: usize,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Generate a formula artifact and report its metrics.
    Gen {
        #[command(flatten)]
        tiles: TilesArgs,
        #[arg(long, default_value = "A")]
        variant: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        report: ReportFormat,
    },
    /// Write the witness model of a tile set.
    Build {
        #[command(flatten)]
        tiles: TilesArgs,
        #[arg(long, default_value = "A")]
        variant: String,
        #[arg(long)]
        frame: Option<String>,
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate every conjunct of an artifact on a model.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        artifact: PathBuf,
        /// Defaults to the first chain world of dense frames and 0 otherwise.
        #[arg(long)]
        world: Option<usize>,
        #[arg(long)]
        step_limit: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        report: ReportFormat,
    },
    /// Run the property suites on the witness models of a tile set.
    Props {
        #[command(flatten)]
        tiles: TilesArgs,
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        report: ReportFormat,
    },
    /// Read a tiling window back out of a model.
    Extract {
        #[arg(long)]
        model: PathBuf,
        /// Inferred from the model's generator when omitted.
        #[arg(long)]
        variant: Option<String>,
        /// Tile set file or `random:<n>`; needed for explicit models.
        #[arg(long)]
        tiles: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Grid to compare against; defaults to the model's own tiling.
        #[arg(long)]
        expected: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        cols: usize,
        #[arg(long, default_value_t = 8)]
        rows: usize,
        /// Grid file; the provenance sidecar goes next to it.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        report: ReportFormat,
    },
    /// Search for a tiling of a finite grid.
    Solve {
        #[command(flatten)]
        tiles: TilesArgs,
        #[arg(long, default_value_t = 4)]
        width: usize,
        #[arg(long, default_value_t = 4)]
        height: usize,
        /// Require matching edges across the wrap-around.
        #[arg(long)]
        wrap: bool,
        #[arg(long, default_value_t = 64)]
        max_cells: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Look for a countermodel to a separation formula on a finite chain.
    Sep {
        /// `Z`, `ref`, `boxn:<n>` or `xboxn:<n>`.
        #[arg(long)]
        formula: String,
        #[arg(long, default_value = "natle")]
        frame: String,
        /// Number of worlds of the chain.
        #[arg(long, default_value_t = 4)]
        len: usize,
        #[arg(long, default_value_t = 2)]
        max_domain: usize,
        /// Only look for a refutation at this world.
        #[arg(long)]
        world: Option<usize>,
        #[arg(long, default_value_t = 1 << 22)]
        max_interpretations: u64,
        /// Witness model file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// gen, build, check, extract and compare in one run.
    Pipeline {
        #[command(flatten)]
        tiles: TilesArgs,
        #[arg(long, default_value = "A")]
        variant: String,
        #[arg(long)]
        frame: Option<String>,
        #[command(flatten)]
        bounds: BoundArgs,
        /// Directory receiving every intermediate file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        report: ReportFormat,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::dispatch(cli.cmd, cli.verbose) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
