//! `udn-cache`: run the delivery schemes on a small grid, verify every user
//! decodes, compare the brute-force counts with the closed forms and sweep
//! loads over `t` or the grid size.
//!
//! Exit codes: 0 ok, 1 usage error, 2 verification failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use udn_cache::{Regime, Scheme, UserClass};

#[derive(Parser, Debug)]
#[command(name = "udn-cache", version, about = "Coded caching on a two-dimensional ultra-dense network grid")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate the requested schemes and report their loads.
    Run(RunArgs),
    /// Decode every user byte-exactly and check the counts against the closed forms.
    Verify(VerifyArgs),
    /// Closed-form loads over a range of t or of square grid sizes.
    Sweep(SweepArgs),
    /// Brute-force redundancy counts next to the closed form.
    Oracle(OracleArgs),
    /// Monte Carlo tally of the access-set shapes at a coverage radius.
    Census(CensusArgs),
}

#[derive(Args, Debug, Clone)]
struct SystemArgs {
    #[arg(long, default_value_t = 3)]
    k1: usize,
    #[arg(long, default_value_t = 3)]
    k2: usize,
    /// Cache size in multiples of N / (K1 K2), i.e. t = K1 K2 M / N.
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, default_value = "mid")]
    regime: Regime,
    /// Library size N; defaults to the number of users.
    #[arg(long)]
    n_files: Option<usize>,
    #[arg(long, default_value_t = 64)]
    packet_bytes: usize,
    /// Seed for file contents and for random demands.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Clone)]
struct DemandArgs {
    /// JSON list of {class, anchor, file} requests, one per user.
    #[arg(long, conflicts_with = "random_demands")]
    demands: Option<PathBuf>,
    /// Draw each request uniformly from the library using --seed, instead of
    /// giving every user a distinct file.
    #[arg(long)]
    random_demands: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Write the table here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    demand: DemandArgs,
    #[command(flatten)]
    out: OutputArgs,
    /// Comma-separated: a, b, uncoded, d, mn.
    #[arg(long, value_delimiter = ',', default_value = "a,b,uncoded")]
    schemes: Vec<Scheme>,
    /// Skip the simulation and report closed forms only.
    #[arg(long)]
    closed_form: bool,
    /// Write per-signal and per-block payload hashes as JSON lines.
    #[arg(long)]
    digests: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    demand: DemandArgs,
    /// Flip a bit of the first coded symbol of this sub-type before decoding.
    #[arg(long, hide = true)]
    corrupt_symbol: Option<UserClass>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SweepAxis {
    /// t from --from to --to on a fixed K1 x K2 grid.
    T,
    /// Square grids of side --from to --to at a fixed memory ratio.
    K,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum)]
    over: SweepAxis,
    #[arg(long, default_value_t = 6)]
    k1: usize,
    #[arg(long, default_value_t = 6)]
    k2: usize,
    /// Lower end of the range (t, or grid side); defaults to 0 for t and 3 for grids.
    #[arg(long)]
    from: Option<usize>,
    /// Upper end of the range, inclusive; defaults to K1 K2 for t and 12 for grids.
    #[arg(long)]
    to: Option<usize>,
    /// M/N for grid sweeps, as p/q or a decimal.
    #[arg(long, default_value = "1/3")]
    memory_ratio: String,
    #[arg(long, value_delimiter = ',', default_value = "mid")]
    regime: Vec<Regime>,
    #[arg(long, value_delimiter = ',', default_value = "a,b,uncoded,d")]
    schemes: Vec<Scheme>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long, default_value_t = 3)]
    k1: usize,
    #[arg(long, default_value_t = 3)]
    k2: usize,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, default_value = "mid")]
    regime: Regime,
}

#[derive(Args, Debug)]
struct CensusArgs {
    #[arg(long, default_value_t = 0.8)]
    radius: f64,
    #[arg(long, default_value_t = 200_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Run(a) => commands::run(a),
        Command::Verify(a) => commands::verify(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Census(a) => commands::census(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
