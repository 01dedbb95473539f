use std::net::IpAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use phasemu::randomness::ClockScheme;

#[derive(Debug, Parser)]
#[command(name = "phasemu", version, about = "Deterministic phase-selected quantum measurement")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spin-singlet correlation experiments.
    #[command(subcommand)]
    Epr(EprCommand),
    /// Measure a state file against one or more commuting observables.
    Measure(MeasureArgs),
    /// Clock qualification.
    #[command(subcommand)]
    Rng(RngCommand),
    /// Start the websocket streaming service.
    Serve(ServeArgs),
}

#[derive(Debug, Subcommand)]
pub enum EprCommand {
    /// Run one angle pair and write the correlation trace.
    Run(EprRunArgs),
    /// Run a list of angle differences and tabulate the final correlations.
    Sweep(EprSweepArgs),
}

#[derive(Debug, Subcommand)]
pub enum RngCommand {
    /// Run the uniformity battery on a clock stream.
    Test(RngTestArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Scheme {
    SineFold,
    CounterHash,
}

impl From<Scheme> for ClockScheme {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::SineFold => ClockScheme::SineFold,
            Scheme::CounterHash => ClockScheme::CounterHash,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TraceFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct EprRunArgs {
    /// First measurement angle in degrees.
    #[arg(long, allow_negative_numbers = true)]
    pub theta1: f64,
    /// Second measurement angle in degrees.
    #[arg(long, allow_negative_numbers = true)]
    pub theta2: f64,
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub seed: i64,
    #[arg(long, value_enum, default_value_t = Scheme::CounterHash)]
    pub scheme: Scheme,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub start_tick: i64,
    #[arg(long, value_enum, default_value_t = TraceFormat::Csv)]
    pub format: TraceFormat,
    /// Trace file; the trace goes to stdout and the summary to stderr when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EprSweepArgs {
    /// Comma-separated angle differences θ2 − θ1 in degrees.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, num_args = 0..)]
    pub deltas: Vec<f64>,
    /// First angle in degrees; the second is `theta1 + delta`.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta1: f64,
    #[arg(long, default_value_t = 50_000)]
    pub n: usize,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub seed: i64,
    #[arg(long, value_enum, default_value_t = Scheme::CounterHash)]
    pub scheme: Scheme,
    /// Also write the rows as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// State vector JSON file.
    #[arg(long)]
    pub state: PathBuf,
    /// Observable JSON file; repeat for a composite measurement.
    #[arg(long = "observable", required = true)]
    pub observables: Vec<PathBuf>,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub seed: i64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub tick: i64,
    #[arg(long, value_enum, default_value_t = Scheme::CounterHash)]
    pub scheme: Scheme,
    /// Re-phase the state from the clock before measuring.
    #[arg(long)]
    pub rebirth: bool,
    /// Collapsed state file; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum RngScheme {
    SineFold,
    CounterHash,
    /// Constant 0.5, for checking that the battery rejects.
    Constant,
}

#[derive(Debug, Args)]
pub struct RngTestArgs {
    #[arg(long, value_enum, default_value_t = RngScheme::CounterHash)]
    pub scheme: RngScheme,
    #[arg(long, default_value_t = 1_000_000)]
    pub n: usize,
    #[arg(long, default_value_t = 0.001)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub seed: i64,
    /// Also write the report as JSON (`-` for stdout).
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value_t = 64)]
    pub max_sessions: usize,
    /// Directory holding the static UI bundle.
    #[arg(long)]
    pub ui_dir: Option<PathBuf>,
}
