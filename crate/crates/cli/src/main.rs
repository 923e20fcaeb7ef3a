mod report;
mod sweep;
mod verify;

use std::io::{self, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use indinet::matrix::DEFAULT_PERMANENT_BOUND;
use indinet::protocol::{MeasurementMode, NetworkSpec, ProtocolKind, Topology};
use indinet::slocc::slocc_project;
use indinet::{NormalizedState, Scalar, Statistics};

/// Overrides the largest matrix dimension for which permanents are computed.
pub const PERMANENT_BOUND_ENV: &str = "INDINET_MAX_PERMANENT_DIM";

#[derive(Parser)]
#[command(name = "indinet", version, about = "Entanglement transfer with indistinguishable particles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one protocol and print a JSON report.
    Run(RunArgs),
    /// Tabulate closed-form success probabilities over n = 4, 6, …, n_max.
    Sweep(SweepArgs),
    /// Print the localized expansion of a prepared (or post-selected) state.
    Expand(ExpandArgs),
    /// Cross-check permanents, determinants, closed forms and measurement trees.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Kind {
    Separated,
    FermionicShared,
    BosonicShared,
}

impl From<Kind> for ProtocolKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Separated => ProtocolKind::Separated,
            Kind::FermionicShared => ProtocolKind::FermionicShared,
            Kind::BosonicShared => ProtocolKind::BosonicShared,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StatisticsArg {
    Boson,
    Fermion,
}

impl From<StatisticsArg> for Statistics {
    fn from(s: StatisticsArg) -> Self {
        match s {
            StatisticsArg::Boson => Statistics::Boson,
            StatisticsArg::Fermion => Statistics::Fermion,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Enumerate,
    Sample,
}

#[derive(Args)]
struct NetworkArgs {
    kind: Kind,
    /// Number of particle pairs N (n = 2N particles).
    #[arg(long, short = 'N', default_value_t = 2)]
    pairs: usize,
    /// Particle statistics; only meaningful for `separated`.
    #[arg(long)]
    statistics: Option<StatisticsArg>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    network: NetworkArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Enumerate)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Include wall-clock time in the report (breaks byte-for-byte reproducibility).
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated protocol kinds (default: all).
    #[arg(long, value_enum, value_delimiter = ',')]
    kinds: Vec<Kind>,
    #[arg(long, default_value_t = 12)]
    n_max: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct ExpandArgs {
    #[command(flatten)]
    network: NetworkArgs,
    /// Expand the state after counting post-selection instead of the prepared state.
    #[arg(long)]
    post_select: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 6)]
    n_max: usize,
    /// Neighbouring-mode overlap used by the closed forms (test fixture).
    #[arg(long, hide = true)]
    chain_overlap: Option<Scalar>,
}

/// Failure categories mapped to process exit codes.
pub enum Failure {
    Usage(String),
    Verification,
}

impl From<indinet::Error> for Failure {
    fn from(e: indinet::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a, &mut out),
        Command::Sweep(a) => cmd_sweep(a, &mut out),
        Command::Expand(a) => cmd_expand(a, &mut out),
        Command::Verify(a) => cmd_verify(a, &mut out),
    };
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

pub fn permanent_bound() -> Result<usize, Failure> {
    match std::env::var(PERMANENT_BOUND_ENV) {
        Ok(v) => v
            .parse()
            .map_err(|_| Failure::Usage(format!("{PERMANENT_BOUND_ENV} must be an integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_PERMANENT_BOUND),
    }
}

fn network_spec(args: &NetworkArgs) -> Result<NetworkSpec, Failure> {
    let kind = ProtocolKind::from(args.kind);
    let stats = args.statistics.map(Statistics::from);
    let (topology, statistics) = match kind {
        ProtocolKind::Separated => (Topology::Separated, stats.unwrap_or(Statistics::Fermion)),
        ProtocolKind::FermionicShared => (Topology::SharedChain, Statistics::Fermion),
        ProtocolKind::BosonicShared => (Topology::SharedChain, Statistics::Boson),
    };
    if stats.is_some_and(|s| s != statistics) {
        return Err(Failure::Usage(format!(
            "{kind} is defined for {} only",
            statistics.name()
        )));
    }
    let bound = permanent_bound()?;
    if statistics == Statistics::Boson && 2 * args.pairs > bound {
        return Err(Failure::Usage(format!(
            "{} particles exceed the permanent bound {bound}",
            2 * args.pairs
        )));
    }
    Ok(NetworkSpec::new(args.pairs, topology, statistics)?)
}

fn write_json(out: &mut impl Write, value: &serde_json::Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("json value serializes");
    writeln!(out, "{text}").map_err(|e| Failure::Usage(e.to_string()))
}

fn cmd_run(args: RunArgs, out: &mut impl Write) -> Result<(), Failure> {
    let start = Instant::now();
    let spec = network_spec(&args.network)?;
    let mode = match args.mode {
        ModeArg::Enumerate => MeasurementMode::Enumerate,
        ModeArg::Sample => MeasurementMode::Sample { seed: args.seed },
    };
    let mut report = report::run(args.network.kind.into(), &spec, mode)?;
    if args.timing {
        report.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    write_json(out, &serde_json::to_value(&report).expect("report serializes"))
}

fn cmd_sweep(args: SweepArgs, out: &mut impl Write) -> Result<(), Failure> {
    let kinds: Vec<ProtocolKind> = if args.kinds.is_empty() {
        ProtocolKind::ALL.to_vec()
    } else {
        args.kinds.iter().map(|&k| k.into()).collect()
    };
    let rows = sweep::rows(&kinds, args.n_max, permanent_bound()?)?;
    sweep::write(out, &rows, args.format)
}

fn cmd_expand(args: ExpandArgs, out: &mut impl Write) -> Result<(), Failure> {
    let spec = network_spec(&args.network)?;
    let prepared = spec.prepare_state()?;
    let state = if args.post_select {
        slocc_project(&prepared, &spec.post_selection())?
            .post_state
            .ok_or_else(|| Failure::Usage("post-selection has zero probability".into()))?
    } else {
        prepared
    };
    let expanded =
        NormalizedState::from_parts(state.state().expand_localized(), state.norm_squared().clone())?;
    write_json(out, &expanded.to_json())
}

fn cmd_verify(args: VerifyArgs, out: &mut impl Write) -> Result<(), Failure> {
    let bound = permanent_bound()?;
    if args.n_max < 4 || args.n_max > bound {
        return Err(Failure::Usage(format!(
            "--n-max must lie in 4..={bound}, got {}",
            args.n_max
        )));
    }
    let overlap = args.chain_overlap.unwrap_or_else(|| Scalar::from_ratio(1, 2));
    let start = Instant::now();
    let summary = verify::run(args.n_max, &overlap, bound, out)?;
    eprintln!("verify finished in {:.3} s", start.elapsed().as_secs_f64());
    if summary.failed == 0 {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
