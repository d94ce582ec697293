use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use respat::Convention;
use respat_cli::{cmd_compare, cmd_eval, cmd_simulate, parse_config, CliError, Format, RunOptions};

/// Upper bound on worker threads, read at startup.
const THREADS_ENV: &str = "RESPAT_MAX_THREADS";

#[derive(Parser)]
#[command(name = "respat", version, about = "Resilience pattern models: evaluate, simulate, sweep, compare")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic evaluation of the system section.
    Eval(Common),
    /// Monte Carlo simulation of the scenario section.
    Simulate(Common),
    /// Like eval (or simulate with --simulate), but requires a [sweep] section.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        simulate: bool,
    },
    /// Analytic values next to simulated ones.
    Compare(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Literal,
    Survival,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Report file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Overrides the config's convention (which defaults to literal).
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,
    /// JSON-lines event trace of trial 0 of every point.
    #[arg(long)]
    trace: Option<PathBuf>,
}

fn max_threads() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))),
        },
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, which) = match cli.command {
        Command::Eval(c) => (c, "eval"),
        Command::Simulate(c) => (c, "simulate"),
        Command::Sweep { common, simulate } => (common, if simulate { "sweep-simulate" } else { "sweep" }),
        Command::Compare(c) => (c, "compare"),
    };
    let doc = parse_config(&common.config)?;
    let opts = RunOptions {
        convention: common.convention.map(|c| match c {
            ConventionArg::Literal => Convention::Literal,
            ConventionArg::Survival => Convention::Survival,
        }),
        trials: common.trials,
        seed: common.seed,
        workers: max_threads()?,
        trace: common.trace,
    };
    if which.starts_with("sweep") && doc.sweep.is_none() {
        return Err(CliError::Usage("`sweep` needs a [sweep] section in the config".into()));
    }
    let report = match which {
        "eval" | "sweep" => cmd_eval(&doc, &opts)?,
        "simulate" | "sweep-simulate" => cmd_simulate(&doc, &opts)?,
        _ => cmd_compare(&doc, &opts)?,
    };
    let format = match common.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Structured => Format::Structured,
    };
    let text = report.render(format)?;
    match &common.output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("respat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
