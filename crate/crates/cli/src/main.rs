//! `zerocorr`: tables of zero correlations of Gaussian random sections.

mod commands;
mod error;
mod params;
mod points;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::commands::{
    ConnectedArgs, CorrMethod, FiniteNArgs, KernelCheckArgs, LimitCorrArgs, McPairArgs, Outcome, PairCurveArgs,
};
use crate::error::{CliError, CliResult};
use crate::params::Params;
use crate::table::Format;

/// Worker-count variable, overridden by the config file and `--threads`.
const THREADS_ENV: &str = "ZEROCORR_THREADS";
const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(name = "zerocorr", version, about = "Scaling-limit correlations of zeros of Gaussian random holomorphic sections")]
struct Cli {
    /// Flat key = value file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: $ZEROCORR_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format: csv or json.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Output file (default: standard output).
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Exit with status 4 when the command's acceptance check fails.
    #[arg(long, global = true)]
    assert: bool,
    /// Seed for Monte Carlo routes.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pair correlation in C^m: closed form against the Wick route.
    PairCurve {
        #[arg(long)]
        m: Option<usize>,
        /// Comma-separated distances.
        #[arg(long, allow_hyphen_values = true)]
        r: Option<String>,
    },
    /// Limit correlations of configurations read from a points file.
    LimitCorr {
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        /// wick, mc or both.
        #[arg(long)]
        method: Option<CorrMethod>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Finite-N pair correlation on CP^1 against its limit.
    FiniteN {
        #[arg(long)]
        r: Option<f64>,
        /// Comma-separated levels N.
        #[arg(long)]
        levels: Option<String>,
    },
    /// Connected correlations, decay bound and Möbius round trip.
    Connected {
        #[arg(long)]
        points: Option<PathBuf>,
        /// Comma-separated pair distances, instead of --points.
        #[arg(long)]
        pairs: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Empirical pair correlation of zeros of random SU(2) polynomials.
    McPair {
        #[arg(long)]
        level: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        u_max: Option<f64>,
        /// Bins below this scaled distance are reported but not tested.
        #[arg(long)]
        u_min: Option<f64>,
        #[arg(long)]
        bins: Option<usize>,
        /// Also run uniform independent points through the same estimator.
        #[arg(long)]
        baseline: bool,
    },
    /// Scaled kernel residual over (N, u, v) grids.
    KernelCheck {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        levels: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::PairCurve { .. } => "pair-curve",
            Command::LimitCorr { .. } => "limit-corr",
            Command::FiniteN { .. } => "finite-n",
            Command::Connected { .. } => "connected",
            Command::McPair { .. } => "mc-pair",
            Command::KernelCheck { .. } => "kernel-check",
        }
    }
}

fn thread_count(p: &mut Params, flag: Option<usize>) -> CliResult<Option<usize>> {
    let env = match std::env::var(THREADS_ENV) {
        Ok(s) => Some(s.trim().parse::<usize>().map_err(|e| CliError::Usage(format!("{THREADS_ENV}: {e}")))?),
        Err(_) => None,
    };
    let n = p.get_opt("threads", flag)?.or(env);
    if n == Some(0) {
        return Err(CliError::Usage("threads must be positive".into()));
    }
    Ok(n)
}

fn run(cli: Cli) -> CliResult<()> {
    let start = Instant::now();
    let mut p = Params::from_file(cli.config.as_deref())?;
    let threads = thread_count(&mut p, cli.threads)?;
    let format = p.get("format", cli.format, Format::Csv)?;
    let output = p.get_opt("output", cli.output.map(|o| o.display().to_string()))?;
    let assert = p.switch("assert", cli.assert)?;
    let seed = p.get("seed", cli.seed, DEFAULT_SEED)?;
    let command = cli.command.name();
    let pool = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n),
        None => rayon::ThreadPoolBuilder::new(),
    }
    .build()
    .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let workers = pool.current_num_threads();
    let Outcome { mut table, failure } = pool.install(|| match cli.command {
        Command::PairCurve { m, r } => commands::pair_curve(&mut p, PairCurveArgs { m, r }),
        Command::LimitCorr { points, k, method, samples } => {
            commands::limit_corr(&mut p, LimitCorrArgs { points, k, method, samples }, seed)
        }
        Command::FiniteN { r, levels } => commands::finite_n(&mut p, FiniteNArgs { r, levels }),
        Command::Connected { points, pairs, m, k } => commands::connected(&mut p, ConnectedArgs { points, pairs, m, k }),
        Command::McPair { level, samples, u_max, u_min, bins, baseline } => {
            commands::mc_pair(&mut p, McPairArgs { level, samples, u_max, u_min, bins, baseline }, seed)
        }
        Command::KernelCheck { m, levels, u, v, theta, phi } => {
            commands::kernel_check(&mut p, KernelCheckArgs { m, levels, u, v, theta, phi })
        }
    })?;
    for (k, v) in p.used() {
        table.metadata.entry(format!("param.{k}")).or_insert_with(|| v.clone());
    }
    table.meta("version", env!("CARGO_PKG_VERSION"));
    table.meta("command", command);
    table.meta("seed", seed);
    table.meta("threads", workers);
    table.meta("acceptance", failure.as_deref().unwrap_or("pass"));
    table.meta("wall-time-s", format!("{:.3}", start.elapsed().as_secs_f64()));
    let text = table.render(format)?;
    match output {
        Some(path) => std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?,
        None => print!("{text}"),
    }
    match failure {
        Some(msg) if assert => Err(CliError::Acceptance(msg)),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zerocorr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
