//! Command-line driver: single experiments, exponent sweeps over block
//! lengths, and the verification suites.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical degeneracy,
//! 1 other failures. `ISIDEC_SEED` and `ISIDEC_THREADS` act as defaults for
//! `--seed` and `--threads`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use isidec_sim::config::ExperimentConfig;
use isidec_sim::harness::{exponent_sweep, run_experiment, SweepResult};
use isidec_sim::report::{
    emit_to_path, render, report_for_run, report_for_sweep, JsonReport, OutputFormat,
};
use isidec_sim::verify::run_all;
use isidec_sim::SimError;

#[derive(Parser)]
#[command(name = "isidec", about = "ISI universal-decoding simulator", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's root seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's trial count.
    #[arg(long)]
    trials: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, default_value = "csv")]
    format: OutputFormatArg,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum OutputFormatArg {
    Csv,
    Json,
}

impl From<OutputFormatArg> for OutputFormat {
    fn from(v: OutputFormatArg) -> Self {
        match v {
            OutputFormatArg::Csv => OutputFormat::Csv,
            OutputFormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a single experiment at the configured block length.
    Run(RunArgs),
    /// Run the configured n_list and report per-n exponent gaps.
    Sweep(RunArgs),
    /// Run the typicality and property verification suites.
    Verify {
        /// Seed for the verification random streams.
        #[arg(long)]
        seed: Option<u64>,
        /// Smaller sample sizes for a fast pass.
        #[arg(long)]
        quick: bool,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn env_u64(name: &str) -> Option<u64> {
    std::env::var(name).ok().and_then(|v| v.parse().ok())
}

fn env_usize(name: &str) -> Option<usize> {
    std::env::var(name).ok().and_then(|v| v.parse().ok())
}

fn with_pool<T>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T
where
    T: Send,
{
    let threads = threads.or_else(|| env_usize("ISIDEC_THREADS"));
    match threads {
        None => f(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .expect("thread pool")
            .install(f),
    }
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig, SimError> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed.or_else(|| env_u64("ISIDEC_SEED")) {
        cfg.root_seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    Ok(cfg)
}

fn emit(report: &JsonReport, args: &RunArgs) -> Result<(), SimError> {
    let format = args.format.into();
    match &args.out {
        Some(path) => {
            emit_to_path(report, format, path)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{}", render(report, format));
            Ok(())
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<(), SimError> {
    let cfg = load_config(&args)?;
    let result = with_pool(args.threads, || run_experiment(&cfg))?;
    eprintln!(
        "n = {}, R = {:.6} b/use, SNR {:.2} dB, {} valid trials ({} invalid), {:.1}s",
        result.n,
        result.rate_bits,
        result.snr_db,
        result.valid_trials,
        result.invalid_trials,
        result.wall_time_secs
    );
    for row in &result.rows {
        eprintln!(
            "  {:<16} errors {:>8} / {:<8} p_hat = {:.3e}  CI [{:.3e}, {:.3e}]  exp {:.4}",
            match row.delta {
                Some(d) => format!("{}(d={d})", row.decoder),
                None => row.decoder.clone(),
            },
            row.errors,
            row.trials,
            row.p_hat,
            row.ci_lo,
            row.ci_hi,
            row.exponent_hat
        );
    }
    emit(&report_for_run(&cfg, &result), &args)
}

fn print_gap_table(sweep: &SweepResult) {
    eprintln!("exponent gap per block length:");
    for p in &sweep.points {
        eprintln!(
            "  n = {:>4}  snr {:>6.2} dB  gap = {:.6} nats/use (halfwidth {:.6}{})",
            p.n,
            p.snr_db,
            p.gap,
            p.gap_halfwidth,
            if p.degenerate {
                ", degenerate: zero error count"
            } else {
                ""
            }
        );
    }
}

fn cmd_sweep(args: RunArgs) -> Result<(), SimError> {
    let cfg = load_config(&args)?;
    let sweep = with_pool(args.threads, || exponent_sweep(&cfg))?;
    print_gap_table(&sweep);
    emit(&report_for_sweep(&cfg, &sweep), &args)
}

fn cmd_verify(seed: Option<u64>, quick: bool, threads: Option<usize>) -> Result<(), SimError> {
    let seed = seed.or_else(|| env_u64("ISIDEC_SEED")).unwrap_or(0x151DEC);
    let checks = with_pool(threads, || run_all(seed, quick));
    let mut all_passed = true;
    for check in &checks {
        println!("{check}");
        all_passed &= check.passed;
    }
    if all_passed {
        Ok(())
    } else {
        Err(SimError::Numerical(
            isidec_core::CoreError::NonConvergence {
                what: "verification suite",
            },
        ))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify {
            seed,
            quick,
            threads,
        } => cmd_verify(seed, quick, threads),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
