use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use yiarq::channel::FadingMode;
use yiarq::convcode::{build_trellis, compute_transfer_coefficients, CodeSpec};
use yiarq_sim::grid::{parse_flags, parse_grid};
use yiarq_sim::harness::{bound_sweep, exponent_sweep, run_sweep, ExperimentConfig, DEFAULT_K_MAX};
use yiarq_sim::output::{write_coefficients, write_exponents, write_sweep};
use yiarq_sim::{Result, SimError};

/// Yamamoto-Itoh decoding over Rician fading: bounds and Monte-Carlo sweeps.
#[derive(Parser)]
#[command(name = "yiarq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytical union bounds over a grid.
    Bound(GridArgs),
    /// Monte-Carlo simulation plus bounds over a grid.
    Simulate(SimArgs),
    /// Free distance and transfer-function coefficients.
    Coeffs {
        #[arg(long, default_value = "5,7")]
        code: String,
        #[arg(long, default_value_t = 20)]
        kmax: usize,
    },
    /// h̃(u) and exponent predictions per cell.
    Exponents(GridArgs),
}

#[derive(Args)]
struct GridArgs {
    /// Octal generators, e.g. 5,7.
    #[arg(long, default_value = "5,7")]
    code: String,
    /// Information bits per frame.
    #[arg(long = "H", default_value_t = 100)]
    info_len: usize,
    /// Rician factor grid (start:step:stop or a comma list).
    #[arg(long, default_value = "5")]
    gamma: String,
    #[arg(long, default_value = "0.5")]
    sigma2: String,
    /// Flags; `<f>u0` means f·d_f·√(2E_c/N₀) in each cell.
    #[arg(long, default_value = "0")]
    u: String,
    #[arg(long = "ebno-db", default_value = "10")]
    ebno_db: String,
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    kmax: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// iid or block.
    #[arg(long, default_value = "iid")]
    fading: FadingMode,
    /// End a cell early once the smallest flag has this many bit errors.
    #[arg(long = "stop-after-errors")]
    stop_after_errors: Option<u64>,
    /// Worker threads (0: all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn config_from(grid: &GridArgs) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::new(CodeSpec::from_octal(&grid.code)?, grid.info_len);
    c.gamma = parse_grid(&grid.gamma)?;
    c.sigma2 = parse_grid(&grid.sigma2)?;
    c.ebno_db = parse_grid(&grid.ebno_db)?;
    c.flags = parse_flags(&grid.u)?;
    c.k_max = grid.kmax;
    c.output = grid.out.clone();
    Ok(c)
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            SimError::Config(format!("cannot write {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bound(grid) => {
            let config = config_from(&grid)?;
            let rows = bound_sweep(&config)?;
            write_sweep(&mut sink(&config.output)?, &config, &rows, "bound")
        }
        Command::Simulate(args) => {
            let mut config = config_from(&args.grid)?;
            config.trials = args.trials;
            config.seed = args.seed;
            config.fading = args.fading;
            config.stop_after_errors = args.stop_after_errors;
            config.threads = args.threads;
            let rows = run_sweep(&config)?;
            write_sweep(&mut sink(&config.output)?, &config, &rows, "simulate")
        }
        Command::Coeffs { code, kmax } => {
            let spec = CodeSpec::from_octal(&code)?;
            let coeffs = compute_transfer_coefficients(&build_trellis(&spec), kmax)?;
            let mut out = sink(&None)?;
            write_coefficients(&mut out, &spec.to_octal(), &coeffs)?;
            Ok(out.flush()?)
        }
        Command::Exponents(grid) => {
            let config = config_from(&grid)?;
            let rows = exponent_sweep(&config)?;
            write_exponents(&mut sink(&config.output)?, &config, &rows)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
