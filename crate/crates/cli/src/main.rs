//! `spherefft`: interpolation, convergence tables, oscillatory cubature and
//! the stability-hypothesis sweep from the command line.
//!
//! Exit status is 0 on success, 1 when an input or a checked property is
//! invalid and 2 when a file cannot be read or written.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spherefft_core::norms::{DEFAULT_N_PHI, DEFAULT_N_THETA};

mod commands;
mod output;

#[derive(Debug, Parser)]
#[command(
    name = "spherefft",
    version,
    about = "FFT-based interpolation and cubature on the sphere"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the interpolant and dump its coefficients as JSON.
    Interpolate(InterpolateArgs),
    /// H0/H1 interpolation errors and orders of convergence.
    Convergence(ConvergenceArgs),
    /// Oscillatory cubature errors over N and kappa, or values for a sample file.
    Cubature(CubatureArgs),
    /// Evaluate the stability constant c_H(N; alpha) for N = 2..=N_max.
    VerifyHypothesis(HypothesisArgs),
    /// Wall-clock time of the interpolant build.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct Source {
    /// Built-in test function (F1, F2, F3, F4, one).
    #[arg(long = "fn", value_name = "NAME", group = "source")]
    pub function: Option<String>,
    /// Sample file (text, or binary with the SPH1 magic).
    #[arg(long = "in", value_name = "PATH", group = "source")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InterpolateArgs {
    #[command(flatten)]
    pub source: Source,
    /// Grid order when sampling a built-in function.
    #[arg(long = "N", value_name = "N")]
    pub n: Option<usize>,
    /// Reject sample files whose pole rows are not constant.
    #[arg(long)]
    pub strict_poles: bool,
    /// Coefficient file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also evaluate the interpolant on the grid refined by this factor.
    #[arg(long, value_name = "M", requires = "grid_out")]
    pub refine: Option<usize>,
    /// Destination of the refined-grid values (`.sph`/`.bin` binary, else text).
    #[arg(long, value_name = "PATH", requires = "refine")]
    pub grid_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long = "fn", value_name = "NAME")]
    pub function: String,
    /// Comma-separated orders, normally doubling.
    #[arg(
        long = "N",
        value_name = "N,...",
        value_delimiter = ',',
        required = true
    )]
    pub ns: Vec<usize>,
    /// Gauss-Legendre nodes in cos(theta).
    #[arg(long, default_value_t = DEFAULT_N_THETA)]
    pub n_theta: usize,
    /// Trapezoid nodes in phi.
    #[arg(long, default_value_t = DEFAULT_N_PHI)]
    pub n_phi: usize,
    /// Skip the H1 columns.
    #[arg(long)]
    pub h0_only: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CubatureArgs {
    #[command(flatten)]
    pub source: Source,
    /// Orders for the error table (with --fn).
    #[arg(long = "N", value_name = "N,...", value_delimiter = ',')]
    pub ns: Vec<usize>,
    /// Comma-separated wavenumbers.
    #[arg(
        long,
        value_name = "K,...",
        value_delimiter = ',',
        required = true,
        allow_negative_numbers = true
    )]
    pub kappa: Vec<f64>,
    #[arg(long)]
    pub strict_poles: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HypothesisArgs {
    #[arg(long, value_name = "N", default_value_t = 256)]
    pub n_max: usize,
    /// Weight exponents.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    pub alpha: Vec<u32>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(
        long = "N",
        value_name = "N,...",
        value_delimiter = ',',
        default_value = "256,512,1024"
    )]
    pub ns: Vec<usize>,
    /// Timed builds per order; the median is reported.
    #[arg(long, default_value_t = 7)]
    pub reps: usize,
    /// Untimed builds per order before measuring.
    #[arg(long, default_value_t = 2)]
    pub warmup: usize,
    /// Built-in function to sample; random samples when omitted.
    #[arg(long = "fn", value_name = "NAME")]
    pub function: Option<String>,
    /// Seed for the random samples.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A checked property that does not hold; reported with exit status 1.
#[derive(Debug)]
pub struct Failed(pub String);

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    let io = err.chain().any(|cause| {
        cause.is::<std::io::Error>()
            || cause
                .downcast_ref::<spherefft_core::Error>()
                .is_some_and(spherefft_core::Error::is_io)
    });
    if io {
        2
    } else {
        1
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("SPHEREFFT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        Failed(format!(
            "SPHEREFFT_THREADS must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Interpolate(args) => commands::interpolate(&args),
        Command::Convergence(args) => commands::convergence(&args),
        Command::Cubature(args) => commands::cubature(&args),
        Command::VerifyHypothesis(args) => commands::verify_hypothesis(&args),
        Command::Bench(args) => commands::bench(&args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
