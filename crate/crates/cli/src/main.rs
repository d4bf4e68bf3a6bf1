//! `ptvec`: sweeps, transition search and operator checks for PT-symmetric
//! vector models.
//!
//! Exit codes: 0 success, 1 I/O, 2 usage, 3 numerical failure or failed
//! verification, 4 bracket or classification failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ptvec_core::so3::CouplingMode;
use ptvec_core::Complex64;

/// Environment variable holding the worker-pool size.
pub const WORKERS_ENV: &str = "PTVEC_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "ptvec", version, about = "Spectra of PT-symmetric vector-model Hamiltonians")]
#[command(args_override_self = true)]
struct Cli {
    /// TOML file of flag presets; flags given on the command line win
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues of the E3 sphere model over a coupling grid
    E3Sweep(E3SweepArgs),
    /// Locate the coupling where the k-th complex pair appears
    E3Critical(E3CriticalArgs),
    /// Closed-form eigenvalues of the SO(3) block model over a grid of b
    So3Sweep(So3SweepArgs),
    /// Check the vector-operator algebra for given reduced matrix elements
    WeVerify(WeVerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum DataFormat {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct E3SweepArgs {
    /// Azimuthal quantum number
    #[arg(long)]
    m: i32,
    #[arg(long)]
    g_min: f64,
    #[arg(long)]
    g_max: f64,
    /// Number of grid points, ends included
    #[arg(long)]
    steps: usize,
    /// Basis size
    #[arg(long, default_value_t = ptvec_core::e3::DEFAULT_TRUNCATION)]
    trunc: usize,
    /// Number of lowest eigenvalues recorded per grid point
    #[arg(long, default_value_t = ptvec_core::e3::DEFAULT_WINDOW)]
    window: usize,
    #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
    format: DataFormat,
    /// Output file; CSV output also writes `<out>.meta.json`. Stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct E3CriticalArgs {
    #[arg(long)]
    m: i32,
    /// Which complex pair, counted from 1
    #[arg(long)]
    index: usize,
    /// Coupling bracket `lo:hi`
    #[arg(long, value_parser = parse_bracket, allow_hyphen_values = true)]
    bracket: (f64, f64),
    /// Bisection stops once the bracket is narrower than this
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, default_value_t = ptvec_core::e3::DEFAULT_TRUNCATION)]
    trunc: usize,
    #[arg(long, default_value_t = ptvec_core::e3::DEFAULT_WINDOW)]
    window: usize,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
}

#[derive(Args, Debug)]
struct So3SweepArgs {
    /// Lower multiplet ℓ of the pair {ℓ, ℓ+1}
    #[arg(long)]
    ell: u32,
    /// Grid of b as `lo:hi:steps`, ends included
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    b_range: (f64, f64, usize),
    /// `equal`, `negated` or `fixed:<c>`
    #[arg(long, value_parser = parse_mode, allow_hyphen_values = true, default_value = "equal")]
    c_mode: CouplingMode,
    #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
    format: DataFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WeVerifyArgs {
    /// Multiplets of the space, e.g. `0,1,2`
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    ells: Vec<u32>,
    /// Reduced element within each multiplet, e.g. `2+3i`
    #[arg(long = "A", value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
    a: Complex64,
    /// Reduced element of the ℓ → ℓ+1 channels
    #[arg(long = "B", value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
    b: Complex64,
    /// Reduced element of the ℓ+1 → ℓ channels
    #[arg(long = "C", value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
    c: Complex64,
    /// Check this many random (A, B, C) choices instead
    #[arg(long, default_value_t = 0)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also fail unless the operator is P-odd and T-odd
    #[arg(long)]
    require_pt: bool,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

fn parse_bracket(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    Ok((parse_f64(lo)?, parse_f64(hi)?))
}

fn parse_range(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, steps] = parts[..] else {
        return Err(format!("expected lo:hi:steps, got {s:?}"));
    };
    let steps = steps.trim().parse().map_err(|_| format!("bad step count {steps:?}"))?;
    Ok((parse_f64(lo)?, parse_f64(hi)?, steps))
}

fn parse_mode(s: &str) -> Result<CouplingMode, String> {
    s.parse().map_err(|e: ptvec_core::Error| e.to_string())
}

/// Complex literal such as `2+3i`, `1-1i`, `5i` or `-0.5`.
fn parse_complex(s: &str) -> Result<Complex64, String> {
    let z: Complex64 = s
        .trim()
        .parse()
        .map_err(|_| format!("not a complex number: {s:?} (expected e.g. 2+3i)"))?;
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let args = match config::apply(raw) {
        Ok(a) => a,
        Err(e) => return e.report(),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Err(e) = commands::init_workers() {
        return e.report();
    }
    let result = match cli.command {
        Command::E3Sweep(a) => commands::e3_sweep(a),
        Command::E3Critical(a) => commands::e3_critical(a),
        Command::So3Sweep(a) => commands::so3_sweep(a),
        Command::WeVerify(a) => commands::we_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        // reader went away, e.g. `| head`
        Err(commands::Failure::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
