//! `ymlab`: construct stationary solutions, compute their spectra, evolve
//! perturbations and run the invariant suite.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit statuses.
pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_SEARCH: u8 = 2;
pub const EXIT_INVARIANT: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    pub fn invariant(message: impl Into<String>) -> Self {
        Self { code: EXIT_INVARIANT, message: message.into() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ymlab", version, about = "Stationary Yang-Mills fields on Schwarzschild: solutions, spectra and instability")]
pub struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, env = "YMLAB_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Suppress the human-readable summary.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find W_n by shooting from the horizon and write a solution file.
    Stationary(StationaryArgs),
    /// Negative spectrum of the operator linearised about a solution.
    Spectrum(SpectrumArgs),
    /// Evolve a perturbation of a solution or of the vacuum.
    Evolve(EvolveArgs),
    /// Run the invariant suite and print a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct StationaryArgs {
    /// Number of zeros.
    #[arg(long, conflicts_with = "constant", required_unless_present = "constant")]
    pub n: Option<usize>,
    /// Write the constant solution W = VALUE (-1, 0 or 1) instead.
    #[arg(long, allow_hyphen_values = true)]
    pub constant: Option<f64>,
    /// Relative tolerance of the adaptive integrator.
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Absolute tolerance of the adaptive integrator.
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Starting offset r = 1 + delta.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Output file name inside the output directory.
    #[arg(long)]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Fd,
    Shooting,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Solution file.
    #[arg(long)]
    pub solution: PathBuf,
    /// Primary method: finite differences or Prüfer shooting.
    #[arg(long, value_enum, default_value = "fd")]
    pub method: MethodArg,
    /// Also run the other method and report the relative disagreement.
    #[arg(long)]
    pub cross_check: bool,
    /// Also recompute on a window enlarged by 50% at both ends.
    #[arg(long)]
    pub robustness: bool,
    /// Window in x as LO,HI.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub window: Option<[f64; 2]>,
    /// Number of grid points, endpoints included.
    #[arg(long)]
    pub points: Option<usize>,
    /// Write eigenfunctions to a companion CSV.
    #[arg(long)]
    pub eigenfunctions: bool,
    /// Output file name inside the output directory.
    #[arg(long)]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackgroundArg {
    /// W = 1.
    Vacuum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Linear,
    Nonlinear,
    /// Nonlinear run plus a linear run of the same data, compared.
    Both,
}

/// Initial perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Perturbation {
    /// ε(φ₀, λφ₀) from the lowest eigenpair on the evolution grid.
    Mode0,
    /// Static Gaussian A exp(−((x − c)/w)²).
    Gauss { center: f64, width: f64, amplitude: f64 },
    None,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// Background solution file.
    #[arg(long, conflicts_with = "background")]
    pub solution: Option<PathBuf>,
    /// Synthetic background instead of a solution file.
    #[arg(long, value_enum)]
    pub background: Option<BackgroundArg>,
    /// Spectrum file supplying the predicted growth rate.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    /// `mode0` or `none`.
    #[arg(long, value_parser = parse_perturbation, conflicts_with = "pulse")]
    pub perturb: Option<Perturbation>,
    /// Gaussian pulse `gauss:CENTER,WIDTH,AMPLITUDE`.
    #[arg(long, value_parser = parse_perturbation, allow_hyphen_values = true)]
    pub pulse: Option<Perturbation>,
    /// Amplitude of the perturbation (overrides the pulse amplitude).
    #[arg(long, allow_hyphen_values = true)]
    pub amplitude: Option<f64>,
    /// Equation of motion for the perturbation.
    #[arg(long, value_enum, default_value = "nonlinear")]
    pub mode: ModeArg,
    /// Final time.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of grid points, endpoints included.
    #[arg(long)]
    pub points: Option<usize>,
    /// Window in x as LO,HI.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub window: Option<[f64; 2]>,
    /// Time step over grid spacing.
    #[arg(long)]
    pub cfl: Option<f64>,
    /// Times of (x, u, pi) snapshots, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Vec<f64>,
    /// Stem of the output file names.
    #[arg(long)]
    pub tag: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run only checks whose name contains this string.
    #[arg(long)]
    pub filter: Option<String>,
    /// Largest n of the constructed solutions.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Also check these solution files.
    #[arg(long)]
    pub solution: Vec<PathBuf>,
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => Ok([a.trim().parse().map_err(|e| format!("{a}: {e}"))?, b.trim().parse().map_err(|e| format!("{b}: {e}"))?]),
        _ => Err(format!("expected LO,HI, got {s:?}")),
    }
}

fn parse_perturbation(s: &str) -> Result<Perturbation, String> {
    match s {
        "mode0" => Ok(Perturbation::Mode0),
        "none" => Ok(Perturbation::None),
        _ => {
            let spec = s.strip_prefix("gauss:").ok_or_else(|| format!("expected mode0, none or gauss:C,W,A, got {s:?}"))?;
            let v: Vec<f64> = spec.split(',').map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p}: {e}"))).collect::<Result<_, _>>()?;
            match v.as_slice() {
                [center, width, amplitude] if *width > 0.0 => Ok(Perturbation::Gauss { center: *center, width: *width, amplitude: *amplitude }),
                _ => Err(format!("expected gauss:CENTER,WIDTH>0,AMPLITUDE, got {s:?}")),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.quiet { log::LevelFilter::Error } else { log::LevelFilter::Warn };
    env_logger::Builder::new().filter_level(level).parse_default_env().format_timestamp(None).init();
    match commands::dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pulse_parsing() {
        assert_eq!(parse_perturbation("gauss:0,5,1e-3").unwrap(), Perturbation::Gauss { center: 0.0, width: 5.0, amplitude: 1e-3 });
        assert_eq!(parse_perturbation("mode0").unwrap(), Perturbation::Mode0);
        assert!(parse_perturbation("gauss:0,-5,1").is_err());
        assert!(parse_perturbation("gauss:0,5").is_err());
        assert!(parse_perturbation("sine").is_err());
    }

    #[test]
    fn window_pairs() {
        assert_eq!(parse_pair("-60, 400").unwrap(), [-60.0, 400.0]);
        assert!(parse_pair("1").is_err());
        assert!(parse_pair("a,b").is_err());
    }

    #[test]
    fn command_surface() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
