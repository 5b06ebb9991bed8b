//! Command line front end: analytic rate queries, eavesdropper-basis
//! sweeps, Monte Carlo protocol sessions, and signature verdicts.
//!
//! Angles cross this boundary in degrees (all reports echo degrees);
//! the library works in radians. Every command is deterministic given
//! its full flag set including the seed, and auto-generated seeds are
//! printed so any run can be reproduced.

mod commands;
mod io;
mod runner;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kmb09::protocol::ProtocolSpec;

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analytic(args) => commands::analytic(&args),
        Command::Sweep(args) => commands::sweep(&args),
        Command::Simulate(args) => commands::simulate(&args),
        Command::Signature(args) => commands::signature(&args),
    };
    match result {
        Ok(()) => {}
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            std::process::exit(2);
        }
        Err(CliError::Runtime(message)) => {
            eprintln!("error: {message}");
            std::process::exit(1);
        }
    }
}

/// KMB09 quantum key distribution: rates, sweeps, sessions, and
/// eavesdropping signatures.
#[derive(Parser)]
#[command(name = "kmb09", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the closed-form rates at one parameter point
    Analytic(AnalyticArgs),
    /// Grid-sweep Evan's basis, write a CSV, and summarise extrema and fit
    Sweep(SweepArgs),
    /// Run one Monte Carlo protocol session
    Simulate(SimulateArgs),
    /// Score a session against a sweep's eavesdropping line
    Signature(SignatureArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProtocolChoice {
    /// Two bases e, f
    Kmb09,
    /// Three bases e, f, h
    Variant,
}

/// Protocol selection and Alice/Bob angles, shared by every command.
#[derive(Args)]
struct ProtocolArgs {
    /// Protocol to analyse
    #[arg(long, value_enum)]
    protocol: ProtocolChoice,

    /// f-basis polar angle in degrees, within [0, 360)
    #[arg(long, value_parser = parse_degrees)]
    theta1: f64,

    /// h-basis polar angle in degrees (variant only)
    #[arg(long, value_parser = parse_degrees)]
    theta2: Option<f64>,

    /// h-basis azimuthal angle in degrees (variant only)
    #[arg(long, value_parser = parse_degrees)]
    phi2: Option<f64>,
}

impl ProtocolArgs {
    /// Degrees at the flag boundary, radians underneath.
    fn spec(&self) -> Result<ProtocolSpec, CliError> {
        match self.protocol {
            ProtocolChoice::Kmb09 => {
                if self.theta2.is_some() || self.phi2.is_some() {
                    return Err(CliError::Usage(
                        "--theta2/--phi2 apply only to --protocol variant".into(),
                    ));
                }
                Ok(ProtocolSpec::Kmb09 {
                    theta1: self.theta1.to_radians(),
                })
            }
            ProtocolChoice::Variant => {
                let (Some(theta2), Some(phi2)) = (self.theta2, self.phi2) else {
                    return Err(CliError::Usage(
                        "--protocol variant requires --theta2 and --phi2".into(),
                    ));
                };
                Ok(ProtocolSpec::Variant {
                    theta1: self.theta1.to_radians(),
                    theta2: theta2.to_radians(),
                    phi2: phi2.to_radians(),
                })
            }
        }
    }
}

/// Eavesdropper, noise, and session-size flags shared by `simulate` and
/// `signature`.
#[derive(Args)]
struct SessionArgs {
    /// Put the intercept-resend eavesdropper on the line
    #[arg(long)]
    eve: bool,

    /// Evan's polar angle in degrees (with --eve)
    #[arg(long, value_parser = parse_degrees, requires = "phi3")]
    theta3: Option<f64>,

    /// Evan's azimuthal angle in degrees (with --eve)
    #[arg(long, value_parser = parse_degrees, requires = "theta3")]
    phi3: Option<f64>,

    /// Depolarizing noise probability per photon
    #[arg(long, default_value_t = 0.0)]
    noise: f64,

    /// Photons to transmit
    #[arg(long, default_value_t = 100_000)]
    photons: u64,

    /// Session seed; auto-generated (and printed) when omitted
    #[arg(long)]
    seed: Option<u64>,

    /// Fraction of photons revealed for rate estimation
    #[arg(long = "test-fraction", default_value_t = 0.2)]
    test_fraction: f64,

    /// Worker threads; observable outputs are identical for any count
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct AnalyticArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,

    /// Evan's polar angle in degrees
    #[arg(long, value_parser = parse_degrees, requires = "phi3")]
    theta3: Option<f64>,

    /// Evan's azimuthal angle in degrees
    #[arg(long, value_parser = parse_degrees, requires = "theta3")]
    phi3: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,

    /// Grid points per axis (1 degree resolution at 360)
    #[arg(long, default_value_t = 360)]
    grid: u32,

    /// Sweep CSV path
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,

    #[command(flatten)]
    session: SessionArgs,

    /// Dump the per-photon trace to --out
    #[arg(long)]
    trace: bool,

    /// Trace file path (with --trace)
    #[arg(long, default_value = "trace.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct SignatureArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,

    #[command(flatten)]
    session: SessionArgs,

    /// Load the fitted sweep from this CSV instead of recomputing it
    #[arg(long)]
    sweep: Option<PathBuf>,

    /// Grid for the inline sweep when --sweep is not given
    #[arg(long, default_value_t = 360)]
    grid: u32,
}

/// Errors split by exit status: usage problems exit 2, runtime failures
/// exit 1.
enum CliError {
    Usage(String),
    Runtime(String),
}

fn parse_degrees(text: &str) -> Result<f64, String> {
    let value: f64 = text
        .parse()
        .map_err(|_| format!("`{text}` is not a number"))?;
    if !value.is_finite() || !(0.0..360.0).contains(&value) {
        return Err(format!("angle {value} must lie in [0, 360) degrees"));
    }
    Ok(value)
}
