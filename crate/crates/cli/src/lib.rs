//! Command-line front end for the gate-simulation library: parses drive
//! parameters (including exact rational/surd expressions), dispatches to
//! the library pipelines, and emits versioned JSON reports or CSV sweep
//! tables.
//!
//! Exit-code contract: 0 on success (including sweeps whose individual
//! rows fail — those carry an error code in the table), 1 when a
//! simulation or solver reports a hard error, 2 for configuration
//! mistakes (unparsable flags, invalid parameter ranges, or an
//! inconsistent flag combination).

use std::fmt;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use geomgate::invariant::{SingleQubitDrive, TwoQubitDrive};

pub mod commands;
pub mod expr;
pub mod report;

use report::{ConfigEcho, Report, ResultsBody, SCHEMA_VERSION};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or parameter values; the process exits with status 2.
    Config(String),
    /// A simulation or solver error; the process exits with status 1.
    Module(geomgate::Error),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config(_) => "ConfigParseError",
            CliError::Module(e) => e.code(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Module(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(detail) => write!(f, "{detail}"),
            CliError::Module(e) => write!(f, "{e}"),
        }
    }
}

impl From<geomgate::Error> for CliError {
    fn from(e: geomgate::Error) -> Self {
        // Parameter-validation failures inside the library are
        // configuration mistakes from the CLI's point of view.
        match e {
            geomgate::Error::InvalidParameter { ref detail } => {
                CliError::Config(format!("invalid parameter: {detail}"))
            }
            other => CliError::Module(other),
        }
    }
}

fn parse_expr_arg(text: &str) -> Result<f64, String> {
    expr::parse_number(text)
}

#[derive(Debug, Parser)]
#[command(
    name = "geomgate",
    version,
    about = "Simulate and synthesize geometric quantum gates driven by rotating fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandKind,

    /// Omit the timestamp and runtime fields for reproducible output
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    /// Write the report to a file instead of standard output
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<std::path::PathBuf>,

    /// Output format: json (reports) or csv (sweep tables)
    #[arg(long, global = true, value_name = "json|csv")]
    pub format: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum CommandKind {
    /// Cross-check the exact propagator, invariance law, and phase split
    Verify(SimArgs),
    /// Split the cycle phases of a drive into dynamic and geometric parts
    Phases(PhasesArgs),
    /// Compute the cyclic gate after a number of drive periods
    Gate(GateArgs),
    /// Solve the dynamic-phase-elimination constraint, or synthesize a
    /// drive attaining a target geometric phase
    Solve(SolveArgs),
    /// Build and verify the two-qubit controlled gate
    #[command(name = "controlled-u")]
    ControlledU(ControlledUArgs),
    /// Tabulate closed-form quantities along one parameter axis (CSV)
    Sweep(SweepArgs),
}

/// Drive parameters of either family. The coupled-pair flags (--J,
/// --omega0) and the single-qubit flags (--omega1, --omega2) are
/// mutually exclusive; the pair present selects the family.
#[derive(Debug, Args)]
pub struct DriveArgs {
    /// Drive angular frequency (accepts `a`, `a/b`, `a*sqrt(b)/c`)
    #[arg(long, value_parser = parse_expr_arg, allow_hyphen_values = true, default_value = "1")]
    pub omega: f64,

    /// Static longitudinal field of the single-qubit family
    #[arg(long, value_parser = parse_expr_arg, allow_hyphen_values = true)]
    pub omega1: Option<f64>,

    /// Rotating transverse amplitude of the single-qubit family
    #[arg(long, value_parser = parse_expr_arg, allow_hyphen_values = true)]
    pub omega2: Option<f64>,

    /// Ising coupling of the coupled-pair family
    #[arg(long = "J", value_parser = parse_expr_arg, allow_hyphen_values = true)]
    pub coupling: Option<f64>,

    /// Rotating transverse amplitude of the coupled-pair family
    #[arg(long, value_parser = parse_expr_arg, allow_hyphen_values = true)]
    pub omega0: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub enum Family {
    Single(SingleQubitDrive),
    Pair(TwoQubitDrive),
}

impl DriveArgs {
    pub fn family(&self) -> Result<Family, CliError> {
        let pair_flags = self.coupling.is_some() || self.omega0.is_some();
        let single_flags = self.omega1.is_some() || self.omega2.is_some();
        if pair_flags && single_flags {
            return Err(CliError::Config(
                "choose one family: --omega1/--omega2 or --J/--omega0".into(),
            ));
        }
        if pair_flags {
            let (Some(coupling), Some(omega0)) = (self.coupling, self.omega0) else {
                return Err(CliError::Config(
                    "the coupled-pair family needs both --J and --omega0".into(),
                ));
            };
            return Ok(Family::Pair(TwoQubitDrive::new(self.omega, coupling, omega0)?));
        }
        let (Some(omega1), Some(omega2)) = (self.omega1, self.omega2) else {
            return Err(CliError::Config(
                "the single-qubit family needs both --omega1 and --omega2".into(),
            ));
        };
        Ok(Family::Single(SingleQubitDrive::new(self.omega, omega1, omega2)?))
    }

    fn echo_into(&self, echo: &mut ConfigEcho) {
        echo.omega = self.omega;
        echo.omega1 = self.omega1;
        echo.omega2 = self.omega2;
        echo.coupling = self.coupling;
        echo.omega0 = self.omega0;
    }
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[command(flatten)]
    pub drive: DriveArgs,

    /// Time-grid resolution per period (even, at least 64)
    #[arg(long, default_value_t = 2048)]
    pub grid_points: usize,

    /// Steps of the midpoint-exponential integrator (at least 1000)
    #[arg(long, default_value_t = 100_000)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct PhasesArgs {
    #[command(flatten)]
    pub drive: DriveArgs,

    /// Time-grid resolution per period (even, at least 64)
    #[arg(long, default_value_t = 2048)]
    pub grid_points: usize,
}

#[derive(Debug, Args)]
pub struct GateArgs {
    #[command(flatten)]
    pub drive: DriveArgs,

    /// Time-grid resolution per period (even, at least 64)
    #[arg(long, default_value_t = 2048)]
    pub grid_points: usize,

    /// Number of drive periods
    #[arg(long, default_value_t = 1)]
    pub cycles: u32,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Drive angular frequency
    #[arg(long, value_parser = parse_expr_arg, allow_hyphen_values = true, default_value = "1")]
    pub omega: f64,

    /// Dynamic-phase quantization integer (constraint mode)
    #[arg(long = "K", default_value_t = 0, allow_hyphen_values = true)]
    pub k: i64,

    /// Longitudinal field: the exact value on the K = 0 circle, or the
    /// fixed value that the transverse amplitude is solved against
    #[arg(long, value_parser = parse_expr_arg, allow_hyphen_values = true)]
    pub omega1: Option<f64>,

    /// Target geometric phase in radians (synthesis mode)
    #[arg(long, value_parser = parse_expr_arg, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ControlledUArgs {
    /// Drive angular frequency
    #[arg(long, value_parser = parse_expr_arg, allow_hyphen_values = true, default_value = "1")]
    pub omega: f64,

    /// Ising coupling
    #[arg(long = "J", value_parser = parse_expr_arg, allow_hyphen_values = true)]
    pub coupling: f64,

    /// Rotating transverse amplitude
    #[arg(long, value_parser = parse_expr_arg, allow_hyphen_values = true)]
    pub omega0: f64,

    /// Largest cycle count considered by the commensuration search
    #[arg(long = "max-m", default_value_t = 64)]
    pub max_cycles: u32,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Parameter to vary: omega, omega1, or omega2
    #[arg(long)]
    pub axis: String,

    /// Comma-separated axis values (expressions allowed); empty for a
    /// header-only table
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub values: String,

    /// Drive angular frequency (fixed unless it is the axis)
    #[arg(long, value_parser = parse_expr_arg, allow_hyphen_values = true, default_value = "1")]
    pub omega: f64,

    /// Longitudinal field (fixed unless it is the axis)
    #[arg(long, value_parser = parse_expr_arg, allow_hyphen_values = true)]
    pub omega1: Option<f64>,

    /// Transverse amplitude (fixed unless it is the axis)
    #[arg(long, value_parser = parse_expr_arg, allow_hyphen_values = true)]
    pub omega2: Option<f64>,

    /// Derive omega2 from the zero-dynamic-phase circle
    /// omega2 = sqrt(omega*omega1 - omega1^2) on every row
    #[arg(long)]
    pub circle: bool,
}

/// Executes one parsed command line and renders its output: a JSON
/// report or a CSV table. Hard errors come back as `Err`; soft
/// outcomes (such as a verify run missing its tolerances) are part of
/// the rendered report.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let started = Instant::now();

    let format = cli.format.as_deref();
    if matches!(cli.command, CommandKind::Sweep(_)) {
        if let Some(f) = format {
            if f != "csv" {
                return Err(CliError::Config(format!(
                    "sweep emits csv tables; --format {f} is not available"
                )));
            }
        }
    } else if let Some(f) = format {
        if f != "json" {
            return Err(CliError::Config(format!(
                "--format {f} is not available here; reports are json and sweeps are csv"
            )));
        }
    }

    if let CommandKind::Sweep(args) = &cli.command {
        return commands::sweep(args);
    }

    let mut echo = ConfigEcho { format: "json".into(), ..ConfigEcho::default() };
    let (command_name, results) = match &cli.command {
        CommandKind::Verify(args) => {
            args.drive.echo_into(&mut echo);
            echo.grid_points = Some(args.grid_points);
            echo.steps = Some(args.steps);
            let body = commands::verify(&args.drive.family()?, args.grid_points, args.steps)?;
            ("verify", ResultsBody::Verify(body))
        }
        CommandKind::Phases(args) => {
            args.drive.echo_into(&mut echo);
            echo.grid_points = Some(args.grid_points);
            let body = commands::phases(&args.drive.family()?, args.grid_points)?;
            ("phases", ResultsBody::Phases(body))
        }
        CommandKind::Gate(args) => {
            args.drive.echo_into(&mut echo);
            echo.grid_points = Some(args.grid_points);
            echo.cycles = Some(args.cycles);
            let body = commands::gate(&args.drive.family()?, args.grid_points, args.cycles)?;
            ("gate", ResultsBody::Gate(body))
        }
        CommandKind::Solve(args) => {
            echo.omega = args.omega;
            echo.omega1 = args.omega1;
            echo.k = Some(args.k);
            echo.gamma = args.gamma;
            let body = commands::solve(args)?;
            ("solve", ResultsBody::Solve(body))
        }
        CommandKind::ControlledU(args) => {
            echo.omega = args.omega;
            echo.coupling = Some(args.coupling);
            echo.omega0 = Some(args.omega0);
            echo.max_cycles = Some(args.max_cycles);
            let body = commands::controlled_u(args)?;
            ("controlled-u", ResultsBody::ControlledU(body))
        }
        CommandKind::Sweep(_) => unreachable!("sweep handled above"),
    };

    let (timestamp_unix_s, runtime_ms) = if cli.no_timestamp {
        (None, None)
    } else {
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        (Some(stamp), Some(started.elapsed().as_secs_f64() * 1e3))
    };

    let report = Report {
        schema_version: SCHEMA_VERSION.into(),
        command: command_name.into(),
        config: echo,
        results,
        timestamp_unix_s,
        runtime_ms,
    };
    Ok(report.render_json())
}
