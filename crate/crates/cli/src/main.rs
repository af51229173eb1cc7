//! `xpm` — scenario-driven fidelity curves, conditional phases and oracle
//! cross-checks for cross-phase-modulated photon pulses.
//!
//! Exit codes: 0 on full success; 1 when any requested point or asserted
//! check fails numerically; 2 for usage, configuration or applicability
//! errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use xpm_cli::runner::{
    self, CondSummary, CurveOutput, OracleKind, ReproReport,
};
use xpm_cli::scenario::{parse_scenario, Scenario};
use xpm_core::error::Error;

#[derive(Parser)]
#[command(
    name = "xpm",
    version,
    about = "Output-state overlap, fidelity curves and conditional phases for \
             cross-phase modulation between photon pulses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the θ grid and write the fidelity curve as CSV
    Curve(ScenarioArgs),
    /// Locate the conditional phase θ_c = argmax F(θ) and print a summary line
    Condphase(ScenarioArgs),
    /// Cross-check the engine against an independent slow oracle
    OracleCheck {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Which oracle to compare against
        #[arg(long, value_enum)]
        oracle: OracleArg,
        /// Bin count of the oracle's midpoint discretization
        #[arg(long, default_value_t = 4096)]
        resolution: usize,
    },
    /// Run built-in reference scenario 1 (counter-propagating sweep) and
    /// assert its documented values
    ReproduceFig1 {
        /// Write the curve CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run built-in reference scenario 2 (co-propagating spike) and assert
    /// its documented values
    ReproduceFig2 {
        /// Write the curve CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario config file (flat `key = value` document)
    #[arg(long)]
    config: PathBuf,
    /// Write curve CSV / summary here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's θ-grid point count
    #[arg(long)]
    theta_steps: Option<usize>,
    /// Override the config's conditional-phase bracket tolerance
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Discrete,
    Series,
}

impl From<OracleArg> for OracleKind {
    fn from(arg: OracleArg) -> Self {
        match arg {
            OracleArg::Discrete => OracleKind::Discrete,
            OracleArg::Series => OracleKind::Series,
        }
    }
}

const EXIT_POINT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::Parse { .. } | Error::UnsupportedOperation(_) | Error::InvalidParameter(_) => {
            EXIT_USAGE
        }
        Error::InvariantViolation(_) | Error::NumericFailure { .. } => EXIT_POINT_FAILURE,
    }
}

fn fail(error: &Error) -> ExitCode {
    eprintln!("error: {error}");
    ExitCode::from(exit_code_for(error))
}

fn load_scenario(args: &ScenarioArgs) -> Result<Scenario, ExitCode> {
    let text = std::fs::read_to_string(&args.config).map_err(|io_error| {
        eprintln!("error: cannot read {}: {io_error}", args.config.display());
        ExitCode::from(EXIT_USAGE)
    })?;
    let mut scenario = parse_scenario(&text).map_err(|parse_error| fail(&parse_error))?;
    if let Some(steps) = args.theta_steps {
        if steps == 0 {
            eprintln!("error: --theta-steps must be ≥ 1");
            return Err(ExitCode::from(EXIT_USAGE));
        }
        scenario.theta_steps = steps;
    }
    if let Some(tol) = args.tol {
        if !(tol > 0.0) || !tol.is_finite() {
            eprintln!("error: --tol must be positive and finite");
            return Err(ExitCode::from(EXIT_USAGE));
        }
        scenario.tol = tol;
    }
    Ok(scenario)
}

/// --out flag wins over the config's `out` key; default is stdout.
fn output_target(args_out: &Option<PathBuf>, scenario_out: &Option<String>) -> Option<PathBuf> {
    args_out
        .clone()
        .or_else(|| scenario_out.as_ref().map(PathBuf::from))
}

fn emit(text: &str, target: &Option<PathBuf>) -> Result<(), ExitCode> {
    match target {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), ExitCode> {
    std::fs::write(path, text).map_err(|io_error| {
        eprintln!("error: cannot write {}: {io_error}", path.display());
        ExitCode::from(EXIT_POINT_FAILURE)
    })
}

fn run_curve_command(args: &ScenarioArgs) -> Result<ExitCode, ExitCode> {
    let scenario = load_scenario(args)?;
    let CurveOutput { csv, failed_points } =
        runner::run_curve(&scenario).map_err(|error| fail(&error))?;
    emit(&csv, &output_target(&args.out, &scenario.out))?;
    if failed_points > 0 {
        eprintln!("error: {failed_points} point(s) failed; failed rows are flagged in the CSV");
        return Ok(ExitCode::from(EXIT_POINT_FAILURE));
    }
    Ok(ExitCode::SUCCESS)
}

fn run_condphase_command(args: &ScenarioArgs) -> Result<ExitCode, ExitCode> {
    let scenario = load_scenario(args)?;
    let summary = runner::run_condphase(&scenario).map_err(|error| fail(&error))?;
    let line = format!("{}\n", summary.line());
    match output_target(&args.out, &scenario.out) {
        Some(path) => write_file(&path, &line)?,
        None => print!("{line}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_oracle_command(
    args: &ScenarioArgs,
    oracle: OracleArg,
    resolution: usize,
) -> Result<ExitCode, ExitCode> {
    let scenario = load_scenario(args)?;
    let report = runner::run_oracle_check(&scenario, oracle.into(), resolution)
        .map_err(|error| fail(&error))?;
    let line = format!("{}\n", report.line());
    match output_target(&args.out, &scenario.out) {
        Some(path) => write_file(&path, &line)?,
        None => print!("{line}"),
    }
    Ok(if report.pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_POINT_FAILURE)
    })
}

fn run_repro_command(
    report: Result<ReproReport, Error>,
    out: &Option<PathBuf>,
) -> Result<ExitCode, ExitCode> {
    let report = report.map_err(|error| fail(&error))?;
    emit(&report.curve.csv, out)?;
    print_repro_summary(&report.summary, &report);
    Ok(if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_POINT_FAILURE)
    })
}

fn print_repro_summary(summary: &CondSummary, report: &ReproReport) {
    eprintln!("{}", summary.line());
    for check in &report.checks {
        let verdict = if check.pass { "PASS" } else { "FAIL" };
        eprintln!("check {}: {verdict} ({})", check.label, check.detail);
    }
    if report.curve.failed_points > 0 {
        eprintln!("check curve points: FAIL ({} failed rows)", report.curve.failed_points);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Curve(args) => run_curve_command(args),
        Command::Condphase(args) => run_condphase_command(args),
        Command::OracleCheck {
            scenario,
            oracle,
            resolution,
        } => run_oracle_command(scenario, *oracle, *resolution),
        Command::ReproduceFig1 { out } => run_repro_command(runner::reproduce_fig1(), out),
        Command::ReproduceFig2 { out } => run_repro_command(runner::reproduce_fig2(), out),
    };
    match outcome {
        Ok(code) => code,
        Err(code) => code,
    }
}
