use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qsdc_sim::harness::{self, MessageSpec, ReportFormat, Scenario};
use qsdc_sim::{selftest, Error};

#[derive(Parser)]
#[command(
    name = "qsdc-sim",
    version,
    about = "Supervised entanglement sharing and teleportation-based QSDC, simulated and attacked"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named scenario and emit its report.
    Run(RunArgs),
    /// List the built-in scenarios.
    ListScenarios,
    /// Run the engine invariant suite.
    SelfTest,
}

#[derive(Args)]
struct RunArgs {
    /// Built-in scenario name (see list-scenarios).
    #[arg(long)]
    scenario: String,

    /// Number of seeded trials.
    #[arg(long, default_value_t = 1)]
    trials: u64,

    /// Master seed; trial streams derive from it.
    #[arg(long)]
    seed: u64,

    /// Fixed message bits, e.g. 010110.
    #[arg(long, conflicts_with = "msg_len")]
    message: Option<String>,

    /// Random message of this length each trial.
    #[arg(long = "msg-len")]
    msg_len: Option<usize>,

    /// Fraction of triples sacrificed to detecting mode, in (0, 1).
    #[arg(long = "check-fraction")]
    check_fraction: Option<f64>,

    /// Override the derived number of triples per trial.
    #[arg(long = "seq-len")]
    seq_len: Option<usize>,

    /// Report format: json (canonical) or csv.
    #[arg(long, default_value = "json")]
    format: String,

    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit code for scenario validation problems, per the CLI contract.
const EXIT_BAD_SCENARIO: u8 = 2;

fn scenario_from_args(args: &RunArgs) -> Result<Scenario, Error> {
    let mut scenario = Scenario::builtin(&args.scenario, args.trials, args.seed)?;
    if let Some(bits) = &args.message {
        harness::parse_bits(bits)?;
        scenario.message = MessageSpec::Bits(bits.clone());
    } else if let Some(len) = args.msg_len {
        scenario.message = MessageSpec::RandomLen(len);
    }
    if let Some(fraction) = args.check_fraction {
        scenario.check_fraction = fraction;
    }
    scenario.sequence_length = args.seq_len;
    scenario.validate()?;
    Ok(scenario)
}

fn run(args: &RunArgs) -> anyhow::Result<()> {
    let scenario = scenario_from_args(args)?;
    let format: ReportFormat = args.format.parse()?;
    let report = harness::run_scenario(&scenario)?;
    let bytes = harness::emit_report(&report, format)?;
    match &args.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(())
}

fn list_scenarios() {
    for (name, description) in harness::list_scenarios() {
        println!("{name:<12} {description}");
    }
}

fn self_test() -> bool {
    let mut all_passed = true;
    for check in selftest::run_all() {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{status} {:<24} {}", check.name, check.detail);
        all_passed &= check.passed;
    }
    all_passed
}

fn is_scenario_error(err: &anyhow::Error) -> bool {
    matches!(
        err.downcast_ref::<Error>(),
        Some(
            Error::InvalidScenario(_)
                | Error::UnknownScenario(_)
                | Error::UnknownFormat(_)
                | Error::InvalidMessage(_)
                | Error::InvalidConfig(_)
        )
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match run(&args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(err) => {
                eprintln!("error: {err}");
                if is_scenario_error(&err) {
                    ExitCode::from(EXIT_BAD_SCENARIO)
                } else {
                    ExitCode::FAILURE
                }
            }
        },
        Command::ListScenarios => {
            list_scenarios();
            ExitCode::SUCCESS
        }
        Command::SelfTest => {
            if self_test() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
