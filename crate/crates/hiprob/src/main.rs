//! Command-line front end: parse a model file, dispatch to the engine,
//! render the report.
//!
//! Exit codes: 0 success, 2 parse error, 3 validation error, 4 precondition
//! error, 5 internal equivalence failure.

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hiprob::commands::{self, CliError, DecideMode, ErrorReport};
use hiprob::model::Model;
use hiprob::selftest;

#[derive(Parser)]
#[command(
    name = "hiprob",
    version,
    about = "Second-order probability engine over finite outcome spaces",
    long_about = "Represents candidate first-order distributions plus a second-order \
                  distribution over them, flattens the pair into a joint distribution, \
                  and reports decisions, belief updates, and coherence checks that come \
                  out the same under every representation."
)]
struct Cli {
    /// Emit the machine-readable JSON report instead of the human table.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file and report the predictive distribution.
    Validate {
        /// Path to the model file, or `-` for standard input.
        model: String,
    },
    /// Expected utility per act under one (or all) of the three routes.
    Decide {
        model: String,
        /// Evaluation route: the predictive distribution, the hierarchy,
        /// the flattened joint, or all three with an agreement check.
        #[arg(long, value_enum, default_value_t = ModeArg::All)]
        mode: ModeArg,
    },
    /// Lay the hierarchy out as a joint grid with both marginals.
    Flatten { model: String },
    /// Shift a named event to a new probability, holding conditionals fixed.
    Jeffrey {
        model: String,
        /// Name of the event to shift (from the model's [events] table).
        #[arg(long)]
        event: String,
        /// New probability for the event, strictly between 0 and 1.
        #[arg(long)]
        to: f64,
    },
    /// Measure how much learning "P(a) = x" changes belief in b beyond a.
    #[command(name = "check-c3")]
    CheckC3 {
        model: String,
        /// Conditioning event name.
        #[arg(long)]
        a: String,
        /// Queried event name.
        #[arg(long)]
        b: String,
        /// Candidate probability for a that defines the row event.
        #[arg(long)]
        x: f64,
    },
    /// Update the hypotheses on observed outcomes and price the bet.
    Sequence {
        model: String,
        /// Comma-separated outcome labels; defaults to the model's
        /// `observations` list.
        #[arg(long, value_delimiter = ',')]
        observe: Option<Vec<String>>,
        /// Outcome label to bet on at even money.
        #[arg(long)]
        bet: Option<String>,
        /// Stake per unit bet.
        #[arg(long, default_value_t = 1.0)]
        stake: f64,
    },
    /// Run the seeded randomized self-check suites.
    Selftest {
        #[arg(long, default_value_t = selftest::DEFAULT_SEED)]
        seed: u64,
        /// Instances per suite.
        #[arg(long, default_value_t = 1000)]
        cases: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    First,
    Second,
    Joint,
    All,
}

impl From<ModeArg> for DecideMode {
    fn from(mode: ModeArg) -> DecideMode {
        match mode {
            ModeArg::First => DecideMode::First,
            ModeArg::Second => DecideMode::Second,
            ModeArg::Joint => DecideMode::Joint,
            ModeArg::All => DecideMode::All,
        }
    }
}

fn read_model(path: &str) -> Result<Model, CliError> {
    let text = if path == "-" {
        let mut buffer = String::new();
        std::io::stdin()
            .read_to_string(&mut buffer)
            .map_err(|err| CliError::Parse(format!("cannot read standard input: {err}")))?;
        buffer
    } else {
        std::fs::read_to_string(path)
            .map_err(|err| CliError::Parse(format!("cannot read `{path}`: {err}")))?
    };
    Ok(Model::from_toml(&text)?)
}

fn emit<R: Serialize>(report: &R, human: String, json: bool) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(report).expect("reports always serialize")
        );
    } else {
        print!("{human}");
    }
}

fn run(command: &Command, json: bool) -> Result<i32, CliError> {
    match command {
        Command::Validate { model } => {
            let report = commands::cmd_validate(&read_model(model)?)?;
            emit(&report, report.human(), json);
            Ok(report.exit_code)
        }
        Command::Decide { model, mode } => {
            let report = commands::cmd_decide(&read_model(model)?, (*mode).into())?;
            emit(&report, report.human(), json);
            Ok(report.exit_code)
        }
        Command::Flatten { model } => {
            let report = commands::cmd_flatten(&read_model(model)?)?;
            emit(&report, report.human(), json);
            Ok(report.exit_code)
        }
        Command::Jeffrey { model, event, to } => {
            let report = commands::cmd_jeffrey(&read_model(model)?, event, *to)?;
            emit(&report, report.human(), json);
            Ok(report.exit_code)
        }
        Command::CheckC3 { model, a, b, x } => {
            let report = commands::cmd_check_c3(&read_model(model)?, a, b, *x)?;
            emit(&report, report.human(), json);
            Ok(report.exit_code)
        }
        Command::Sequence {
            model,
            observe,
            bet,
            stake,
        } => {
            let report = commands::cmd_sequence(
                &read_model(model)?,
                observe.as_deref(),
                bet.as_deref().map(|target| (target, *stake)),
            )?;
            emit(&report, report.human(), json);
            Ok(report.exit_code)
        }
        Command::Selftest { seed, cases } => {
            let report = commands::cmd_selftest(*seed, *cases);
            emit(&report, report.human(), json);
            Ok(report.exit_code)
        }
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Validate { .. } => "validate",
        Command::Decide { .. } => "decide",
        Command::Flatten { .. } => "flatten",
        Command::Jeffrey { .. } => "jeffrey",
        Command::CheckC3 { .. } => "check-c3",
        Command::Sequence { .. } => "sequence",
        Command::Selftest { .. } => "selftest",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command, cli.json) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            if cli.json {
                let report = ErrorReport::new(command_name(&cli.command), &err);
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("reports always serialize")
                );
            }
            eprintln!("hiprob: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
