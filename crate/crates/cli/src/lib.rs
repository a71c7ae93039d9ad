//! Command line front end: scenario files, command dispatch and output.

pub mod error;
pub mod output;
pub mod run;
pub mod scenario;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};

pub use error::CliError;
pub use output::{Format, Report};
pub use run::{run_command, Command, Flags};
pub use scenario::{load_scenario, parse_scenario, Scenario};

#[derive(Debug, Parser)]
#[command(
    name = "germlab",
    version,
    about = "Exact intersection multiplicities of orbits of formal germs"
)]
pub struct Args {
    /// Command to run. May be omitted when --query names one.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Scenario JSON file.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Group word, word template in `n`, or comma list of generators.
    #[arg(long, allow_hyphen_values = true)]
    pub word: Option<String>,
    /// Inclusive range `a..b`.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    /// Variety pulled back along the orbit.
    #[arg(long)]
    pub pull: Option<String>,
    /// Fixed varieties, comma separated.
    #[arg(long)]
    pub against: Option<String>,
    /// Ideal sum `A+B+…` for codim.
    #[arg(long)]
    pub ideal: Option<String>,
    /// Truncation cap; overrides the scenario.
    #[arg(long)]
    pub cap: Option<u32>,
    /// `csv` or `json`; plain text when absent.
    #[arg(long)]
    pub format: Option<String>,
    /// Flow time, or a comma-separated grid of rational times.
    #[arg(long, allow_hyphen_values = true)]
    pub time: Option<String>,
    /// Jet order for commute, bracket, flow, qp and exceptional.
    #[arg(long)]
    pub order: Option<u32>,
    /// Named query from the scenario supplying defaults for unset flags.
    #[arg(long)]
    pub query: Option<String>,
}

fn parse_format(s: &str) -> Result<Format, CliError> {
    Format::parse(s)
        .ok_or_else(|| CliError::Input(format!("unknown format \"{s}\" (expected csv or json)")))
}

/// Runs a parsed invocation and returns the rendered output.
pub fn execute(args: &Args) -> Result<String, CliError> {
    let scenario = load_scenario(&args.scenario)?;
    execute_on(&scenario, args)
}

/// Like [`execute`] with an already loaded scenario.
pub fn execute_on(scenario: &Scenario, args: &Args) -> Result<String, CliError> {
    let mut flags = Flags {
        word: args.word.clone(),
        range: args.range.clone(),
        pull: args.pull.clone(),
        against: args.against.clone(),
        ideal: args.ideal.clone(),
        cap: args.cap,
        time: args.time.clone(),
        order: args.order,
    };
    let mut format = args.format.clone();
    let mut command = args.command;
    if let Some(name) = &args.query {
        let q = scenario.query(name)?;
        if let Some(c) = &q.command {
            let qc = Command::from_str(c, false).map_err(|_| {
                CliError::Input(format!("query \"{name}\" has unknown command \"{c}\""))
            })?;
            match command {
                Some(given) if given != qc => {
                    return Err(CliError::Input(format!(
                        "query \"{name}\" is for {}, not {}",
                        qc.name(),
                        given.name()
                    )))
                }
                _ => command = Some(qc),
            }
        }
        flags.word = flags.word.or_else(|| q.word.clone());
        flags.range = flags.range.or_else(|| q.range.clone());
        flags.pull = flags.pull.or_else(|| q.pull.clone());
        flags.against = flags
            .against
            .or_else(|| q.against.as_ref().map(|l| l.joined(",")));
        flags.ideal = flags
            .ideal
            .or_else(|| q.ideal.as_ref().map(|l| l.joined("+")));
        flags.cap = flags.cap.or(q.cap);
        flags.time = flags.time.or_else(|| q.time.clone());
        flags.order = flags.order.or(q.order);
        format = format.or_else(|| q.format.clone());
    }
    let command = command.ok_or_else(|| CliError::Input("no command given".into()))?;
    let format = match format {
        Some(f) => parse_format(&f)?,
        None => Format::Text,
    };
    let report = run_command(scenario, command, &flags)?;
    Ok(report.render(format))
}
