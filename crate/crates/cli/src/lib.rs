//! Command-line front end: problem documents in, JSON results out.

pub mod commands;
pub mod error;
pub mod problem;

use std::io::Read;

use clap::{Parser, ValueEnum};
use serde_json::Value;

pub use commands::{Command, Output};
pub use error::CliError;
pub use problem::{Characteristic, Problem, ProblemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CommandArg {
    Classify,
    Decompose,
    Residues,
    Boundary,
    WittEqual,
    Selftest,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Classify => Command::Classify,
            CommandArg::Decompose => Command::Decompose,
            CommandArg::Residues => Command::Residues,
            CommandArg::Boundary => Command::Boundary,
            CommandArg::WittEqual => Command::WittEqual,
            CommandArg::Selftest => Command::Selftest,
        }
    }
}

/// Larmour decomposition and residue maps for eps-hermitian forms over
/// quaternion division algebras over k((t)).
#[derive(Debug, Parser)]
#[command(name = "larmour", version)]
pub struct Args {
    pub command: CommandArg,
    /// Problem document (JSON); read from stdin when absent.
    #[arg(long)]
    pub input: Option<String>,
    /// Seed for selftest.
    #[arg(long, default_value_t = larmour_core::selftest::DEFAULT_SEED)]
    pub seed: u64,
    /// Override the series precision of the problem.
    #[arg(long)]
    pub precision: Option<i64>,
    /// Override the residue field: a prime or Q.
    #[arg(long = "p")]
    pub p: Option<String>,
    /// Selftest with reduced trial counts.
    #[arg(long)]
    pub quick: bool,
}

fn read_document(args: &Args, stdin: impl Read) -> Result<Value, CliError> {
    let mut text = String::new();
    match &args.input {
        Some(path) => {
            text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?
        }
        None => {
            let mut stdin = stdin;
            stdin
                .read_to_string(&mut text)
                .map_err(|source| CliError::Io {
                    path: "<stdin>".into(),
                    source,
                })?;
        }
    }
    serde_json::from_str(&text).map_err(CliError::from_json)
}

fn build(spec: ProblemSpec, args: &Args) -> Result<Problem, CliError> {
    let p = args
        .p
        .as_deref()
        .map(Characteristic::from_arg)
        .transpose()?;
    spec.with_overrides(p.as_ref(), args.precision).build()
}

pub fn execute(args: &Args, stdin: impl Read) -> Result<Output, CliError> {
    let cmd = Command::from(args.command);
    if cmd == Command::Selftest {
        return Ok(commands::selftest_cmd(args.seed, args.quick));
    }
    let doc = read_document(args, stdin)?;
    if cmd == Command::WittEqual {
        let (l, r) = commands::split_pair(doc)?;
        return commands::witt_equal_cmd(&build(l, args)?, &build(r, args)?);
    }
    let problem = build(ProblemSpec::from_value(doc)?, args)?;
    match cmd {
        Command::Classify => commands::classify(&problem),
        Command::Decompose => commands::decompose(&problem),
        Command::Residues => commands::residues(&problem),
        Command::Boundary => commands::boundary(&problem),
        Command::WittEqual | Command::Selftest => unreachable!("handled above"),
    }
}
