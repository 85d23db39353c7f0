mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use commands::Command;
use config::{GlobalArgs, RunConfig};

/// Explicit Selberg upper-sieve bounds for primes represented by polynomials.
#[derive(Parser, Debug)]
#[command(name = "explicit-sieve", version, propagate_version = true)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONDITION: u8 = 2;
pub const EXIT_INDETERMINATE: u8 = 3;
pub const EXIT_INPUT: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_INPUT, message: msg.into() }
    }

    pub fn condition(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_CONDITION, message: msg.into() }
    }

    /// Library error tagged with the module it came from.
    pub fn lib(module: &str, e: explicit_sieve::Error) -> Self {
        use explicit_sieve::Error as E;
        let code = match &e {
            E::Parse { .. }
            | E::ZeroPolynomial
            | E::NotSquarefree
            | E::Invalid(_)
            | E::NotSquarefreeModulus(_)
            | E::Limit(_)
            | E::FixedDivisor(_) => EXIT_INPUT,
            E::Indeterminate(_) => EXIT_INDETERMINATE,
            E::Precondition(_) | E::NoAdmissibleX(_) | E::Num(_) => EXIT_CONDITION,
        };
        CliError { code, message: format!("{module}: {e}") }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    let result = RunConfig::resolve(&cli.global).and_then(|cfg| commands::run(&cli.command, &cfg));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
