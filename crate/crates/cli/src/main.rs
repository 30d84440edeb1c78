mod commands;
mod config;

use clap::{Parser, Subcommand};
use config::Options;
use std::process::ExitCode;

/// Spectra, secular polynomials and nodal data of quantum graphs.
#[derive(Debug, Parser)]
#[command(name = "qgraph", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    options: Options,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Parse and validate a graph description
    Validate,
    /// Eigenvalues with 0 < k <= k-max and their multiplicities
    Spectrum,
    /// Genericity, nodal counts and parity of the low-lying levels
    Generic,
    /// Exact secular polynomial as a sorted term list
    SecularPoly,
    /// The secular function p(k) on a uniform grid
    SampleSecular,
    /// Samples of a normalized real eigenfunction
    Eigenfunction,
    /// Nodal domains of the eigenfunction of a simple level
    Nodal,
    /// Derivative of a simple eigenvalue with respect to edge lengths
    Hadamard,
    /// Truncated M-function at a vertex
    Mfunction,
    /// Finite-difference eigenvalues next to the secular ones
    Oracle,
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn io(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 64, message: message.into() }
    }
}

impl From<qgraph::Error> for Failure {
    fn from(e: qgraph::Error) -> Self {
        use qgraph::Error::*;
        let code = match &e {
            Syntax { .. } | DuplicateEndpoint(_) | Io(_) => 1,
            InvalidGraph(_) => 2,
            SizeLimit { .. } => 4,
            InvalidInput(_) | OutOfRange(_) => 64,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    let result = cli
        .options
        .resolve()
        .and_then(|opts| commands::run(cli.command, &opts));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qgraph: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
