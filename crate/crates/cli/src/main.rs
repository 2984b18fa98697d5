//! `herd`: analysis, synthesis and compliance checking for leaky-coaxial
//! low-pass filters.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod render;

use args::{Cli, Command};

/// Process exit status for each failure class.
#[derive(Debug)]
pub enum Failure {
    /// A compliance claim did not hold.
    Compliance,
    /// Bad input: arguments, files, parse errors.
    Input(anyhow::Error),
    /// Synthesis could not meet the targets.
    Infeasible(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Compliance => 1,
            Failure::Input(_) => 2,
            Failure::Infeasible(_) => 3,
        }
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Modes(a) => commands::modes(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Sections(a) => commands::sections(a),
        Command::Synthesize(a) => commands::synthesize(a),
        Command::Compare(a) => commands::compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Compliance => eprintln!("herd: compliance check failed"),
                Failure::Input(e) => eprintln!("herd: error: {e:#}"),
                Failure::Infeasible(e) => eprintln!("herd: {e:#}"),
            }
            ExitCode::from(f.code())
        }
    }
}
