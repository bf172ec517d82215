//! Library side of the `entbound` command: argument grammar, execution,
//! output tables and run manifests.
// `!(x > 0.0)` guards are deliberate: they reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod range;
pub mod table;

use std::io::Write;
use std::path::Path;

use args::{Cli, Command, GlobalArgs, SweepArgs};
use error::CliError;
use manifest::{manifest_path, RunManifest};

/// Process exit status for a completed run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    /// A sweep in which no row succeeded.
    AllRowsFailed,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::AllRowsFailed => 2,
        }
    }
}

pub fn run(cli: Cli) -> Result<Status, CliError> {
    let (global, command) = match &cli.command {
        Command::Sweep(SweepArgs { manifest: Some(_), domain: Some(_) }) => {
            return Err(CliError::Usage("sweep takes either --manifest or a domain, not both".into()))
        }
        Command::Sweep(SweepArgs { manifest: Some(path), .. }) => {
            let m = RunManifest::load(path)?;
            if matches!(&m.parameters, Command::Sweep(SweepArgs { manifest: Some(_), .. })) {
                return Err(CliError::Replay("manifest records another replay".into()));
            }
            m.check_inputs()?;
            (m.global(cli.global.out.clone()), m.parameters)
        }
        _ => (cli.global.clone(), cli.command.clone()),
    };
    let output = commands::execute(&global, &command)?;
    write_output(&global, &command, &output.bytes)?;
    Ok(if output.all_failed { Status::AllRowsFailed } else { Status::Success })
}

fn write_output(global: &GlobalArgs, command: &Command, bytes: &[u8]) -> Result<(), CliError> {
    match &global.out {
        Some(path) => {
            write_file(path, bytes)?;
            let manifest = RunManifest::new(global, command, &commands::input_files(command), bytes)?;
            let mut text = serde_json::to_vec_pretty(&manifest)?;
            text.push(b'\n');
            write_file(&manifest_path(path), &text)
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}
