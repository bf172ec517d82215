//! Reproducibility records written next to every output file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::{Command, GlobalArgs, TolProfile};
use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Subcommand name, e.g. `gaussian` or `sweep dirac`.
    pub command: String,
    /// Complete argument set of the run.
    pub parameters: Command,
    pub seed: u64,
    pub tol_profile: TolProfile,
    pub tool_version: String,
    pub timestamp: String,
    /// SHA-256 of every input file, keyed by the path as given.
    pub inputs: BTreeMap<String, String>,
    /// SHA-256 of the output bytes.
    pub output_sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest_file(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

/// Conventional manifest location for an output file.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

impl RunManifest {
    pub fn new(global: &GlobalArgs, parameters: &Command, inputs: &[PathBuf], output: &[u8]) -> Result<Self, CliError> {
        let inputs = inputs.iter().map(|p| Ok((p.display().to_string(), digest_file(p)?))).collect::<Result<_, CliError>>()?;
        Ok(Self {
            command: command_name(parameters),
            parameters: parameters.clone(),
            seed: global.seed,
            tol_profile: global.tol_profile,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            inputs,
            output_sha256: sha256_hex(output),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input { path: path.to_owned(), message: e.to_string() })
    }

    /// Global options recorded in the manifest, writing to `out`.
    pub fn global(&self, out: Option<PathBuf>) -> GlobalArgs {
        GlobalArgs { seed: self.seed, tol_profile: self.tol_profile, out }
    }

    /// Refuses to replay when an input file changed since the recording.
    pub fn check_inputs(&self) -> Result<(), CliError> {
        for (path, want) in &self.inputs {
            let got = digest_file(Path::new(path))?;
            if &got != want {
                return Err(CliError::Replay(format!("input {path} changed (sha256 {got}, recorded {want})")));
            }
        }
        Ok(())
    }
}

pub fn command_name(c: &Command) -> String {
    use crate::args::SweepDomain;
    match c {
        Command::Measures(_) => "measures".into(),
        Command::Gaussian(_) => "gaussian".into(),
        Command::Integrable(_) => "integrable".into(),
        Command::Dirac(_) => "dirac".into(),
        Command::Cft(_) => "cft".into(),
        Command::Sectors(_) => "sectors".into(),
        Command::Lower(_) => "lower".into(),
        Command::Sweep(s) => match &s.domain {
            Some(SweepDomain::Gaussian(_)) => "sweep gaussian".into(),
            Some(SweepDomain::Integrable(_)) => "sweep integrable".into(),
            Some(SweepDomain::Dirac(_)) => "sweep dirac".into(),
            Some(SweepDomain::Cft(_)) => "sweep cft".into(),
            None => "sweep".into(),
        },
    }
}
