use std::path::Path;

use phasemu::epr::EprError;
use phasemu::selector::SelectorError;
use phasemu::spectral::SpectralError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Model(String),
    #[error("{0}")]
    Io(String),
    #[error("statistical battery failed")]
    BatteryFailed,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::BatteryFailed => 1,
            CliError::Usage(_) => 2,
            CliError::Model(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl From<EprError> for CliError {
    fn from(e: EprError) -> Self {
        match e {
            EprError::BadAngles(..) | EprError::NoSamples => CliError::Usage(e.to_string()),
            _ => CliError::Model(e.to_string()),
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        CliError::Model(e.to_string())
    }
}

impl From<SelectorError> for CliError {
    fn from(e: SelectorError) -> Self {
        CliError::Model(e.to_string())
    }
}

pub type CliResult = Result<(), CliError>;

/// Writes `contents` to `path`, or to stdout when no path is given.
pub fn write_output(path: Option<&Path>, contents: &str) -> CliResult {
    match path {
        Some(p) => std::fs::write(p, contents).map_err(|e| CliError::io(p, e)),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}
