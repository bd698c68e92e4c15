use std::fmt;
use std::process::ExitCode;

use linmodal::checker::CheckError;
use linmodal::extraction::ExtractionError;
use linmodal::formula::FormulaError;
use linmodal::kripke::KripkeError;
use linmodal::reductions::ReductionError;
use linmodal::tiling::TilingError;

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_FALSE: u8 = 3;
pub const EXIT_GUARD: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid input.
    Input(String),
    /// A search or evaluation bound was exceeded.
    Guard(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Guard(_) => EXIT_GUARD,
        })
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Guard(m) => write!(f, "guard exceeded: {m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<CheckError> for CliError {
    fn from(e: CheckError) -> Self {
        match e {
            CheckError::StepLimit(_) | CheckError::SearchGuard(_) => CliError::Guard(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<TilingError> for CliError {
    fn from(e: TilingError) -> Self {
        match e {
            TilingError::GuardExceeded { .. } => CliError::Guard(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ExtractionError> for CliError {
    fn from(e: ExtractionError) -> Self {
        match e {
            ExtractionError::Check(c) => c.into(),
            ExtractionError::Tiling(t) => t.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

macro_rules! input_error {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Input(e.to_string())
            }
        })*
    };
}

input_error!(KripkeError, ReductionError, FormulaError, serde_json::Error);
